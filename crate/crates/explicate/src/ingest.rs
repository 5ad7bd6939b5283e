//! CSV dataset loading and the canonical `(text, label, source)` file.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use explicate_core::dataset::{dedup_key, detect_columns, normalize_label, DatasetRecord, DetectMethod, DETECT_SAMPLE_ROWS};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Explicit column names that bypass detection. Either may be set alone.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnOverrides {
    pub text: Option<String>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileSummary {
    pub path: PathBuf,
    pub text_column: String,
    pub label_column: String,
    /// `None` when both columns came from overrides.
    pub method: Option<DetectMethod>,
    pub confidence: f64,
    pub rows: usize,
    pub skipped_unknown_label: usize,
    pub skipped_empty_text: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceCount {
    pub source: String,
    pub legitimate: usize,
    pub phishing: usize,
    pub duplicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadedDataset {
    pub records: Vec<DatasetRecord>,
    pub files: Vec<FileSummary>,
    /// Kept records per source, in order of first appearance.
    pub sources: Vec<SourceCount>,
    pub duplicates_removed: usize,
}

impl LoadedDataset {
    pub fn skipped(&self) -> usize {
        self.files.iter().map(|f| f.skipped_unknown_label + f.skipped_empty_text).sum()
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let phishing = self.records.iter().filter(|r| r.label == 1).count();
        (self.records.len() - phishing, phishing)
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn lossy(field: &[u8]) -> String {
    String::from_utf8_lossy(field).into_owned()
}

fn read_table(path: &Path) -> Result<Table> {
    let bytes = std::fs::read(path).map_err(|source| Error::FileUnreadable { path: path.to_path_buf(), source })?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(bytes.as_slice());
    let mut header: Vec<String> = reader.byte_headers()?.iter().map(lossy).collect();
    if let Some(first) = header.first_mut() {
        if let Some(stripped) = first.strip_prefix('\u{feff}') {
            *first = stripped.to_string();
        }
    }
    let mut rows = Vec::new();
    for record in reader.byte_records() {
        rows.push(record?.iter().map(lossy).collect());
    }
    Ok(Table { header, rows })
}

fn column_index(header: &[String], name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .or_else(|| header.iter().position(|h| h.trim().eq_ignore_ascii_case(name.trim())))
        .ok_or_else(|| Error::Config(format!("column {name:?} not found in header {header:?}")))
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "dataset".to_string())
}

/// Loads and merges CSV files: per-file column detection (unless overridden),
/// label normalization, empty-text removal and exact deduplication keeping
/// the first occurrence in path order.
///
/// A column named `source` that is neither the text nor the label column
/// supplies per-row source tags; otherwise the file stem is used.
pub fn load_dataset<P: AsRef<Path>>(paths: &[P], overrides: &ColumnOverrides) -> Result<LoadedDataset> {
    if paths.is_empty() {
        return Err(Error::Usage("no input files given".into()));
    }
    let mut records = Vec::new();
    let mut files = Vec::new();
    let mut sources: Vec<SourceCount> = Vec::new();
    let mut source_index: HashMap<String, usize> = HashMap::new();
    let mut seen = HashSet::new();
    let mut duplicates_removed = 0;

    for path in paths {
        let path = path.as_ref();
        let table = read_table(path).map_err(|e| match e {
            e @ Error::FileUnreadable { .. } => e,
            e => Error::in_file(path, e),
        })?;
        let (text_col, label_col, method, confidence) =
            resolve_columns(&table, overrides).map_err(|e| Error::in_file(path, e))?;
        let source_col = table
            .header
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case("source"))
            .filter(|&i| i != text_col && i != label_col);
        let stem = file_stem(path);
        let mut summary = FileSummary {
            path: path.to_path_buf(),
            text_column: table.header[text_col].clone(),
            label_column: table.header[label_col].clone(),
            method,
            confidence,
            rows: table.rows.len(),
            skipped_unknown_label: 0,
            skipped_empty_text: 0,
        };
        for row in &table.rows {
            let cell = |i: usize| row.get(i).map_or("", String::as_str);
            let Ok(label) = normalize_label(cell(label_col)) else {
                summary.skipped_unknown_label += 1;
                continue;
            };
            let text = cell(text_col);
            if text.trim().is_empty() {
                summary.skipped_empty_text += 1;
                continue;
            }
            let source = match source_col.map(cell).map(str::trim) {
                Some(s) if !s.is_empty() => s.to_string(),
                _ => stem.clone(),
            };
            let slot = *source_index.entry(source.clone()).or_insert_with(|| {
                sources.push(SourceCount { source: source.clone(), ..SourceCount::default() });
                sources.len() - 1
            });
            if !seen.insert(dedup_key(text)) {
                sources[slot].duplicates += 1;
                duplicates_removed += 1;
                continue;
            }
            if label == 1 {
                sources[slot].phishing += 1;
            } else {
                sources[slot].legitimate += 1;
            }
            records.push(DatasetRecord { text: text.to_string(), label, source });
        }
        files.push(summary);
    }
    Ok(LoadedDataset { records, files, sources, duplicates_removed })
}

fn resolve_columns(table: &Table, overrides: &ColumnOverrides) -> Result<(usize, usize, Option<DetectMethod>, f64)> {
    if table.header.is_empty() {
        return Err(Error::Config("csv file has no header row".into()));
    }
    if let (Some(t), Some(l)) = (&overrides.text, &overrides.label) {
        let (t, l) = (column_index(&table.header, t)?, column_index(&table.header, l)?);
        if t == l {
            return Err(Error::Config("text and label overrides name the same column".into()));
        }
        return Ok((t, l, None, 1.0));
    }
    let sample = &table.rows[..table.rows.len().min(DETECT_SAMPLE_ROWS)];
    let guess = detect_columns(&table.header, sample)?;
    let mut text = column_index(&table.header, &guess.text_column)?;
    let mut label = column_index(&table.header, &guess.label_column)?;
    if let Some(t) = &overrides.text {
        text = column_index(&table.header, t)?;
    }
    if let Some(l) = &overrides.label {
        label = column_index(&table.header, l)?;
    }
    if text == label {
        return Err(Error::Config("text and label resolve to the same column; pass both overrides".into()));
    }
    Ok((text, label, Some(guess.method), guess.confidence))
}

/// Writes the canonical dataset CSV with header `text,label,source`.
pub fn write_dataset(path: &Path, records: &[DatasetRecord]) -> Result<()> {
    let unwritable = |source| Error::FileUnwritable { path: path.to_path_buf(), source };
    let file = std::fs::File::create(path).map_err(unwritable)?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    w.write_record(["text", "label", "source"])?;
    for r in records {
        w.write_record([r.text.as_str(), if r.label == 1 { "1" } else { "0" }, r.source.as_str()])?;
    }
    w.flush().map_err(unwritable)?;
    Ok(())
}

/// Table-style summary lines: one row per source plus a total.
pub fn format_source_table(data: &LoadedDataset) -> String {
    let width = data.sources.iter().map(|s| s.source.len()).max().unwrap_or(0).max("source".len());
    let mut out = format!("{:<width$}  {:>10}  {:>10}  {:>10}\n", "source", "legitimate", "phishing", "duplicates");
    for s in &data.sources {
        out += &format!("{:<width$}  {:>10}  {:>10}  {:>10}\n", s.source, s.legitimate, s.phishing, s.duplicates);
    }
    let (legit, phish) = data.class_counts();
    out += &format!("{:<width$}  {:>10}  {:>10}  {:>10}\n", "total", legit, phish, data.duplicates_removed);
    out += &format!("skipped rows: {}\n", data.skipped());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn identical_emails_across_files_dedup() {
        let dir = tempfile::tempdir().unwrap();
        let a = write(dir.path(), "a.csv", "body,label\n\"Verify your account now\",phishing\n");
        let b = write(dir.path(), "b.csv", "text,class\n\"verify  your ACCOUNT now\",1\n");
        let d = load_dataset(&[a, b], &ColumnOverrides::default()).unwrap();
        assert_eq!(d.records.len(), 1);
        assert_eq!(d.duplicates_removed, 1);
        assert_eq!(d.sources[1].duplicates, 1);
        assert_eq!(d.records[0].source, "a");
    }

    #[test]
    fn unknown_labels_are_counted_and_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "x.csv", "text,label\nhello there,ham\nwin money,spam\nwho knows,maybe\n");
        let d = load_dataset(&[p], &ColumnOverrides::default()).unwrap();
        assert_eq!(d.records.len(), 2);
        assert_eq!(d.skipped(), 1);
        assert_eq!(d.files[0].skipped_unknown_label, 1);
    }

    #[test]
    fn invalid_utf8_is_replaced() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(&p, b"text,label\nbad \xff byte here,0\n").unwrap();
        let d = load_dataset(&[p], &ColumnOverrides::default()).unwrap();
        assert_eq!(d.records[0].text, "bad \u{fffd} byte here");
    }

    #[test]
    fn missing_file_is_unreadable() {
        let err = load_dataset(&["/nonexistent/x.csv"], &ColumnOverrides::default()).unwrap_err();
        assert!(matches!(err, Error::FileUnreadable { .. }));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn detection_errors_name_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "nolabel.csv", "text,note\nsome words,whatever\n");
        let err = load_dataset(&[p], &ColumnOverrides::default()).unwrap_err();
        assert!(err.to_string().contains("nolabel.csv"));
        assert_eq!(err.code(), "no_label_column");
    }

    #[test]
    fn overrides_bypass_detection() {
        let dir = tempfile::tempdir().unwrap();
        // both columns hold labels; detection alone cannot tell which one is text
        let p = write(dir.path(), "amb.csv", "subject,spam\n0,1\n1,0\n");
        let o = ColumnOverrides { text: Some("subject".into()), label: Some("spam".into()) };
        let d = load_dataset(&[p], &o).unwrap();
        assert_eq!(d.files[0].method, None);
        assert_eq!(d.records.iter().map(|r| r.label).collect::<Vec<_>>(), vec![1, 0]);
    }
}
