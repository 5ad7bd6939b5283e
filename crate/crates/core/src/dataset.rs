//! Dataset records, column detection, label normalization, deduplication
//! and train/test splitting. CSV reading lives in the std crate.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::textprep::casefold;
use crate::{Error, Result};

/// Rows inspected by [`detect_columns`].
pub const DETECT_SAMPLE_ROWS: usize = 100;
/// Minimum mean length for the length-based text column fallback.
pub const MIN_TEXT_MEAN_CHARS: f64 = 40.0;

const LABEL_NAMES: &[&str] = &["label", "class", "type", "category", "target", "spam", "phishing"];
const TEXT_NAMES: &[&str] = &["text", "body", "message", "content", "email", "subject"];
const LEGITIMATE_LABELS: &[&str] = &["0", "ham", "legit", "legitimate", "safe email", "not phishing", "benign"];
const PHISHING_LABELS: &[&str] = &["1", "spam", "phishing", "phishing email", "fraud", "malicious"];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub text: String,
    /// 0 = legitimate, 1 = phishing.
    pub label: u8,
    pub source: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectMethod {
    NameMatch,
    ValueHeuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnGuess {
    pub text_column: String,
    pub label_column: String,
    pub confidence: f64,
    /// `ValueHeuristic` when either column needed the value-based pass.
    pub method: DetectMethod,
    pub text_method: DetectMethod,
    pub label_method: DetectMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    pub test_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { test_fraction: 0.2, seed: 42, stratified: true }
    }
}

/// Maps a raw label cell to 0 (legitimate) or 1 (phishing).
pub fn normalize_label(raw: &str) -> Result<u8> {
    let key = casefold(raw.trim());
    if LEGITIMATE_LABELS.contains(&key.as_str()) {
        Ok(0)
    } else if PHISHING_LABELS.contains(&key.as_str()) {
        Ok(1)
    } else {
        Err(Error::UnknownLabel(raw.to_string()))
    }
}

fn column_values<'a>(rows: &'a [Vec<String>], col: usize) -> impl Iterator<Item = &'a str> + 'a {
    rows.iter().take(DETECT_SAMPLE_ROWS).map(move |r| r.get(col).map_or("", String::as_str))
}

fn looks_like_label_column(rows: &[Vec<String>], col: usize) -> bool {
    let distinct: BTreeSet<&str> = column_values(rows, col).map(str::trim).filter(|v| !v.is_empty()).collect();
    !distinct.is_empty() && distinct.len() <= 4 && distinct.iter().all(|v| normalize_label(v).is_ok())
}

fn mean_chars(rows: &[Vec<String>], col: usize) -> f64 {
    let sample: Vec<usize> = column_values(rows, col).map(|v| v.chars().count()).collect();
    if sample.is_empty() {
        0.0
    } else {
        sample.iter().sum::<usize>() as f64 / sample.len() as f64
    }
}

/// Guesses the text and label columns from the header and sample rows.
pub fn detect_columns(header: &[String], sample_rows: &[Vec<String>]) -> Result<ColumnGuess> {
    if header.is_empty() {
        return Err(Error::NoTextColumn);
    }
    if sample_rows.is_empty() {
        return Err(Error::TooFewRecords(String::from("column detection needs at least one row")));
    }
    let names: Vec<String> = header.iter().map(|h| casefold(h.trim())).collect();

    let label_by_name = LABEL_NAMES.iter().find_map(|want| names.iter().position(|n| n == want));
    let (label_col, label_method) = match label_by_name {
        Some(c) => (c, DetectMethod::NameMatch),
        None => match (0..header.len()).find(|&c| looks_like_label_column(sample_rows, c)) {
            Some(c) => (c, DetectMethod::ValueHeuristic),
            None => return Err(Error::NoLabelColumn),
        },
    };

    let exact = TEXT_NAMES.iter().find_map(|want| names.iter().enumerate().position(|(i, n)| i != label_col && n == want));
    let partial = || {
        TEXT_NAMES
            .iter()
            .find_map(|want| names.iter().enumerate().position(|(i, n)| i != label_col && n.contains(want)))
    };
    let (text_col, text_method) = match exact.or_else(partial) {
        Some(c) => (c, DetectMethod::NameMatch),
        None => {
            let best = (0..header.len())
                .filter(|&c| c != label_col)
                .map(|c| (c, mean_chars(sample_rows, c)))
                .filter(|&(_, m)| m >= MIN_TEXT_MEAN_CHARS)
                .fold(None, |best: Option<(usize, f64)>, cur| match best {
                    Some(b) if b.1 >= cur.1 => Some(b),
                    _ => Some(cur),
                });
            match best {
                Some((c, _)) => (c, DetectMethod::ValueHeuristic),
                None => return Err(Error::NoTextColumn),
            }
        }
    };

    let heuristics = usize::from(label_method == DetectMethod::ValueHeuristic)
        + usize::from(text_method == DetectMethod::ValueHeuristic);
    Ok(ColumnGuess {
        text_column: header[text_col].clone(),
        label_column: header[label_col].clone(),
        confidence: [1.0, 0.75, 0.5][heuristics],
        method: if heuristics == 0 { DetectMethod::NameMatch } else { DetectMethod::ValueHeuristic },
        text_method,
        label_method,
    })
}

/// Casefolded, whitespace-collapsed text used for exact deduplication.
pub fn dedup_key(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for (i, w) in text.split_whitespace().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&casefold(w));
    }
    out
}

/// Keeps the first record for each dedup key; returns the number removed.
pub fn dedup(records: Vec<DatasetRecord>) -> (Vec<DatasetRecord>, usize) {
    let mut seen = BTreeSet::new();
    let before = records.len();
    let kept: Vec<DatasetRecord> = records.into_iter().filter(|r| seen.insert(dedup_key(&r.text))).collect();
    let removed = before - kept.len();
    (kept, removed)
}

fn test_count(n: usize, fraction: f64) -> usize {
    (libm::round(n as f64 * fraction) as usize).clamp(1, n - 1)
}

/// Deterministic train/test partition. Both halves keep input order.
pub fn split(records: &[DatasetRecord], config: &SplitConfig) -> Result<(Vec<DatasetRecord>, Vec<DatasetRecord>)> {
    if !(config.test_fraction > 0.0 && config.test_fraction < 1.0) {
        return Err(Error::InvalidConfig(String::from("test_fraction must lie in (0, 1)")));
    }
    if records.len() < 2 {
        return Err(Error::TooFewRecords(String::from("splitting needs at least two records")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut in_test = alloc::vec![false; records.len()];
    let groups: Vec<Vec<usize>> = if config.stratified {
        let by_class: Vec<Vec<usize>> =
            (0..=1u8).map(|c| (0..records.len()).filter(|&i| records[i].label == c).collect()).collect();
        if by_class.iter().any(|g| g.len() < 2) {
            return Err(Error::TooFewRecords(String::from("stratified split needs two records per class")));
        }
        by_class
    } else {
        alloc::vec![(0..records.len()).collect()]
    };
    for mut group in groups {
        let k = test_count(group.len(), config.test_fraction);
        group.shuffle(&mut rng);
        for &i in &group[..k] {
            in_test[i] = true;
        }
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (r, t) in records.iter().zip(in_test) {
        if t { test.push(r.clone()) } else { train.push(r.clone()) }
    }
    Ok((train, test))
}
