//! Evaluation runs over records, error export and the JSON report.

use std::collections::BTreeMap;
use std::path::Path;

use explicate_core::classifier::{Prediction, Verdict};
use explicate_core::dataset::DatasetRecord;
use explicate_core::eval::{compute_metrics, pooled_report, ConfusionMatrix, ConsistencySummary, MetricsReport};
use explicate_core::pipeline::Detector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn predict_all(detector: &Detector, records: &[DatasetRecord]) -> Result<Vec<Prediction>> {
    records
        .iter()
        .enumerate()
        .map(|(index, r)| detector.predict(&r.text).map_err(|e| Error::AtRecord { index, source: Box::new(e.into()) }))
        .collect()
}

pub fn evaluate(detector: &Detector, records: &[DatasetRecord]) -> Result<(ConfusionMatrix, MetricsReport)> {
    if records.is_empty() {
        return Err(explicate_core::Error::EmptyMatrix.into());
    }
    let mut cm = ConfusionMatrix::default();
    for (r, p) in records.iter().zip(predict_all(detector, records)?) {
        cm.record(r.label, p.verdict);
    }
    Ok((cm, compute_metrics(&cm)?))
}

/// Per-source matrices keyed by record source, with pooled metrics over their sum.
pub fn cross_dataset_eval(detector: &Detector, records: &[DatasetRecord]) -> Result<MetricsReport> {
    if records.is_empty() {
        return Err(explicate_core::Error::EmptyMatrix.into());
    }
    let mut by_source: BTreeMap<String, ConfusionMatrix> = BTreeMap::new();
    for (r, p) in records.iter().zip(predict_all(detector, records)?) {
        by_source.entry(r.source.clone()).or_default().record(r.label, p.verdict);
    }
    Ok(pooled_report(&by_source)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisclassifiedRow {
    pub text: String,
    pub label: u8,
    pub probability: f64,
    pub verdict: String,
    pub source: String,
}

/// Writes misclassified records as CSV and returns how many were written.
pub fn export_errors(detector: &Detector, records: &[DatasetRecord], path: &Path) -> Result<usize> {
    let unwritable = |source| Error::FileUnwritable { path: path.to_path_buf(), source };
    let predictions = predict_all(detector, records)?;
    let file = std::fs::File::create(path).map_err(unwritable)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(std::io::BufWriter::new(file));
    let mut written = 0;
    // header is written even when there are no rows
    w.write_record(["text", "label", "probability", "verdict", "source"])?;
    for (r, p) in records.iter().zip(predictions) {
        let predicted = u8::from(p.verdict == Verdict::Phishing);
        if predicted != r.label {
            w.serialize(MisclassifiedRow {
                text: r.text.clone(),
                label: r.label,
                probability: p.probability,
                verdict: p.verdict.as_str().to_string(),
                source: r.source.clone(),
            })?;
            written += 1;
        }
    }
    w.flush().map_err(unwritable)?;
    Ok(written)
}

pub fn read_errors(path: &Path) -> Result<Vec<MisclassifiedRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    Ok(reader.deserialize().collect::<Result<_, _>>()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadabilitySummary {
    pub mean_flesch: f64,
    pub explanations: usize,
}

/// Scores that need human raters; filled in by hand when available.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpertScores {
    pub accuracy: Option<f64>,
    pub completeness: Option<f64>,
    pub actionability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model_version: String,
    pub records: usize,
    pub metrics: MetricsReport,
    pub consistency: Option<ConsistencySummary>,
    /// Mean pairwise top-k Jaccard per evaluated text.
    pub stability: Option<BTreeMap<String, f64>>,
    pub readability: Option<ReadabilitySummary>,
    pub expert_scores: Option<ExpertScores>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use explicate_core::features::LexiconConfig;
    use explicate_core::pipeline::FitConfig;

    fn rec(text: &str, label: u8, source: &str) -> DatasetRecord {
        DatasetRecord { text: text.into(), label, source: source.into() }
    }

    fn small() -> (Detector, Vec<DatasetRecord>) {
        let records = vec![
            rec("verify your account password now", 1, "a"),
            rec("urgent verify account suspended", 1, "a"),
            rec("click to verify your password", 1, "b"),
            rec("lunch meeting tomorrow at noon", 0, "a"),
            rec("meeting notes for the project", 0, "b"),
            rec("project lunch notes attached", 0, "b"),
        ];
        let texts: Vec<&str> = records.iter().map(|r| r.text.as_str()).collect();
        let labels: Vec<u8> = records.iter().map(|r| r.label).collect();
        let fit = FitConfig { tfidf: explicate_core::features::TfidfConfig { min_df: 1, ..Default::default() }, ..Default::default() };
        let d = Detector::fit(&texts, &labels, LexiconConfig::default(), &fit).unwrap().detector;
        (d, records)
    }

    #[test]
    fn pooled_matches_concatenated_evaluate() {
        let (d, records) = small();
        let (cm, m) = evaluate(&d, &records).unwrap();
        let pooled = cross_dataset_eval(&d, &records).unwrap();
        assert_eq!(pooled.confusion, cm);
        assert_eq!(pooled.accuracy, m.accuracy);
        let per = pooled.per_source.unwrap();
        assert_eq!(per.len(), 2);
        assert_eq!(per["a"].confusion + per["b"].confusion, cm);
    }

    #[test]
    fn export_count_matches_confusion() {
        let (d, mut records) = small();
        // flip two labels to force errors
        records[0].label = 0;
        records[3].label = 1;
        let (cm, _) = evaluate(&d, &records).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("errors.csv");
        let n = export_errors(&d, &records, &path).unwrap();
        assert_eq!(n as u64, cm.fp + cm.fn_);
        let rows = read_errors(&path).unwrap();
        assert_eq!(rows.len(), n);
        for row in rows {
            let original = records.iter().find(|r| r.text == row.text).unwrap();
            assert_eq!(row.label, original.label);
            assert_eq!(row.probability, d.predict(&row.text).unwrap().probability);
        }
    }

    #[test]
    fn empty_records_error() {
        let (d, _) = small();
        assert!(evaluate(&d, &[]).is_err());
    }
}
