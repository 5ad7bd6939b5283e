use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TfidfConfig {
    pub max_features: usize,
    pub min_df: usize,
}

impl Default for TfidfConfig {
    fn default() -> Self {
        Self { max_features: 20_000, min_df: 2 }
    }
}

/// Fitted TF-IDF vocabulary. Column `i` is `terms[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VocabularyRepr", into = "VocabularyRepr")]
pub struct Vocabulary {
    terms: Vec<String>,
    idf: Vec<f64>,
    term_to_index: BTreeMap<String, usize>,
    doc_count: usize,
    config: TfidfConfig,
}

#[derive(Serialize, Deserialize)]
struct VocabularyRepr {
    doc_count: usize,
    config: TfidfConfig,
    terms: Vec<String>,
    idf: Vec<f64>,
}

impl From<Vocabulary> for VocabularyRepr {
    fn from(v: Vocabulary) -> Self {
        Self { doc_count: v.doc_count, config: v.config, terms: v.terms, idf: v.idf }
    }
}

impl TryFrom<VocabularyRepr> for Vocabulary {
    type Error = &'static str;

    fn try_from(r: VocabularyRepr) -> core::result::Result<Self, Self::Error> {
        if r.terms.len() != r.idf.len() {
            return Err("vocabulary terms and idf differ in length");
        }
        if r.idf.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err("vocabulary idf values must be positive");
        }
        let term_to_index: BTreeMap<String, usize> =
            r.terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        if term_to_index.len() != r.terms.len() {
            return Err("vocabulary contains duplicate terms");
        }
        Ok(Self { terms: r.terms, idf: r.idf, term_to_index, doc_count: r.doc_count, config: r.config })
    }
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.term_to_index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> Option<&str> {
        self.terms.get(index).map(String::as_str)
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn config(&self) -> TfidfConfig {
        self.config
    }
}

/// Fits a vocabulary with smoothed idf `ln((1 + N) / (1 + df)) + 1`.
///
/// Terms below `min_df` are dropped; the rest are ranked by descending
/// document frequency (ties lexicographic) and cut at `max_features`.
/// Columns are ordered lexicographically.
pub fn fit_tfidf<S: AsRef<str>>(corpus: &[Vec<S>], config: TfidfConfig) -> Result<Vocabulary> {
    if corpus.is_empty() {
        return Err(Error::TooFewRecords(String::from("TF-IDF corpus is empty")));
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    let mut seen: Vec<&str> = Vec::new();
    for doc in corpus {
        seen.clear();
        seen.extend(doc.iter().map(AsRef::as_ref));
        seen.sort_unstable();
        seen.dedup();
        for term in &seen {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    let mut kept: Vec<(&str, usize)> = df.into_iter().filter(|&(_, d)| d >= config.min_df.max(1)).collect();
    if kept.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    kept.truncate(config.max_features);
    kept.sort_by(|a, b| a.0.cmp(b.0));

    let n = corpus.len() as f64;
    let terms: Vec<String> = kept.iter().map(|(t, _)| String::from(*t)).collect();
    let idf: Vec<f64> = kept.iter().map(|&(_, d)| libm::log((1.0 + n) / (1.0 + d as f64)) + 1.0).collect();
    let term_to_index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Ok(Vocabulary { terms, idf, term_to_index, doc_count: corpus.len(), config })
}

/// Count × idf for in-vocabulary tokens, L2-normalized; sorted by index.
pub fn transform_tfidf<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> Vec<(usize, f64)> {
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for tok in tokens {
        if let Some(i) = vocab.index_of(tok.as_ref()) {
            *counts.entry(i).or_insert(0.0) += 1.0;
        }
    }
    let mut block: Vec<(usize, f64)> = counts.into_iter().map(|(i, c)| (i, c * vocab.idf[i])).collect();
    let norm = libm::sqrt(block.iter().map(|(_, v)| v * v).sum::<f64>());
    if norm > 0.0 {
        for (_, v) in &mut block {
            *v /= norm;
        }
    }
    block
}
