//! Classification metrics and explanation-quality measures.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign};
use serde::{Deserialize, Serialize};

use crate::classifier::{Prediction, Verdict};
use crate::lime::{lime_explain, LimeConfig};
use crate::llm::{check_consistency, Consistency, LlmExplanation};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fp: u64, tn: u64, fn_: u64) -> Self {
        Self { tp, fp, tn, fn_ }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// Records one outcome; `label` is the true class (1 = phishing).
    pub fn record(&mut self, label: u8, predicted: Verdict) {
        match (label == 1, predicted == Verdict::Phishing) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (false, false) => self.tn += 1,
            (true, false) => self.fn_ += 1,
        }
    }
}

impl Add for ConfusionMatrix {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self::new(self.tp + o.tp, self.fp + o.fp, self.tn + o.tn, self.fn_ + o.fn_)
    }
}

impl AddAssign for ConfusionMatrix {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

/// Metrics whose denominator was zero are reported as 0 and listed here.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UndefinedMetrics {
    pub precision: bool,
    pub recall: bool,
    pub f1: bool,
    pub fpr: bool,
    pub fnr: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub fpr: f64,
    pub fnr: f64,
    pub undefined: UndefinedMetrics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_source: Option<BTreeMap<String, MetricsReport>>,
}

fn ratio(num: u64, den: u64, undefined: &mut bool) -> f64 {
    if den == 0 {
        *undefined = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn compute_metrics(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut u = UndefinedMetrics::default();
    let precision = ratio(cm.tp, cm.tp + cm.fp, &mut u.precision);
    let recall = ratio(cm.tp, cm.tp + cm.fn_, &mut u.recall);
    let fpr = ratio(cm.fp, cm.fp + cm.tn, &mut u.fpr);
    let fnr = ratio(cm.fn_, cm.fn_ + cm.tp, &mut u.fnr);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        u.f1 = true;
        0.0
    };
    Ok(MetricsReport {
        confusion: *cm,
        accuracy: (cm.tp + cm.tn) as f64 / total as f64,
        precision,
        recall,
        f1,
        fpr,
        fnr,
        undefined: u,
        per_source: None,
    })
}

/// Pooled metrics over the elementwise sum of per-source matrices, with
/// each source's own report attached.
pub fn pooled_report(per_source: &BTreeMap<String, ConfusionMatrix>) -> Result<MetricsReport> {
    if per_source.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let pooled = per_source.values().fold(ConfusionMatrix::default(), |acc, cm| acc + *cm);
    let mut report = compute_metrics(&pooled)?;
    let mut breakdown = BTreeMap::new();
    for (source, cm) in per_source {
        breakdown.insert(source.clone(), compute_metrics(cm)?);
    }
    report.per_source = Some(breakdown);
    Ok(report)
}

fn count_syllables(word: &str) -> usize {
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let chars: Vec<char> = word.chars().flat_map(char::to_lowercase).collect();
    let mut groups = 0;
    let mut prev_vowel = false;
    for &c in &chars {
        let v = is_vowel(c);
        if v && !prev_vowel {
            groups += 1;
        }
        prev_vowel = v;
    }
    // terminal silent e: a lone final 'e' forming its own vowel group
    let n = chars.len();
    if groups > 1 && n >= 2 && chars[n - 1] == 'e' && !is_vowel(chars[n - 2]) {
        groups -= 1;
    }
    groups.max(1)
}

/// Flesch Reading Ease: `206.835 - 1.015 (words/sentences) - 84.6 (syllables/words)`.
pub fn flesch_reading_ease(text: &str) -> Result<f64> {
    let words: Vec<String> = text
        .split_whitespace()
        .map(|w| w.chars().filter(|c| c.is_alphabetic()).collect::<String>())
        .filter(|w| !w.is_empty())
        .collect();
    if words.is_empty() {
        return Err(Error::NoWords);
    }
    let mut sentences = 0usize;
    let mut in_run = false;
    for c in text.chars() {
        let term = matches!(c, '.' | '!' | '?');
        if term && !in_run {
            sentences += 1;
        }
        in_run = term;
    }
    let sentences = sentences.max(1) as f64;
    let n_words = words.len() as f64;
    let syllables: usize = words.iter().map(|w| count_syllables(w)).sum();
    Ok(206.835 - 1.015 * (n_words / sentences) - 84.6 * (syllables as f64 / n_words))
}

/// |A ∩ B| / |A ∪ B|, with two empty sets counting as identical.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Mean pairwise Jaccard overlap of LIME top-k token sets across seeds.
pub fn lime_stability<F>(mut predict_fn: F, text: &str, seeds: &[u64], k: usize, base: &LimeConfig) -> Result<f64>
where
    F: FnMut(&str) -> f64,
{
    if seeds.len() < 2 {
        return Err(Error::InvalidConfig(String::from("stability needs at least two seeds")));
    }
    let mut sets = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let cfg = LimeConfig { seed, top_k: k, ..*base };
        let e = lime_explain(&mut predict_fn, text, &cfg)?;
        sets.push(e.attributions.into_iter().map(|a| a.token).collect::<BTreeSet<String>>());
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            total += jaccard(&sets[i], &sets[j]);
            pairs += 1;
        }
    }
    Ok(total / pairs as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencySummary {
    /// Agree / (Agree + Disagree).
    pub rate: f64,
    pub agree: usize,
    pub disagree: usize,
    pub unparseable: usize,
}

pub fn consistency_rate(pairs: &[(LlmExplanation, Prediction)]) -> Result<ConsistencySummary> {
    let (mut agree, mut disagree, mut unparseable) = (0, 0, 0);
    for (e, p) in pairs {
        match check_consistency(e, p) {
            Consistency::Agree => agree += 1,
            Consistency::Disagree => disagree += 1,
            Consistency::Unparseable => unparseable += 1,
        }
    }
    if agree + disagree == 0 {
        return Err(Error::AllUnparseable);
    }
    Ok(ConsistencySummary { rate: agree as f64 / (agree + disagree) as f64, agree, disagree, unparseable })
}
