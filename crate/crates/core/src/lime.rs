//! LIME for text: explain one prediction by deleting words and fitting a
//! proximity-weighted ridge surrogate to the model's scores.
//!
//! The perturbation unit is a distinct (casefolded) token; masking a token
//! deletes every occurrence of it. The surrogate is fit on the phishing
//! probability returned by the scoring function.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::textprep::tokenize;
use crate::{Error, Result};

/// Texts with more distinct tokens are reduced to this many perturbable tokens.
pub const MAX_LIME_TOKENS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LimeConfig {
    pub n_samples: usize,
    pub kernel_width: f64,
    pub top_k: usize,
    pub ridge_penalty: f64,
    pub seed: u64,
}

impl Default for LimeConfig {
    fn default() -> Self {
        Self { n_samples: 1000, kernel_width: 0.75, top_k: 10, ridge_penalty: 1.0, seed: 42 }
    }
}

impl LimeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 10 || self.top_k < 1 || !(self.kernel_width > 0.0) || !(self.ridge_penalty >= 0.0) {
            return Err(Error::InvalidConfig(String::from(
                "lime needs n_samples >= 10, top_k >= 1, kernel_width > 0, ridge_penalty >= 0",
            )));
        }
        Ok(())
    }
}

/// Surrogate coefficient of one token; positive pushes toward phishing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribution {
    pub token: String,
    /// Byte span of the first occurrence.
    pub span: (usize, usize),
    pub weight: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimeExplanation {
    pub attributions: Vec<Attribution>,
    /// Every perturbed score was identical: there is no local signal.
    pub degenerate: bool,
    pub intercept: f64,
    /// Score of the unperturbed text.
    pub original_score: f64,
    /// Distinct tokens found in the text.
    pub distinct_tokens: usize,
    /// Distinct tokens that were actually perturbed.
    pub perturbed_tokens: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Highlight {
    pub span: (usize, usize),
    pub polarity: Polarity,
}

struct Occurrence {
    start: usize,
    end: usize,
    feature: Option<usize>,
}

/// Explains `text` with every token perturbable.
pub fn lime_explain<F>(predict_fn: F, text: &str, config: &LimeConfig) -> Result<LimeExplanation>
where
    F: FnMut(&str) -> f64,
{
    lime_explain_regions(predict_fn, text, &[(0, text.len())], config)
}

/// Explains `text`, perturbing only tokens inside the given byte regions.
pub fn lime_explain_regions<F>(
    mut predict_fn: F,
    text: &str,
    regions: &[(usize, usize)],
    config: &LimeConfig,
) -> Result<LimeExplanation>
where
    F: FnMut(&str) -> f64,
{
    config.validate()?;
    let spans = region_tokens(text, regions);
    // distinct tokens in order of first appearance
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    let mut distinct: Vec<(&str, (usize, usize), usize)> = Vec::new();
    let mut occ_token = Vec::with_capacity(spans.len());
    for (tok, s, e) in &spans {
        let id = *index.entry(tok.as_str()).or_insert_with(|| {
            distinct.push((tok.as_str(), (*s, *e), 0));
            distinct.len() - 1
        });
        distinct[id].2 += 1;
        occ_token.push(id);
    }
    if distinct.is_empty() {
        return Err(Error::EmptyText);
    }

    // choose perturbable tokens: most frequent first, earliest on ties
    let mut chosen: Vec<usize> = (0..distinct.len()).collect();
    if chosen.len() > MAX_LIME_TOKENS {
        chosen.sort_by(|&a, &b| distinct[b].2.cmp(&distinct[a].2).then(a.cmp(&b)));
        chosen.truncate(MAX_LIME_TOKENS);
        chosen.sort_unstable();
    }
    let mut feature_of = vec![None; distinct.len()];
    for (f, &id) in chosen.iter().enumerate() {
        feature_of[id] = Some(f);
    }
    let d = chosen.len();
    let occurrences: Vec<Occurrence> = spans
        .iter()
        .zip(&occ_token)
        .map(|((_, s, e), &id)| Occurrence { start: *s, end: *e, feature: feature_of[id] })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.n_samples;
    let mut masks: Vec<Vec<bool>> = Vec::with_capacity(n);
    masks.push(vec![true; d]);
    while masks.len() < n {
        masks.push((0..d).map(|_| rng.random_bool(0.5)).collect());
    }

    let mut scores = Vec::with_capacity(n);
    let mut buf = String::with_capacity(text.len());
    for mask in &masks {
        render(text, &occurrences, mask, &mut buf);
        scores.push(predict_fn(&buf));
    }
    let original_score = scores[0];

    let kernel = |mask: &[bool]| {
        let kept = mask.iter().filter(|&&k| k).count() as f64;
        let cos = libm::sqrt(kept / d as f64);
        let dist = 1.0 - cos;
        libm::exp(-(dist * dist) / (config.kernel_width * config.kernel_width))
    };
    let weights: Vec<f64> = masks.iter().map(|m| kernel(m)).collect();

    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Ok(LimeExplanation {
            attributions: Vec::new(),
            degenerate: true,
            intercept: original_score,
            original_score,
            distinct_tokens: distinct.len(),
            perturbed_tokens: d,
        });
    }

    let (coef, intercept) = weighted_ridge(&masks, &scores, &weights, config.ridge_penalty);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| coef[b].abs().total_cmp(&coef[a].abs()).then(a.cmp(&b)));
    let attributions = order
        .into_iter()
        .take(config.top_k)
        .enumerate()
        .map(|(r, f)| {
            let (token, span, _) = distinct[chosen[f]];
            Attribution { token: String::from(token), span, weight: coef[f], rank: r + 1 }
        })
        .collect();
    Ok(LimeExplanation {
        attributions,
        degenerate: false,
        intercept,
        original_score,
        distinct_tokens: distinct.len(),
        perturbed_tokens: d,
    })
}

fn region_tokens(text: &str, regions: &[(usize, usize)]) -> Vec<(String, usize, usize)> {
    let mut out: Vec<(String, usize, usize)> = Vec::new();
    let mut sorted: Vec<(usize, usize)> = regions.iter().copied().filter(|(s, e)| s < e && *e <= text.len()).collect();
    sorted.sort_unstable();
    for (s, e) in sorted {
        let Some(slice) = text.get(s..e) else { continue };
        for t in tokenize(slice) {
            let (start, end) = (s + t.start, s + t.end);
            if out.last().is_none_or(|last| start >= last.2) {
                out.push((t.token, start, end));
            }
        }
    }
    out
}

/// Writes `text` with the occurrences of masked-out features deleted.
fn render(text: &str, occurrences: &[Occurrence], mask: &[bool], buf: &mut String) {
    buf.clear();
    let mut cursor = 0;
    for occ in occurrences {
        if occ.feature.is_some_and(|f| !mask[f]) {
            buf.push_str(&text[cursor..occ.start]);
            cursor = occ.end;
        }
    }
    buf.push_str(&text[cursor..]);
}

/// Weighted ridge regression with an unpenalized intercept.
///
/// Solves `(Xc' W Xc + λI) β = Xc' W yc` on weight-centered data.
pub fn weighted_ridge(masks: &[Vec<bool>], y: &[f64], w: &[f64], penalty: f64) -> (Vec<f64>, f64) {
    let d = masks.first().map_or(0, Vec::len);
    let total: f64 = w.iter().sum();
    let mut x_mean = vec![0.0; d];
    let mut y_mean = 0.0;
    for ((m, &yi), &wi) in masks.iter().zip(y).zip(w) {
        for (xm, &bit) in x_mean.iter_mut().zip(m) {
            if bit {
                *xm += wi;
            }
        }
        y_mean += wi * yi;
    }
    x_mean.iter_mut().for_each(|v| *v /= total);
    y_mean /= total;

    let mut gram = DMatrix::<f64>::zeros(d, d);
    let mut rhs = DVector::<f64>::zeros(d);
    let mut row = vec![0.0; d];
    for ((m, &yi), &wi) in masks.iter().zip(y).zip(w) {
        for j in 0..d {
            row[j] = f64::from(u8::from(m[j])) - x_mean[j];
        }
        let yc = yi - y_mean;
        for j in 0..d {
            let wj = wi * row[j];
            rhs[j] += wj * yc;
            for k in j..d {
                gram[(j, k)] += wj * row[k];
            }
        }
    }
    for j in 0..d {
        gram[(j, j)] += penalty;
        for k in 0..j {
            gram[(j, k)] = gram[(k, j)];
        }
    }
    let beta = match gram.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => gram
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .unwrap_or_else(|_| DVector::zeros(d)),
    };
    let coef: Vec<f64> = beta.iter().copied().collect();
    let intercept = y_mean - coef.iter().zip(&x_mean).map(|(b, m)| b * m).sum::<f64>();
    (coef, intercept)
}

/// Every occurrence of each attributed token in `source_text`.
pub fn highlight_spans(attributions: &[Attribution], source_text: &str) -> Vec<Highlight> {
    highlight_spans_in(attributions, source_text, &[(0, source_text.len())])
}

/// Like [`highlight_spans`], restricted to byte regions of `source_text`.
pub fn highlight_spans_in(attributions: &[Attribution], source_text: &str, regions: &[(usize, usize)]) -> Vec<Highlight> {
    let polarity: BTreeMap<&str, Polarity> = attributions
        .iter()
        .filter(|a| a.weight != 0.0)
        .map(|a| (a.token.as_str(), if a.weight > 0.0 { Polarity::Positive } else { Polarity::Negative }))
        .collect();
    region_tokens(source_text, regions)
        .into_iter()
        .filter_map(|(tok, s, e)| polarity.get(tok.as_str()).map(|&p| Highlight { span: (s, e), polarity: p }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::sigmoid;

    #[test]
    fn constant_model_has_no_signal() {
        let e = lime_explain(|_| 0.9, "please verify your account", &LimeConfig::default()).unwrap();
        assert!(e.degenerate);
        assert!(e.attributions.iter().all(|a| a.weight.abs() < 1e-9));
        // the surrogate itself shrinks a constant target to zero
        let masks = vec![vec![true, false], vec![false, true], vec![true, true]];
        let (coef, icpt) = weighted_ridge(&masks, &[0.9; 3], &[1.0; 3], 1.0);
        assert!(coef.iter().all(|c| c.abs() < 1e-9));
        assert!((icpt - 0.9).abs() < 1e-12);
    }

    #[test]
    fn informative_token_recovered() {
        let f = |t: &str| sigmoid(2.0 * f64::from(u8::from(t.to_lowercase().contains("verify"))));
        let e = lime_explain(f, "please verify", &LimeConfig::default()).unwrap();
        let w = |tok: &str| e.attributions.iter().find(|a| a.token == tok).unwrap().weight;
        assert!(w("verify") > 0.0);
        assert!(w("verify").abs() > w("please").abs());
        assert_eq!(e.attributions[0].rank, 1);
        assert_eq!(e.attributions[0].token, "verify");
        assert_eq!(e.attributions[0].span, (7, 13));
    }

    #[test]
    fn empty_text_rejected() {
        assert_eq!(lime_explain(|_| 0.5, " ,, ", &LimeConfig::default()).unwrap_err(), Error::EmptyText);
        let bad = LimeConfig { n_samples: 5, ..LimeConfig::default() };
        assert!(matches!(lime_explain(|_| 0.5, "a b", &bad), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn masking_removes_all_occurrences() {
        let text = "Click here to click";
        let occ = vec![
            Occurrence { start: 0, end: 5, feature: Some(0) },
            Occurrence { start: 6, end: 10, feature: Some(1) },
            Occurrence { start: 11, end: 13, feature: Some(2) },
            Occurrence { start: 14, end: 19, feature: Some(0) },
        ];
        let mut buf = String::new();
        render(text, &occ, &[false, true, true], &mut buf);
        assert_eq!(buf, " here to ");
    }

    #[test]
    fn highlight_examples() {
        let a = |t: &str, w: f64| Attribution { token: t.into(), span: (0, 0), weight: w, rank: 1 };
        let hs = highlight_spans(&[a("click", 0.3)], "Click here to click");
        assert_eq!(
            hs,
            vec![
                Highlight { span: (0, 5), polarity: Polarity::Positive },
                Highlight { span: (14, 19), polarity: Polarity::Positive },
            ]
        );
        assert!(highlight_spans(&[], "Click here").is_empty());
        let hs = highlight_spans(&[a("meeting", -0.2), a("verify", 0.1)], "Meeting: verify");
        assert_eq!(hs[0].polarity, Polarity::Negative);
        assert_eq!(hs[1].polarity, Polarity::Positive);
    }

    #[test]
    fn only_regions_are_perturbed() {
        let text = "From: x\n\nverify now";
        let seen = core::cell::RefCell::new(Vec::new());
        let e = lime_explain_regions(
            |t| {
                seen.borrow_mut().push(String::from(t));
                f64::from(u8::from(t.contains("verify")))
            },
            text,
            &[(9, text.len())],
            &LimeConfig { n_samples: 20, ..LimeConfig::default() },
        )
        .unwrap();
        assert_eq!(e.distinct_tokens, 2);
        assert!(seen.borrow().iter().all(|t| t.starts_with("From: x\n\n")));
        assert_eq!(e.attributions[0].token, "verify");
    }
}
