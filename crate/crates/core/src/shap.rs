//! Exact Shapley attributions for the linear logit.
//!
//! With a single mean baseline and independent features the Shapley value
//! of feature `j` is `w_j (x_j - mu_j)`, and the attributions sum to
//! `logit(x) - logit(mu)` exactly. [`shap_brute_force`] enumerates every
//! coalition and serves as the oracle for the closed form.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::classifier::LinearModel;
use crate::features::{ConceptGroup, FeatureRegistry, FeatureVector};
use crate::{Error, Result};

/// Largest model [`shap_brute_force`] will enumerate.
pub const BRUTE_FORCE_MAX_FEATURES: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapExplanation {
    /// Logit at the background means.
    pub base_value: f64,
    /// Attribution per feature index, logit scale.
    pub phi: Vec<f64>,
    pub output_logit: f64,
}

impl ShapExplanation {
    pub fn total(&self) -> f64 {
        self.phi.iter().sum()
    }

    /// Indices with nonzero attribution, largest magnitude first.
    pub fn top_features(&self, k: usize) -> Vec<(usize, f64)> {
        let mut nz: Vec<(usize, f64)> = self.phi.iter().copied().enumerate().filter(|&(_, p)| p != 0.0).collect();
        nz.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
        nz.truncate(k);
        nz
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptAttribution {
    pub group: ConceptGroup,
    pub value: f64,
    /// Number of features in the group with nonzero attribution.
    pub features: usize,
    /// True for the word-level group, which is reported as a residual next
    /// to the named phishing concepts.
    pub residual: bool,
}

/// `phi_j = w_j (x_j - mu_j)` on the logit scale.
pub fn shap_linear(model: &LinearModel, x: &FeatureVector) -> Result<ShapExplanation> {
    let dim = model.dim();
    if x.total_dim != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: x.total_dim });
    }
    // Start from the all-zero input and patch the sparse entries.
    let mut phi: Vec<f64> = model.weights.iter().zip(&model.background_means).map(|(w, mu)| w * (0.0 - mu)).collect();
    for &(j, v) in &x.entries {
        phi[j] = model.weights[j] * (v - model.background_means[j]);
    }
    let base_value =
        model.weights.iter().zip(&model.background_means).map(|(w, mu)| w * mu).sum::<f64>() + model.bias;
    let output_logit = x.dot(&model.weights) + model.bias;
    Ok(ShapExplanation { base_value, phi, output_logit })
}

/// Shapley values by enumerating all coalitions of a small model.
///
/// The game value of a coalition `S` is the logit with features in `S` set
/// to `x` and the rest held at the background means.
pub fn shap_brute_force(model: &LinearModel, x: &FeatureVector) -> Result<Vec<f64>> {
    let n = model.dim();
    if n > BRUTE_FORCE_MAX_FEATURES {
        return Err(Error::TooManyFeatures { found: n, max: BRUTE_FORCE_MAX_FEATURES });
    }
    if x.total_dim != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.total_dim });
    }
    let xd = x.to_dense();
    let value = |mask: u32| -> f64 {
        (0..n)
            .map(|j| model.weights[j] * if mask & (1 << j) != 0 { xd[j] } else { model.background_means[j] })
            .sum::<f64>()
            + model.bias
    };
    let values: Vec<f64> = (0..(1u32 << n)).map(value).collect();
    let mut fact = vec![1.0f64; n + 1];
    for k in 1..=n {
        fact[k] = fact[k - 1] * k as f64;
    }
    let mut phi = vec![0.0; n];
    for (j, p) in phi.iter_mut().enumerate() {
        let bit = 1u32 << j;
        for mask in 0..(1u32 << n) {
            if mask & bit != 0 {
                continue;
            }
            let s = mask.count_ones() as usize;
            let weight = fact[s] * fact[n - s - 1] / fact[n];
            *p += weight * (values[(mask | bit) as usize] - values[mask as usize]);
        }
    }
    Ok(phi)
}

/// Sums attributions per concept group, ranked by absolute sum.
pub fn group_concepts(explanation: &ShapExplanation, registry: &FeatureRegistry) -> Result<Vec<ConceptAttribution>> {
    if explanation.phi.len() != registry.total_dim() {
        return Err(Error::DimensionMismatch { expected: registry.total_dim(), found: explanation.phi.len() });
    }
    let mut sums: BTreeMap<ConceptGroup, (f64, usize)> = BTreeMap::new();
    for (entry, &p) in registry.entries().iter().zip(&explanation.phi) {
        let slot = sums.entry(entry.concept_group).or_insert((0.0, 0));
        slot.0 += p;
        slot.1 += usize::from(p != 0.0);
    }
    let mut out: Vec<ConceptAttribution> = sums
        .into_iter()
        .map(|(group, (value, features))| ConceptAttribution {
            group,
            value,
            features,
            residual: group == ConceptGroup::Lexical,
        })
        .collect();
    out.sort_by(|a, b| b.value.abs().total_cmp(&a.value.abs()).then(a.group.cmp(&b.group)));
    Ok(out)
}
