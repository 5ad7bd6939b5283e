//! The trained detector: vocabulary, domain statistics, lexicons and the
//! linear model, plus the analysis entry points used by the CLI and service.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::classifier::{train_pinned, LinearModel, Prediction, TrainConfig};
use crate::email::{parse_email, ParsedEmail};
use crate::features::{
    assemble, fit_tfidf, map_feature, tfidf_tokens, transform_tfidf, ConceptGroup, DomainFeatureExtractor,
    DomainStats, FeatureRegistry, FeatureVector, LexiconConfig, TfidfConfig, Vocabulary, DOMAIN_DIM,
};
use crate::lime::{highlight_spans_in, lime_explain_regions, Highlight, LimeConfig, LimeExplanation};
use crate::shap::{group_concepts, shap_linear, ConceptAttribution, ShapExplanation};
use crate::{Error, Result};

/// Identifies the persisted model layout.
pub const MODEL_FORMAT_VERSION: &str = "explicate-model/1";

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub tfidf: TfidfConfig,
    pub train: TrainConfig,
}

#[derive(Serialize, Deserialize)]
struct DetectorRepr {
    format_version: String,
    model: LinearModel,
    vocabulary: Vocabulary,
    domain_stats: DomainStats,
    lexicons: LexiconConfig,
    fit_config: FitConfig,
    training_examples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DetectorRepr", into = "DetectorRepr")]
pub struct Detector {
    model: LinearModel,
    vocabulary: Vocabulary,
    domain_stats: DomainStats,
    lexicons: LexiconConfig,
    fit_config: FitConfig,
    training_examples: usize,
    registry: FeatureRegistry,
    extractor: DomainFeatureExtractorCell,
}

// The compiled extractor is derived state; equality ignores it.
#[derive(Debug, Clone)]
struct DomainFeatureExtractorCell(DomainFeatureExtractor);

impl PartialEq for DomainFeatureExtractorCell {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl From<Detector> for DetectorRepr {
    fn from(d: Detector) -> Self {
        Self {
            format_version: String::from(MODEL_FORMAT_VERSION),
            model: d.model,
            vocabulary: d.vocabulary,
            domain_stats: d.domain_stats,
            lexicons: d.lexicons,
            fit_config: d.fit_config,
            training_examples: d.training_examples,
        }
    }
}

impl TryFrom<DetectorRepr> for Detector {
    type Error = Error;

    fn try_from(r: DetectorRepr) -> Result<Self> {
        if r.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidConfig(alloc::format!(
                "model format {} is not {MODEL_FORMAT_VERSION}",
                r.format_version
            )));
        }
        Detector::from_parts(r.model, r.vocabulary, r.domain_stats, r.lexicons, r.fit_config, r.training_examples)
    }
}

/// A feature column with its readable name and attribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedAttribution {
    pub index: usize,
    pub technical_name: String,
    pub human_name: String,
    pub group: ConceptGroup,
    pub value: f64,
}

/// Everything computed for one email apart from the language-model text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub prediction: Prediction,
    pub lime: LimeExplanation,
    pub highlights: Vec<Highlight>,
    pub shap: ShapExplanation,
    pub shap_groups: Vec<ConceptAttribution>,
    pub top_features: Vec<NamedAttribution>,
}

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub detector: Detector,
    pub epoch_losses: Vec<f64>,
}

impl Detector {
    pub fn from_parts(
        model: LinearModel,
        vocabulary: Vocabulary,
        domain_stats: DomainStats,
        lexicons: LexiconConfig,
        fit_config: FitConfig,
        training_examples: usize,
    ) -> Result<Self> {
        lexicons.validate()?;
        let registry = FeatureRegistry::new(&vocabulary);
        let dim = registry.total_dim();
        if model.weights.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: model.weights.len() });
        }
        if model.background_means.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: model.background_means.len() });
        }
        for len in [domain_stats.mean.len(), domain_stats.std.len(), domain_stats.zero_variance.len()] {
            if len != DOMAIN_DIM {
                return Err(Error::DimensionMismatch { expected: DOMAIN_DIM, found: len });
            }
        }
        let finite = model.weights.iter().chain(&model.background_means).chain(&domain_stats.mean).all(|v| v.is_finite());
        if !finite || !model.bias.is_finite() || domain_stats.std.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidConfig(String::from("model contains non-finite or invalid parameters")));
        }
        let extractor = DomainFeatureExtractorCell(DomainFeatureExtractor::new(&lexicons));
        Ok(Self { model, vocabulary, domain_stats, lexicons, fit_config, training_examples, registry, extractor })
    }

    /// Fits vocabulary, domain statistics and the classifier on raw email texts.
    pub fn fit<S: AsRef<str>>(
        texts: &[S],
        labels: &[u8],
        lexicons: LexiconConfig,
        config: &FitConfig,
    ) -> Result<FitOutcome> {
        if texts.len() != labels.len() {
            return Err(Error::DimensionMismatch { expected: texts.len(), found: labels.len() });
        }
        lexicons.validate()?;
        let extractor = DomainFeatureExtractor::new(&lexicons);
        let parsed: Vec<ParsedEmail> = texts.iter().map(|t| parse_email(t.as_ref())).collect();
        let tokens: Vec<Vec<String>> = parsed.iter().map(tfidf_tokens).collect();
        let vocabulary = fit_tfidf(&tokens, config.tfidf)?;
        let registry = FeatureRegistry::new(&vocabulary);
        let domain_raw: Vec<Vec<f64>> = parsed.iter().map(|e| extractor.extract(e)).collect();
        let domain_stats = DomainStats::fit(&domain_raw)?;
        let features = tokens
            .iter()
            .zip(&domain_raw)
            .map(|(tok, raw)| assemble(&transform_tfidf(tok, &vocabulary), raw, &domain_stats, &registry))
            .collect::<Result<Vec<FeatureVector>>>()?;
        // Constant columns carry no signal; keep their weights at zero.
        let pinned: Vec<usize> = domain_stats
            .zero_variance
            .iter()
            .enumerate()
            .filter(|(_, z)| **z)
            .map(|(j, _)| registry.vocab_size() + j)
            .collect();
        let outcome = train_pinned(&features, labels, &config.train, &pinned)?;
        let detector =
            Detector::from_parts(outcome.model, vocabulary, domain_stats, lexicons, *config, texts.len())?;
        Ok(FitOutcome { detector, epoch_losses: outcome.epoch_losses })
    }

    pub fn model(&self) -> &LinearModel {
        &self.model
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn registry(&self) -> &FeatureRegistry {
        &self.registry
    }

    pub fn domain_stats(&self) -> &DomainStats {
        &self.domain_stats
    }

    pub fn lexicons(&self) -> &LexiconConfig {
        &self.lexicons
    }

    pub fn fit_config(&self) -> &FitConfig {
        &self.fit_config
    }

    pub fn training_examples(&self) -> usize {
        self.training_examples
    }

    pub fn featurize_parsed(&self, email: &ParsedEmail) -> Result<FeatureVector> {
        let tfidf = transform_tfidf(&tfidf_tokens(email), &self.vocabulary);
        let raw = self.extractor.0.extract(email);
        assemble(&tfidf, &raw, &self.domain_stats, &self.registry)
    }

    pub fn featurize(&self, raw: &str) -> Result<FeatureVector> {
        self.featurize_parsed(&parse_email(raw))
    }

    /// Classifies a raw email. Blank input is rejected.
    pub fn predict(&self, raw: &str) -> Result<Prediction> {
        if raw.trim().is_empty() {
            return Err(Error::EmptyText);
        }
        self.predict_unchecked(raw)
    }

    fn predict_unchecked(&self, raw: &str) -> Result<Prediction> {
        let x = self.featurize(raw)?;
        Ok(self.model.prediction_from_logit(self.model.logit(&x)?))
    }

    /// Phishing probability for any text, including blank perturbations.
    pub fn probability(&self, raw: &str) -> f64 {
        self.predict_unchecked(raw).map_or(self.model.prediction_from_logit(self.model.bias).probability, |p| {
            p.probability
        })
    }

    /// Byte regions LIME may perturb: the subject value and the body.
    pub fn perturbable_regions(raw: &str) -> Vec<(usize, usize)> {
        let email = parse_email(raw);
        let mut regions = Vec::with_capacity(2);
        if let Some(span) = email.subject_span {
            regions.push(span);
        }
        regions.push((email.body_offset, raw.len()));
        regions
    }

    pub fn explain_lime(&self, raw: &str, config: &LimeConfig) -> Result<LimeExplanation> {
        if raw.trim().is_empty() {
            return Err(Error::EmptyText);
        }
        lime_explain_regions(|t: &str| self.probability(t), raw, &Self::perturbable_regions(raw), config)
    }

    pub fn explain_shap(&self, raw: &str) -> Result<(ShapExplanation, Vec<ConceptAttribution>)> {
        let x = self.featurize(raw)?;
        let shap = shap_linear(&self.model, &x)?;
        let groups = group_concepts(&shap, &self.registry)?;
        Ok((shap, groups))
    }

    /// The `k` features with the largest absolute SHAP value.
    pub fn name_top_features(&self, shap: &ShapExplanation, k: usize) -> Result<Vec<NamedAttribution>> {
        shap.top_features(k)
            .into_iter()
            .map(|(index, value)| {
                let entry = map_feature(index, &self.registry)?;
                Ok(NamedAttribution {
                    index,
                    technical_name: entry.technical_name.clone(),
                    human_name: entry.human_name.clone(),
                    group: entry.concept_group,
                    value,
                })
            })
            .collect()
    }

    /// Prediction, LIME, SHAP and highlights for one email.
    pub fn analyze(&self, raw: &str, lime: &LimeConfig, top_k_features: usize) -> Result<Analysis> {
        let prediction = self.predict(raw)?;
        let lime_exp = self.explain_lime(raw, lime)?;
        let highlights = highlight_spans_in(&lime_exp.attributions, raw, &Self::perturbable_regions(raw));
        let (shap, shap_groups) = self.explain_shap(raw)?;
        let top_features = self.name_top_features(&shap, top_k_features)?;
        Ok(Analysis { prediction, lime: lime_exp, highlights, shap, shap_groups, top_features })
    }
}
