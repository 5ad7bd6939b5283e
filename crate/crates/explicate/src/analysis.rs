//! The per-email report shared by the CLI and the HTTP service.

use std::time::Instant;

use explicate_core::classifier::{sigmoid, Verdict};
use explicate_core::lime::{highlight_spans_in, Attribution, Highlight, LimeConfig};
use explicate_core::llm::{check_consistency, template_fallback, Consistency, ExplanationMode, ExplanationRequest, LlmExplanation};
use explicate_core::pipeline::{Detector, NamedAttribution};
use explicate_core::shap::ConceptAttribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::llm_client::{EndpointConfig, LlmClient};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisMode {
    #[default]
    #[serde(alias = "xai")]
    XaiOnly,
    #[serde(alias = "xai+llm")]
    XaiPlusLlm,
}

impl AnalysisMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "xai" | "xai_only" | "xai-only" => Some(Self::XaiOnly),
            "xai+llm" | "xai_plus_llm" | "xai-plus-llm" | "llm" => Some(Self::XaiPlusLlm),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOptions {
    pub mode: AnalysisMode,
    pub explanation_mode: ExplanationMode,
    /// LIME tokens to report; the configured default when `None`.
    pub top_k: Option<usize>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self { mode: AnalysisMode::XaiOnly, explanation_mode: ExplanationMode::Detailed, top_k: None }
    }
}

/// SHAP on the logit scale with the two ends also shown as probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapView {
    pub base_logit: f64,
    pub output_logit: f64,
    pub base_probability: f64,
    pub output_probability: f64,
    pub groups: Vec<ConceptAttribution>,
    pub top_features: Vec<NamedAttribution>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub predict_ms: f64,
    pub lime_ms: f64,
    pub shap_ms: f64,
    pub llm_ms: Option<f64>,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub verdict: Verdict,
    pub probability: f64,
    pub logit: f64,
    pub threshold: f64,
    pub mode: AnalysisMode,
    pub lime: Vec<Attribution>,
    pub lime_degenerate: bool,
    pub highlights: Vec<Highlight>,
    pub shap: ShapView,
    pub llm: Option<LlmExplanation>,
    pub consistency: Option<Consistency>,
    pub timings: StageTimings,
    pub model_version: String,
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Classification, LIME and SHAP. Never touches the network.
pub fn analyze_xai(
    detector: &Detector,
    model_version: &str,
    raw: &str,
    options: &AnalyzeOptions,
    lime: &LimeConfig,
    top_features: usize,
) -> Result<AnalysisReport> {
    if raw.trim().is_empty() {
        return Err(explicate_core::Error::EmptyInput.into());
    }
    let start = Instant::now();
    let prediction = detector.predict(raw)?;
    let predict_ms = ms_since(start);

    let t = Instant::now();
    let lime_config = LimeConfig { top_k: options.top_k.unwrap_or(lime.top_k), ..*lime };
    let lime_exp = detector.explain_lime(raw, &lime_config)?;
    let highlights = highlight_spans_in(&lime_exp.attributions, raw, &Detector::perturbable_regions(raw));
    let lime_ms = ms_since(t);

    let t = Instant::now();
    let (shap, groups) = detector.explain_shap(raw)?;
    let named = detector.name_top_features(&shap, top_features)?;
    let shap_ms = ms_since(t);

    Ok(AnalysisReport {
        verdict: prediction.verdict,
        probability: prediction.probability,
        logit: prediction.logit,
        threshold: detector.model().threshold,
        mode: options.mode,
        lime: lime_exp.attributions,
        lime_degenerate: lime_exp.degenerate,
        highlights,
        shap: ShapView {
            base_logit: shap.base_value,
            output_logit: shap.output_logit,
            base_probability: sigmoid(shap.base_value),
            output_probability: sigmoid(shap.output_logit),
            groups,
            top_features: named,
        },
        llm: None,
        consistency: None,
        timings: StageTimings { predict_ms, lime_ms, shap_ms, llm_ms: None, total_ms: ms_since(start) },
        model_version: model_version.to_string(),
    })
}

pub fn explanation_request(
    report: &AnalysisReport,
    raw: &str,
    mode: ExplanationMode,
    endpoint: &EndpointConfig,
) -> ExplanationRequest {
    let prediction =
        explicate_core::classifier::Prediction { probability: report.probability, verdict: report.verdict, logit: report.logit };
    let mut request =
        ExplanationRequest::new(raw, prediction, report.lime.clone(), report.shap.groups.clone(), mode, endpoint.max_email_chars);
    request.guidelines = endpoint.guidelines.clone();
    request
}

/// Adds the language-model explanation and consistency check. Without a
/// client the template explanation is used. Never fails.
pub async fn attach_llm(
    report: &mut AnalysisReport,
    raw: &str,
    mode: ExplanationMode,
    client: Option<&LlmClient>,
    endpoint: &EndpointConfig,
) {
    let t = Instant::now();
    let request = explanation_request(report, raw, mode, endpoint);
    let explanation = match client {
        Some(c) => c.explain_or_fallback(&request).await,
        None => template_fallback(&request),
    };
    report.consistency = Some(check_consistency(&explanation, &request.prediction));
    report.llm = Some(explanation);
    let llm_ms = ms_since(t);
    report.timings.llm_ms = Some(llm_ms);
    report.timings.total_ms += llm_ms;
}

pub fn validate_options(options: &AnalyzeOptions) -> Result<()> {
    if options.top_k == Some(0) {
        return Err(Error::Usage("top_k must be at least 1".into()));
    }
    Ok(())
}
