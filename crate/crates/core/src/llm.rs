//! Prompt rendering, response parsing and the offline fallback for the
//! natural-language explanation layer. The HTTP client lives in the std
//! crate; everything here is deterministic.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;
use serde::{Deserialize, Serialize};

use crate::classifier::{Prediction, Verdict};
use crate::features::ConceptGroup;
use crate::lime::Attribution;
use crate::shap::ConceptAttribution;

/// Default cap on email characters embedded in a prompt.
pub const DEFAULT_MAX_EMAIL_CHARS: usize = 4000;
pub const TRUNCATION_MARKER: &str = "[truncated]";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExplanationMode {
    Detailed,
    Educational,
    Technical,
    Simple,
}

impl ExplanationMode {
    pub const ALL: [ExplanationMode; 4] = [Self::Detailed, Self::Educational, Self::Technical, Self::Simple];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Detailed => "detailed",
            Self::Educational => "educational",
            Self::Technical => "technical",
            Self::Simple => "simple",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        Self::ALL.into_iter().find(|m| m.as_str().eq_ignore_ascii_case(s))
    }

    fn constraint(self) -> &'static str {
        match self {
            Self::Detailed => {
                "Mode: detailed. Give a comprehensive analysis in balanced technical and everyday language. \
                 Cover every listed indicator and explain how each one affects the verdict."
            }
            Self::Educational => {
                "Mode: educational. Teach the reader about the patterns involved. Present the tactics as a \
                 numbered list (1), 2), 3) ...) and finish with protective guidance the reader can reuse."
            }
            Self::Technical => {
                "Mode: technical. Use cybersecurity terminology with technical details: name the indicator \
                 classes, quote the attribution weights and the model probability."
            }
            Self::Simple => {
                "Mode: simple. After the verdict line write at most 3 sentences in plain words with a clear \
                 instruction for the reader. Avoid jargon."
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationRequest {
    pub email_text: String,
    pub prediction: Prediction,
    pub lime_top: Vec<Attribution>,
    pub shap_groups: Vec<ConceptAttribution>,
    pub mode: ExplanationMode,
    pub guidelines: Option<String>,
}

impl ExplanationRequest {
    /// Builds a request, truncating the email to `max_email_chars` characters.
    pub fn new(
        email_text: &str,
        prediction: Prediction,
        lime_top: Vec<Attribution>,
        shap_groups: Vec<ConceptAttribution>,
        mode: ExplanationMode,
        max_email_chars: usize,
    ) -> Self {
        Self {
            email_text: truncate_chars(email_text, max_email_chars),
            prediction,
            lime_top,
            shap_groups,
            mode,
            guidelines: None,
        }
    }
}

/// Cuts `text` to `max` characters and appends the truncation marker when cut.
pub fn truncate_chars(text: &str, max: usize) -> String {
    match text.char_indices().nth(max) {
        Some((cut, _)) => format!("{}\n{TRUNCATION_MARKER}", &text[..cut]),
        None => text.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerdictLine {
    Phishing,
    Legitimate,
    Unparseable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExplanationSource {
    Remote,
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmExplanation {
    pub verdict_line: VerdictLine,
    pub body: String,
    pub mode: ExplanationMode,
    pub source: ExplanationSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Consistency {
    Agree,
    Disagree,
    Unparseable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prompt {
    pub system: String,
    pub user: String,
}

fn direction(weight: f64) -> &'static str {
    if weight >= 0.0 { "toward phishing" } else { "toward legitimate" }
}

fn fence_for(text: &str) -> String {
    let mut longest = 0;
    let mut run = 0;
    for c in text.chars() {
        run = if c == '`' { run + 1 } else { 0 };
        longest = longest.max(run);
    }
    "`".repeat((longest + 1).max(3))
}

/// Renders the system and user messages for a request.
pub fn build_prompt(request: &ExplanationRequest) -> Prompt {
    let system = format!(
        "You are an email security explanation assistant. You explain why a phishing classifier reached \
         its verdict on an email, using the feature attributions you are given.\n\
         The first line of your answer must be exactly `VERDICT: phishing` or `VERDICT: legitimate`, \
         agreeing with the evidence. Do not put anything else on that line.\n\
         {}\n\
         Only discuss indicators that appear in the email or in the attribution lists. Never ask the \
         reader to click links or open attachments from the email.",
        request.mode.constraint()
    );

    let fence = fence_for(&request.email_text);
    let p = &request.prediction;
    let mut user = String::new();
    let _ = writeln!(user, "Email under analysis:\n{fence}\n{}\n{fence}", request.email_text);
    let _ = writeln!(
        user,
        "\nModel verdict: {} (phishing probability {:.4}, logit {:+.4})",
        p.verdict.as_str(),
        p.probability,
        p.logit
    );
    let _ = writeln!(user, "\nLIME word indicators (positive weight pushes toward phishing):");
    if request.lime_top.is_empty() {
        let _ = writeln!(user, "(no single word changed the prediction noticeably)");
    }
    for a in &request.lime_top {
        let _ = writeln!(user, "- word \"{}\" ({}, {:+.4})", a.token, direction(a.weight), a.weight);
    }
    let _ = writeln!(user, "\nSHAP concept ranking (log-odds contribution):");
    for g in &request.shap_groups {
        let residual = if g.residual { ", word-level residual" } else { "" };
        let _ = writeln!(user, "- concept {} ({}{}, {:+.4})", g.group.as_str(), direction(g.value), residual, g.value);
    }
    if let Some(guidelines) = &request.guidelines {
        let _ = writeln!(user, "\nGuidelines:\n{guidelines}");
    }
    let _ = write!(user, "\nWrite the {} explanation now.", request.mode.as_str());
    Prompt { system, user }
}

/// Verdict from the first line of the form `VERDICT: <word>`.
pub fn parse_verdict_line(content: &str) -> VerdictLine {
    for line in content.lines() {
        let line = line.trim().trim_matches(|c| c == '*' || c == '#' || c == '`').trim();
        let Some(prefix) = line.get(..8) else { continue };
        if !prefix.eq_ignore_ascii_case("verdict:") {
            continue;
        }
        let word: String = line[8..]
            .trim()
            .chars()
            .take_while(|c| c.is_alphabetic())
            .flat_map(char::to_lowercase)
            .collect();
        return match word.as_str() {
            "phishing" => VerdictLine::Phishing,
            "legitimate" | "legit" => VerdictLine::Legitimate,
            _ => VerdictLine::Unparseable,
        };
    }
    VerdictLine::Unparseable
}

/// Wraps a remote completion; empty content becomes an unparseable verdict.
pub fn explanation_from_response(content: &str, mode: ExplanationMode) -> LlmExplanation {
    let body = content.trim();
    if body.is_empty() {
        return LlmExplanation {
            verdict_line: VerdictLine::Unparseable,
            body: String::from("[empty response from explanation endpoint]"),
            mode,
            source: ExplanationSource::Remote,
        };
    }
    LlmExplanation { verdict_line: parse_verdict_line(body), body: body.to_string(), mode, source: ExplanationSource::Remote }
}

fn quoted_tokens(tokens: &[&Attribution]) -> String {
    let q: Vec<String> = tokens.iter().map(|a| format!("\"{}\"", a.token)).collect();
    match q.len() {
        0 => String::new(),
        1 => q[0].clone(),
        n => format!("{} and {}", q[..n - 1].join(", "), q[n - 1]),
    }
}

/// Deterministic explanation rendered without any network call.
pub fn template_fallback(request: &ExplanationRequest) -> LlmExplanation {
    let p = &request.prediction;
    let phishing = p.verdict == Verdict::Phishing;
    let confidence = if phishing { p.probability } else { 1.0 - p.probability };
    let percent = libm::round(confidence * 100.0) as i64;
    let top: Vec<&Attribution> = request.lime_top.iter().take(3).collect();
    let concept = request
        .shap_groups
        .iter()
        .find(|g| !g.residual && g.value != 0.0)
        .or_else(|| request.shap_groups.first());
    let concept_name = concept.map_or(ConceptGroup::Lexical.description(), |g| g.group.description());
    let label = p.verdict.as_str();

    let mut body = format!("VERDICT: {label}\n");
    match request.mode {
        ExplanationMode::Simple => {
            let looks = if phishing { "like phishing" } else { "legitimate" };
            let first = format!("This email looks {looks} ({percent}% model confidence).");
            let second = if top.is_empty() {
                format!("No single word stood out, and the overall pattern points to {concept_name}.")
            } else {
                format!("The words {} matter most, and the strongest overall signal is {concept_name}.", quoted_tokens(&top))
            };
            let third = if phishing {
                "Do not click its links or reply; delete it or report it."
            } else {
                "It looks safe, but still check the sender if anything feels off."
            };
            let _ = write!(body, "{first} {second} {third}");
        }
        ExplanationMode::Detailed => {
            let _ = writeln!(body, "The classifier rates this email as {label} with {percent}% confidence.");
            for a in &top {
                let _ = writeln!(
                    body,
                    "The word \"{}\" pushes the decision {} (weight {:+.3}).",
                    a.token,
                    direction(a.weight),
                    a.weight
                );
            }
            let _ = writeln!(body, "Across all features, the largest concept-level contribution comes from {concept_name}.");
            let _ = write!(body, "{}", guidance(phishing));
        }
        ExplanationMode::Educational => {
            let _ = writeln!(body, "This message was judged {label}. Here is what to learn from it:");
            let mut n = 1;
            for a in &top {
                let _ = writeln!(body, "{n}) The word \"{}\" points {}.", a.token, direction(a.weight));
                n += 1;
            }
            let _ = writeln!(body, "{n}) Overall, the message is dominated by {concept_name}.");
            let _ = write!(body, "{}", guidance(phishing));
        }
        ExplanationMode::Technical => {
            let _ = writeln!(
                body,
                "Classifier output: p(phishing) = {:.4}, logit = {:+.4}, verdict = {label}.",
                p.probability, p.logit
            );
            let indicators: Vec<String> =
                top.iter().map(|a| format!("{} ({:+.4})", a.token, a.weight)).collect();
            if indicators.is_empty() {
                let _ = writeln!(body, "LIME indicators: none above noise.");
            } else {
                let _ = writeln!(body, "LIME indicators: {}.", indicators.join(", "));
            }
            if let Some(g) = concept {
                let _ = writeln!(body, "Top SHAP concept group: {} ({:+.4} log-odds).", g.group.as_str(), g.value);
            }
            let _ = write!(body, "{}", guidance(phishing));
        }
    }
    LlmExplanation {
        verdict_line: if phishing { VerdictLine::Phishing } else { VerdictLine::Legitimate },
        body,
        mode: request.mode,
        source: ExplanationSource::Fallback,
    }
}

fn guidance(phishing: bool) -> &'static str {
    if phishing {
        "Do not use links or attachments in this email; contact the organization through a channel you already trust."
    } else {
        "No action is needed, but verify unexpected requests through a known contact before acting on them."
    }
}

/// Compares the explanation's verdict line with the classifier verdict.
pub fn check_consistency(explanation: &LlmExplanation, prediction: &Prediction) -> Consistency {
    let stated = match explanation.verdict_line {
        VerdictLine::Phishing => Verdict::Phishing,
        VerdictLine::Legitimate => Verdict::Legitimate,
        VerdictLine::Unparseable => return Consistency::Unparseable,
    };
    if stated == prediction.verdict { Consistency::Agree } else { Consistency::Disagree }
}
