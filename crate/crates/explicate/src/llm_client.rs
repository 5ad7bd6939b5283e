//! Chat-completion client for natural-language explanations.

use std::time::Duration;

use explicate_core::llm::{
    build_prompt, explanation_from_response, template_fallback, ExplanationRequest, LlmExplanation,
    DEFAULT_MAX_EMAIL_CHARS,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};

pub const DEFAULT_KEY_ENV: &str = "EXPLICATE_LLM_KEY";

/// Where and how to reach the endpoint. Holds the *name* of the variable
/// carrying the API key, never the key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model_name: String,
    pub api_key_env: String,
    pub timeout_secs: f64,
    pub max_retries: u32,
    pub temperature: f64,
    /// First retry delay; doubles on each further attempt.
    pub backoff_base_secs: f64,
    pub max_email_chars: usize,
    pub guidelines: Option<String>,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        Self {
            base_url: "https://api.deepseek.com/v1".into(),
            model_name: "deepseek-chat".into(),
            api_key_env: DEFAULT_KEY_ENV.into(),
            timeout_secs: 30.0,
            max_retries: 2,
            temperature: 0.0,
            backoff_base_secs: 1.0,
            max_email_chars: DEFAULT_MAX_EMAIL_CHARS,
            guidelines: None,
        }
    }
}

impl EndpointConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.timeout_secs > 0.0) || !self.timeout_secs.is_finite() {
            return Err(Error::Config("llm.timeout_secs must be positive".into()));
        }
        if !(self.backoff_base_secs >= 0.0) || !self.backoff_base_secs.is_finite() {
            return Err(Error::Config("llm.backoff_base_secs must be nonnegative".into()));
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(Error::Config("llm.temperature must be nonnegative".into()));
        }
        if self.max_email_chars == 0 {
            return Err(Error::Config("llm.max_email_chars must be positive".into()));
        }
        Ok(())
    }

    /// Delay before retry number `attempt` (1-based).
    pub fn backoff(&self, attempt: u32) -> Duration {
        Duration::from_secs_f64(self.backoff_base_secs * 2f64.powi(attempt.saturating_sub(1) as i32))
    }
}

#[derive(Debug, Clone)]
pub struct LlmClient {
    config: EndpointConfig,
    http: reqwest::Client,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    #[serde(default)]
    content: Option<String>,
}

enum Attempt {
    Done(String),
    Retry(String),
    Fatal(Error),
}

impl LlmClient {
    pub fn new(config: EndpointConfig) -> Result<Self> {
        config.validate()?;
        let http = reqwest::Client::builder()
            .timeout(Duration::from_secs_f64(config.timeout_secs))
            .build()
            .map_err(|e| Error::Llm(e.to_string()))?;
        Ok(Self { config, http })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    fn api_key(&self) -> Option<String> {
        std::env::var(&self.config.api_key_env).ok().filter(|k| !k.trim().is_empty())
    }

    fn endpoint_url(&self) -> String {
        format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'))
    }

    async fn attempt(&self, body: &serde_json::Value, key: &str) -> Attempt {
        let response = match self.http.post(self.endpoint_url()).bearer_auth(key).json(body).send().await {
            Ok(r) => r,
            Err(e) => return Attempt::Retry(e.without_url().to_string()),
        };
        let status = response.status();
        if status == reqwest::StatusCode::UNAUTHORIZED || status == reqwest::StatusCode::FORBIDDEN {
            return Attempt::Fatal(Error::AuthFailure { status: status.as_u16() });
        }
        if status.is_server_error() || status == reqwest::StatusCode::TOO_MANY_REQUESTS {
            return Attempt::Retry(format!("HTTP {status}"));
        }
        if !status.is_success() {
            return Attempt::Fatal(Error::Llm(format!("HTTP {status}")));
        }
        match response.json::<ChatResponse>().await {
            Ok(parsed) => Attempt::Done(
                parsed.choices.into_iter().next().and_then(|c| c.message.content).unwrap_or_default(),
            ),
            Err(e) => Attempt::Retry(format!("unreadable response: {}", e.without_url())),
        }
    }

    /// Calls the endpoint with retries. Errors when the key is missing, the
    /// credentials are rejected, or every attempt failed.
    pub async fn generate_explanation(&self, request: &ExplanationRequest) -> Result<LlmExplanation> {
        let key = self.api_key().ok_or_else(|| {
            Error::Config(format!("environment variable {} is not set", self.config.api_key_env))
        })?;
        let prompt = build_prompt(request);
        let body = json!({
            "model": self.config.model_name,
            "messages": [
                {"role": "system", "content": prompt.system},
                {"role": "user", "content": prompt.user},
            ],
            "temperature": self.config.temperature,
        });
        let mut last = String::new();
        for attempt in 0..=self.config.max_retries {
            if attempt > 0 {
                tokio::time::sleep(self.config.backoff(attempt)).await;
            }
            match self.attempt(&body, &key).await {
                Attempt::Done(content) => return Ok(explanation_from_response(&content, request.mode)),
                Attempt::Fatal(e) => return Err(e),
                Attempt::Retry(reason) => {
                    tracing::debug!(attempt, %reason, "llm attempt failed");
                    last = reason;
                }
            }
        }
        Err(Error::Llm(format!("{} attempts failed, last: {last}", self.config.max_retries + 1)))
    }

    /// Remote explanation, or the template fallback on any failure.
    pub async fn explain_or_fallback(&self, request: &ExplanationRequest) -> LlmExplanation {
        match self.generate_explanation(request).await {
            Ok(e) => e,
            Err(e) => {
                tracing::warn!(error = %e, "using template explanation");
                template_fallback(request)
            }
        }
    }
}
