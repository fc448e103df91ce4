use std::time::Duration;

use serde_json::{json, Value};
use ureq::Agent;

use super::client::{ClientError, GenerationRequest, GeneratorClient};

/// Capped exponential backoff for transport failures, 429 and 5xx.
#[derive(Clone, Debug)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub initial_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 5,
            initial_delay: Duration::from_millis(500),
            max_delay: Duration::from_secs(8),
        }
    }
}

impl RetryPolicy {
    fn delay(&self, attempt: u32) -> Duration {
        self.initial_delay.saturating_mul(1 << attempt.min(16)).min(self.max_delay)
    }
}

/// Client for a chat-completions style endpoint
/// (`POST {base_url}/chat/completions`).
pub struct HttpClient {
    agent: Agent,
    base_url: String,
    api_key: Option<String>,
    model: String,
    pub retry: RetryPolicy,
}

impl HttpClient {
    pub fn new(base_url: impl Into<String>, api_key: Option<String>, model: impl Into<String>) -> Self {
        let agent: Agent = Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(600)))
            .http_status_as_error(false)
            .build()
            .into();
        HttpClient {
            agent,
            base_url: base_url.into().trim_end_matches('/').to_owned(),
            api_key,
            model: model.into(),
            retry: RetryPolicy::default(),
        }
    }

    /// Reads `GENERATOR_BASE_URL`, `GENERATOR_MODEL` and the optional
    /// `GENERATOR_API_KEY`.
    pub fn from_env() -> Result<Self, ClientError> {
        let var = |name: &str| std::env::var(name).ok().filter(|v| !v.is_empty());
        let base = var("GENERATOR_BASE_URL").ok_or_else(|| ClientError::Config("GENERATOR_BASE_URL is not set".into()))?;
        let model = var("GENERATOR_MODEL").ok_or_else(|| ClientError::Config("GENERATOR_MODEL is not set".into()))?;
        Ok(HttpClient::new(base, var("GENERATOR_API_KEY"), model))
    }

    fn post_once(&self, body: &Value) -> Result<Value, ClientError> {
        let url = format!("{}/chat/completions", self.base_url);
        let mut req = self.agent.post(&url).header("Content-Type", "application/json");
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req
            .send(body.to_string().as_bytes())
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        if !(200..300).contains(&status) {
            return Err(ClientError::Status { status, body: text });
        }
        serde_json::from_str(&text).map_err(|e| ClientError::InvalidResponse(e.to_string()))
    }

    fn post(&self, body: &Value) -> Result<Value, ClientError> {
        let mut attempt = 0;
        loop {
            let retryable = match self.post_once(body) {
                Ok(v) => return Ok(v),
                Err(e @ ClientError::Transport(_)) => e,
                Err(e @ ClientError::Status { status, .. }) if status == 429 || status >= 500 => e,
                Err(e) => return Err(e),
            };
            if attempt >= self.retry.max_retries {
                return Err(retryable);
            }
            std::thread::sleep(self.retry.delay(attempt));
            attempt += 1;
        }
    }
}

fn choice_texts(resp: &Value) -> Result<Vec<String>, ClientError> {
    let choices = resp
        .get("choices")
        .and_then(Value::as_array)
        .ok_or_else(|| ClientError::InvalidResponse("missing `choices`".into()))?;
    let mut indexed: Vec<(u64, String)> = choices
        .iter()
        .enumerate()
        .map(|(pos, c)| {
            let text = c
                .pointer("/message/content")
                .or_else(|| c.get("text"))
                .and_then(Value::as_str)
                .ok_or_else(|| ClientError::InvalidResponse("choice without text".into()))?;
            let index = c.get("index").and_then(Value::as_u64).unwrap_or(pos as u64);
            Ok((index, text.to_owned()))
        })
        .collect::<Result<_, ClientError>>()?;
    indexed.sort_by_key(|(i, _)| *i);
    Ok(indexed.into_iter().map(|(_, t)| t).collect())
}

impl GeneratorClient for HttpClient {
    /// Endpoints may return fewer choices than requested; the remainder is
    /// requested again until `n_samples` completions have arrived.
    fn complete(&self, req: &GenerationRequest<'_>) -> Result<Vec<String>, ClientError> {
        let cfg = req.config;
        let mut out: Vec<String> = Vec::with_capacity(cfg.n_samples);
        let mut empty_rounds = 0;
        while out.len() < cfg.n_samples {
            let mut body = json!({
                "model": self.model,
                "messages": [{"role": "user", "content": req.prompt}],
                "temperature": cfg.temperature,
                "max_tokens": cfg.max_tokens,
                "n": cfg.n_samples - out.len(),
                "stop": [cfg.stop_token],
            });
            if let Some(seed) = cfg.seed {
                body["seed"] = json!(seed);
            }
            let texts = choice_texts(&self.post(&body)?)?;
            if texts.is_empty() {
                empty_rounds += 1;
                if empty_rounds > self.retry.max_retries {
                    return Err(ClientError::InvalidResponse("endpoint returned no choices".into()));
                }
            }
            out.extend(texts);
        }
        out.truncate(cfg.n_samples);
        Ok(out)
    }

    fn kind(&self) -> &'static str {
        "http"
    }

    fn model(&self) -> Option<&str> {
        Some(&self.model)
    }
}
