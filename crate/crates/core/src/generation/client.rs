use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{extract, GenConfig, GenerationSample, Mode};

/// What a client is asked for: `config.n_samples` completions of `prompt`.
#[derive(Clone, Copy, Debug)]
pub struct GenerationRequest<'a> {
    pub problem_id: &'a str,
    pub mode: Mode,
    pub prompt: &'a str,
    pub config: &'a GenConfig,
}

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("invalid response: {0}")]
    InvalidResponse(String),
    #[error("no recorded completion for problem `{problem_id}`, mode {mode}, sample {sample_index}")]
    CacheMiss { problem_id: String, mode: Mode, sample_index: usize },
    #[error("client configuration: {0}")]
    Config(String),
}

/// Source of completions. Implementations must tolerate concurrent calls.
pub trait GeneratorClient: Send + Sync {
    /// Returns at least `req.config.n_samples` completions in arrival order.
    fn complete(&self, req: &GenerationRequest<'_>) -> Result<Vec<String>, ClientError>;

    /// Short name recorded in run manifests.
    fn kind(&self) -> &'static str;

    fn model(&self) -> Option<&str> {
        None
    }
}

fn cut_at_stop(text: &str, stop: &str) -> String {
    match (stop.is_empty(), text.find(stop)) {
        (false, Some(i)) => text[..i].to_owned(),
        _ => text.to_owned(),
    }
}

/// Requests `n_samples` completions and extracts each one's payload.
pub fn generate(client: &dyn GeneratorClient, req: &GenerationRequest<'_>) -> Result<Vec<GenerationSample>, ClientError> {
    let n = req.config.n_samples;
    let completions = client.complete(req)?;
    if completions.len() < n {
        return Err(ClientError::InvalidResponse(format!("expected {n} completions, got {}", completions.len())));
    }
    Ok(completions
        .into_iter()
        .take(n)
        .enumerate()
        .map(|(index, c)| {
            let raw = cut_at_stop(&c, &req.config.stop_token);
            let payload = extract(req.mode, &raw);
            GenerationSample { index, raw, payload }
        })
        .collect())
}

/// Returns a fixed script of completions, cycling when more are requested.
#[derive(Clone, Debug)]
pub struct StubClient {
    script: Vec<String>,
}

impl StubClient {
    pub fn new(script: Vec<String>) -> Self {
        assert!(!script.is_empty(), "stub script must not be empty");
        StubClient { script }
    }
}

impl GeneratorClient for StubClient {
    fn complete(&self, req: &GenerationRequest<'_>) -> Result<Vec<String>, ClientError> {
        Ok(self.script.iter().cycle().take(req.config.n_samples).cloned().collect())
    }

    fn kind(&self) -> &'static str {
        "stub"
    }
}

/// One line of a replay fixture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayRecord {
    pub problem_id: String,
    pub mode: Mode,
    pub sample_index: usize,
    pub completion: String,
}

/// Serves completions recorded in a JSONL fixture.
#[derive(Clone, Debug, Default)]
pub struct ReplayClient {
    cache: HashMap<(String, Mode), BTreeMap<usize, String>>,
}

impl ReplayClient {
    pub fn from_records(records: impl IntoIterator<Item = ReplayRecord>) -> Self {
        let mut cache: HashMap<(String, Mode), BTreeMap<usize, String>> = HashMap::new();
        for r in records {
            cache.entry((r.problem_id, r.mode)).or_default().insert(r.sample_index, r.completion);
        }
        ReplayClient { cache }
    }

    pub fn from_path(path: &Path) -> Result<Self, ClientError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ClientError::Config(format!("{}: {e}", path.display())))?;
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let r: ReplayRecord = serde_json::from_str(line)
                .map_err(|e| ClientError::Config(format!("{}:{}: {e}", path.display(), i + 1)))?;
            records.push(r);
        }
        Ok(ReplayClient::from_records(records))
    }
}

impl GeneratorClient for ReplayClient {
    fn complete(&self, req: &GenerationRequest<'_>) -> Result<Vec<String>, ClientError> {
        let miss = |sample_index| ClientError::CacheMiss {
            problem_id: req.problem_id.to_owned(),
            mode: req.mode,
            sample_index,
        };
        let recorded = self.cache.get(&(req.problem_id.to_owned(), req.mode)).ok_or_else(|| miss(0))?;
        (0..req.config.n_samples)
            .map(|i| recorded.get(&i).cloned().ok_or_else(|| miss(i)))
            .collect()
    }

    fn kind(&self) -> &'static str {
        "replay"
    }
}
