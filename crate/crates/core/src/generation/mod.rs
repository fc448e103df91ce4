//! Prompt construction, completion clients and payload extraction.

mod client;
mod extract;
mod http;
mod prompt;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::datasets::Source;

pub use client::{generate, ClientError, GenerationRequest, GeneratorClient, ReplayClient, ReplayRecord, StubClient};
pub use extract::{extract, parse_label_word, ExtractError};
pub use http::{HttpClient, RetryPolicy};
pub use prompt::{build_prompt, bundled_bank, IclExample, PromptError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Naive,
    Scratchpad,
    Cot,
    Linc,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Naive, Mode::Scratchpad, Mode::Cot, Mode::Linc];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Naive => "naive",
            Mode::Scratchpad => "scratchpad",
            Mode::Cot => "cot",
            Mode::Linc => "linc",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown mode `{s}` (expected naive, scratchpad, cot or linc)"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub temperature: f64,
    pub n_samples: usize,
    pub max_tokens: u32,
    pub stop_token: String,
    pub k_shot: usize,
    /// Forwarded to endpoints that support seeded sampling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            temperature: 0.8,
            n_samples: 10,
            max_tokens: 1024,
            stop_token: "</EVALUATE>".into(),
            k_shot: 8,
            seed: None,
        }
    }
}

impl GenConfig {
    /// Defaults with the token cap for the given dataset: ProofWriter
    /// theories are long, so they get 4096 tokens instead of 1024.
    pub fn for_source(source: Source) -> Self {
        let max_tokens = match source {
            Source::ProofWriterOwa => 4096,
            Source::FolioTrain | Source::FolioVal => 1024,
        };
        GenConfig { max_tokens, ..GenConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExtractedPayload {
    DirectLabel { label: crate::voting::Label },
    FolProgram { premise_fols: Vec<String>, conclusion_fol: String },
    ExtractError { reason: ExtractError },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationSample {
    /// 0-based position in generation order.
    pub index: usize,
    pub raw: String,
    pub payload: ExtractedPayload,
}
