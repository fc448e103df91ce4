//! Error-filtered majority voting over sampled labels.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Outcome label of one sample or one problem.
///
/// `Error` marks a sample whose output could not be turned into a verdict
/// (extraction, syntax or arity failure); a prover never produces it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    True,
    False,
    Uncertain,
    Error,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::True, Label::False, Label::Uncertain, Label::Error];
    pub const GOLD: [Label; 3] = [Label::True, Label::False, Label::Uncertain];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::True => "True",
            Label::False => "False",
            Label::Uncertain => "Uncertain",
            Label::Error => "Error",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unrecognized label `{0}`")]
pub struct ParseLabelError(pub String);

impl FromStr for Label {
    type Err = ParseLabelError;

    /// Case-insensitive. `Unknown` is accepted as a synonym of `Uncertain`
    /// because several dataset releases spell it that way.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "true" => Ok(Label::True),
            "false" => Ok(Label::False),
            "uncertain" | "unknown" => Ok(Label::Uncertain),
            "error" => Ok(Label::Error),
            _ => Err(ParseLabelError(s.to_owned())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteResult {
    #[serde(rename = "final")]
    pub final_label: Label,
    /// Count of every label in the ballot, `Error` included.
    pub counts: BTreeMap<Label, usize>,
    /// Set when two or more non-error labels shared the top count.
    pub tie_broken: bool,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VoteError {
    #[error("cannot vote over an empty ballot")]
    Empty,
}

/// Majority vote over labels listed in generation order.
///
/// `Error` labels are not counted. The most frequent remaining label wins;
/// among tied labels the one whose first occurrence is earliest wins. A
/// ballot made only of `Error` yields `Error`.
pub fn majority_vote(labels: &[Label]) -> Result<VoteResult, VoteError> {
    if labels.is_empty() {
        return Err(VoteError::Empty);
    }
    let mut counts: BTreeMap<Label, usize> = BTreeMap::new();
    let mut first_at: BTreeMap<Label, usize> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        *counts.entry(l).or_default() += 1;
        first_at.entry(l).or_insert(i);
    }
    let best = counts
        .iter()
        .filter(|(l, _)| **l != Label::Error)
        .map(|(_, &c)| c)
        .max();
    let Some(best) = best else {
        return Ok(VoteResult { final_label: Label::Error, counts, tie_broken: false });
    };
    let mut tied: Vec<Label> = counts
        .iter()
        .filter(|(l, &c)| **l != Label::Error && c == best)
        .map(|(l, _)| *l)
        .collect();
    tied.sort_by_key(|l| first_at[l]);
    Ok(VoteResult {
        final_label: tied[0],
        tie_broken: tied.len() > 1,
        counts,
    })
}
