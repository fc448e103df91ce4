use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ExtractedPayload, Mode};
use crate::voting::Label;

#[derive(Clone, Debug, Error, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "code", content = "text", rename_all = "kebab-case")]
pub enum ExtractError {
    #[error("no label line")]
    NoLabel,
    #[error("unrecognized label `{0}`")]
    UnrecognizedLabel(String),
    #[error("no FOL lines")]
    NoFol,
}

/// Reads `True`, `False` or `Uncertain`, ignoring case, surrounding quotes
/// or emphasis, and trailing punctuation.
pub fn parse_label_word(word: &str) -> Option<Label> {
    let w = word
        .trim()
        .trim_matches(|c: char| matches!(c, '"' | '\'' | '`' | '*'))
        .trim_end_matches(['.', ',', ';', ':', '!'])
        .trim();
    [Label::True, Label::False, Label::Uncertain]
        .into_iter()
        .find(|l| l.as_str().eq_ignore_ascii_case(w))
}

fn label_payload(text: &str) -> ExtractedPayload {
    match parse_label_word(text) {
        Some(label) => ExtractedPayload::DirectLabel { label },
        None => ExtractedPayload::ExtractError { reason: ExtractError::UnrecognizedLabel(text.trim().to_owned()) },
    }
}

fn strip_tag<'a>(line: &'a str, tag: &str) -> Option<&'a str> {
    let line = line.trim_start();
    let head = line.get(..tag.len())?;
    head.eq_ignore_ascii_case(tag).then(|| line[tag.len()..].trim())
}

/// Splits a completion (text before the stop token) into its payload.
///
/// Naive: the first non-blank line is the label. Scratchpad and CoT: the
/// last line starting with `ANSWER:`. Linc: every `FOL:` line in order; the
/// last is the conclusion and the rest are premises.
pub fn extract(mode: Mode, completion: &str) -> ExtractedPayload {
    let no = |reason| ExtractedPayload::ExtractError { reason };
    match mode {
        Mode::Naive => match completion.lines().find(|l| !l.trim().is_empty()) {
            Some(line) => label_payload(line),
            None => no(ExtractError::NoLabel),
        },
        Mode::Scratchpad | Mode::Cot => match completion.lines().rev().find_map(|l| strip_tag(l, "ANSWER:")) {
            Some(answer) => label_payload(answer),
            None => no(ExtractError::NoLabel),
        },
        Mode::Linc => {
            let mut fols: Vec<String> = completion
                .lines()
                .filter_map(|l| strip_tag(l, "FOL:"))
                .map(str::to_owned)
                .collect();
            match fols.pop() {
                Some(conclusion_fol) => ExtractedPayload::FolProgram { premise_fols: fols, conclusion_fol },
                None => no(ExtractError::NoFol),
            }
        }
    }
}
