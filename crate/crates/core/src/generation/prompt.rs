use std::fmt::Write;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{GenConfig, Mode};
use crate::datasets::ProblemRecord;
use crate::voting::Label;

const INTRO: &str = "The following is a first-order logic (FOL) problem.
The problem is to determine whether the conclusion follows from the premises.
The premises are given in the form of a set of first-order logic sentences.
The conclusion is given in the form of a single first-order logic sentence.
";

const TASK_NAIVE: &str =
    "The task is to evaluate the conclusion as 'True', 'False', or 'Uncertain' given the premises.\n";
const TASK_SCRATCHPAD: &str = "The task is to translate each of the premises and conclusions into FOL expressions, and then to evaluate the conclusion as 'True', 'False', or 'Uncertain' given the premises.\n";
// Shipped exactly as published, including the cut-off sentence.
const TASK_COT: &str = "The task is to translate each of the premises and conclusions into FOL expressions, \n";
const TASK_LINC: &str = "The task is to translate each of the premises and conclusions into FOL expressions, so that the expressions can be evaluated by a theorem solver to determine whether the conclusion follows from the premises.
Expressions should be adhere to the format of the Python NLTK package logic module.\n";

/// One worked few-shot example.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IclExample {
    /// Line index in the FOLIO training file.
    pub index: usize,
    pub premises: Vec<String>,
    pub conclusion: String,
    pub premises_fol: Vec<String>,
    pub conclusion_fol: String,
    pub label: Label,
    /// Step-by-step explanation for the chain-of-thought mode.
    pub reasoning: String,
}

impl IclExample {
    fn translations(&self) -> String {
        let mut out = String::new();
        let nl = self.premises.iter().chain(std::iter::once(&self.conclusion));
        let fol = self.premises_fol.iter().chain(std::iter::once(&self.conclusion_fol));
        for (text, fol) in nl.zip(fol) {
            writeln!(out, "TEXT:\t{text}\nFOL:\t{fol}").unwrap();
        }
        out
    }

    /// Body of the `<EVALUATE>` block for `mode`, newline-terminated.
    pub fn evaluate_block(&self, mode: Mode) -> String {
        match mode {
            Mode::Naive => format!("{}\n", self.label),
            Mode::Scratchpad => format!("{}ANSWER:\t{}\n", self.translations(), self.label),
            Mode::Cot => format!("{}\nANSWER:\t{}\n", self.reasoning, self.label),
            Mode::Linc => self.translations(),
        }
    }
}

/// The eight bundled FOLIO training examples, in prompt order.
pub fn bundled_bank() -> &'static [IclExample] {
    static BANK: OnceLock<Vec<IclExample>> = OnceLock::new();
    BANK.get_or_init(|| serde_json::from_str(include_str!("icl_bank.json")).expect("bundled bank parses"))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("k_shot must be between 1 and {available}, got {requested}")]
    BadShotCount { requested: usize, available: usize },
}

fn problem_section(out: &mut String, premises: &[String], conclusion: &str) {
    out.push_str("<PREMISES>\n");
    for p in premises {
        out.push_str(p);
        out.push('\n');
    }
    out.push_str("</PREMISES>\n<CONCLUSION>\n");
    out.push_str(conclusion);
    out.push_str("\n</CONCLUSION>\n<EVALUATE>\n");
}

/// Instruction header, the first `cfg.k_shot` examples of `bank`, then the
/// test problem with an open `<EVALUATE>` tag for the model to complete.
pub fn build_prompt(mode: Mode, cfg: &GenConfig, problem: &ProblemRecord, bank: &[IclExample]) -> Result<String, PromptError> {
    if cfg.k_shot == 0 || cfg.k_shot > bank.len() {
        return Err(PromptError::BadShotCount { requested: cfg.k_shot, available: bank.len() });
    }
    let mut out = String::from(INTRO);
    out.push_str(match mode {
        Mode::Naive => TASK_NAIVE,
        Mode::Scratchpad => TASK_SCRATCHPAD,
        Mode::Cot => TASK_COT,
        Mode::Linc => TASK_LINC,
    });
    out.push_str("\n\n");
    for ex in &bank[..cfg.k_shot] {
        problem_section(&mut out, &ex.premises, &ex.conclusion);
        out.push_str(&ex.evaluate_block(mode));
        out.push_str("</EVALUATE>\n\n");
    }
    problem_section(&mut out, &problem.premises_nl, &problem.conclusion_nl);
    Ok(out)
}
