//! Prompt → K samples → per-sample label → vote, for one problem or a
//! whole dataset with resumable checkpointing.

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::mpsc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datasets::ProblemRecord;
use crate::generation::{
    build_prompt, bundled_bank, generate, ExtractedPayload, GenConfig, GenerationRequest, GenerationSample,
    GeneratorClient, IclExample, Mode,
};
use crate::prover::{decide, ProofLimits};
use crate::syntax::{check_signature, parse_closed, ParseOptions};
use crate::voting::{majority_vote, Label, VoteResult};

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: Mode,
    pub generation: GenConfig,
    pub limits: ProofLimits,
    /// Close free variables universally instead of rejecting the formula.
    pub lenient: bool,
    /// Problems evaluated concurrently.
    pub parallelism: usize,
    pub bank: Vec<IclExample>,
}

impl RunConfig {
    pub fn new(mode: Mode, generation: GenConfig) -> Self {
        RunConfig {
            mode,
            generation,
            limits: ProofLimits::default(),
            lenient: false,
            parallelism: 4,
            bank: bundled_bank().to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub problem_id: String,
    pub mode: Mode,
    pub samples: Vec<GenerationSample>,
    pub per_sample_labels: Vec<Label>,
    pub vote: VoteResult,
    pub gold_label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u8>,
    /// Per-sample remarks: why a sample became Error, premise count
    /// mismatches in translated programs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemFailure {
    pub problem_id: String,
    pub mode: Mode,
    pub error: String,
    pub gold_label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u8>,
}

/// One line of a predictions file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RunRecord {
    Prediction(Prediction),
    Failure(ProblemFailure),
}

impl RunRecord {
    pub fn problem_id(&self) -> &str {
        match self {
            RunRecord::Prediction(p) => &p.problem_id,
            RunRecord::Failure(f) => &f.problem_id,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            RunRecord::Prediction(p) => p.mode,
            RunRecord::Failure(f) => f.mode,
        }
    }
}

/// Label of one sample plus the reason when it is Error.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleOutcome {
    pub label: Label,
    pub note: Option<String>,
}

/// Labels one extracted payload. Direct labels pass through; a FOL program
/// is parsed, signature-checked and decided. Any failure yields Error.
pub fn evaluate_payload(payload: &ExtractedPayload, limits: &ProofLimits, lenient: bool) -> SampleOutcome {
    let error = |note: String| SampleOutcome { label: Label::Error, note: Some(note) };
    match payload {
        ExtractedPayload::DirectLabel { label } => SampleOutcome { label: *label, note: None },
        ExtractedPayload::ExtractError { reason } => error(format!("extraction: {reason}")),
        ExtractedPayload::FolProgram { premise_fols, conclusion_fol } => {
            let mut formulas = Vec::with_capacity(premise_fols.len() + 1);
            for text in premise_fols.iter().chain(std::iter::once(conclusion_fol)) {
                match parse_closed(text, ParseOptions::default(), lenient) {
                    Ok(f) => formulas.push(f),
                    Err(d) => return error(format!("{d} in `{text}`")),
                }
            }
            if let Err(diags) = check_signature(&formulas) {
                return error(diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "));
            }
            let conclusion = formulas.pop().expect("conclusion present");
            match decide(&formulas, &conclusion, limits) {
                Ok(v) => SampleOutcome { label: v.label, note: None },
                Err(e) => error(format!("prover: {e}")),
            }
        }
    }
}

pub fn label_sample(payload: &ExtractedPayload, limits: &ProofLimits, lenient: bool) -> Label {
    evaluate_payload(payload, limits, lenient).label
}

/// Runs one problem end to end. Errors (transport, cache miss, prompt) are
/// returned as a failure record.
pub fn run_problem(client: &dyn GeneratorClient, cfg: &RunConfig, problem: &ProblemRecord) -> Result<Prediction, ProblemFailure> {
    let fail = |error: String| ProblemFailure {
        problem_id: problem.id.clone(),
        mode: cfg.mode,
        error,
        gold_label: problem.gold_label,
        depth: problem.depth,
    };
    let prompt = build_prompt(cfg.mode, &cfg.generation, problem, &cfg.bank).map_err(|e| fail(e.to_string()))?;
    let req = GenerationRequest { problem_id: &problem.id, mode: cfg.mode, prompt: &prompt, config: &cfg.generation };
    let samples = generate(client, &req).map_err(|e| fail(e.to_string()))?;
    let outcomes: Vec<SampleOutcome> = samples
        .par_iter()
        .map(|s| evaluate_payload(&s.payload, &cfg.limits, cfg.lenient))
        .collect();
    let mut notes = Vec::new();
    for (s, o) in samples.iter().zip(&outcomes) {
        if let Some(n) = &o.note {
            notes.push(format!("sample {}: {n}", s.index));
        }
        if let ExtractedPayload::FolProgram { premise_fols, .. } = &s.payload {
            if premise_fols.len() != problem.premises_nl.len() {
                notes.push(format!(
                    "sample {}: {} premise formulas for {} premises",
                    s.index,
                    premise_fols.len(),
                    problem.premises_nl.len()
                ));
            }
        }
    }
    let per_sample_labels: Vec<Label> = outcomes.iter().map(|o| o.label).collect();
    let vote = majority_vote(&per_sample_labels).map_err(|e| fail(e.to_string()))?;
    Ok(Prediction {
        problem_id: problem.id.clone(),
        mode: cfg.mode,
        samples,
        per_sample_labels,
        vote,
        gold_label: problem.gold_label,
        depth: problem.depth,
        notes,
    })
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("checkpoint {path}: {source}")]
    Checkpoint {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Reads a predictions file, skipping a torn final line.
pub fn read_run_records(path: &Path) -> std::io::Result<Vec<RunRecord>> {
    let file = File::open(path)?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line) {
            Ok(r) => out.push(r),
            Err(_) => break,
        }
    }
    Ok(out)
}

fn record_line(r: &RunRecord) -> String {
    let mut s = serde_json::to_string(r).expect("records serialize");
    s.push('\n');
    s
}

/// Runs every problem, at most `cfg.parallelism` at a time, and returns one
/// record per problem in input order.
///
/// With a checkpoint path, finished records are appended as they arrive
/// and predictions already present for this mode are reused rather than
/// regenerated (failures are retried). On completion the file is rewritten
/// in input order, so repeated runs produce identical files.
pub fn run_dataset(
    client: &dyn GeneratorClient,
    cfg: &RunConfig,
    problems: &[ProblemRecord],
    checkpoint: Option<&Path>,
) -> Result<Vec<RunRecord>, PipelineError> {
    let ck_err = |source| PipelineError::Checkpoint {
        path: checkpoint.map(|p| p.display().to_string()).unwrap_or_default(),
        source,
    };
    let mut finished: HashMap<String, RunRecord> = HashMap::new();
    let mut other_modes: Vec<RunRecord> = Vec::new();
    if let Some(path) = checkpoint.filter(|p| p.exists()) {
        let wanted: HashSet<&str> = problems.iter().map(|p| p.id.as_str()).collect();
        for r in read_run_records(path).map_err(ck_err)? {
            match &r {
                RunRecord::Prediction(p) if p.mode == cfg.mode && wanted.contains(p.problem_id.as_str()) => {
                    finished.insert(p.problem_id.clone(), r);
                }
                _ if r.mode() != cfg.mode => other_modes.push(r),
                _ => {}
            }
        }
    }
    let todo: Vec<&ProblemRecord> = problems.iter().filter(|p| !finished.contains_key(&p.id)).collect();

    let mut sink = match checkpoint {
        Some(path) => {
            // Drop a torn trailing line before appending.
            let kept: String = other_modes.iter().chain(finished.values()).map(record_line).collect();
            std::fs::write(path, kept).map_err(ck_err)?;
            Some(OpenOptions::new().append(true).open(path).map_err(ck_err)?)
        }
        None => None,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism.max(1))
        .build()
        .map_err(|e| PipelineError::Pool(e.to_string()))?;
    let (tx, rx) = mpsc::channel::<RunRecord>();
    let fresh: Vec<RunRecord> = std::thread::scope(|scope| {
        let writer = scope.spawn(move || -> std::io::Result<Vec<RunRecord>> {
            let mut got = Vec::new();
            for r in rx {
                if let Some(f) = sink.as_mut() {
                    f.write_all(record_line(&r).as_bytes())?;
                    f.flush()?;
                }
                got.push(r);
            }
            Ok(got)
        });
        pool.install(|| {
            todo.par_iter().for_each_with(tx, |tx, p| {
                let record = match run_problem(client, cfg, p) {
                    Ok(pred) => RunRecord::Prediction(pred),
                    Err(fail) => RunRecord::Failure(fail),
                };
                // The writer only stops once every sender is gone.
                let _ = tx.send(record);
            });
        });
        writer.join().expect("writer thread")
    })
    .map_err(ck_err)?;

    for r in fresh {
        finished.insert(r.problem_id().to_owned(), r);
    }
    let ordered: Vec<RunRecord> = problems
        .iter()
        .filter_map(|p| finished.remove(&p.id))
        .collect();

    if let Some(path) = checkpoint {
        let text: String = other_modes.iter().chain(&ordered).map(record_line).collect();
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, text).map_err(ck_err)?;
        std::fs::rename(&tmp, path).map_err(ck_err)?;
    }
    Ok(ordered)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worksheet_program_is_uncertain() {
        let ex = &bundled_bank()[0];
        let payload = ExtractedPayload::FolProgram {
            premise_fols: ex.premises_fol.clone(),
            conclusion_fol: ex.conclusion_fol.clone(),
        };
        assert_eq!(label_sample(&payload, &ProofLimits::default(), false), Label::Uncertain);
    }

    #[test]
    fn arity_clash_is_error() {
        let payload = ExtractedPayload::FolProgram {
            premise_fols: vec!["Summer(June)".into(), "Summer -> Warm(June)".into()],
            conclusion_fol: "Warm(June)".into(),
        };
        let o = evaluate_payload(&payload, &ProofLimits::default(), false);
        assert_eq!(o.label, Label::Error);
        assert!(o.note.unwrap().contains("Summer/1, Summer/0"));
    }

    #[test]
    fn direct_label_passes_through() {
        let p = ExtractedPayload::DirectLabel { label: Label::False };
        assert_eq!(label_sample(&p, &ProofLimits::default(), false), Label::False);
    }

    #[test]
    fn free_variable_needs_lenient_mode() {
        let payload = ExtractedPayload::FolProgram {
            premise_fols: vec!["Man(x) -> Mortal(x)".into(), "Man(Socrates)".into()],
            conclusion_fol: "Mortal(Socrates)".into(),
        };
        assert_eq!(label_sample(&payload, &ProofLimits::default(), false), Label::Error);
        assert_eq!(label_sample(&payload, &ProofLimits::default(), true), Label::True);
    }
}
