//! Evaluation statistics over sampled-and-voted runs.

mod bootstrap;
mod plot;
mod stats;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generation::Mode;
use crate::pipeline::RunRecord;
use crate::voting::{majority_vote, Label};

pub use bootstrap::{bootstrap_vote_accuracy, k_sweep, mean_std, per_depth_accuracy};
pub use plot::{line_chart_svg, Series};
pub use stats::{confusion, mcnemar, mcnemar_from_counts, similarity, Confusion, McNemarVariant};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("run has no problems")]
    EmptyRun,
    #[error("problem `{0}` has no sample labels")]
    NoSamples(String),
    #[error("problem `{0}` has no depth")]
    MissingDepth(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("similarity is undefined: neither method errs on any instance")]
    UndefinedSimilarity,
    #[error("{0}")]
    InvalidParameter(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledProblem {
    pub id: String,
    /// Sample labels in generation order.
    pub labels: Vec<Label>,
    pub gold: Label,
    pub depth: Option<u8>,
}

impl LabeledProblem {
    pub fn final_label(&self) -> Label {
        majority_vote(&self.labels).map_or(Label::Error, |v| v.final_label)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LabeledRun {
    pub mode: Option<Mode>,
    pub problems: Vec<LabeledProblem>,
}

impl LabeledRun {
    /// Builds a run from pipeline output. A failed problem (no samples)
    /// counts as a single Error sample.
    pub fn from_records(records: &[RunRecord]) -> Self {
        let mut run = LabeledRun::default();
        for r in records {
            run.mode.get_or_insert(r.mode());
            match r {
                RunRecord::Prediction(p) => run.problems.push(LabeledProblem {
                    id: p.problem_id.clone(),
                    labels: p.per_sample_labels.clone(),
                    gold: p.gold_label,
                    depth: p.depth,
                }),
                RunRecord::Failure(f) => run.problems.push(LabeledProblem {
                    id: f.problem_id.clone(),
                    labels: vec![Label::Error],
                    gold: f.gold_label,
                    depth: f.depth,
                }),
            }
        }
        run
    }

    pub fn final_labels(&self) -> Vec<Label> {
        self.problems.iter().map(LabeledProblem::final_label).collect()
    }

    pub fn gold_labels(&self) -> Vec<Label> {
        self.problems.iter().map(|p| p.gold).collect()
    }

    pub fn correct(&self) -> Vec<bool> {
        self.problems.iter().map(|p| p.final_label() == p.gold).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub k: usize,
    pub bootstrap: usize,
    pub seed: u64,
    pub k_sweep: Vec<usize>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { k: 10, bootstrap: 1000, seed: 0, k_sweep: (1..=10).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mode: Option<Mode>,
    pub problems: usize,
    /// Accuracy of the stored all-sample votes.
    pub vote_accuracy: f64,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub confusion: [[usize; 3]; 4],
    pub tf_precision: Option<f64>,
    pub tf_recall: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_depth: Option<BTreeMap<u8, (f64, f64)>>,
    pub k_sweep: BTreeMap<usize, (f64, f64)>,
}

pub fn evaluate(run: &LabeledRun, opts: &ReportOptions) -> Result<EvalReport, MetricsError> {
    let (mean, std) = bootstrap_vote_accuracy(run, opts.k, opts.bootstrap, opts.seed)?;
    let finals = run.final_labels();
    let conf = confusion(&finals, &run.gold_labels())?;
    let per_depth = if run.problems.iter().all(|p| p.depth.is_some()) {
        Some(per_depth_accuracy(run, opts.k, opts.bootstrap, opts.seed)?)
    } else {
        None
    };
    let correct = run.correct().iter().filter(|c| **c).count();
    Ok(EvalReport {
        mode: run.mode,
        problems: run.problems.len(),
        vote_accuracy: correct as f64 / run.problems.len() as f64,
        mean_accuracy: mean,
        std_accuracy: std,
        confusion: conf.matrix,
        tf_precision: conf.tf_precision,
        tf_recall: conf.tf_recall,
        per_depth,
        k_sweep: k_sweep(run, &opts.k_sweep, opts.bootstrap, opts.seed)?,
    })
}

/// Pairwise statistics between runs, computed on the problems they share
/// (in the order of the first run).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub names: Vec<String>,
    pub shared_problems: usize,
    /// `None` where similarity is undefined (neither run errs).
    pub similarity: Vec<Vec<Option<f64>>>,
    pub mcnemar_p: Vec<Vec<f64>>,
    pub mcnemar_variant: McNemarVariant,
}

pub fn compare(runs: &[(String, LabeledRun)], variant: McNemarVariant) -> Comparison {
    let ids: Vec<&str> = match runs.first() {
        Some((_, first)) => first
            .problems
            .iter()
            .map(|p| p.id.as_str())
            .filter(|id| runs.iter().all(|(_, r)| r.problems.iter().any(|p| p.id == *id)))
            .collect(),
        None => Vec::new(),
    };
    let aligned: Vec<(Vec<Label>, Vec<Label>)> = runs
        .iter()
        .map(|(_, r)| {
            let by_id: HashMap<&str, &LabeledProblem> = r.problems.iter().map(|p| (p.id.as_str(), p)).collect();
            ids.iter().map(|id| (by_id[id].final_label(), by_id[id].gold)).unzip()
        })
        .collect();
    let n = runs.len();
    let mut sim = vec![vec![None; n]; n];
    let mut p = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let (a, gold) = &aligned[i];
            let (b, _) = &aligned[j];
            sim[i][j] = similarity(a, b, gold).ok();
            let ca: Vec<bool> = a.iter().zip(gold).map(|(x, g)| x == g).collect();
            let cb: Vec<bool> = b.iter().zip(gold).map(|(x, g)| x == g).collect();
            p[i][j] = mcnemar(&ca, &cb, variant).unwrap_or(1.0);
        }
    }
    Comparison {
        names: runs.iter().map(|(n, _)| n.clone()).collect(),
        shared_problems: ids.len(),
        similarity: sim,
        mcnemar_p: p,
        mcnemar_variant: variant,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(rows: &[(&[Label], Label, Option<u8>)]) -> LabeledRun {
        LabeledRun {
            mode: None,
            problems: rows
                .iter()
                .enumerate()
                .map(|(i, (labels, gold, depth))| LabeledProblem {
                    id: format!("p{i}"),
                    labels: labels.to_vec(),
                    gold: *gold,
                    depth: *depth,
                })
                .collect(),
        }
    }

    #[test]
    fn unanimous_correct_run() {
        use Label::*;
        let r = run(&[(&[True, True], True, Some(0)), (&[False; 3], False, Some(2))]);
        assert_eq!(bootstrap_vote_accuracy(&r, 10, 50, 1).unwrap(), (1.0, 0.0));
        let sweep = k_sweep(&r, &[1, 2, 3], 20, 1).unwrap();
        assert!(sweep.values().all(|v| *v == (1.0, 0.0)));
        let depth = per_depth_accuracy(&r, 3, 20, 1).unwrap();
        assert_eq!(depth.len(), 2);
        assert!(depth.values().all(|v| *v == (1.0, 0.0)));
    }

    #[test]
    fn depth_required() {
        let r = run(&[(&[Label::True], Label::True, None)]);
        assert_eq!(per_depth_accuracy(&r, 1, 1, 0), Err(MetricsError::MissingDepth("p0".into())));
        assert!(evaluate(&r, &ReportOptions { bootstrap: 10, ..Default::default() }).unwrap().per_depth.is_none());
    }

    #[test]
    fn empty_run_is_rejected() {
        assert_eq!(bootstrap_vote_accuracy(&LabeledRun::default(), 1, 1, 0), Err(MetricsError::EmptyRun));
    }

    #[test]
    fn comparison_is_symmetric() {
        use Label::*;
        let a = run(&[(&[True], True, None), (&[False], True, None), (&[Uncertain], False, None)]);
        let b = run(&[(&[False], True, None), (&[False], True, None), (&[True], False, None)]);
        let c = compare(&[("a".into(), a), ("b".into(), b)], McNemarVariant::Corrected);
        assert_eq!(c.shared_problems, 3);
        assert_eq!(c.similarity[0][1], c.similarity[1][0]);
        assert_eq!(c.mcnemar_p[0][1], c.mcnemar_p[1][0]);
    }
}
