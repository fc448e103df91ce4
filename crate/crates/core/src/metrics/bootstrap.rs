use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{LabeledProblem, LabeledRun, MetricsError};
use crate::voting::majority_vote;

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn iteration_accuracy(problems: &[&LabeledProblem], k: usize, seed: u64, iteration: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration);
    let mut draw = Vec::with_capacity(k);
    let mut correct = 0usize;
    for p in problems {
        draw.clear();
        draw.extend((0..k).map(|_| p.labels[rng.random_range(0..p.labels.len())]));
        let vote = majority_vote(&draw).expect("k >= 1");
        if vote.final_label == p.gold {
            correct += 1;
        }
    }
    correct as f64 / problems.len() as f64
}

fn bootstrap(problems: &[&LabeledProblem], k: usize, b: usize, seed: u64) -> Result<(f64, f64), MetricsError> {
    if problems.is_empty() {
        return Err(MetricsError::EmptyRun);
    }
    if k == 0 || b == 0 {
        return Err(MetricsError::InvalidParameter("K and B must be at least 1".into()));
    }
    if let Some(p) = problems.iter().find(|p| p.labels.is_empty()) {
        return Err(MetricsError::NoSamples(p.id.clone()));
    }
    let accs: Vec<f64> = (0..b as u64)
        .into_par_iter()
        .map(|i| iteration_accuracy(problems, k, seed, i))
        .collect();
    Ok(mean_std(&accs))
}

/// Bootstrapped K-way vote accuracy over `b` resamples.
///
/// Each iteration draws K labels per problem uniformly with replacement,
/// votes over them in draw order and scores the vote against gold.
/// Iteration `i` uses a ChaCha8 stream `i` keyed by `seed`, so results do not
/// depend on thread scheduling.
pub fn bootstrap_vote_accuracy(run: &LabeledRun, k: usize, b: usize, seed: u64) -> Result<(f64, f64), MetricsError> {
    let problems: Vec<&LabeledProblem> = run.problems.iter().collect();
    bootstrap(&problems, k, b, seed)
}

pub fn k_sweep(run: &LabeledRun, ks: &[usize], b: usize, seed: u64) -> Result<BTreeMap<usize, (f64, f64)>, MetricsError> {
    ks.iter()
        .map(|&k| Ok((k, bootstrap_vote_accuracy(run, k, b, seed)?)))
        .collect()
}

/// Bootstrap accuracy restricted to each depth present in the run.
pub fn per_depth_accuracy(run: &LabeledRun, k: usize, b: usize, seed: u64) -> Result<BTreeMap<u8, (f64, f64)>, MetricsError> {
    let mut by_depth: BTreeMap<u8, Vec<&LabeledProblem>> = BTreeMap::new();
    for p in &run.problems {
        let d = p.depth.ok_or_else(|| MetricsError::MissingDepth(p.id.clone()))?;
        by_depth.entry(d).or_default().push(p);
    }
    if by_depth.is_empty() {
        return Err(MetricsError::EmptyRun);
    }
    by_depth
        .into_iter()
        .map(|(d, ps)| Ok((d, bootstrap(&ps, k, b, seed)?)))
        .collect()
}
