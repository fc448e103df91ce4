use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};

use super::MetricsError;
use crate::voting::Label;

/// Prediction × gold counts. Rows: True, False, Uncertain, Error; columns:
/// True, False, Uncertain.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Confusion {
    pub matrix: [[usize; 3]; 4],
    /// Correct True/False predictions over all True/False predictions;
    /// `None` when no True/False prediction was made.
    pub tf_precision: Option<f64>,
    /// Correct True/False predictions over all True/False gold labels.
    pub tf_recall: Option<f64>,
}

pub fn confusion(preds: &[Label], gold: &[Label]) -> Result<Confusion, MetricsError> {
    if preds.len() != gold.len() {
        return Err(MetricsError::LengthMismatch(preds.len(), gold.len()));
    }
    let mut c = Confusion::default();
    let is_tf = |l: Label| matches!(l, Label::True | Label::False);
    let (mut hits, mut predicted, mut actual) = (0usize, 0usize, 0usize);
    for (&p, &g) in preds.iter().zip(gold) {
        if g == Label::Error {
            return Err(MetricsError::InvalidParameter("gold label cannot be Error".into()));
        }
        c.matrix[p.index()][g.index()] += 1;
        if is_tf(p) {
            predicted += 1;
            if p == g {
                hits += 1;
            }
        }
        if is_tf(g) {
            actual += 1;
        }
    }
    let ratio = |n: usize, d: usize| (d > 0).then(|| n as f64 / d as f64);
    c.tf_precision = ratio(hits, predicted);
    c.tf_recall = ratio(hits, actual);
    Ok(c)
}

/// Fraction of instances where both methods are wrong in the same way,
/// among instances where at least one of them is wrong.
pub fn similarity(a: &[Label], b: &[Label], gold: &[Label]) -> Result<f64, MetricsError> {
    if a.len() != b.len() || a.len() != gold.len() {
        return Err(MetricsError::LengthMismatch(a.len(), b.len().max(gold.len())));
    }
    let (mut same, mut any) = (0usize, 0usize);
    for ((x, y), r) in a.iter().zip(b).zip(gold) {
        if x != r || y != r {
            any += 1;
            if x == y {
                same += 1;
            }
        }
    }
    if any == 0 {
        return Err(MetricsError::UndefinedSimilarity);
    }
    Ok(same as f64 / any as f64)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum McNemarVariant {
    /// χ² with continuity correction, 1 degree of freedom.
    #[default]
    Corrected,
    /// Two-sided exact binomial test on the discordant pairs.
    Exact,
}

/// p-value from discordant counts `b` (A right, B wrong) and `c` (A wrong,
/// B right).
pub fn mcnemar_from_counts(b: usize, c: usize, variant: McNemarVariant) -> f64 {
    let n = b + c;
    if n == 0 {
        return 1.0;
    }
    match variant {
        McNemarVariant::Corrected => {
            let diff = (b as f64 - c as f64).abs() - 1.0;
            let stat = diff.max(0.0).powi(2) / n as f64;
            if stat == 0.0 {
                return 1.0;
            }
            let chi = ChiSquared::new(1.0).expect("valid dof");
            chi.sf(stat)
        }
        McNemarVariant::Exact => {
            let bin = Binomial::new(0.5, n as u64).expect("valid binomial");
            (2.0 * bin.cdf(b.min(c) as u64)).min(1.0)
        }
    }
}

pub fn mcnemar(a_correct: &[bool], b_correct: &[bool], variant: McNemarVariant) -> Result<f64, MetricsError> {
    if a_correct.len() != b_correct.len() {
        return Err(MetricsError::LengthMismatch(a_correct.len(), b_correct.len()));
    }
    let b = a_correct.iter().zip(b_correct).filter(|(x, y)| **x && !**y).count();
    let c = a_correct.iter().zip(b_correct).filter(|(x, y)| !**x && **y).count();
    Ok(mcnemar_from_counts(b, c, variant))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::*;

    #[test]
    fn precision_recall_by_hand() {
        let c = confusion(&[True, False, Uncertain, True], &[True, True, True, False]).unwrap();
        assert_eq!(c.tf_precision, Some(1.0 / 3.0));
        assert_eq!(c.tf_recall, Some(1.0 / 4.0));
        assert_eq!(c.matrix.iter().flatten().sum::<usize>(), 4);
    }

    #[test]
    fn similarity_cases() {
        assert_eq!(similarity(&[True, False, Uncertain], &[True, Uncertain, Uncertain], &[False; 3]).unwrap(), 2.0 / 3.0);
        assert_eq!(similarity(&[True, True], &[True, True], &[False, True]).unwrap(), 1.0);
        assert_eq!(similarity(&[True, False], &[False, True], &[False, False]).unwrap(), 0.0);
        assert!(similarity(&[True], &[True], &[True]).is_err());
    }

    #[test]
    fn mcnemar_edge_cases() {
        assert_eq!(mcnemar_from_counts(5, 5, McNemarVariant::Corrected), 1.0);
        assert_eq!(mcnemar_from_counts(0, 0, McNemarVariant::Exact), 1.0);
        // Exact: P(X <= 0) for Bin(10, 1/2) is 1/1024, doubled.
        assert!((mcnemar_from_counts(10, 0, McNemarVariant::Exact) - 2.0 / 1024.0).abs() < 1e-15);
    }
}
