use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DatasetError, ProblemRecord};
use crate::voting::Label;

pub const MAX_DEPTH: u8 = 5;

/// Draws `per_cell` records uniformly without replacement from each
/// (depth, label) cell, depth 0..=5 crossed with the three gold labels.
///
/// Cells are visited depth-major in label order True, False, Uncertain; one
/// RNG seeded from `seed` serves all cells in that order. Within a cell the
/// chosen records keep their input order. Records without a depth are
/// ignored.
pub fn balanced_sample(records: &[ProblemRecord], per_cell: usize, seed: u64) -> Result<Vec<ProblemRecord>, DatasetError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(per_cell * 18);
    for depth in 0..=MAX_DEPTH {
        for label in Label::GOLD {
            let cell: Vec<&ProblemRecord> = records
                .iter()
                .filter(|r| r.depth == Some(depth) && r.gold_label == label)
                .collect();
            if cell.len() < per_cell {
                return Err(DatasetError::InsufficientCell { depth, label, available: cell.len(), requested: per_cell });
            }
            let mut picked = index::sample(&mut rng, cell.len(), per_cell).into_vec();
            picked.sort_unstable();
            out.extend(picked.into_iter().map(|i| cell[i].clone()));
        }
    }
    Ok(out)
}
