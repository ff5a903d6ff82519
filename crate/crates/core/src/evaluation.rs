//! Strict alignment metrics and delimiter-level metrics.
//!
//! Strict metrics drop null beads from both sides, then count a test bead as
//! correct only if gold contains a bead with exactly the same spans. Any 0/0
//! ratio is reported as 0.

use std::collections::HashSet;

use crate::alignment::{AlignmentSet, Bead, BeadType};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    fn from_counts(correct: usize, predicted: usize, actual: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(correct, predicted);
        let recall = ratio(correct, actual);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf { precision, recall, f1 }
    }
}

impl std::fmt::Display for Prf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.4}\t{:.4}\t{:.4}", self.precision, self.recall, self.f1)
    }
}

fn non_null(set: &AlignmentSet) -> HashSet<(usize, usize, usize, usize)> {
    set.beads
        .iter()
        .filter(|b| !b.is_null())
        .map(|b| (b.src.start, b.src.end, b.tgt.start, b.tgt.end))
        .collect()
}

/// Strict precision, recall and F1 of `test` against `gold`.
pub fn strict_prf(test: &AlignmentSet, gold: &AlignmentSet) -> Result<Prf> {
    if test.n_src != gold.n_src || test.n_tgt != gold.n_tgt {
        return Err(Error::Validation(format!(
            "document sizes differ: test {}/{} vs gold {}/{}",
            test.n_src, test.n_tgt, gold.n_src, gold.n_tgt
        )));
    }
    let test = non_null(test);
    let gold = non_null(gold);
    let correct = test.intersection(&gold).count();
    Ok(Prf::from_counts(correct, test.len(), gold.len()))
}

/// Gold 1-to-1 beads whose neighbouring beads are both 1-to-1.
pub fn true_hard_delimiters(gold: &AlignmentSet) -> Vec<(usize, usize)> {
    let one = BeadType::new(1, 1);
    gold.beads
        .windows(3)
        .filter(|w| w.iter().all(|b: &Bead| b.bead_type() == one))
        .map(|w| (w[1].src.start, w[1].tgt.start))
        .collect()
}

/// Exact pair matching of `found` against the gold hard delimiters.
pub fn delimiter_prf(found: &[(usize, usize)], gold: &AlignmentSet) -> Prf {
    let truth: HashSet<(usize, usize)> = true_hard_delimiters(gold).into_iter().collect();
    let found: HashSet<(usize, usize)> = found.iter().copied().collect();
    let correct = found.intersection(&truth).count();
    Prf::from_counts(correct, found.len(), truth.len())
}
