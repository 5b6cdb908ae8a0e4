use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Level-to-level bottleneck propagation probabilities between two periods.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub src_levels: Vec<usize>,
    pub dst_levels: Vec<usize>,
    /// `probabilities[a][b]` is the probability from `src_levels[a]` to `dst_levels[b]`.
    pub probabilities: Vec<Vec<f64>>,
    pub total: usize,
    pub src_counts: Vec<usize>,
    pub dst_counts: Vec<usize>,
}

impl TransitionMatrix {
    pub fn get(&self, src_level: usize, dst_level: usize) -> Option<f64> {
        let a = self.src_levels.iter().position(|&l| l == src_level)?;
        let b = self.dst_levels.iter().position(|&l| l == dst_level)?;
        Some(self.probabilities[a][b])
    }

    /// `(src_level, dst_level, probability)` rows in level order.
    pub fn rows(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.src_levels.iter().enumerate().flat_map(move |(a, &s)| {
            self.dst_levels
                .iter()
                .enumerate()
                .map(move |(b, &d)| (s, d, self.probabilities[a][b]))
        })
    }
}

/// `P(k → k') = |N_k ∩ N_k'| / N` for every pair of source and target levels.
pub fn propagation_probability<K: Ord>(
    src: &BTreeMap<usize, BTreeSet<K>>,
    dst: &BTreeMap<usize, BTreeSet<K>>,
    total: usize,
) -> Result<TransitionMatrix> {
    if total == 0 {
        return Err(Error::InvalidArgument(
            "total bottleneck count must be positive".into(),
        ));
    }
    let probabilities = src
        .values()
        .map(|a| {
            dst.values()
                .map(|b| a.intersection(b).count() as f64 / total as f64)
                .collect()
        })
        .collect();
    Ok(TransitionMatrix {
        src_levels: src.keys().copied().collect(),
        dst_levels: dst.keys().copied().collect(),
        probabilities,
        total,
        src_counts: src.values().map(BTreeSet::len).collect(),
        dst_counts: dst.values().map(BTreeSet::len).collect(),
    })
}
