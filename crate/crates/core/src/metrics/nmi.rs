use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Node → community assignment with labels relabeled densely from 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPartition<K: Ord> {
    labels: BTreeMap<K, usize>,
    community_count: usize,
    pub snapshot: usize,
}

impl<K: Ord + Clone> LabeledPartition<K> {
    /// Relabels arbitrary community labels to `0..c` in order of first
    /// appearance by node key.
    pub fn new<L: Ord>(assignment: impl IntoIterator<Item = (K, L)>, snapshot: usize) -> Self {
        let raw: BTreeMap<K, L> = assignment.into_iter().collect();
        let mut dense: BTreeMap<&L, usize> = BTreeMap::new();
        let mut labels = BTreeMap::new();
        for (node, label) in &raw {
            let next = dense.len();
            let id = *dense.entry(label).or_insert(next);
            labels.insert(node.clone(), id);
        }
        Self {
            community_count: dense.len(),
            labels,
            snapshot,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    pub fn label(&self, node: &K) -> Option<usize> {
        self.labels.get(node).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, usize)> {
        self.labels.iter().map(|(k, &l)| (k, l))
    }

    /// Member sets per community, indexed by dense label.
    pub fn communities(&self) -> Vec<std::collections::BTreeSet<K>> {
        let mut out = vec![std::collections::BTreeSet::new(); self.community_count];
        for (node, &label) in &self.labels {
            out[label].insert(node.clone());
        }
        out
    }
}

fn entropy(counts: &[usize], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information `2 I(X;Y) / (H(X) + H(Y))` with natural logs.
///
/// Two single-cluster partitions score 1; if exactly one of them is a single
/// cluster the score is 0.
pub fn nmi<K: Ord + Clone>(x: &LabeledPartition<K>, y: &LabeledPartition<K>) -> Result<f64> {
    if x.len() != y.len() || x.labels.keys().zip(y.labels.keys()).any(|(a, b)| a != b) {
        return Err(Error::NodeSetMismatch);
    }
    if x.is_empty() {
        return Err(Error::InvalidArgument("empty partitions".into()));
    }
    let n = x.len() as f64;
    let mut joint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut cx = vec![0usize; x.community_count];
    let mut cy = vec![0usize; y.community_count];
    for ((_, &a), &b) in x.labels.iter().zip(y.labels.values()) {
        *joint.entry((a, b)).or_default() += 1;
        cx[a] += 1;
        cy[b] += 1;
    }
    let hx = entropy(&cx, n);
    let hy = entropy(&cy, n);
    if hx + hy == 0.0 {
        return Ok(1.0);
    }
    if hx == 0.0 || hy == 0.0 {
        return Ok(0.0);
    }
    let mi: f64 = joint
        .iter()
        .map(|(&(a, b), &c)| {
            let pxy = c as f64 / n;
            pxy * (pxy * n * n / (cx[a] as f64 * cy[b] as f64)).ln()
        })
        .sum();
    Ok((2.0 * mi / (hx + hy)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(labels: &[u32]) -> LabeledPartition<usize> {
        LabeledPartition::new(labels.iter().copied().enumerate(), 0)
    }

    #[test]
    fn identical_up_to_permutation_is_one() {
        let a = part(&[0, 0, 1, 1, 2, 2]);
        let b = part(&[5, 5, 3, 3, 9, 9]);
        assert!((nmi(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn independent_fixture_is_zero() {
        let a = part(&[0, 0, 1, 1]);
        let b = part(&[0, 1, 0, 1]);
        assert_eq!(nmi(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_rules() {
        assert_eq!(nmi(&part(&[1, 1, 1]), &part(&[0, 0, 0])).unwrap(), 1.0);
        assert_eq!(nmi(&part(&[1, 1, 1]), &part(&[0, 1, 2])).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_nodes_error() {
        let a = LabeledPartition::new([(1, 0), (2, 0)], 0);
        let b = LabeledPartition::new([(1, 0), (3, 0)], 0);
        assert!(matches!(nmi(&a, &b), Err(Error::NodeSetMismatch)));
    }

    #[test]
    fn dense_relabeling() {
        let p = LabeledPartition::new([("b", 40), ("a", 7), ("c", 7)], 2);
        assert_eq!(p.label(&"a"), Some(0));
        assert_eq!(p.label(&"b"), Some(1));
        assert_eq!(p.label(&"c"), Some(0));
        assert_eq!(p.community_count(), 2);
    }
}
