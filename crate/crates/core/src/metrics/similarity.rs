//! Community-to-community similarity measures used by the tracking baselines.

use std::collections::{BTreeMap, BTreeSet};

fn intersection<K: Ord>(a: &BTreeSet<K>, b: &BTreeSet<K>) -> usize {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().filter(|k| large.contains(k)).count()
}

/// Jaccard coefficient. Two empty sets score 0.
pub fn sim_jaccard<K: Ord>(a: &BTreeSet<K>, b: &BTreeSet<K>) -> f64 {
    let common = intersection(a, b);
    let union = a.len() + b.len() - common;
    if union == 0 {
        0.0
    } else {
        common as f64 / union as f64
    }
}

/// Shared fraction of the larger community, zeroed below `threshold` (`>=` keeps).
pub fn sim_maxratio<K: Ord>(a: &BTreeSet<K>, b: &BTreeSet<K>, threshold: f64) -> f64 {
    let largest = a.len().max(b.len());
    if largest == 0 {
        return 0.0;
    }
    let r = intersection(a, b) as f64 / largest as f64;
    if r >= threshold {
        r
    } else {
        0.0
    }
}

/// Inclusion measure weighted by node importance inside the source community.
///
/// Nodes missing from `importance` count as zero. If the source community
/// has no importance mass at all, the importance factor is dropped and only
/// the member-inclusion ratio remains.
pub fn sim_ged<K: Ord>(a: &BTreeSet<K>, b: &BTreeSet<K>, importance: &BTreeMap<K, f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let weight = |k: &K| importance.get(k).copied().unwrap_or(0.0);
    let shared: Vec<&K> = a.iter().filter(|k| b.contains(k)).collect();
    let inclusion = shared.len() as f64 / a.len() as f64;
    let total: f64 = a.iter().map(weight).sum();
    if total <= 0.0 {
        return inclusion;
    }
    let kept: f64 = shared.into_iter().map(weight).sum();
    inclusion * kept / total
}

/// Summed harmonic overlap of two transition-probability vectors; only a
/// score strictly above `threshold` survives.
pub fn sim_transition_vectors(va: &[f64], vb: &[f64], threshold: f64) -> f64 {
    assert_eq!(va.len(), vb.len(), "transition vectors must share a support");
    let s: f64 = va
        .iter()
        .zip(vb)
        .filter(|(p, q)| *p + *q > 0.0)
        .map(|(p, q)| 2.0 * p * q / (p + q))
        .sum();
    if s > threshold {
        s
    } else {
        0.0
    }
}

/// Distribution of a community's members over a list of reference
/// communities, normalized to sum to 1 (all zeros if nothing is shared).
pub fn transition_vector<K: Ord>(community: &BTreeSet<K>, reference: &[&BTreeSet<K>]) -> Vec<f64> {
    let counts: Vec<f64> = reference
        .iter()
        .map(|r| intersection(community, r) as f64)
        .collect();
    let total: f64 = counts.iter().sum();
    if total == 0.0 {
        counts
    } else {
        counts.into_iter().map(|c| c / total).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcemClass {
    VerySimilar,
    PartiallySimilar,
    Dissimilar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcemScore {
    pub forward: f64,
    pub backward: f64,
    pub class: IcemClass,
}

/// Two-directional inclusion check. `forward = |a∩b|/|a|`, `backward = |a∩b|/|b|`.
/// Very similar requires `forward > k2` and `backward >= k1`; partially
/// similar requires both directions strictly above `k1`.
pub fn sim_icem<K: Ord>(a: &BTreeSet<K>, b: &BTreeSet<K>, k1: f64, k2: f64) -> IcemScore {
    let common = intersection(a, b) as f64;
    let ratio = |len: usize| if len == 0 { 0.0 } else { common / len as f64 };
    let forward = ratio(a.len());
    let backward = ratio(b.len());
    let class = if forward > k2 && backward >= k1 {
        IcemClass::VerySimilar
    } else if forward > k1 && backward > k1 {
        IcemClass::PartiallySimilar
    } else {
        IcemClass::Dissimilar
    };
    IcemScore {
        forward,
        backward,
        class,
    }
}

/// Overlap coefficient. Either set empty scores 0.
pub fn sim_overlap<K: Ord>(a: &BTreeSet<K>, b: &BTreeSet<K>) -> f64 {
    let smallest = a.len().min(b.len());
    if smallest == 0 {
        0.0
    } else {
        intersection(a, b) as f64 / smallest as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&'static str]) -> BTreeSet<&'static str> {
        items.iter().copied().collect()
    }

    #[test]
    fn jaccard_fixtures() {
        assert_eq!(sim_jaccard(&set(&["a", "b", "c"]), &set(&["b", "c", "d"])), 0.5);
        assert_eq!(sim_jaccard(&set(&["a", "b"]), &set(&["a", "b"])), 1.0);
        assert_eq!(sim_jaccard(&set(&["a"]), &set(&["b"])), 0.0);
        assert_eq!(sim_jaccard::<&str>(&set(&[]), &set(&[])), 0.0);
    }

    #[test]
    fn maxratio_threshold_is_inclusive() {
        let a = set(&["a", "b", "c"]);
        let b = set(&["b", "c", "d"]);
        assert_eq!(sim_maxratio(&a, &b, 0.3), 2.0 / 3.0);
        assert_eq!(sim_maxratio(&a, &b, 0.7), 0.0);
        assert_eq!(sim_maxratio(&a, &a, 0.3), 1.0);
        assert_eq!(sim_maxratio(&a, &b, 2.0 / 3.0), 2.0 / 3.0);
    }

    #[test]
    fn ged_fixtures() {
        let importance: BTreeMap<_, _> = [("a", 2.0), ("b", 1.0), ("c", 1.0)].into_iter().collect();
        let a = set(&["a", "b", "c"]);
        assert_eq!(sim_ged(&a, &set(&["a", "b"]), &importance), 0.5);
        assert_eq!(sim_ged(&a, &set(&["a", "b", "c", "z"]), &importance), 1.0);
        assert_eq!(sim_ged(&a, &set(&["x", "y"]), &importance), 0.0);
    }

    #[test]
    fn transition_vector_fixtures() {
        assert!((sim_transition_vectors(&[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5], 0.0) - 1.0).abs() < 1e-15);
        assert_eq!(sim_transition_vectors(&[1.0, 0.0], &[0.0, 1.0], 0.0), 0.0);
        assert_eq!(sim_transition_vectors(&[0.5, 0.5], &[0.5, 0.5], 0.9), 1.0);
        // strict comparison
        assert_eq!(sim_transition_vectors(&[0.5, 0.5], &[0.5, 0.5], 1.0), 0.0);
    }

    #[test]
    fn transition_vector_support() {
        let c = set(&["a", "b", "c", "d"]);
        let r1 = set(&["a", "b"]);
        let r2 = set(&["c", "x"]);
        let r3 = set(&["y"]);
        assert_eq!(transition_vector(&c, &[&r1, &r2, &r3]), vec![2.0 / 3.0, 1.0 / 3.0, 0.0]);
    }

    #[test]
    fn icem_fixtures() {
        let a = set(&["a", "b", "c"]);
        assert_eq!(sim_icem(&a, &a, 0.1, 0.5).class, IcemClass::VerySimilar);

        let ten_a: BTreeSet<u32> = (0..10).collect();
        let ten_b: BTreeSet<u32> = (9..19).collect();
        let s = sim_icem(&ten_a, &ten_b, 0.1, 0.5);
        assert_eq!(s.forward, 0.1);
        assert_eq!(s.class, IcemClass::Dissimilar);

        // the later community keeps 6 of the earlier community's 10 members
        let later: BTreeSet<u32> = (0..6).collect();
        let s = sim_icem(&ten_a, &later, 0.1, 0.5);
        assert_eq!(s.forward, 0.6);
        assert_eq!(s.class, IcemClass::VerySimilar);

        // a small community swallowed by a huge one is not very similar
        let huge: BTreeSet<u32> = (0..1000).collect();
        let tiny: BTreeSet<u32> = (0..5).collect();
        assert_eq!(sim_icem(&tiny, &huge, 0.1, 0.5).class, IcemClass::Dissimilar);
    }

    #[test]
    fn overlap_fixtures() {
        assert_eq!(sim_overlap(&set(&["a", "b"]), &set(&["a", "b", "c", "d"])), 1.0);
        assert_eq!(sim_overlap(&set(&["a", "b", "c"]), &set(&["b", "c", "d"])), 2.0 / 3.0);
        assert_eq!(sim_overlap(&set(&["a"]), &set(&["b"])), 0.0);
    }
}
