use std::cmp::Ordering;

use rayon::prelude::*;

use super::dominance::ValuedGraph;

/// Leader `a` outranks leader `b` when it has the larger value, or the same
/// value and the smaller index.
pub(crate) fn outranks(values: &[f64], a: usize, b: usize) -> bool {
    values[a] > values[b] || (values[a] == values[b] && a < b)
}

fn rank_order(values: &[f64], a: usize, b: usize) -> Ordering {
    values[b].total_cmp(&values[a]).then(a.cmp(&b))
}

/// Hierarchy over local leaders: each non-root leader hangs below the
/// nearest leader that outranks it, at hop distance `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderForest {
    /// Leaders from the highest-ranked down.
    leaders: Vec<usize>,
    parent: Vec<Option<usize>>,
    delta: Vec<usize>,
    values: Vec<f64>,
    slot: Vec<usize>,
}

impl LeaderForest {
    /// Leaders in descending rank; parents always precede their children.
    pub fn leaders(&self) -> &[usize] {
        &self.leaders
    }

    pub fn len(&self) -> usize {
        self.leaders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaders.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.slot.get(node).is_some_and(|&s| s != usize::MAX)
    }

    fn slot_of(&self, leader: usize) -> usize {
        let s = self.slot[leader];
        assert!(s != usize::MAX, "node {leader} is not a leader");
        s
    }

    pub fn parent(&self, leader: usize) -> Option<usize> {
        self.parent[self.slot_of(leader)]
    }

    /// Hop distance to the parent; roots carry one more than the largest
    /// non-root distance.
    pub fn delta(&self, leader: usize) -> usize {
        self.delta[self.slot_of(leader)]
    }

    pub fn value(&self, leader: usize) -> f64 {
        self.values[leader]
    }

    /// Leaders with no outranking leader reachable, one per component.
    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        self.leaders
            .iter()
            .zip(&self.parent)
            .filter(|(_, p)| p.is_none())
            .map(|(&l, _)| l)
    }

    /// The highest-ranked leader overall.
    pub fn root(&self) -> Option<usize> {
        self.leaders.first().copied()
    }

    /// Center score `value * delta`.
    pub fn score(&self, leader: usize) -> f64 {
        self.values[leader] * self.delta(leader) as f64
    }

    /// Leaders ordered for center selection: score descending, then value
    /// descending, then index ascending.
    pub fn center_ranking(&self) -> Vec<usize> {
        let mut order = self.leaders.clone();
        order.sort_by(|&a, &b| {
            self.score(b)
                .total_cmp(&self.score(a))
                .then(self.values[b].total_cmp(&self.values[a]))
                .then(a.cmp(&b))
        });
        order
    }
}

struct SearchBuffers {
    seen: Vec<u32>,
    stamp: u32,
    frontier: Vec<usize>,
    next: Vec<usize>,
}

impl SearchBuffers {
    fn new(n: usize) -> Self {
        Self {
            seen: vec![0; n],
            stamp: 0,
            frontier: Vec::new(),
            next: Vec::new(),
        }
    }
}

/// Breadth-first search from `start` that stops at the first level holding
/// a leader that outranks it. Among equidistant candidates the highest value
/// wins, then the smallest index.
fn nearest_outranking(
    vg: &ValuedGraph<'_>,
    is_leader: &[bool],
    start: usize,
    buf: &mut SearchBuffers,
) -> Option<(usize, usize)> {
    let graph = vg.graph();
    let values = vg.values();
    buf.stamp = buf.stamp.wrapping_add(1);
    if buf.stamp == 0 {
        buf.seen.fill(0);
        buf.stamp = 1;
    }
    let stamp = buf.stamp;
    buf.frontier.clear();
    buf.frontier.push(start);
    buf.seen[start] = stamp;
    let mut depth = 0;
    while !buf.frontier.is_empty() {
        depth += 1;
        buf.next.clear();
        let mut best: Option<usize> = None;
        for &u in &buf.frontier {
            for &v in graph.neighbor_ids(u) {
                if buf.seen[v] == stamp {
                    continue;
                }
                buf.seen[v] = stamp;
                buf.next.push(v);
                if is_leader[v] && outranks(values, v, start) {
                    best = match best {
                        Some(b) if !outranks(values, v, b) => Some(b),
                        _ => Some(v),
                    };
                }
            }
        }
        if let Some(b) = best {
            return Some((b, depth));
        }
        std::mem::swap(&mut buf.frontier, &mut buf.next);
    }
    None
}

/// Link every leader to its nearest outranking leader by local BFS.
pub fn lbfs_link_leaders(vg: &ValuedGraph<'_>, leaders: &[usize]) -> LeaderForest {
    let n = vg.values().len();
    let mut is_leader = vec![false; n];
    for &l in leaders {
        is_leader[l] = true;
    }
    let mut ordered = leaders.to_vec();
    ordered.sort_by(|&a, &b| rank_order(vg.values(), a, b));
    ordered.dedup();

    let links: Vec<Option<(usize, usize)>> = ordered
        .par_iter()
        .map_init(
            || SearchBuffers::new(n),
            |buf, &l| nearest_outranking(vg, &is_leader, l, buf),
        )
        .collect();

    let max_delta = links.iter().flatten().map(|&(_, d)| d).max().unwrap_or(0);
    let mut slot = vec![usize::MAX; n];
    for (i, &l) in ordered.iter().enumerate() {
        slot[l] = i;
    }
    LeaderForest {
        parent: links.iter().map(|l| l.map(|(p, _)| p)).collect(),
        delta: links
            .iter()
            .map(|l| l.map_or(max_delta + 1, |(_, d)| d))
            .collect(),
        leaders: ordered,
        values: vg.values().to_vec(),
        slot,
    }
}

/// The `k` leaders with the highest center scores, in ranking order.
/// `k` is clamped to `1..=leaders`.
pub fn select_centers(forest: &LeaderForest, k: usize) -> Vec<usize> {
    let clamped = clamp_k(forest, k);
    let mut ranking = forest.center_ranking();
    ranking.truncate(clamped);
    ranking
}

pub(crate) fn clamp_k(forest: &LeaderForest, k: usize) -> usize {
    let n = forest.len();
    if k > n {
        log::warn!("requested {k} centers but only {n} leaders exist; using {n}");
        n
    } else if k == 0 && n > 0 {
        log::warn!("requested 0 centers; using 1");
        1
    } else {
        k
    }
}

#[cfg(test)]
mod tests {
    use super::super::dominance::{attribute_values, build_pointer_dag, find_local_leaders};
    use super::*;
    use crate::graph::WeightedGraph;

    #[test]
    fn leaders_across_three_hops() {
        // L1 = node 0 (value 5), L2 = node 4 (value 7), 3-hop path between them
        let edges = [
            (0, 5, 2.5),
            (0, 6, 2.5),
            (0, 1, 0.0),
            (1, 2, 0.0),
            (2, 4, 0.0),
            (4, 7, 3.5),
            (4, 8, 3.5),
        ];
        let g = WeightedGraph::from_edges(9, &edges).unwrap();
        let vg = build_pointer_dag(attribute_values(&g));
        let leaders = find_local_leaders(&vg);
        assert!(leaders.contains(&0) && leaders.contains(&4));
        let forest = lbfs_link_leaders(&vg, &[0, 4]);
        assert_eq!(forest.parent(0), Some(4));
        assert_eq!(forest.delta(0), 3);
        assert_eq!(forest.root(), Some(4));
    }

    #[test]
    fn single_leader_is_root() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let vg = build_pointer_dag(attribute_values(&g));
        let forest = lbfs_link_leaders(&vg, &find_local_leaders(&vg));
        assert_eq!(forest.leaders(), &[1]);
        assert_eq!(forest.parent(1), None);
        assert_eq!(forest.delta(1), 1);
    }

    #[test]
    fn equal_leaders_root_is_smaller_index() {
        // two stars with equal centers joined through a zero-weight path
        let edges = [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 0.0), (3, 4, 0.0), (4, 5, 1.0), (4, 6, 1.0)];
        let g = WeightedGraph::from_edges(7, &edges).unwrap();
        let vg = build_pointer_dag(attribute_values(&g));
        let forest = lbfs_link_leaders(&vg, &[0, 4]);
        assert_eq!(forest.root(), Some(0));
        assert_eq!(forest.parent(4), Some(0));
        assert_eq!(forest.delta(4), 2);
        assert_eq!(forest.delta(0), 3);
    }

    #[test]
    fn centers_by_score() {
        // leader values 3 (root), 2 at distance 1, 1 at distance 3
        let edges = [
            (0, 1, 1.5),
            (0, 2, 1.5),
            (0, 3, 0.0),
            (3, 4, 1.0),
            (3, 5, 1.0),
            (0, 6, 0.0),
            (6, 7, 0.0),
            (7, 8, 0.0),
            (8, 9, 0.5),
            (8, 10, 0.5),
        ];
        let g = WeightedGraph::from_edges(11, &edges).unwrap();
        let vg = build_pointer_dag(attribute_values(&g));
        let forest = lbfs_link_leaders(&vg, &[0, 3, 8]);
        assert_eq!(forest.delta(3), 1);
        assert_eq!(forest.delta(8), 3);
        // root delta = 4, scores: 0 -> 12, 3 -> 2, 8 -> 3
        assert_eq!(select_centers(&forest, 1), vec![0]);
        assert_eq!(select_centers(&forest, 2), vec![0, 8]);
        assert_eq!(select_centers(&forest, 3), vec![0, 8, 3]);
        assert_eq!(select_centers(&forest, 10).len(), 3);
    }
}
