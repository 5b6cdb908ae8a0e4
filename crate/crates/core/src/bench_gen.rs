//! Synthetic dynamic networks with planted, evolving communities.
//!
//! Snapshot 1 is a degree-capped planted partition: community sizes are
//! uniform in a range, target degrees follow a truncated power law, and a
//! `1 - mixing` share of each node's stubs is wired inside its community.
//! Later snapshots apply one scenario's events and rewire only the members
//! of the communities those events touched. Node ids persist across
//! snapshots so tracking metrics remain meaningful.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::local_search::{detect_weighted, Detection, SearchConfig};
use crate::metrics::{nmi, LabeledPartition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    BirthDeath,
    ExpandContract,
    Hide,
    MergeSplit,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::BirthDeath,
        Scenario::ExpandContract,
        Scenario::Hide,
        Scenario::MergeSplit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::BirthDeath => "birthdeath",
            Scenario::ExpandContract => "expandcontract",
            Scenario::Hide => "hide",
            Scenario::MergeSplit => "mergesplit",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub scenario: Scenario,
    /// Initial node count.
    pub n: usize,
    pub snapshots: usize,
    pub avg_degree: f64,
    pub max_degree: usize,
    /// Fraction of each node's edges that leave its community.
    pub mixing: f64,
    pub min_community: usize,
    pub max_community: usize,
    /// Event strength: share of communities touched per step and the
    /// fraction by which expanding or contracting communities change.
    pub intensity: f64,
    /// Exponent of the truncated power-law degree distribution.
    pub degree_exponent: f64,
    pub seed: u64,
}

impl BenchmarkConfig {
    pub fn new(scenario: Scenario, n: usize, seed: u64) -> Self {
        Self {
            scenario,
            n,
            snapshots: 5,
            avg_degree: 20.0,
            max_degree: 40,
            mixing: 0.2,
            min_community: 35,
            max_community: 60,
            intensity: 0.1,
            degree_exponent: 2.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InfeasibleConfig(msg));
        if self.snapshots == 0 {
            return bad("at least one snapshot is required".into());
        }
        if !(self.mixing > 0.0 && self.mixing < 1.0) {
            return bad(format!("mixing {} must lie in (0, 1)", self.mixing));
        }
        if !(self.avg_degree > 0.0 && self.avg_degree < self.max_degree as f64) {
            return bad(format!(
                "average degree {} must be positive and below the maximum {}",
                self.avg_degree, self.max_degree
            ));
        }
        if self.max_degree >= self.n {
            return bad(format!("maximum degree {} must be below n = {}", self.max_degree, self.n));
        }
        if self.min_community < 2 || self.min_community > self.max_community {
            return bad(format!(
                "community size range [{}, {}] is invalid",
                self.min_community, self.max_community
            ));
        }
        if self.n < self.min_community {
            return bad(format!(
                "n = {} cannot hold a community of at least {} nodes",
                self.n, self.min_community
            ));
        }
        if !(self.intensity > 0.0 && self.intensity <= 1.0) {
            return bad(format!("intensity {} must lie in (0, 1]", self.intensity));
        }
        if self.degree_exponent <= 1.0 {
            return bad("degree exponent must exceed 1".into());
        }
        if self.avg_degree < power_law_mean(1.0, self.max_degree as f64, self.degree_exponent) {
            return bad(format!(
                "average degree {} is below the smallest mean reachable with maximum {}",
                self.avg_degree, self.max_degree
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchEventKind {
    Birth,
    Death,
    Expand,
    Contract,
    Hide,
    Restore,
    Merge,
    Split,
}

/// One community event. `sources` are labels before the event, `results`
/// the labels it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchEvent {
    /// 1-based snapshot at which the event is first visible.
    pub snapshot: usize,
    pub kind: BenchEventKind,
    pub sources: Vec<u32>,
    pub results: Vec<u32>,
    pub size_change: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    /// Edges as `(u, v)` with `u < v`, sorted.
    pub edges: Vec<(u32, u32)>,
    /// Ground-truth community per present node.
    pub labels: BTreeMap<u32, u32>,
}

impl Snapshot {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Sorted node ids; position in this list is the graph index.
    pub fn nodes(&self) -> Vec<u32> {
        self.labels.keys().copied().collect()
    }

    pub fn degrees(&self) -> BTreeMap<u32, usize> {
        let mut deg: BTreeMap<u32, usize> = self.labels.keys().map(|&n| (n, 0)).collect();
        for &(u, v) in &self.edges {
            *deg.get_mut(&u).unwrap() += 1;
            *deg.get_mut(&v).unwrap() += 1;
        }
        deg
    }

    pub fn truth(&self, snapshot: usize) -> LabeledPartition<u32> {
        LabeledPartition::new(self.labels.iter().map(|(&n, &l)| (n, l)), snapshot)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicBenchmark {
    pub config: BenchmarkConfig,
    pub snapshots: Vec<Snapshot>,
    pub events: Vec<BenchEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub mean: f64,
    pub max: usize,
}

/// Exact mean and maximum degree of a snapshot.
pub fn realized_degree_stats(snapshot: &Snapshot) -> Result<DegreeStats> {
    if snapshot.labels.is_empty() {
        return Err(Error::InvalidArgument("snapshot has no nodes".into()));
    }
    let degrees = snapshot.degrees();
    Ok(DegreeStats {
        mean: 2.0 * snapshot.edges.len() as f64 / degrees.len() as f64,
        max: degrees.values().copied().max().unwrap_or(0),
    })
}

fn power_law_mean(lo: f64, hi: f64, tau: f64) -> f64 {
    if (tau - 2.0).abs() < 1e-12 {
        lo * hi * (hi / lo).ln() / (hi - lo)
    } else {
        let a = 1.0 - tau;
        let b = 2.0 - tau;
        (a / b) * (hi.powf(b) - lo.powf(b)) / (hi.powf(a) - lo.powf(a))
    }
}

/// Lower cutoff of the continuous truncated power law with the requested mean.
fn solve_min_degree(mean: f64, hi: f64, tau: f64) -> f64 {
    let (mut lo_k, mut hi_k) = (1.0, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo_k + hi_k);
        if power_law_mean(mid, hi, tau) < mean {
            lo_k = mid;
        } else {
            hi_k = mid;
        }
    }
    0.5 * (lo_k + hi_k)
}

struct Generator {
    config: BenchmarkConfig,
    rng: ChaCha8Rng,
    min_degree: f64,
    members: BTreeMap<u32, BTreeSet<u32>>,
    community: BTreeMap<u32, u32>,
    degree: BTreeMap<u32, usize>,
    adjacency: BTreeMap<u32, BTreeSet<u32>>,
    /// `(original label, diffuse label)` of the currently hidden community.
    hidden: Option<(u32, u32)>,
    next_node: u32,
    next_label: u32,
}

impl Generator {
    fn new(config: BenchmarkConfig) -> Self {
        let min_degree = solve_min_degree(
            config.avg_degree,
            config.max_degree as f64,
            config.degree_exponent,
        );
        Self {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            min_degree,
            members: BTreeMap::new(),
            community: BTreeMap::new(),
            degree: BTreeMap::new(),
            adjacency: BTreeMap::new(),
            hidden: None,
            next_node: 0,
            next_label: 0,
        }
    }

    fn sample_degree(&mut self) -> usize {
        let tau = self.config.degree_exponent;
        let hi = self.config.max_degree as f64;
        let a = 1.0 - tau;
        let u: f64 = self.rng.gen();
        let x = (self.min_degree.powf(a) + u * (hi.powf(a) - self.min_degree.powf(a))).powf(1.0 / a);
        (x.round() as usize).clamp(1, self.config.max_degree)
    }

    fn sample_size(&mut self) -> usize {
        self.rng
            .gen_range(self.config.min_community..=self.config.max_community)
    }

    fn initial_sizes(&mut self) -> Result<Vec<usize>> {
        let (n, lo, hi) = (self.config.n, self.config.min_community, self.config.max_community);
        let mut sizes = Vec::new();
        let mut total = 0;
        while total < n {
            let s = self.sample_size();
            if total + s <= n {
                sizes.push(s);
                total += s;
                continue;
            }
            let rest = n - total;
            if rest >= lo {
                sizes.push(rest);
                total = n;
                continue;
            }
            // spread the remainder over existing communities below the cap
            let mut rest = rest;
            for size in sizes.iter_mut() {
                let room = (hi - *size).min(rest);
                *size += room;
                rest -= room;
                if rest == 0 {
                    break;
                }
            }
            if rest > 0 {
                return Err(Error::InfeasibleConfig(format!(
                    "community sizes in [{lo}, {hi}] cannot tile n = {n}"
                )));
            }
            total = n;
        }
        Ok(sizes)
    }

    fn new_label(&mut self) -> u32 {
        self.next_label += 1;
        self.next_label - 1
    }

    fn add_community(&mut self, size: usize) -> u32 {
        let label = self.new_label();
        let mut set = BTreeSet::new();
        for _ in 0..size {
            let node = self.next_node;
            self.next_node += 1;
            let k = self.sample_degree();
            self.degree.insert(node, k);
            self.community.insert(node, label);
            self.adjacency.insert(node, BTreeSet::new());
            set.insert(node);
        }
        self.members.insert(label, set);
        label
    }

    fn add_nodes(&mut self, label: u32, count: usize) {
        for _ in 0..count {
            let node = self.next_node;
            self.next_node += 1;
            let k = self.sample_degree();
            self.degree.insert(node, k);
            self.community.insert(node, label);
            self.adjacency.insert(node, BTreeSet::new());
            self.members.get_mut(&label).unwrap().insert(node);
        }
    }

    fn detach(&mut self, node: u32) {
        if let Some(nbrs) = self.adjacency.get_mut(&node) {
            let nbrs = std::mem::take(nbrs);
            for v in nbrs {
                self.adjacency.get_mut(&v).unwrap().remove(&node);
            }
        }
    }

    fn remove_node(&mut self, node: u32) {
        self.detach(node);
        self.adjacency.remove(&node);
        self.degree.remove(&node);
        if let Some(label) = self.community.remove(&node) {
            if let Some(set) = self.members.get_mut(&label) {
                set.remove(&node);
            }
        }
    }

    fn relabel(&mut self, nodes: &BTreeSet<u32>, label: u32) {
        for &n in nodes {
            self.community.insert(n, label);
        }
        self.members.entry(label).or_default().extend(nodes.iter().copied());
    }

    fn is_diffuse(&self, label: u32) -> bool {
        self.hidden.is_some_and(|(_, diffuse)| diffuse == label)
    }

    /// Internal and external degree targets of a node.
    fn targets(&self, node: u32) -> (usize, usize) {
        let k = self.degree[&node];
        let label = self.community[&node];
        if self.is_diffuse(label) {
            return (0, k);
        }
        let size = self.members[&label].len();
        let internal = (((1.0 - self.config.mixing) * k as f64).round() as usize)
            .min(size.saturating_sub(1))
            .min(k);
        (internal, k - internal)
    }

    fn free_stubs(&self, node: u32) -> (usize, usize) {
        let (ti, te) = self.targets(node);
        let label = self.community[&node];
        let nbrs = &self.adjacency[&node];
        let inside = nbrs.iter().filter(|v| self.community[v] == label).count();
        let outside = nbrs.len() - inside;
        (ti.saturating_sub(inside), te.saturating_sub(outside))
    }

    fn try_link(&mut self, u: u32, v: u32) -> bool {
        if u == v || self.adjacency[&u].contains(&v) {
            return false;
        }
        self.adjacency.get_mut(&u).unwrap().insert(v);
        self.adjacency.get_mut(&v).unwrap().insert(u);
        true
    }

    /// Randomly pair stubs; `compatible` filters pairs. Unmatched stubs get a
    /// few reshuffled retries and are then dropped.
    fn match_stubs(&mut self, mut stubs: Vec<u32>, internal: bool) {
        for _ in 0..5 {
            if stubs.len() < 2 {
                return;
            }
            stubs.shuffle(&mut self.rng);
            let mut left = Vec::new();
            for pair in stubs.chunks(2) {
                if pair.len() < 2 {
                    left.push(pair[0]);
                    continue;
                }
                let (u, v) = (pair[0], pair[1]);
                let same = self.community[&u] == self.community[&v];
                if same == internal && self.try_link(u, v) {
                    continue;
                }
                left.extend_from_slice(pair);
            }
            if left.len() == stubs.len() {
                // no progress possible with this pool
                if left.iter().all(|n| self.community[n] == self.community[&left[0]]) && !internal {
                    return;
                }
            }
            stubs = left;
        }
    }

    fn wire(&mut self) {
        let mut external = Vec::new();
        let labels: Vec<u32> = self.members.keys().copied().collect();
        for label in labels {
            let mut internal = Vec::new();
            let nodes: Vec<u32> = self.members[&label].iter().copied().collect();
            for node in nodes {
                let (fi, fe) = self.free_stubs(node);
                internal.extend(std::iter::repeat_n(node, fi));
                external.extend(std::iter::repeat_n(node, fe));
            }
            self.match_stubs(internal, true);
        }
        self.match_stubs(external, false);
    }

    fn snapshot(&self) -> Snapshot {
        let mut edges = Vec::new();
        for (&u, nbrs) in &self.adjacency {
            for &v in nbrs.range(u + 1..) {
                edges.push((u, v));
            }
        }
        Snapshot {
            edges,
            labels: self.community.clone(),
        }
    }

    fn pick_labels(&mut self, count: usize, exclude: &[u32]) -> Vec<u32> {
        let pool: Vec<u32> = self
            .members
            .keys()
            .copied()
            .filter(|l| !exclude.contains(l) && !self.is_diffuse(*l))
            .collect();
        pool.choose_multiple(&mut self.rng, count.min(pool.len()))
            .copied()
            .collect()
    }

    fn rewire_communities(&mut self, labels: &[u32]) {
        for label in labels {
            let nodes: Vec<u32> = self
                .members
                .get(label)
                .map(|s| s.iter().copied().collect())
                .unwrap_or_default();
            for node in nodes {
                self.detach(node);
            }
        }
        self.wire();
    }

    fn step(&mut self, snapshot: usize) -> Vec<BenchEvent> {
        let mut events = Vec::new();
        let mut touched: Vec<u32> = Vec::new();
        let event = |kind, sources: Vec<u32>, results: Vec<u32>, size_change: i64| BenchEvent {
            snapshot,
            kind,
            sources,
            results,
            size_change,
        };
        match self.config.scenario {
            Scenario::BirthDeath => {
                if let Some(&dead) = self.pick_labels(1, &[]).first() {
                    let nodes = self.members.remove(&dead).unwrap_or_default();
                    let died = nodes.len();
                    for node in nodes {
                        self.remove_node(node);
                    }
                    events.push(event(BenchEventKind::Death, vec![dead], vec![], -(died as i64)));
                    let lo = self.config.min_community.min(died);
                    let size = self.rng.gen_range(lo..=died.max(lo));
                    let born = self.add_community(size);
                    events.push(event(BenchEventKind::Birth, vec![], vec![born], size as i64));
                    touched.push(born);
                }
            }
            Scenario::ExpandContract => {
                let count = ((self.config.intensity * self.members.len() as f64).round() as usize).max(1);
                for label in self.pick_labels(count, &[]) {
                    let size = self.members[&label].len();
                    let delta = ((self.config.intensity * size as f64).round() as usize).max(1);
                    let floor = (self.config.min_community / 2).max(3);
                    let shrink = self.rng.gen_bool(0.5) && size >= floor + delta;
                    if shrink {
                        let current: Vec<u32> = self.members[&label].iter().copied().collect();
                        let gone: Vec<u32> = current
                            .choose_multiple(&mut self.rng, delta)
                            .copied()
                            .collect();
                        for node in gone {
                            self.remove_node(node);
                        }
                        events.push(event(BenchEventKind::Contract, vec![label], vec![label], -(delta as i64)));
                    } else {
                        self.add_nodes(label, delta);
                        events.push(event(BenchEventKind::Expand, vec![label], vec![label], delta as i64));
                    }
                    touched.push(label);
                }
            }
            Scenario::Hide => {
                let mut restored = None;
                if let Some((original, diffuse)) = self.hidden.take() {
                    let nodes = self.members.remove(&diffuse).unwrap_or_default();
                    self.relabel(&nodes, original);
                    events.push(event(BenchEventKind::Restore, vec![diffuse], vec![original], 0));
                    touched.push(original);
                    restored = Some(original);
                }
                let exclude: Vec<u32> = restored.into_iter().collect();
                if let Some(&label) = self.pick_labels(1, &exclude).first() {
                    let nodes = self.members.remove(&label).unwrap_or_default();
                    let diffuse = self.new_label();
                    self.relabel(&nodes, diffuse);
                    self.hidden = Some((label, diffuse));
                    events.push(event(BenchEventKind::Hide, vec![label], vec![diffuse], 0));
                    touched.push(diffuse);
                }
            }
            Scenario::MergeSplit => {
                let pair = self.pick_labels(2, &[]);
                let mut merged = None;
                if pair.len() == 2 {
                    let label = self.new_label();
                    for old in &pair {
                        let nodes = self.members.remove(old).unwrap_or_default();
                        self.relabel(&nodes, label);
                    }
                    events.push(event(BenchEventKind::Merge, pair, vec![label], 0));
                    touched.push(label);
                    merged = Some(label);
                }
                let exclude: Vec<u32> = merged.into_iter().collect();
                if let Some(&victim) = self.pick_labels(1, &exclude).first() {
                    let nodes: Vec<u32> = self.members.remove(&victim).unwrap_or_default().into_iter().collect();
                    let mut shuffled = nodes;
                    shuffled.shuffle(&mut self.rng);
                    let half = shuffled.len() / 2;
                    let a = self.new_label();
                    let b = self.new_label();
                    self.relabel(&shuffled[..half].iter().copied().collect(), a);
                    self.relabel(&shuffled[half..].iter().copied().collect(), b);
                    events.push(event(BenchEventKind::Split, vec![victim], vec![a, b], 0));
                    touched.extend([a, b]);
                }
            }
        }
        self.members.retain(|_, set| !set.is_empty());
        self.rewire_communities(&touched);
        events
    }
}

/// Generate a dynamic benchmark; equal configs give identical output.
pub fn generate(config: &BenchmarkConfig) -> Result<DynamicBenchmark> {
    config.validate()?;
    let mut generator = Generator::new(config.clone());
    for size in generator.initial_sizes()? {
        generator.add_community(size);
    }
    generator.wire();
    let mut snapshots = vec![generator.snapshot()];
    let mut events = Vec::new();
    for j in 2..=config.snapshots {
        events.extend(generator.step(j));
        snapshots.push(generator.snapshot());
    }
    Ok(DynamicBenchmark {
        config: config.clone(),
        snapshots,
        events,
    })
}

/// Edge weighting applied to benchmark snapshots before detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeWeighting {
    Unit,
    /// Jaccard overlap of the endpoints' neighborhoods, recomputed once on
    /// the graph left after dropping edges with no shared neighbor.
    #[default]
    Overlap,
}

/// Weighted graph of a snapshot; graph index `i` is `snapshot.nodes()[i]`.
pub fn snapshot_graph(snapshot: &Snapshot, weighting: EdgeWeighting) -> WeightedGraph {
    let nodes = snapshot.nodes();
    let index: BTreeMap<u32, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let pairs: Vec<(usize, usize)> = snapshot
        .edges
        .iter()
        .map(|(u, v)| (index[u], index[v]))
        .collect();
    let unit: Vec<(usize, usize, f64)> = pairs.iter().map(|&(u, v)| (u, v, 1.0)).collect();
    let topology = WeightedGraph::from_edges(nodes.len(), &unit).expect("snapshot edges are simple");
    match weighting {
        EdgeWeighting::Unit => topology,
        EdgeWeighting::Overlap => {
            let first = overlap_weights(&topology);
            overlap_weights(&first.without_zero_weights())
        }
    }
}

fn overlap_weights(topology: &WeightedGraph) -> WeightedGraph {
    let weighted: Vec<(usize, usize, f64)> = topology
        .edges()
        .map(|(u, v, _)| {
            let a = topology.neighbor_ids(u);
            let b = topology.neighbor_ids(v);
            let common = count_common(a, b);
            let union = a.len() + b.len() - common;
            // u and v are in each other's lists but never in the intersection
            (u, v, common as f64 / (union - 2).max(1) as f64)
        })
        .collect();
    WeightedGraph::from_edges(topology.node_count(), &weighted).expect("edges come from a simple graph")
}

fn count_common(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Detection outcome for one benchmark snapshot.
#[derive(Debug, Clone)]
pub struct SnapshotDetection {
    pub detection: Detection,
    /// Detected community per node id. Nodes outside the analysed component
    /// are labeled by their own connected component.
    pub labels: BTreeMap<u32, usize>,
    pub centers: Vec<u32>,
}

pub fn detect_snapshot(
    snapshot: &Snapshot,
    weighting: EdgeWeighting,
    config: &SearchConfig,
) -> SnapshotDetection {
    let graph = snapshot_graph(snapshot, weighting);
    let detection = detect_weighted(&graph, config);
    let nodes = snapshot.nodes();
    let found = detection.labels(nodes.len());
    let offset = detection
        .sweep
        .as_ref()
        .map_or(0, |s| s.partition.community_count());
    let components = graph.without_zero_weights().components();
    let labels = nodes
        .iter()
        .enumerate()
        .map(|(i, &node)| (node, found[i].unwrap_or(offset + components[i])))
        .collect();
    let centers = detection.centers().into_iter().map(|c| nodes[c]).collect();
    SnapshotDetection {
        detection,
        labels,
        centers,
    }
}

/// One row of a benchmark report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotReport {
    pub snapshot: usize,
    pub nodes: usize,
    pub edges: usize,
    pub community_centers: usize,
    pub running_time_ms: f64,
    pub modularity: Option<f64>,
    pub nmi: f64,
}

/// Detect communities on every snapshot and score them against ground truth.
pub fn evaluate(
    benchmark: &DynamicBenchmark,
    weighting: EdgeWeighting,
    config: &SearchConfig,
) -> Result<Vec<SnapshotReport>> {
    benchmark
        .snapshots
        .iter()
        .enumerate()
        .map(|(j, snap)| {
            let found = detect_snapshot(snap, weighting, config);
            let detected = LabeledPartition::new(found.labels.iter().map(|(&n, &l)| (n, l)), j + 1);
            let score = nmi(&snap.truth(j + 1), &detected)?;
            let sweep = found.detection.sweep.as_ref();
            Ok(SnapshotReport {
                snapshot: j + 1,
                nodes: snap.node_count(),
                edges: snap.edges.len(),
                community_centers: found.centers.len(),
                running_time_ms: found.detection.elapsed_ms,
                modularity: sweep.and_then(|s| s.modularity),
                nmi: score,
            })
        })
        .collect()
}

/// Write `edges_<j>.csv`, `labels_<j>.csv`, `events.json` and `config.json`.
pub fn write_bundle(dir: &Path, benchmark: &DynamicBenchmark) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (j, snap) in benchmark.snapshots.iter().enumerate() {
        let mut edges = csv::Writer::from_path(dir.join(format!("edges_{}.csv", j + 1)))?;
        edges.write_record(["u", "v"])?;
        for (u, v) in &snap.edges {
            edges.write_record([u.to_string(), v.to_string()])?;
        }
        edges.flush()?;
        let mut labels = csv::Writer::from_path(dir.join(format!("labels_{}.csv", j + 1)))?;
        labels.write_record(["node", "community"])?;
        for (n, c) in &snap.labels {
            labels.write_record([n.to_string(), c.to_string()])?;
        }
        labels.flush()?;
    }
    let mut events = fs::File::create(dir.join("events.json"))?;
    serde_json::to_writer_pretty(&mut events, &benchmark.events)?;
    events.write_all(b"\n")?;
    let mut config = fs::File::create(dir.join("config.json"))?;
    serde_json::to_writer_pretty(&mut config, &benchmark.config)?;
    config.write_all(b"\n")?;
    Ok(())
}

/// Read back a bundle written by [`write_bundle`].
pub fn read_bundle(dir: &Path) -> Result<DynamicBenchmark> {
    let config: BenchmarkConfig = serde_json::from_reader(fs::File::open(dir.join("config.json"))?)?;
    let events: Vec<BenchEvent> = serde_json::from_reader(fs::File::open(dir.join("events.json"))?)?;
    let mut snapshots = Vec::new();
    for j in 1.. {
        let edge_path = dir.join(format!("edges_{j}.csv"));
        if !edge_path.exists() {
            break;
        }
        let mut edges = Vec::new();
        for row in csv::Reader::from_path(&edge_path)?.deserialize() {
            let (u, v): (u32, u32) = row?;
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        let labels = read_labels(&dir.join(format!("labels_{j}.csv")))?;
        snapshots.push(Snapshot { edges, labels });
    }
    Ok(DynamicBenchmark {
        config,
        snapshots,
        events,
    })
}

/// `node,community` label file.
pub fn read_labels(path: &Path) -> Result<BTreeMap<u32, u32>> {
    let mut labels = BTreeMap::new();
    for row in csv::Reader::from_path(path)?.deserialize() {
        let (node, community): (u32, u32) = row?;
        labels.insert(node, community);
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(scenario: Scenario) -> BenchmarkConfig {
        BenchmarkConfig::new(scenario, 500, 7)
    }

    #[test]
    fn min_degree_solves_mean() {
        let k = solve_min_degree(20.0, 40.0, 2.0);
        assert!((power_law_mean(k, 40.0, 2.0) - 20.0).abs() < 1e-9);
    }

    #[test]
    fn complete_graph_stats() {
        let mut edges = Vec::new();
        for u in 0..5u32 {
            for v in u + 1..5 {
                edges.push((u, v));
            }
        }
        let snap = Snapshot {
            edges,
            labels: (0..5).map(|n| (n, 0)).collect(),
        };
        let stats = realized_degree_stats(&snap).unwrap();
        assert_eq!(stats.mean, 4.0);
        assert_eq!(stats.max, 4);
    }

    #[test]
    fn empty_snapshot_stats_error() {
        let snap = Snapshot {
            edges: vec![],
            labels: BTreeMap::new(),
        };
        assert!(realized_degree_stats(&snap).is_err());
    }

    #[test]
    fn deterministic() {
        for scenario in Scenario::ALL {
            let a = generate(&small(scenario)).unwrap();
            let b = generate(&small(scenario)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn degree_targets_hold() {
        let b = generate(&BenchmarkConfig::new(Scenario::MergeSplit, 2000, 3)).unwrap();
        for snap in &b.snapshots {
            let stats = realized_degree_stats(snap).unwrap();
            assert!(stats.max <= 40);
            assert!((stats.mean - 20.0).abs() <= 2.0, "mean {}", stats.mean);
        }
    }

    #[test]
    fn mergesplit_keeps_node_count() {
        let b = generate(&small(Scenario::MergeSplit)).unwrap();
        assert!(b.snapshots.iter().all(|s| s.node_count() == 500));
    }

    #[test]
    fn birthdeath_never_grows() {
        let b = generate(&small(Scenario::BirthDeath)).unwrap();
        for w in b.snapshots.windows(2) {
            assert!(w[1].node_count() <= w[0].node_count());
        }
    }

    #[test]
    fn infeasible_configs() {
        let mut c = small(Scenario::Hide);
        c.mixing = 0.0;
        assert!(generate(&c).is_err());
        let mut c = small(Scenario::Hide);
        c.n = 30;
        assert!(matches!(generate(&c), Err(Error::InfeasibleConfig(_))));
        let mut c = small(Scenario::Hide);
        c.avg_degree = 50.0;
        assert!(generate(&c).is_err());
    }

    #[test]
    fn scenario_names() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
        let err = "unknown".parse::<Scenario>().unwrap_err().to_string();
        assert!(err.contains("birthdeath") && err.contains("mergesplit"));
    }
}
