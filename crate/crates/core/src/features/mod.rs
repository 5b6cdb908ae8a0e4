//! Node-feature similarities and their entropy-weighted fusion into a
//! per-snapshot adjacency.

mod fusion;
mod similarity;

pub use fusion::{entropy_weights, fuse, matrix_entropy, AdaptiveAdjacency, FeatureVariant};
pub use similarity::{
    fft_similarity, magnitude_spectrum, scalar_similarity, segment_curvature, spatial_similarity,
    tsi_similarity, FeatureTag, SimilarityMatrix,
};

use rayon::prelude::*;

use crate::congestion_graph::{CongestionGraphSequence, CongestionSubgraph};
use crate::error::{Error, Result};
use crate::ingest::{RoadNetwork, TsiMatrix};

/// Per-node inputs of the similarity matrices, in subgraph node order.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeFeatures {
    pub curvature: Vec<f64>,
    pub degree: Vec<f64>,
    pub centroid: Vec<[f64; 2]>,
    /// TSI over the UTC day containing the snapshot; missing cells are 0.
    pub series: Vec<Vec<f64>>,
}

pub fn node_features(
    subgraph: &CongestionSubgraph,
    network: &RoadNetwork,
    tsi: &TsiMatrix,
) -> Result<NodeFeatures> {
    let mut curvature = Vec::with_capacity(subgraph.node_count());
    let mut centroid = Vec::with_capacity(subgraph.node_count());
    let mut series = Vec::with_capacity(subgraph.node_count());
    for id in &subgraph.nodes {
        let seg = network
            .segment(id)
            .ok_or_else(|| Error::InvalidNetwork(format!("segment {id} is not in the road network")))?;
        curvature.push(segment_curvature(&seg.polyline)?);
        centroid.push(seg.centroid());
        let row = tsi
            .segment_index(id)
            .ok_or_else(|| Error::InvalidArgument(format!("segment {id} has no TSI row")))?;
        series.push(tsi.day_series(row, subgraph.timestamp)?);
    }
    Ok(NodeFeatures {
        curvature,
        degree: subgraph.degrees().into_iter().map(|d| d as f64).collect(),
        centroid,
        series,
    })
}

pub fn similarity_for(tag: FeatureTag, features: &NodeFeatures) -> Result<SimilarityMatrix> {
    match tag {
        FeatureTag::K => Ok(scalar_similarity(&features.curvature, FeatureTag::K)),
        FeatureTag::D => Ok(scalar_similarity(&features.degree, FeatureTag::D)),
        FeatureTag::S => Ok(spatial_similarity(&features.centroid)),
        FeatureTag::F => fft_similarity(&features.series),
        FeatureTag::T => tsi_similarity(&features.series),
    }
}

/// Fused adjacency of one snapshot with entropy weights over the variant's
/// matrices.
pub fn build_adjacency(
    subgraph: &CongestionSubgraph,
    network: &RoadNetwork,
    tsi: &TsiMatrix,
    variant: &FeatureVariant,
) -> Result<AdaptiveAdjacency> {
    let features = node_features(subgraph, network, tsi)?;
    let matrices = variant
        .tags()
        .iter()
        .map(|&tag| similarity_for(tag, &features))
        .collect::<Result<Vec<_>>>()?;
    let weights = entropy_weights(&matrices.iter().collect::<Vec<_>>())?;
    fuse(subgraph.nodes.clone(), matrices, weights, variant.clone())
}

/// Set each subgraph edge's weight to the fused adjacency entry.
pub fn apply_weights(subgraph: &mut CongestionSubgraph, adjacency: &AdaptiveAdjacency) -> Result<()> {
    if adjacency.nodes != subgraph.nodes {
        return Err(Error::ShapeMismatch("adjacency nodes differ from subgraph nodes".into()));
    }
    let weights = subgraph.edges.iter().map(|&(u, v)| adjacency.get(u, v)).collect();
    subgraph.set_weights(weights)
}

/// Build every snapshot's adjacency and write the edge weights.
pub fn build_adjacency_sequence(
    sequence: &mut CongestionGraphSequence,
    network: &RoadNetwork,
    tsi: &TsiMatrix,
    variant: &FeatureVariant,
) -> Result<Vec<AdaptiveAdjacency>> {
    sequence
        .subgraphs
        .par_iter_mut()
        .map(|g| {
            let adjacency = build_adjacency(g, network, tsi, variant)?;
            apply_weights(g, &adjacency)?;
            Ok(adjacency)
        })
        .collect()
}
