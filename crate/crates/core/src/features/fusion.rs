use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::similarity::{FeatureTag, SimilarityMatrix};
use crate::error::{Error, Result};

/// Entropy of a matrix's upper-triangle entries, normalized to `[0, 1]`.
/// Matrices with fewer than two entries or no mass have entropy 1.
pub fn matrix_entropy(m: &SimilarityMatrix) -> f64 {
    let n = m.len();
    let entries = n * n.saturating_sub(1) / 2;
    if entries <= 1 {
        return 1.0;
    }
    // per-row partial sums keep the reduction order fixed
    let rows: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (mut s, mut t) = (0.0, 0.0);
            for j in i + 1..n {
                let x = m.get(i, j);
                if x > 0.0 {
                    s += x;
                    t += x * x.ln();
                }
            }
            (s, t)
        })
        .collect();
    let (s, t) = rows.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    if s <= 0.0 {
        return 1.0;
    }
    let h = -(t / s - s.ln());
    (h / (entries as f64).ln()).clamp(0.0, 1.0)
}

/// Entropy weights: `(1 - E_i) / sum_j (1 - E_j)`, uniform when every
/// matrix has entropy 1.
pub fn entropy_weights(matrices: &[&SimilarityMatrix]) -> Result<Vec<f64>> {
    if matrices.is_empty() {
        return Err(Error::InvalidArgument("at least one matrix is required".into()));
    }
    let n = matrices[0].len();
    if matrices.iter().any(|m| m.len() != n) {
        return Err(Error::ShapeMismatch("similarity matrices differ in size".into()));
    }
    let divergence: Vec<f64> = matrices
        .iter()
        .map(|m| {
            let d = 1.0 - matrix_entropy(m);
            if d < 1e-12 {
                0.0
            } else {
                d
            }
        })
        .collect();
    let total: f64 = divergence.iter().sum();
    if total == 0.0 {
        return Ok(vec![1.0 / matrices.len() as f64; matrices.len()]);
    }
    Ok(divergence.iter().map(|d| d / total).collect())
}

/// A feature combination used to build the fused adjacency.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FeatureVariant {
    tags: Vec<FeatureTag>,
}

impl FeatureVariant {
    pub const VALID: [&'static str; 12] = [
        "KS", "KD", "DS", "KF", "SK", "DF", "KDS", "KDF", "KSF", "DSF", "KDST", "KDSF",
    ];

    pub fn kdsf() -> Self {
        "KDSF".parse().expect("KDSF is a valid variant")
    }

    /// Every distinct variant; `SK` is the same combination as `KS`.
    pub fn all() -> Vec<Self> {
        Self::VALID
            .iter()
            .filter(|&&t| t != "SK")
            .map(|t| t.parse().unwrap())
            .collect()
    }

    pub fn tags(&self) -> &[FeatureTag] {
        &self.tags
    }

    pub fn uses(&self, tag: FeatureTag) -> bool {
        self.tags.contains(&tag)
    }

    pub fn name(&self) -> String {
        self.tags.iter().map(|t| t.letter()).collect()
    }
}

impl Default for FeatureVariant {
    fn default() -> Self {
        Self::kdsf()
    }
}

impl FromStr for FeatureVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        if !Self::VALID.contains(&upper.as_str()) {
            return Err(Error::UnknownVariant {
                tag: s.to_string(),
                valid: Self::VALID.join(", "),
            });
        }
        let mut tags: Vec<FeatureTag> = upper.chars().filter_map(FeatureTag::from_letter).collect();
        tags.sort();
        Ok(Self { tags })
    }
}

impl TryFrom<String> for FeatureVariant {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FeatureVariant> for String {
    fn from(v: FeatureVariant) -> String {
        v.name()
    }
}

impl fmt::Display for FeatureVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Fused adjacency `M = sum_i w_i F_i` over one snapshot's nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveAdjacency {
    pub nodes: Vec<String>,
    pub variant: FeatureVariant,
    pub weights: Vec<f64>,
    pub matrices: Vec<SimilarityMatrix>,
}

impl AdaptiveAdjacency {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights
            .iter()
            .zip(&self.matrices)
            .map(|(w, m)| w * m.get(i, j))
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }

    pub fn weight_of(&self, tag: FeatureTag) -> Option<f64> {
        self.matrices
            .iter()
            .position(|m| m.tag() == tag)
            .map(|i| self.weights[i])
    }

    /// Write the dense matrix with segment ids as header row and column.
    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec![String::new()];
        header.extend(self.nodes.iter().cloned());
        w.write_record(&header)?;
        for (i, id) in self.nodes.iter().enumerate() {
            let mut row = vec![id.clone()];
            row.extend((0..self.len()).map(|j| self.get(i, j).to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Combine the variant's matrices with the given weights.
pub fn fuse(
    nodes: Vec<String>,
    matrices: Vec<SimilarityMatrix>,
    weights: Vec<f64>,
    variant: FeatureVariant,
) -> Result<AdaptiveAdjacency> {
    let tags: Vec<FeatureTag> = matrices.iter().map(SimilarityMatrix::tag).collect();
    if tags != variant.tags() {
        return Err(Error::ShapeMismatch(format!(
            "variant {variant} expects matrices {:?}, found {tags:?}",
            variant.tags()
        )));
    }
    if weights.len() != matrices.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} weights for {} matrices",
            weights.len(),
            matrices.len()
        )));
    }
    if matrices.iter().any(|m| m.len() != nodes.len()) {
        return Err(Error::ShapeMismatch("matrix size differs from node count".into()));
    }
    if weights.iter().any(|&w| w.is_nan() || w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument("weights must be nonnegative and sum to 1".into()));
    }
    Ok(AdaptiveAdjacency {
        nodes,
        variant,
        weights,
        matrices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::similarity::scalar_similarity;

    fn dense(tag: FeatureTag, upper: &[f64], n: usize) -> SimilarityMatrix {
        let mut v = vec![1.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                v[i * n + j] = upper[k];
                v[j * n + i] = upper[k];
                k += 1;
            }
        }
        SimilarityMatrix::from_dense(tag, n, v).unwrap()
    }

    #[test]
    fn identical_matrices_share_equally() {
        let m = scalar_similarity(&[1.0, 2.0, 4.0, 9.0], FeatureTag::K);
        let w = entropy_weights(&[&m, &m, &m, &m]).unwrap();
        assert_eq!(w, vec![0.25; 4]);
    }

    #[test]
    fn constant_matrix_gets_nothing() {
        let constant = scalar_similarity(&[3.0; 5], FeatureTag::D);
        let varying = scalar_similarity(&[0.0, 1.0, 2.0, 7.0, 9.0], FeatureTag::K);
        assert_eq!(entropy_weights(&[&constant, &varying]).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn concentrated_beats_flat() {
        let a = dense(FeatureTag::K, &[1.0, 0.0, 0.0], 3);
        let b = dense(FeatureTag::D, &[0.5, 0.5, 0.5], 3);
        assert!((matrix_entropy(&b) - 1.0).abs() < 1e-12);
        assert_eq!(matrix_entropy(&a), 0.0);
        assert_eq!(entropy_weights(&[&a, &b]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn tiny_matrices_fall_back_to_uniform() {
        let a = scalar_similarity(&[1.0], FeatureTag::K);
        let b = scalar_similarity(&[2.0], FeatureTag::D);
        assert_eq!(entropy_weights(&[&a, &b]).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn variants_parse() {
        for tag in FeatureVariant::VALID {
            assert!(tag.parse::<FeatureVariant>().is_ok());
        }
        assert_eq!("SK".parse::<FeatureVariant>().unwrap(), "KS".parse().unwrap());
        assert_eq!(FeatureVariant::all().len(), 11);
        let err = "XYZ".parse::<FeatureVariant>().unwrap_err().to_string();
        assert!(err.contains("KDSF") && err.contains("KDST"));
        assert_eq!(FeatureVariant::kdsf().name(), "KDSF");
    }

    #[test]
    fn fusion_arithmetic() {
        let k = dense(FeatureTag::K, &[0.2], 2);
        let d = dense(FeatureTag::D, &[0.6], 2);
        let variant: FeatureVariant = "KD".parse().unwrap();
        let m = fuse(vec!["a".into(), "b".into()], vec![k.clone(), d.clone()], vec![0.5, 0.5], variant.clone()).unwrap();
        assert!((m.get(0, 1) - 0.4).abs() < 1e-15);
        let proj = fuse(vec!["a".into(), "b".into()], vec![k, d], vec![1.0, 0.0], variant.clone()).unwrap();
        assert_eq!(proj.get(0, 1), 0.2);
        let wrong = fuse(vec!["a".into(), "b".into()], vec![dense(FeatureTag::S, &[0.1], 2)], vec![1.0], variant);
        assert!(wrong.is_err());
    }
}
