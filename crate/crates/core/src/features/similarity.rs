use std::fmt;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FeatureTag {
    /// Curvature.
    K,
    /// Degree within the congestion subgraph.
    D,
    /// Spatial proximity.
    S,
    /// Spectral (FFT magnitude) similarity of the day's TSI series.
    F,
    /// Raw TSI series similarity.
    T,
}

impl FeatureTag {
    pub fn letter(self) -> char {
        match self {
            FeatureTag::K => 'K',
            FeatureTag::D => 'D',
            FeatureTag::S => 'S',
            FeatureTag::F => 'F',
            FeatureTag::T => 'T',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'K' => Some(FeatureTag::K),
            'D' => Some(FeatureTag::D),
            'S' => Some(FeatureTag::S),
            'F' => Some(FeatureTag::F),
            'T' => Some(FeatureTag::T),
            _ => None,
        }
    }
}

impl fmt::Display for FeatureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kernel {
    /// `1 - |a - b| / range`; a zero range means all ones.
    Scalar { values: Vec<f64>, range: f64 },
    /// `1 - d / d_max`.
    Spatial { points: Vec<[f64; 2]>, d_max: f64 },
    /// Clamped cosine of unit vectors; `None` marks a zero vector.
    Cosine { units: Vec<Option<Vec<f64>>> },
    Dense { n: usize, values: Vec<f64> },
}

/// Symmetric node-pair similarity in `[0, 1]` with a unit diagonal.
/// Entries are evaluated on demand from per-node data.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    tag: FeatureTag,
    kernel: Kernel,
}

impl SimilarityMatrix {
    pub fn tag(&self) -> FeatureTag {
        self.tag
    }

    pub fn len(&self) -> usize {
        match &self.kernel {
            Kernel::Scalar { values, .. } => values.len(),
            Kernel::Spatial { points, .. } => points.len(),
            Kernel::Cosine { units } => units.len(),
            Kernel::Dense { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 1.0;
        }
        match &self.kernel {
            Kernel::Scalar { values, range } => {
                if *range > 0.0 {
                    (1.0 - (values[i] - values[j]).abs() / range).clamp(0.0, 1.0)
                } else {
                    1.0
                }
            }
            Kernel::Spatial { points, d_max } => {
                if *d_max > 0.0 {
                    let d = (points[i][0] - points[j][0]).hypot(points[i][1] - points[j][1]);
                    (1.0 - d / d_max).clamp(0.0, 1.0)
                } else {
                    1.0
                }
            }
            Kernel::Cosine { units } => match (&units[i], &units[j]) {
                (Some(a), Some(b)) => a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().clamp(0.0, 1.0),
                _ => 0.0,
            },
            Kernel::Dense { n, values } => values[i * n + j],
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.get(i, j);
            }
        }
        out
    }

    /// Build from explicit row-major entries; checks shape, symmetry, range
    /// and the unit diagonal.
    pub fn from_dense(tag: FeatureTag, n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::ShapeMismatch(format!("{} entries for a {n}x{n} matrix", values.len())));
        }
        for i in 0..n {
            if (values[i * n + i] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(0.0..=1.0).contains(&v) || (v - values[j * n + i]).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({i}, {j}) is asymmetric or outside [0, 1]"
                    )));
                }
            }
        }
        Ok(Self {
            tag,
            kernel: Kernel::Dense { n, values },
        })
    }
}

/// Min-max complement similarity of a scalar feature (curvature or degree).
pub fn scalar_similarity(values: &[f64], tag: FeatureTag) -> SimilarityMatrix {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = if values.is_empty() { 0.0 } else { hi - lo };
    SimilarityMatrix {
        tag,
        kernel: Kernel::Scalar {
            values: values.to_vec(),
            range,
        },
    }
}

/// `1 - d / d_max` over Euclidean distances between centroids.
pub fn spatial_similarity(centroids: &[[f64; 2]]) -> SimilarityMatrix {
    SimilarityMatrix {
        tag: FeatureTag::S,
        kernel: Kernel::Spatial {
            points: centroids.to_vec(),
            d_max: max_pair_distance(centroids),
        },
    }
}

/// Diameter of a point set via its convex hull.
fn max_pair_distance(points: &[[f64; 2]]) -> f64 {
    let hull = convex_hull(points);
    let mut best = 0.0f64;
    for (i, a) in hull.iter().enumerate() {
        for b in &hull[i + 1..] {
            best = best.max((a[0] - b[0]).hypot(a[1] - b[1]));
        }
    }
    best
}

fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in [pts.clone(), pts.iter().rev().copied().collect()] {
        let base = hull.len();
        for p in pass {
            while hull.len() >= base + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn check_lengths(series: &[Vec<f64>]) -> Result<usize> {
    let len = series.first().map_or(0, Vec::len);
    if let Some(bad) = series.iter().find(|s| s.len() != len) {
        return Err(Error::SeriesLength {
            expected: len,
            found: bad.len(),
        });
    }
    Ok(len)
}

fn normalize(v: Vec<f64>) -> Option<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (norm > 0.0).then(|| v.into_iter().map(|x| x / norm).collect())
}

/// Magnitudes of frequency bins `1..=L/2` of a real series.
pub fn magnitude_spectrum(series: &[f64]) -> Vec<f64> {
    let mut planner = FftPlanner::<f64>::new();
    spectrum_with(&mut planner, series)
}

fn spectrum_with(planner: &mut FftPlanner<f64>, series: &[f64]) -> Vec<f64> {
    let n = series.len();
    if n == 0 {
        return Vec::new();
    }
    let fft = planner.plan_fft_forward(n);
    let mut buf: Vec<Complex<f64>> = series.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fft.process(&mut buf);
    buf[1..=n / 2].iter().map(|c| c.norm()).collect()
}

/// Clamped cosine similarity of the series' magnitude spectra; invariant
/// under circular shifts of any series.
pub fn fft_similarity(series: &[Vec<f64>]) -> Result<SimilarityMatrix> {
    let len = check_lengths(series)?;
    if !series.is_empty() && len < 4 {
        return Err(Error::SeriesLength { expected: 4, found: len });
    }
    let mut planner = FftPlanner::<f64>::new();
    let units = series
        .iter()
        .map(|s| normalize(spectrum_with(&mut planner, s)))
        .collect();
    Ok(SimilarityMatrix {
        tag: FeatureTag::F,
        kernel: Kernel::Cosine { units },
    })
}

/// Clamped cosine similarity of the raw series.
pub fn tsi_similarity(series: &[Vec<f64>]) -> Result<SimilarityMatrix> {
    check_lengths(series)?;
    Ok(SimilarityMatrix {
        tag: FeatureTag::T,
        kernel: Kernel::Cosine {
            units: series.iter().map(|s| normalize(s.clone())).collect(),
        },
    })
}

/// Sum of absolute turning angles at interior vertices divided by length.
pub fn segment_curvature(polyline: &[[f64; 2]]) -> Result<f64> {
    if polyline.len() < 2 {
        return Err(Error::InvalidArgument("a polyline needs at least 2 points".into()));
    }
    let mut length = 0.0;
    let mut turning = 0.0;
    let mut heading: Option<f64> = None;
    for w in polyline.windows(2) {
        let (dx, dy) = (w[1][0] - w[0][0], w[1][1] - w[0][1]);
        let len = dx.hypot(dy);
        if len == 0.0 {
            continue;
        }
        length += len;
        let h = dy.atan2(dx);
        if let Some(prev) = heading {
            let mut turn = h - prev;
            while turn > std::f64::consts::PI {
                turn -= 2.0 * std::f64::consts::PI;
            }
            while turn < -std::f64::consts::PI {
                turn += 2.0 * std::f64::consts::PI;
            }
            turning += turn.abs();
        }
        heading = Some(h);
    }
    if length <= 0.0 {
        return Err(Error::InvalidArgument("polyline has zero length".into()));
    }
    Ok(turning / length)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn scalar_min_max_complement() {
        let m = scalar_similarity(&[0.0, 5.0, 10.0], FeatureTag::D);
        assert_eq!(m.get(0, 2), 0.0);
        assert_eq!(m.get(0, 1), 0.5);
        assert_eq!(m.get(1, 1), 1.0);
        let flat = scalar_similarity(&[3.0, 3.0], FeatureTag::D);
        assert_eq!(flat.get(0, 1), 1.0);
        assert_eq!(scalar_similarity(&[7.0], FeatureTag::K).to_dense(), vec![1.0]);
    }

    #[test]
    fn spatial_linear() {
        let m = spatial_similarity(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        assert_eq!(m.get(0, 1), 0.5);
        assert_eq!(m.get(0, 2), 0.0);
        let same = spatial_similarity(&[[4.0, 4.0], [4.0, 4.0]]);
        assert_eq!(same.get(0, 1), 1.0);
    }

    #[test]
    fn hull_diameter_matches_brute_force() {
        let pts: Vec<[f64; 2]> = (0..40)
            .map(|i| {
                let t = i as f64;
                [(t * 1.7).sin() * 10.0 + t * 0.1, (t * 0.9).cos() * 6.0]
            })
            .collect();
        let mut brute = 0.0f64;
        for a in &pts {
            for b in &pts {
                brute = brute.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        assert!((max_pair_distance(&pts) - brute).abs() < 1e-12);
    }

    fn sine(freq: f64, len: usize, shift: usize) -> Vec<f64> {
        (0..len)
            .map(|t| (2.0 * PI * freq * ((t + shift) % len) as f64 / len as f64).sin())
            .collect()
    }

    #[test]
    fn fft_identical_and_shifted() {
        let a = sine(3.0, 64, 0);
        let b = sine(3.0, 64, 11);
        let m = fft_similarity(&[a.clone(), a, b]).unwrap();
        assert!((m.get(0, 1) - 1.0).abs() < 1e-12);
        assert!((m.get(0, 2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fft_disjoint_tones() {
        let m = fft_similarity(&[sine(1.0, 64, 0), sine(5.0, 64, 0)]).unwrap();
        assert!(m.get(0, 1) < 1e-9);
    }

    #[test]
    fn spectrum_length_excludes_dc() {
        assert_eq!(magnitude_spectrum(&[1.0; 24]).len(), 12);
        assert_eq!(magnitude_spectrum(&[1.0; 7]).len(), 3);
        assert!(magnitude_spectrum(&[1.0; 24]).iter().all(|&m| m < 1e-9));
    }

    #[test]
    fn fft_zero_spectrum_and_errors() {
        let m = fft_similarity(&[vec![2.0; 8], sine(1.0, 8, 0)]).unwrap();
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.get(0, 0), 1.0);
        assert!(matches!(
            fft_similarity(&[vec![0.0; 8], vec![0.0; 6]]),
            Err(Error::SeriesLength { .. })
        ));
        assert!(fft_similarity(&[vec![0.0; 3]]).is_err());
    }

    #[test]
    fn tsi_cosine() {
        let a = sine(1.0, 64, 0);
        let m = tsi_similarity(&[a.clone(), a.clone(), sine(1.0, 64, 32), vec![0.0; 64]]).unwrap();
        assert!((m.get(0, 1) - 1.0).abs() < 1e-12);
        assert_eq!(m.get(0, 2), 0.0);
        assert_eq!(m.get(0, 3), 0.0);
    }

    #[test]
    fn curvature() {
        assert_eq!(segment_curvature(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).unwrap(), 0.0);
        let right = segment_curvature(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
        assert!((right - PI / 4.0).abs() < 1e-12);
        assert_eq!(segment_curvature(&[[0.0, 0.0], [3.0, 4.0]]).unwrap(), 0.0);
        assert!(segment_curvature(&[[1.0, 1.0], [1.0, 1.0]]).is_err());
        let r = 50.0;
        let arc: Vec<[f64; 2]> = (0..=2000)
            .map(|i| {
                let t = i as f64 / 2000.0 * PI;
                [r * t.cos(), r * t.sin()]
            })
            .collect();
        assert!((segment_curvature(&arc).unwrap() - 1.0 / r).abs() < 1e-4);
    }

    #[test]
    fn dense_validation() {
        assert!(SimilarityMatrix::from_dense(FeatureTag::K, 2, vec![1.0, 0.3, 0.3, 1.0]).is_ok());
        assert!(SimilarityMatrix::from_dense(FeatureTag::K, 2, vec![1.0, 0.3, 0.4, 1.0]).is_err());
        assert!(SimilarityMatrix::from_dense(FeatureTag::K, 2, vec![0.9, 0.3, 0.3, 1.0]).is_err());
        assert!(SimilarityMatrix::from_dense(FeatureTag::K, 2, vec![1.0; 3]).is_err());
    }
}
