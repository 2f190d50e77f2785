//! Synthetic datasets with multiplicative weights, and the evaluation
//! metric used to score certified clusterings against ground truth.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::certify::CandidateClustering;
use crate::error::{Error, Result};
use crate::linalg::{self, PointSet};

/// Generative cluster of each point, labels in `1..=K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth(pub Vec<usize>);

impl GroundTruth {
    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn restrict(&self, subset: &[usize]) -> GroundTruth {
        GroundTruth(subset.iter().map(|&i| self.0[i]).collect())
    }
}

/// Which density value becomes a point's weight in the Gaussian-mixture
/// generator. The wording "pdf value at each sample" is ambiguous between
/// the mixture density (no label information) and the point's own
/// component density; both are provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    Mixture,
    Component,
}

impl std::str::FromStr for WeightMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mixture" => Ok(WeightMode::Mixture),
            "component" => Ok(WeightMode::Component),
            other => Err(format!("unknown weight mode '{other}' (mixture|component)")),
        }
    }
}

/// A generated dataset: points, weights, ground truth. The regularization
/// parameter is supplied separately by the run configuration.
#[derive(Debug, Clone)]
pub struct GeneratedData {
    pub points: PointSet,
    pub weights: Vec<f64>,
    pub truth: GroundTruth,
    /// Component means when the generator has them (mixture only).
    pub means: Option<[Vec<f64>; 2]>,
}

/// Normal pdf with mean zero and standard deviation `sd`.
fn normal_pdf(x: f64, sd: f64) -> f64 {
    (-(x * x) / (2.0 * sd * sd)).exp() / ((2.0 * std::f64::consts::PI).sqrt() * sd)
}

/// Isotropic bivariate standard normal density at offset `v`.
fn bivariate_pdf(v: &[f64]) -> f64 {
    (-(linalg::norm_sq(v)) / 2.0).exp() / (2.0 * std::f64::consts::PI)
}

/// Two interlocking half-moon arcs with angle-dependent weights.
///
/// Each moon gets `n/2` points. Per point an angle `theta` is drawn
/// uniformly from `[-pi/2, pi/2]`; the point sits on its arc at that angle
/// and is displaced by isotropic Gaussian noise with standard deviation
/// `noise_sd`. The weight is the value at `theta` of the normal pdf with
/// standard deviation `pi/5`.
///
/// Arc layout: moon 1 traces `(cos(theta + pi/2), sin(theta + pi/2))`
/// (upper semicircle, center origin, radius 1) and moon 2 traces
/// `(1 - cos(theta + pi/2), 1/2 - sin(theta + pi/2))` (lower semicircle,
/// center `(1, 1/2)`), the standard interlocking orientation.
pub fn gen_half_moons(n: usize, noise_sd: f64, seed: u64) -> Result<GeneratedData> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidConfig(format!(
            "half-moon generator needs an even point count, got {n}"
        )));
    }
    if noise_sd < 0.0 {
        return Err(Error::InvalidConfig("noise_sd must be >= 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = n / 2;
    let weight_sd = std::f64::consts::PI / 5.0;
    let mut rows = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for moon in 0..2 {
        for _ in 0..half {
            let theta: f64 = rng.gen_range(-std::f64::consts::FRAC_PI_2..=std::f64::consts::FRAC_PI_2);
            let phi = theta + std::f64::consts::FRAC_PI_2;
            let (mut px, mut py) = if moon == 0 {
                (phi.cos(), phi.sin())
            } else {
                (1.0 - phi.cos(), 0.5 - phi.sin())
            };
            let nx: f64 = StandardNormal.sample(&mut rng);
            let ny: f64 = StandardNormal.sample(&mut rng);
            px += noise_sd * nx;
            py += noise_sd * ny;
            rows.push(vec![px, py]);
            weights.push(normal_pdf(theta, weight_sd));
            labels.push(moon + 1);
        }
    }
    Ok(GeneratedData {
        points: PointSet::from_rows(&rows),
        weights,
        truth: GroundTruth(labels),
        means: None,
    })
}

/// Mixture of two isotropic unit-variance Gaussians in the plane with
/// equal mixing, means `sep_sds` standard deviations apart along the first
/// axis (at the origin and `(sep_sds, 0)`). Each point's weight is the
/// density value at the sample, per `mode`.
pub fn gen_gauss_mixture(
    n: usize,
    sep_sds: f64,
    seed: u64,
    mode: WeightMode,
) -> Result<GeneratedData> {
    if n == 0 {
        return Err(Error::InvalidConfig("need at least one point".into()));
    }
    if !(sep_sds > 0.0) {
        return Err(Error::InvalidConfig("sep_sds must be > 0".into()));
    }
    let means = [vec![0.0, 0.0], vec![sep_sds, 0.0]];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let comp = rng.gen_range(0..2usize);
        let gx: f64 = StandardNormal.sample(&mut rng);
        let gy: f64 = StandardNormal.sample(&mut rng);
        let p = vec![means[comp][0] + gx, means[comp][1] + gy];
        let w = match mode {
            WeightMode::Mixture => {
                let d0 = [p[0] - means[0][0], p[1] - means[0][1]];
                let d1 = [p[0] - means[1][0], p[1] - means[1][1]];
                0.5 * bivariate_pdf(&d0) + 0.5 * bivariate_pdf(&d1)
            }
            WeightMode::Component => {
                let dc = [p[0] - means[comp][0], p[1] - means[comp][1]];
                bivariate_pdf(&dc)
            }
        };
        rows.push(p);
        weights.push(w);
        labels.push(comp + 1);
    }
    Ok(GeneratedData {
        points: PointSet::from_rows(&rows),
        weights,
        truth: GroundTruth(labels),
        means: Some(means),
    })
}

/// Indices of mixture samples within `radius_sds` component standard
/// deviations of their own component mean.
pub fn inner_subset(
    points: &PointSet,
    truth: &GroundTruth,
    means: &[Vec<f64>; 2],
    radius_sds: f64,
) -> Vec<usize> {
    (0..points.n())
        .filter(|&i| {
            let mean = &means[truth.0[i] - 1];
            linalg::dist(points.row(i), mean) <= radius_sds
        })
        .collect()
}

/// Pairwise-agreement score in `[0, 1]` between a predicted clustering and
/// ground truth.
///
/// A pair `(i, j)` scores 1 iff the two clusterings agree on it (both
/// together or both apart) and neither endpoint belongs to a cluster
/// marked inconclusive; the total is divided by `n(n-1)/2`. With marks
/// present the score is not symmetric in its arguments: inconclusive
/// status silences a point's pairs regardless of the truth side.
pub fn modified_rand_index(pred: &CandidateClustering, truth: &GroundTruth) -> f64 {
    let n = pred.n();
    assert_eq!(n, truth.n(), "clusterings must cover the same points");
    if n < 2 {
        return 1.0;
    }
    let conclusive: Vec<bool> = pred
        .assignment
        .iter()
        .map(|c| !pred.inconclusive.contains(c))
        .collect();
    let mut score = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            if !(conclusive[i] && conclusive[j]) {
                continue;
            }
            let same_pred = pred.assignment[i] == pred.assignment[j];
            let same_truth = truth.0[i] == truth.0[j];
            if same_pred == same_truth {
                score += 1;
            }
        }
    }
    score as f64 / (n * (n - 1) / 2) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn clustering(assignment: Vec<usize>, inconclusive: &[usize]) -> CandidateClustering {
        let k = assignment.iter().max().map_or(0, |m| m + 1);
        let mut clusters = vec![Vec::new(); k];
        for (i, &c) in assignment.iter().enumerate() {
            clusters[c].push(i);
        }
        CandidateClustering {
            assignment,
            clusters,
            inconclusive: inconclusive.iter().copied().collect::<BTreeSet<_>>(),
        }
    }

    #[test]
    fn half_moon_points_on_arcs_without_noise() {
        let data = gen_half_moons(100, 0.0, 1234).unwrap();
        for (i, p) in data.points.iter_rows().enumerate() {
            let on_arc = if data.truth.0[i] == 1 {
                (linalg::norm(p) - 1.0).abs()
            } else {
                (linalg::dist(p, &[1.0, 0.5]) - 1.0).abs()
            };
            assert!(on_arc < 1e-12, "point {i} off its arc by {on_arc}");
            // Weight equals the angle pdf; recover theta from the position.
            let phi = if data.truth.0[i] == 1 {
                p[1].atan2(p[0])
            } else {
                (0.5 - p[1]).atan2(1.0 - p[0])
            };
            let theta = phi - std::f64::consts::FRAC_PI_2;
            let expect = normal_pdf(theta, std::f64::consts::PI / 5.0);
            assert!((data.weights[i] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn half_moon_peak_weight() {
        // pdf of N(0, pi/5) at the mode: 1/(sqrt(2 pi) * pi/5) ~ 0.6349.
        let peak = normal_pdf(0.0, std::f64::consts::PI / 5.0);
        assert!((peak - 0.6349).abs() < 1e-4);
        let data = gen_half_moons(500, 0.05, 99).unwrap();
        assert!(data.weights.iter().all(|&w| w > 0.0 && w <= peak + 1e-12));
    }

    #[test]
    fn half_moon_rejects_odd_n() {
        assert!(gen_half_moons(7, 0.05, 1).is_err());
    }

    #[test]
    fn mixture_weight_at_mean() {
        // 1/2 phi(0) + 1/2 phi(4 sds) ~ (1/(4 pi))(1 + e^-8) ~ 0.0796.
        let w = 0.5 * bivariate_pdf(&[0.0, 0.0]) + 0.5 * bivariate_pdf(&[4.0, 0.0]);
        assert!((w - 0.0796).abs() < 1e-4);
    }

    #[test]
    fn mixture_labels_and_modes() {
        let data = gen_gauss_mixture(300, 4.0, 7, WeightMode::Mixture).unwrap();
        assert_eq!(data.truth.n(), 300);
        assert!(data.truth.0.iter().all(|&l| l == 1 || l == 2));
        assert!(data.weights.iter().all(|&w| w > 0.0));
        // Component weights differ from mixture weights on the same stream.
        let comp = gen_gauss_mixture(300, 4.0, 7, WeightMode::Component).unwrap();
        assert_eq!(comp.points, data.points);
        assert!(comp
            .weights
            .iter()
            .zip(&data.weights)
            .any(|(a, b)| (a - b).abs() > 1e-12));
    }

    #[test]
    fn generators_deterministic_under_seed() {
        let a = gen_half_moons(100, 0.05, 42).unwrap();
        let b = gen_half_moons(100, 0.05, 42).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.weights, b.weights);
        let c = gen_half_moons(100, 0.05, 43).unwrap();
        assert_ne!(a.points, c.points);

        let m1 = gen_gauss_mixture(100, 4.0, 42, WeightMode::Mixture).unwrap();
        let m2 = gen_gauss_mixture(100, 4.0, 42, WeightMode::Mixture).unwrap();
        assert_eq!(m1.points, m2.points);
    }

    #[test]
    fn inner_subset_extremes() {
        let data = gen_gauss_mixture(200, 4.0, 5, WeightMode::Mixture).unwrap();
        let means = data.means.as_ref().unwrap();
        assert!(inner_subset(&data.points, &data.truth, means, 0.0).is_empty());
        assert_eq!(
            inner_subset(&data.points, &data.truth, means, 1e9).len(),
            200
        );
        let inner = inner_subset(&data.points, &data.truth, means, 0.7);
        // ~ n * (1 - exp(-0.245)) ~ 0.22 n in expectation.
        assert!(!inner.is_empty() && inner.len() < 100);
    }

    #[test]
    fn rand_index_examples() {
        // Perfect agreement.
        let pred = clustering(vec![0, 0, 1, 1], &[]);
        let truth = GroundTruth(vec![1, 1, 2, 2]);
        assert_eq!(modified_rand_index(&pred, &truth), 1.0);

        // Everything inconclusive scores zero.
        let all_marked = clustering(vec![0, 0, 1, 1], &[0, 1]);
        assert_eq!(modified_rand_index(&all_marked, &truth), 0.0);

        // pred {{1,2},{3,4}} vs truth {{1,2,3},{4}}: 3 of 6 pairs agree.
        let pred = clustering(vec![0, 0, 1, 1], &[]);
        let truth = GroundTruth(vec![1, 1, 1, 2]);
        assert!((modified_rand_index(&pred, &truth) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rand_index_symmetry_without_marks() {
        let a = clustering(vec![0, 0, 1, 2, 2], &[]);
        let b = GroundTruth(vec![1, 2, 2, 3, 3]);
        let ab = modified_rand_index(&a, &b);
        let a_as_truth = GroundTruth(a.assignment.iter().map(|c| c + 1).collect());
        let b_as_pred = clustering(b.0.iter().map(|l| l - 1).collect(), &[]);
        let ba = modified_rand_index(&b_as_pred, &a_as_truth);
        assert_eq!(ab, ba);
    }

    #[test]
    fn marks_never_increase_the_index() {
        let truth = GroundTruth(vec![1, 1, 2, 2, 3, 3]);
        let base = clustering(vec![0, 0, 1, 1, 2, 2], &[]);
        let score = modified_rand_index(&base, &truth);
        for marked in 0..3 {
            let worse = clustering(vec![0, 0, 1, 1, 2, 2], &[marked]);
            assert!(modified_rand_index(&worse, &truth) <= score);
        }
    }
}
