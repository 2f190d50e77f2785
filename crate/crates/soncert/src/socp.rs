//! Second-order cone lifting of an approximate primal-dual pair, duality
//! gap, and complementarity residuals.
//!
//! The clustering problem is equivalent to the cone program
//!
//! ```text
//! min  sum_i r_i s_i + lambda sum_{i<j} r_i r_j t_ij
//! s.t. x_i - x_j - y_ij = 0,   x_i - z_i - a_i = 0,   s_i - u_i - 1 = 0,
//!      t_ij >= ||y_ij||,       s_i >= ||(z_i; u_i)||
//! ```
//!
//! with dual
//!
//! ```text
//! max  sum_i r_i a_i^T beta_i + sum_i r_i gamma_i
//! s.t. sum_j r_j delta<ij> + beta_i = 0,
//!      lambda >= ||delta_ij||,   1 - gamma_i >= ||(beta_i; gamma_i)||.
//! ```
//!
//! Both objectives exceed their unlifted counterparts `f'`, `h'` by the
//! constant `1/2 sum_i r_i`, so the duality gap `mu = f'(x) - h'(delta)`
//! is preserved by the lift. Any `x` together with a feasible `delta`
//! yields a fully feasible pair via [`lift`]; the complementarity
//! residuals of that pair sum to `mu` exactly and their norms are
//! `O(sqrt(mu))`, which is what makes the certificate quantitative.

use crate::dataset::Dataset;
use crate::edge::{EdgeScalars, EdgeTable};
use crate::error::{Error, Result};
use crate::linalg::{self, PointSet};
use crate::objective::{
    check_edges, check_points, dual_objective, primal_objective, weighted_row_sums,
};

/// Full variable list of a primal-dual feasible pair for the cone program.
#[derive(Debug, Clone)]
pub struct SocpPoint {
    pub x: PointSet,
    pub y: EdgeTable,
    pub z: PointSet,
    pub s: Vec<f64>,
    pub u: Vec<f64>,
    pub t: EdgeScalars,
    pub delta: EdgeTable,
    pub beta: PointSet,
    pub gamma: Vec<f64>,
}

/// Complementarity residuals of a feasible pair, plus the duality gap.
#[derive(Debug, Clone)]
pub struct Residuals {
    /// `eps1_ij = t_ij lambda + y_ij^T delta_ij` (scalar per edge).
    pub eps1: EdgeScalars,
    /// `eps2_ij = t_ij delta_ij + lambda y_ij` (vector per edge).
    pub eps2: EdgeTable,
    /// `sigma1_i = s_i (1 - gamma_i) + z_i^T beta_i + u_i gamma_i`.
    pub sigma1: Vec<f64>,
    /// `sigma2_i = s_i beta_i + (1 - gamma_i) z_i`.
    pub sigma2: PointSet,
    /// `sigma3_i = s_i gamma_i + (1 - gamma_i) u_i`.
    pub sigma3: Vec<f64>,
    /// Duality gap `f'(x) - h'(delta)`, clamped at zero.
    pub mu: f64,
    /// Primal objective `f'(x)` (kept for noise-floor scaling).
    pub primal_value: f64,
    /// Dual objective `h'(delta)`.
    pub dual_value: f64,
}

impl Residuals {
    /// Absolute evaluation-noise bound for the duality gap: the gap is a
    /// difference of two objective sums with roughly `n^2` terms each, so
    /// its value carries cancellation error at this scale even when the
    /// true gap is far smaller. Certificate comparisons against `mu` must
    /// stay outside this band to mean anything in exact arithmetic.
    pub fn gap_noise(&self, n: usize) -> f64 {
        (n * n) as f64
            * f64::EPSILON
            * (1.0 + self.primal_value.abs() + self.dual_value.abs())
    }
}

/// Radial projection of every edge onto the dual-feasible ball of radius
/// `lambda`. Edges already inside are returned bitwise unchanged; the map
/// never increases a norm and is idempotent.
pub fn clamp_dual(delta: &EdgeTable, lambda: f64) -> EdgeTable {
    let mut out = delta.clone();
    out.for_each_mut(|_, _, v| {
        let nrm = linalg::norm(v);
        // The slack keeps the map idempotent: rescaling can land an ulp
        // above lambda, and edges inside the band must not be touched
        // again.
        if nrm > lambda * (1.0 + FEAS_SLACK) {
            let scale = lambda / nrm;
            for x in v.iter_mut() {
                *x *= scale;
            }
        }
    });
    out
}

// Rescaling by lambda/||v|| can land a hair above lambda in floating
// point; feasibility checks allow that much and no more.
const FEAS_SLACK: f64 = 1e-12;

/// Lifts `(x, delta)` with feasible `delta` to a feasible pair of the cone
/// program:
///
/// ```text
/// y_ij = x_i - x_j          z_i = x_i - a_i
/// s_i  = (1 + ||z_i||^2)/2  u_i = (-1 + ||z_i||^2)/2
/// t_ij = ||y_ij||           beta_i = -sum_j r_j delta<ij>
/// gamma_i = (1 - ||beta_i||^2)/2
/// ```
///
/// Rejects `delta` with any edge norm beyond `lambda` (clamp first).
pub fn lift(ds: &Dataset, x: &PointSet, delta: &EdgeTable) -> Result<SocpPoint> {
    check_points(ds, x, "lift x")?;
    check_edges(ds, delta, "lift delta")?;
    let lambda = ds.lambda();
    let mut infeasible: Option<(usize, usize, f64)> = None;
    delta.for_each(|i, j, v| {
        let nrm = linalg::norm(v);
        if nrm > lambda * (1.0 + FEAS_SLACK) && infeasible.is_none() {
            infeasible = Some((i, j, nrm));
        }
    });
    if let Some((i, j, norm)) = infeasible {
        return Err(Error::InfeasibleDual { i, j, norm, lambda });
    }

    let (n, d) = (ds.n(), ds.d());
    let mut y = EdgeTable::zeros(n, d);
    let mut t = EdgeScalars::zeros(n);
    y.for_each_mut(|i, j, s| linalg::sub_into(x.row(i), x.row(j), s));
    y.for_each(|i, j, s| t.set(i, j, linalg::norm(s)));

    let mut z = PointSet::zeros(n, d);
    let mut s = vec![0.0; n];
    let mut u = vec![0.0; n];
    for i in 0..n {
        linalg::sub_into(x.row(i), ds.point(i), z.row_mut(i));
        let zsq = linalg::norm_sq(z.row(i));
        s[i] = 0.5 * (1.0 + zsq);
        u[i] = 0.5 * (-1.0 + zsq);
    }

    let row_sums = weighted_row_sums(delta, ds.weights());
    let mut beta = PointSet::zeros(n, d);
    let mut gamma = vec![0.0; n];
    for i in 0..n {
        for k in 0..d {
            beta.row_mut(i)[k] = -row_sums.row(i)[k];
        }
        gamma[i] = 0.5 * (1.0 - linalg::norm_sq(beta.row(i)));
    }

    Ok(SocpPoint {
        x: x.clone(),
        y,
        z,
        s,
        u,
        t,
        delta: delta.clone(),
        beta,
        gamma,
    })
}

impl SocpPoint {
    /// Cone-program primal objective `sum r_i s_i + lambda sum r_i r_j t_ij`
    /// (equals `f'(x) + 1/2 sum r_i`).
    pub fn primal_objective(&self, ds: &Dataset) -> f64 {
        let mut total = 0.0;
        for i in 0..ds.n() {
            total += ds.weight(i) * self.s[i];
        }
        let mut pen = 0.0;
        self.t
            .for_each(|i, j, tij| pen += ds.weight(i) * ds.weight(j) * tij);
        total + ds.lambda() * pen
    }

    /// Cone-program dual objective `sum r_i a_i^T beta_i + sum r_i gamma_i`
    /// (equals `h'(delta) + 1/2 sum r_i`).
    pub fn dual_objective(&self, ds: &Dataset) -> f64 {
        let mut total = 0.0;
        for i in 0..ds.n() {
            total +=
                ds.weight(i) * (linalg::dot(ds.point(i), self.beta.row(i)) + self.gamma[i]);
        }
        total
    }

    /// Checks every feasibility family of the primal-dual pair to within
    /// `tol` (absolute, per entry). Returns the name of the first violated
    /// family.
    pub fn check_feasible(&self, ds: &Dataset, tol: f64) -> std::result::Result<(), String> {
        let d = ds.d();
        let mut failure: Option<String> = None;
        let mut record = |name: &str, i: usize, j: Option<usize>, err: f64| {
            if failure.is_none() {
                failure = Some(match j {
                    Some(j) => format!("{name} violated at edge ({i},{j}) by {err:.3e}"),
                    None => format!("{name} violated at node {i} by {err:.3e}"),
                });
            }
        };

        self.y.for_each(|i, j, yij| {
            for k in 0..d {
                let e = (self.x.row(i)[k] - self.x.row(j)[k] - yij[k]).abs();
                if e > tol {
                    record("primal split x_i - x_j - y_ij = 0", i, Some(j), e);
                }
            }
            let e = linalg::norm(yij) - self.t.get(i, j);
            if e > tol {
                record("cone t_ij >= ||y_ij||", i, Some(j), e);
            }
        });
        for i in 0..ds.n() {
            for k in 0..d {
                let e = (self.x.row(i)[k] - self.z.row(i)[k] - ds.point(i)[k]).abs();
                if e > tol {
                    record("primal shift x_i - z_i - a_i = 0", i, None, e);
                }
            }
            let e = (self.s[i] - self.u[i] - 1.0).abs();
            if e > tol {
                record("primal affine s_i - u_i - 1 = 0", i, None, e);
            }
            let zu = (linalg::norm_sq(self.z.row(i)) + self.u[i] * self.u[i]).sqrt();
            let e = zu - self.s[i];
            if e > tol {
                record("cone s_i >= ||(z_i; u_i)||", i, None, e);
            }
        }
        let row_sums = weighted_row_sums(&self.delta, ds.weights());
        for i in 0..ds.n() {
            for k in 0..d {
                let e = (row_sums.row(i)[k] + self.beta.row(i)[k]).abs();
                if e > tol {
                    record("dual balance sum_j r_j delta<ij> + beta_i = 0", i, None, e);
                }
            }
            let bg = (linalg::norm_sq(self.beta.row(i)) + self.gamma[i] * self.gamma[i]).sqrt();
            let e = bg - (1.0 - self.gamma[i]);
            if e > tol {
                record("cone 1 - gamma_i >= ||(beta_i; gamma_i)||", i, None, e);
            }
        }
        self.delta.for_each(|i, j, dij| {
            let e = linalg::norm(dij) - ds.lambda();
            if e > tol.max(ds.lambda() * FEAS_SLACK) {
                record("dual ball lambda >= ||delta_ij||", i, Some(j), e);
            }
        });

        match failure {
            Some(msg) => Err(msg),
            None => Ok(()),
        }
    }
}

/// Duality gap `f'(x) - h'(delta_feas)`, clamped to zero within a 1e-9
/// roundoff window (weak duality guarantees nonnegativity for feasible
/// `delta`; anything below `-1e-9` would be an implementation bug).
pub fn duality_gap(ds: &Dataset, x: &PointSet, delta_feas: &EdgeTable) -> Result<f64> {
    let f = primal_objective(ds, x)?;
    let h = dual_objective(ds, delta_feas)?;
    let mu = f - h;
    debug_assert!(
        mu >= -1e-9 * (1.0 + f.abs()),
        "weak duality violated: mu = {mu}"
    );
    Ok(mu.max(0.0))
}

/// Complementarity residuals of a feasible pair.
///
/// The returned quantities satisfy, up to roundoff: `sigma1_i >= 0`,
/// `eps1_ij >= 0`, both bounded by `mu`, and the exact accounting
/// `sum_i r_i sigma1_i + sum_{i<j} r_i r_j eps1_ij = mu`.
pub fn residuals(ds: &Dataset, p: &SocpPoint) -> Result<Residuals> {
    let scale = 1.0 + ds.weighted_spread() + ds.lambda();
    if let Err(msg) = p.check_feasible(ds, 1e-9 * scale) {
        return Err(Error::Certificate(format!("infeasible cone point: {msg}")));
    }
    let (n, d) = (ds.n(), ds.d());
    let lambda = ds.lambda();

    let mut eps1 = EdgeScalars::zeros(n);
    let mut eps2 = EdgeTable::zeros(n, d);
    p.y.for_each(|i, j, yij| {
        let dij = p.delta.slice(i, j);
        let tij = p.t.get(i, j);
        eps1.set(i, j, tij * lambda + linalg::dot(yij, dij));
        let out = eps2.slice_mut(i, j);
        for k in 0..d {
            out[k] = tij * dij[k] + lambda * yij[k];
        }
    });

    let mut sigma1 = vec![0.0; n];
    let mut sigma2 = PointSet::zeros(n, d);
    let mut sigma3 = vec![0.0; n];
    for i in 0..n {
        let zi = p.z.row(i);
        let bi = p.beta.row(i);
        sigma1[i] = p.s[i] * (1.0 - p.gamma[i]) + linalg::dot(zi, bi) + p.u[i] * p.gamma[i];
        let out = sigma2.row_mut(i);
        for k in 0..d {
            out[k] = p.s[i] * bi[k] + (1.0 - p.gamma[i]) * zi[k];
        }
        sigma3[i] = p.s[i] * p.gamma[i] + (1.0 - p.gamma[i]) * p.u[i];
    }

    let primal_value = primal_objective(ds, &p.x)?;
    let dual_value = dual_objective(ds, &p.delta)?;
    debug_assert!(
        primal_value - dual_value >= -1e-9 * (1.0 + primal_value.abs()),
        "weak duality violated"
    );
    let mu = (primal_value - dual_value).max(0.0);
    Ok(Residuals {
        eps1,
        eps2,
        sigma1,
        sigma2,
        sigma3,
        mu,
        primal_value,
        dual_value,
    })
}

/// One edge-bound row of the diagnostic report.
#[derive(Debug, Clone)]
pub struct EdgeBound {
    pub i: usize,
    pub j: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// One node-bound row of the diagnostic report.
#[derive(Debug, Clone)]
pub struct NodeBound {
    pub i: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Evaluation of the a-priori residual bounds at a feasible pair.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub edges: Vec<EdgeBound>,
    pub nodes: Vec<NodeBound>,
}

impl BoundReport {
    pub fn all_ok(&self) -> bool {
        self.edges.iter().all(|e| e.ok) && self.nodes.iter().all(|n| n.ok)
    }

    pub fn violations(&self) -> usize {
        self.edges.iter().filter(|e| !e.ok).count()
            + self.nodes.iter().filter(|n| !n.ok).count()
    }
}

/// Checks the O(sqrt(mu)) residual bounds
///
/// ```text
/// ||eps2_ij||          <= sqrt( (W mu + 2 mu^2) / (r_i r_j) )
/// ||(sigma2_i; sigma3_i)|| <= sqrt( (W/r_i + 2mu/r_i + 1)
///                                 * (1/2 + (lambda (r'-r_i) A + mu)/r_i)
///                                 * mu )
/// ```
///
/// where `W = sum_l r_l ||abar - a_l||^2`, `A = sum_l r_l ||a_l||`, `abar`
/// the weighted centroid and `r'` the total weight. These hold at every
/// lifted pair; a violation indicates an implementation bug, never a data
/// problem.
pub fn residual_bounds(ds: &Dataset, p: &SocpPoint, res: &Residuals) -> BoundReport {
    let mu = res.mu;
    let spread = ds.weighted_spread();
    let norm_sum = ds.weighted_norm_sum();
    let rtot = ds.total_weight();
    let lambda = ds.lambda();
    let _ = p;

    let mut edges = Vec::new();
    res.eps2.for_each(|i, j, e2| {
        let lhs = linalg::norm(e2);
        let rhs = ((spread * mu + 2.0 * mu * mu) / (ds.weight(i) * ds.weight(j))).sqrt();
        let ok = lhs <= rhs + 1e-12 * (1.0 + rhs);
        edges.push(EdgeBound { i, j, lhs, rhs, ok });
    });

    let mut nodes = Vec::new();
    for i in 0..ds.n() {
        let ri = ds.weight(i);
        let lhs = (linalg::norm_sq(res.sigma2.row(i)) + res.sigma3[i] * res.sigma3[i]).sqrt();
        let first = spread / ri + 2.0 * mu / ri + 1.0;
        let second = 0.5 + (lambda * (rtot - ri) * norm_sum + mu) / ri;
        let rhs = (first * second * mu).sqrt();
        let ok = lhs <= rhs + 1e-12 * (1.0 + rhs);
        nodes.push(NodeBound { i, lhs, rhs, ok });
    }

    BoundReport { edges, nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admm::init_state;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ds2(lambda: f64) -> Dataset {
        Dataset::new(
            PointSet::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]),
            vec![1.0, 1.0],
            lambda,
        )
        .unwrap()
    }

    fn random_instance(rng: &mut ChaCha8Rng, nmax: usize, dmax: usize) -> Dataset {
        let n = rng.gen_range(2..=nmax);
        let d = rng.gen_range(1..=dmax);
        let a: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect())
            .collect();
        let r: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..4.0)).collect();
        let lambda = rng.gen_range(0.05..2.0);
        Dataset::new(PointSet::from_rows(&a), r, lambda).unwrap()
    }

    fn random_lifted(rng: &mut ChaCha8Rng, ds: &Dataset) -> SocpPoint {
        let mut x = PointSet::zeros(ds.n(), ds.d());
        for i in 0..ds.n() {
            for k in 0..ds.d() {
                x.row_mut(i)[k] = rng.gen_range(-3.0..3.0);
            }
        }
        let mut delta = EdgeTable::zeros(ds.n(), ds.d());
        delta.for_each_mut(|_, _, s| {
            for v in s {
                *v = rng.gen_range(-3.0..3.0);
            }
        });
        let delta = clamp_dual(&delta, ds.lambda());
        lift(ds, &x, &delta).unwrap()
    }

    #[test]
    fn clamp_examples() {
        let lambda = 0.4;
        let mut delta = EdgeTable::zeros(2, 2);
        delta.set(0, 1, &[0.8, 0.0]);
        let clamped = clamp_dual(&delta, lambda);
        assert!((clamped.get(0, 1)[0] - 0.4).abs() < 1e-15);
        assert_eq!(clamped.get(0, 1)[1], 0.0);

        let mut inside = EdgeTable::zeros(2, 2);
        inside.set(0, 1, &[0.1, -0.2]);
        let out = clamp_dual(&inside, lambda);
        assert_eq!(out.get(0, 1), inside.get(0, 1)); // bitwise unchanged
    }

    #[test]
    fn clamp_is_projection() {
        // Nearest-point property probed against 10^4 random feasible points.
        let lambda = 0.7;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut delta = EdgeTable::zeros(2, 3);
        delta.set(0, 1, &[1.3, -0.4, 2.0]);
        let proj = clamp_dual(&delta, lambda);
        let p = proj.get(0, 1);
        let v = delta.get(0, 1);
        let dv = linalg::dist(&p, &v);
        for _ in 0..10_000 {
            let mut cand = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let nrm = linalg::norm(&cand);
            if nrm > lambda {
                for c in &mut cand {
                    *c *= lambda / nrm * rng.gen_range(0.0..1.0);
                }
            }
            assert!(linalg::dist(&cand, &v) >= dv - 1e-12);
        }
    }

    #[test]
    fn clamp_monotone_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..50 {
            let n = rng.gen_range(2..=5);
            let d = rng.gen_range(1..=3);
            let lambda = rng.gen_range(0.1..2.0);
            let mut delta = EdgeTable::zeros(n, d);
            delta.for_each_mut(|_, _, s| {
                for v in s {
                    *v = rng.gen_range(-4.0..4.0);
                }
            });
            let once = clamp_dual(&delta, lambda);
            once.for_each(|i, j, v| {
                assert!(linalg::norm(v) <= linalg::norm(delta.slice(i, j)) + 1e-15);
                assert!(linalg::norm(v) <= lambda * (1.0 + 1e-12));
            });
            let twice = clamp_dual(&once, lambda);
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn lift_at_slater_point() {
        let ds = ds2(0.1);
        let p = lift(&ds, ds.points(), &EdgeTable::zeros(2, 2)).unwrap();
        for i in 0..2 {
            assert_eq!(p.z.row(i), &[0.0, 0.0]);
            assert_eq!(p.s[i], 0.5);
            assert_eq!(p.u[i], -0.5);
            assert_eq!(p.beta.row(i), &[0.0, 0.0]);
            assert_eq!(p.gamma[i], 0.5);
        }
        assert_eq!(p.t.get(0, 1), 1.0); // ||a_1 - a_2||
        assert!(p.check_feasible(&ds, 1e-12).is_ok());
        // Offset identity: cone objective minus f'(a) is exactly r'/2.
        let f = primal_objective(&ds, ds.points()).unwrap();
        assert!((p.primal_objective(&ds) - f - 1.0).abs() < 1e-15);
        assert!((p.dual_objective(&ds) - 0.0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lift_rejects_infeasible_dual() {
        let ds = ds2(0.1);
        let mut delta = EdgeTable::zeros(2, 2);
        delta.set(0, 1, &[1.0, 0.0]);
        assert!(matches!(
            lift(&ds, ds.points(), &delta),
            Err(Error::InfeasibleDual { .. })
        ));
    }

    #[test]
    fn lifted_points_are_feasible() {
        // Feasibility closure: clamp then lift passes all nine families.
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let ds = random_instance(&mut rng, 6, 3);
            let p = random_lifted(&mut rng, &ds);
            let scale = 1.0 + ds.weighted_spread();
            assert!(p.check_feasible(&ds, 1e-10 * scale).is_ok());
        }
    }

    #[test]
    fn gap_examples() {
        let ds = ds2(0.1);
        let mu = duality_gap(&ds, ds.points(), &EdgeTable::zeros(2, 2)).unwrap();
        assert!((mu - 0.1).abs() < 1e-15);
    }

    #[test]
    fn gap_vanishes_at_two_point_optimum() {
        let ds = Dataset::new(
            PointSet::from_rows(&[vec![0.0], vec![1.0]]),
            vec![1.0, 1.0],
            0.6,
        )
        .unwrap();
        let cfg = crate::admm::AdmmConfig::default();
        let mut state = init_state(&ds);
        let mut prev_mu = f64::INFINITY;
        for it in 0..3000 {
            crate::admm::admm_step_in_place(&ds, &mut state, &cfg, it).unwrap();
            if it % 100 == 0 {
                let delta = clamp_dual(&state.delta, ds.lambda());
                let mu = duality_gap(&ds, &state.x, &delta).unwrap();
                assert!(mu <= prev_mu + 1e-9, "lifted gap increased");
                prev_mu = mu;
            }
        }
        assert!(prev_mu < 1e-10, "gap did not vanish: {prev_mu}");
    }

    #[test]
    fn gap_matches_socp_objectives() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..50 {
            let ds = random_instance(&mut rng, 5, 3);
            let p = random_lifted(&mut rng, &ds);
            let mu = duality_gap(&ds, &p.x, &p.delta).unwrap();
            let via_socp = p.primal_objective(&ds) - p.dual_objective(&ds);
            assert!((mu - via_socp).abs() <= 1e-10 * (1.0 + mu.abs()));
        }
    }

    #[test]
    fn residuals_at_slater_point() {
        let ds = ds2(0.1);
        let p = lift(&ds, ds.points(), &EdgeTable::zeros(2, 2)).unwrap();
        let res = residuals(&ds, &p).unwrap();
        // sigma1 = 1/2 * 1/2 + 0 + (-1/2)(1/2) = 0 exactly.
        assert_eq!(res.sigma1, vec![0.0, 0.0]);
        // eps1 = lambda ||a_i - a_j|| >= 0.
        assert!((res.eps1.get(0, 1) - 0.1).abs() < 1e-15);
        assert!((res.mu - 0.1).abs() < 1e-15);
    }

    #[test]
    fn gap_identity_on_random_points() {
        // sum_i r_i sigma1_i + sum_{i<j} r_i r_j eps1_ij = mu.
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..200 {
            let ds = random_instance(&mut rng, 6, 3);
            let p = random_lifted(&mut rng, &ds);
            let res = residuals(&ds, &p).unwrap();
            let mut total = 0.0;
            for i in 0..ds.n() {
                assert!(res.sigma1[i] >= -1e-12 * (1.0 + res.mu));
                // Each weighted term of the accounting identity is bounded
                // by the whole gap (all terms are nonnegative).
                assert!(ds.weight(i) * res.sigma1[i] <= res.mu + 1e-9 * (1.0 + res.mu));
                total += ds.weight(i) * res.sigma1[i];
            }
            res.eps1.for_each(|i, j, e| {
                assert!(e >= -1e-12 * (1.0 + res.mu));
                assert!(
                    ds.weight(i) * ds.weight(j) * e <= res.mu + 1e-9 * (1.0 + res.mu)
                );
                total += ds.weight(i) * ds.weight(j) * e;
            });
            assert!(
                (total - res.mu).abs() <= 1e-9 * (1.0 + res.mu),
                "identity off by {}",
                (total - res.mu).abs()
            );
        }
    }

    #[test]
    fn soc_complementarity_lemma_hand_case() {
        // x = (5; 3, 4), z = (1; -0.6, -0.8): x^T z = 0, and
        // ||z0 xbar + x0 zbar|| = ||(3,4) + 5(-0.6,-0.8)|| = 0 <= sqrt(10 mu).
        let (x0, xbar) = (5.0, [3.0, 4.0]);
        let (z0, zbar) = (1.0, [-0.6, -0.8]);
        let ip = x0 * z0 + linalg::dot(&xbar, &zbar);
        assert!(ip.abs() < 1e-15);
        let mut combo = [0.0; 2];
        for k in 0..2 {
            combo[k] = z0 * xbar[k] + x0 * zbar[k];
        }
        for mu in [0.0, 0.3, 2.0] {
            assert!(ip <= mu);
            assert!(linalg::norm(&combo) <= (2.0 * x0 * z0 * mu).sqrt() + 1e-15);
        }
    }

    #[test]
    fn bounds_hold_at_slater_point() {
        let ds = ds2(0.1);
        let p = lift(&ds, ds.points(), &EdgeTable::zeros(2, 2)).unwrap();
        let res = residuals(&ds, &p).unwrap();
        let report = residual_bounds(&ds, &p, &res);
        assert!(report.all_ok());
        // eps2 = lambda y_ij with t_ij = ||y_ij||; check against the rhs.
        assert!((report.edges[0].lhs - 0.1).abs() < 1e-15);
    }

    #[test]
    fn bounds_tight_at_zero_gap() {
        // mu = 0 forces eps2 = 0, sigma2 = 0, sigma3 = 0.
        let ds = ds2(0.2);
        // Exact optimum for two points at distance 1, weights 1, lambda 0.2:
        // x = (a1 + lambda, a2 - lambda) along the axis, delta = unit * lambda.
        let x = PointSet::from_rows(&[vec![0.2, 0.0], vec![0.8, 0.0]]);
        let mut delta = EdgeTable::zeros(2, 2);
        delta.set(0, 1, &[0.2, 0.0]);
        let p = lift(&ds, &x, &delta).unwrap();
        let res = residuals(&ds, &p).unwrap();
        assert!(res.mu < 1e-14);
        let report = residual_bounds(&ds, &p, &res);
        assert!(report.all_ok());
        for e in &report.edges {
            assert!(e.lhs < 1e-7);
        }
        for nb in &report.nodes {
            assert!(nb.lhs < 1e-7);
        }
    }

    #[test]
    fn bounds_hold_on_random_lifted_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..200 {
            let ds = random_instance(&mut rng, 6, 3);
            let p = random_lifted(&mut rng, &ds);
            let res = residuals(&ds, &p).unwrap();
            let report = residual_bounds(&ds, &p, &res);
            assert!(report.all_ok(), "bound violated on a lifted point");
        }
    }

    #[test]
    fn bound_formulas_match_rederivation() {
        // Second route: rhs14' = sqrt(2 t_bound lambda mu),
        // rhs15' = sqrt(2 s_bound (1-gamma)_bound mu) with the bracket
        // bounds on s, t and 1 - gamma.
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..100 {
            let ds = random_instance(&mut rng, 6, 3);
            let p = random_lifted(&mut rng, &ds);
            let res = residuals(&ds, &p).unwrap();
            let report = residual_bounds(&ds, &p, &res);
            let mu = res.mu;
            let spread = ds.weighted_spread();
            let norm_sum = ds.weighted_norm_sum();
            for e in &report.edges {
                let t_bound =
                    (0.5 * spread + mu) / (ds.lambda() * ds.weight(e.i) * ds.weight(e.j));
                let alt = (2.0 * t_bound * ds.lambda() * mu).sqrt();
                assert!((alt - e.rhs).abs() <= 1e-12 * (1.0 + e.rhs));
            }
            for nb in &report.nodes {
                let ri = ds.weight(nb.i);
                let s_bound = (0.5 * spread + mu) / ri + 0.5;
                let g_bound =
                    0.5 + (ds.lambda() * (ds.total_weight() - ri) * norm_sum + mu) / ri;
                let alt = (2.0 * s_bound * g_bound * mu).sqrt();
                assert!((alt - nb.rhs).abs() <= 1e-12 * (1.0 + nb.rhs));
            }
        }
    }
}
