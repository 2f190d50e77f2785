//! Primal-dual ADMM for the weighted sum-of-norms objective.
//!
//! The augmented Lagrangian with penalty `nu` is
//!
//! ```text
//! L_nu = 1/2 sum_i r_i ||x_i - a_i||^2
//!        + sum_{i<j} r_i r_j [ lambda ||y_ij||
//!                              - delta_ij^T (x_i - x_j - y_ij)
//!                              + nu/2 ||x_i - x_j - y_ij||^2 ]
//! ```
//!
//! and one step sweeps x -> y -> delta:
//!
//! 1. x block: exact minimizer. Dividing row i's stationarity by `r_i`
//!    gives the per-coordinate system `M x = rhs` with
//!    `M = (1 + nu r') I - nu 1 r^T` (`r'` the total weight) and
//!    `rhs_i = a_i + sum_j r_j (delta<ij> + nu y<ij>)`. By the
//!    Sherman-Morrison identity `M^{-1} = (I + nu 1 r^T) / (1 + nu r')`,
//!    so `x_i = (rhs_i + nu sum_j r_j rhs_j) / (1 + nu r')`.
//! 2. y block: `y_ij <- prox_{lambda/nu}( x_i - x_j - delta_ij / nu )`.
//! 3. delta block: `delta_ij <- delta_ij - nu (x_i - x_j - y_ij)`.
//!
//! The multiplier sign follows the saddle form above (`-delta^T residual`),
//! which makes the iterate's `delta` directly evaluable in the dual
//! objective. No over-relaxation, acceleration or adaptive penalty is
//! applied; fixed points of the sweep are exactly the KKT points.

use crate::dataset::Dataset;
use crate::edge::EdgeTable;
use crate::error::{AdmmBlock, Error, Result};
use crate::linalg::{self, PointSet};
use crate::objective::{check_edges, check_points, weighted_row_sums};
use crate::prox::prox_norm_in_place;

/// Solver parameters.
#[derive(Debug, Clone, Copy)]
pub struct AdmmConfig {
    /// Augmented-Lagrangian penalty, > 0.
    pub nu: f64,
    /// Certification interval in iterations, >= 1.
    pub certify_every: usize,
    /// Iteration cap, >= certify_every.
    pub max_iters: usize,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            nu: 1.0,
            certify_every: 8,
            max_iters: 50_000,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(Error::InvalidConfig("nu must be > 0".into()));
        }
        if self.certify_every == 0 {
            return Err(Error::InvalidConfig("certify_every must be >= 1".into()));
        }
        if self.max_iters < self.certify_every {
            return Err(Error::InvalidConfig(
                "max_iters must be >= certify_every".into(),
            ));
        }
        Ok(())
    }
}

/// ADMM state: primal points `x`, split variables `y`, multipliers `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualIterate {
    pub x: PointSet,
    pub y: EdgeTable,
    pub delta: EdgeTable,
}

impl PrimalDualIterate {
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.delta.is_finite()
    }
}

/// Initial state `x = a`, `y_ij = a_i - a_j`, `delta = 0`.
///
/// This is the primal/dual Slater point of the conic formulation stripped
/// of its cone-only variables; `delta = 0` is always dual feasible.
pub fn init_state(ds: &Dataset) -> PrimalDualIterate {
    let x = ds.points().clone();
    let mut y = EdgeTable::zeros(ds.n(), ds.d());
    y.for_each_mut(|i, j, s| {
        linalg::sub_into(ds.point(i), ds.point(j), s);
    });
    let delta = EdgeTable::zeros(ds.n(), ds.d());
    PrimalDualIterate { x, y, delta }
}

/// One x -> y -> delta sweep, returning the next iterate.
pub fn admm_step(
    ds: &Dataset,
    state: &PrimalDualIterate,
    cfg: &AdmmConfig,
) -> Result<PrimalDualIterate> {
    let mut next = state.clone();
    admm_step_in_place(ds, &mut next, cfg, 0)?;
    Ok(next)
}

/// In-place sweep; `iteration` only labels the error payload on breakdown.
pub fn admm_step_in_place(
    ds: &Dataset,
    state: &mut PrimalDualIterate,
    cfg: &AdmmConfig,
    iteration: usize,
) -> Result<()> {
    cfg.validate()?;
    check_points(ds, &state.x, "admm_step x")?;
    check_edges(ds, &state.y, "admm_step y")?;
    check_edges(ds, &state.delta, "admm_step delta")?;

    let n = ds.n();
    let d = ds.d();
    let nu = cfg.nu;
    let r = ds.weights();

    // x block: rhs_i = a_i + S^delta_i + nu S^y_i, then Sherman-Morrison.
    let s_delta = weighted_row_sums(&state.delta, r);
    let s_y = weighted_row_sums(&state.y, r);
    let mut rhs = PointSet::zeros(n, d);
    for i in 0..n {
        let row = rhs.row_mut(i);
        row.copy_from_slice(ds.point(i));
        linalg::add_scaled(row, 1.0, s_delta.row(i));
        linalg::add_scaled(row, nu, s_y.row(i));
    }
    let mut weighted_sum = vec![0.0; d];
    for i in 0..n {
        linalg::add_scaled(&mut weighted_sum, r[i], rhs.row(i));
    }
    let denom = 1.0 + nu * ds.total_weight();
    for i in 0..n {
        let row = state.x.row_mut(i);
        for k in 0..d {
            row[k] = (rhs.row(i)[k] + nu * weighted_sum[k]) / denom;
        }
    }
    if !state.x.is_finite() {
        return Err(Error::NumericalBreakdown {
            iteration,
            block: AdmmBlock::X,
        });
    }

    // y block: y_ij = prox_{lambda/nu}(x_i - x_j - delta_ij / nu).
    let tau = ds.lambda() / nu;
    let x = &state.x;
    let delta = &state.delta;
    state.y.for_each_mut(|i, j, yij| {
        let dij = delta.slice(i, j);
        let (xi, xj) = (x.row(i), x.row(j));
        for k in 0..d {
            yij[k] = xi[k] - xj[k] - dij[k] / nu;
        }
        prox_norm_in_place(yij, tau);
    });
    if !state.y.is_finite() {
        return Err(Error::NumericalBreakdown {
            iteration,
            block: AdmmBlock::Y,
        });
    }

    // delta block: delta_ij -= nu (x_i - x_j - y_ij).
    let x = &state.x;
    let y = &state.y;
    state.delta.for_each_mut(|i, j, dij| {
        let yij = y.slice(i, j);
        let (xi, xj) = (x.row(i), x.row(j));
        for k in 0..d {
            dij[k] -= nu * (xi[k] - xj[k] - yij[k]);
        }
    });
    if !state.delta.is_finite() {
        return Err(Error::NumericalBreakdown {
            iteration,
            block: AdmmBlock::Delta,
        });
    }
    Ok(())
}
