//! Primal and dual objective evaluation.
//!
//! Primal: `f'(x) = 1/2 sum_i r_i ||x_i - a_i||^2
//!                  + lambda sum_{i<j} r_i r_j ||x_i - x_j||`.
//!
//! Lagrangian dual over multipliers `delta_ij` (one per pair, antisymmetric
//! extension `delta<ij>`):
//!
//! ```text
//! h'(delta) = -1/2 sum_j r_j || sum_i r_i delta<ij> ||^2
//!             + sum_{i,j} r_i r_j delta<ij>^T a_j
//! ```
//!
//! subject to `||delta_ij|| <= lambda`. `h'` is evaluated as written for
//! any finite table; feasibility is not required here (weak duality only
//! holds for feasible `delta`).
//!
//! All reductions run in a fixed index order so repeated evaluations are
//! bit-identical.

use crate::dataset::Dataset;
use crate::edge::EdgeTable;
use crate::error::{Error, Result};
use crate::linalg::{self, PointSet};

pub fn primal_objective(ds: &Dataset, x: &PointSet) -> Result<f64> {
    check_points(ds, x, "primal_objective x")?;
    let mut fidelity = 0.0;
    for (i, xi) in x.iter_rows().enumerate() {
        let dv = linalg::dist(xi, ds.point(i));
        fidelity += ds.weight(i) * dv * dv;
    }
    let mut penalty = 0.0;
    for i in 0..ds.n() {
        for j in (i + 1)..ds.n() {
            penalty += ds.weight(i) * ds.weight(j) * linalg::dist(x.row(i), x.row(j));
        }
    }
    Ok(0.5 * fidelity + ds.lambda() * penalty)
}

pub fn dual_objective(ds: &Dataset, delta: &EdgeTable) -> Result<f64> {
    check_edges(ds, delta, "dual_objective delta")?;
    // Row sums S_i = sum_j r_j delta<ij>; the norm term needs
    // sum_i r_i delta<ij> = -S_j, whose norm equals ||S_j||.
    let s = weighted_row_sums(delta, ds.weights());
    let mut quad = 0.0;
    for (j, sj) in s.iter_rows().enumerate() {
        quad += ds.weight(j) * linalg::norm_sq(sj);
    }
    // sum_{i,j} r_i r_j delta<ij>^T a_j collapses to one pass over stored
    // edges: r_i r_j delta_ij^T (a_j - a_i).
    let mut lin = 0.0;
    delta.for_each(|i, j, dij| {
        let mut diff = 0.0;
        for k in 0..ds.d() {
            diff += dij[k] * (ds.point(j)[k] - ds.point(i)[k]);
        }
        lin += ds.weight(i) * ds.weight(j) * diff;
    });
    Ok(-0.5 * quad + lin)
}

/// Row sums `S_i = sum_j r_j v<ij>` for an antisymmetric edge table, in one
/// pass over the stored half.
pub fn weighted_row_sums(table: &EdgeTable, r: &[f64]) -> PointSet {
    let mut s = PointSet::zeros(table.n(), table.d());
    table.for_each(|i, j, v| {
        linalg::add_scaled(s.row_mut(i), r[j], v);
        linalg::add_scaled(s.row_mut(j), -r[i], v);
    });
    s
}

pub(crate) fn check_points(ds: &Dataset, x: &PointSet, context: &'static str) -> Result<()> {
    if x.n() != ds.n() {
        return Err(Error::DimensionMismatch {
            context,
            expected: ds.n(),
            got: x.n(),
        });
    }
    if x.d() != ds.d() {
        return Err(Error::DimensionMismatch {
            context,
            expected: ds.d(),
            got: x.d(),
        });
    }
    Ok(())
}

pub(crate) fn check_edges(ds: &Dataset, t: &EdgeTable, context: &'static str) -> Result<()> {
    if t.n() != ds.n() {
        return Err(Error::DimensionMismatch {
            context,
            expected: ds.n(),
            got: t.n(),
        });
    }
    if t.d() != ds.d() {
        return Err(Error::DimensionMismatch {
            context,
            expected: ds.d(),
            got: t.d(),
        });
    }
    Ok(())
}
