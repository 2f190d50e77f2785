//! Exhaustive-partition oracle for small instances, independent of the
//! solver and certification paths.
//!
//! For every partition of the points: treat each group as a super-point
//! (weighted centroid, summed weight), minimize the reduced objective by
//! gradient descent with a Newton polish, and accept the partition only if
//! (a) the reduced minimizer keeps all group representatives distinct and
//! stationary, and (b) every group admits antisymmetric within-group
//! subgradients in the dual ball reproducing the centered data (checked by
//! projected gradient on the residual). Exactly the partitions passing
//! both are optimality patterns of the full objective; the one with the
//! lowest full objective value is returned.

use soncert::dataset::Dataset;
use soncert::linalg::{self, PointSet};

/// Partitions of `{0..n-1}` in restricted-growth-string order.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut assignment = vec![0usize; n];
    fn rec(assignment: &mut Vec<usize>, i: usize, max_used: usize, out: &mut Vec<Vec<usize>>) {
        if i == assignment.len() {
            out.push(assignment.clone());
            return;
        }
        for c in 0..=max_used + 1 {
            assignment[i] = c;
            rec(assignment, i + 1, max_used.max(c), out);
        }
    }
    if n == 0 {
        return out;
    }
    rec(&mut assignment, 1, 0, &mut out);
    out
}

fn groups_of(assignment: &[usize]) -> Vec<Vec<usize>> {
    let k = assignment.iter().max().map_or(0, |m| m + 1);
    let mut groups = vec![Vec::new(); k];
    for (i, &c) in assignment.iter().enumerate() {
        groups[c].push(i);
    }
    groups
}

struct Reduced {
    centroids: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

fn reduce(ds: &Dataset, groups: &[Vec<usize>]) -> Reduced {
    let d = ds.d();
    let mut centroids = Vec::with_capacity(groups.len());
    let mut weights = Vec::with_capacity(groups.len());
    for g in groups {
        let w: f64 = g.iter().map(|&i| ds.weight(i)).sum();
        let mut c = vec![0.0; d];
        for &i in g {
            linalg::add_scaled(&mut c, ds.weight(i) / w, ds.point(i));
        }
        centroids.push(c);
        weights.push(w);
    }
    Reduced { centroids, weights }
}

fn reduced_value(red: &Reduced, lambda: f64, xi: &[Vec<f64>]) -> f64 {
    let k = red.weights.len();
    let mut total = 0.0;
    for a in 0..k {
        let dv = linalg::dist(&xi[a], &red.centroids[a]);
        total += 0.5 * red.weights[a] * dv * dv;
    }
    for a in 0..k {
        for b in (a + 1)..k {
            total += lambda * red.weights[a] * red.weights[b] * linalg::dist(&xi[a], &xi[b]);
        }
    }
    total
}

fn reduced_grad(red: &Reduced, lambda: f64, xi: &[Vec<f64>]) -> Option<Vec<f64>> {
    let k = red.weights.len();
    let d = red.centroids[0].len();
    let mut g = vec![0.0; k * d];
    for a in 0..k {
        for t in 0..d {
            g[a * d + t] = red.weights[a] * (xi[a][t] - red.centroids[a][t]);
        }
    }
    for a in 0..k {
        for b in (a + 1)..k {
            let dist = linalg::dist(&xi[a], &xi[b]);
            if dist < 1e-14 {
                return None; // representatives collided: nonsmooth point
            }
            let c = lambda * red.weights[a] * red.weights[b] / dist;
            for t in 0..d {
                let diff = xi[a][t] - xi[b][t];
                g[a * d + t] += c * diff;
                g[b * d + t] -= c * diff;
            }
        }
    }
    Some(g)
}

/// Dense symmetric solve by Gaussian elimination with partial pivoting
/// (systems here are at most 8 x 8).
fn solve_dense(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let (piv, piv_val) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        if piv_val < 1e-14 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = rhs[r];
        for c in (r + 1)..n {
            acc -= m[r][c] * x[c];
        }
        x[r] = acc / m[r][r];
    }
    Some(x)
}

fn reduced_hessian(red: &Reduced, lambda: f64, xi: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = red.weights.len();
    let d = red.centroids[0].len();
    let n = k * d;
    let mut h = vec![vec![0.0; n]; n];
    for a in 0..k {
        for t in 0..d {
            h[a * d + t][a * d + t] += red.weights[a];
        }
    }
    for a in 0..k {
        for b in (a + 1)..k {
            let mut w = vec![0.0; d];
            linalg::sub_into(&xi[a], &xi[b], &mut w);
            let dist = linalg::norm(&w);
            let c = lambda * red.weights[a] * red.weights[b];
            for s in 0..d {
                for t in 0..d {
                    let m_st =
                        c * ((if s == t { 1.0 } else { 0.0 }) / dist - w[s] * w[t] / dist.powi(3));
                    h[a * d + s][a * d + t] += m_st;
                    h[b * d + s][b * d + t] += m_st;
                    h[a * d + s][b * d + t] -= m_st;
                    h[b * d + s][a * d + t] -= m_st;
                }
            }
        }
    }
    h
}

/// Minimizes the reduced objective to machine accuracy. Returns the
/// representatives or `None` if they collide (the partition is not a
/// strict optimality pattern) or the descent stalls.
fn minimize_reduced(red: &Reduced, lambda: f64) -> Option<Vec<Vec<f64>>> {
    let k = red.weights.len();
    let d = red.centroids[0].len();
    let scale = 1.0
        + red
            .centroids
            .iter()
            .map(|c| linalg::norm(c))
            .fold(0.0, f64::max);
    // Deterministic jitter keeps coincident centroids from starting on the
    // nonsmooth set.
    let mut xi: Vec<Vec<f64>> = red
        .centroids
        .iter()
        .enumerate()
        .map(|(a, c)| {
            let mut v = c.clone();
            for (t, vt) in v.iter_mut().enumerate() {
                *vt += 1e-4 * scale * ((a * d + t + 1) as f64);
            }
            v
        })
        .collect();

    if k == 1 {
        return Some(vec![red.centroids[0].clone()]);
    }

    let grad_tol = 1e-12 * scale;
    let mut value = reduced_value(red, lambda, &xi);
    for _outer in 0..200 {
        // Armijo gradient phase.
        for _ in 0..2000 {
            let g = reduced_grad(red, lambda, &xi)?;
            let gnorm = linalg::norm(&g);
            if gnorm <= grad_tol {
                break;
            }
            let mut step = 1.0 / (1.0 + lambda * red.weights.iter().sum::<f64>().powi(2));
            let mut accepted = false;
            for _ in 0..60 {
                let cand: Vec<Vec<f64>> = xi
                    .iter()
                    .enumerate()
                    .map(|(a, x)| {
                        x.iter()
                            .enumerate()
                            .map(|(t, v)| v - step * g[a * d + t])
                            .collect()
                    })
                    .collect();
                let cv = reduced_value(red, lambda, &cand);
                if cv <= value - 0.25 * step * gnorm * gnorm {
                    xi = cand;
                    value = cv;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        let g = reduced_grad(red, lambda, &xi)?;
        if linalg::norm(&g) <= grad_tol {
            return finish(red, lambda, xi, grad_tol);
        }
        // Newton polish (quadratic near the smooth minimizer).
        let h = reduced_hessian(red, lambda, &xi);
        match solve_dense(h, g.clone()) {
            Some(step) => {
                let cand: Vec<Vec<f64>> = xi
                    .iter()
                    .enumerate()
                    .map(|(a, x)| {
                        x.iter()
                            .enumerate()
                            .map(|(t, v)| v - step[a * d + t])
                            .collect()
                    })
                    .collect();
                let cv = reduced_value(red, lambda, &cand);
                if cv <= value + 1e-15 * (1.0 + value.abs()) {
                    xi = cand;
                    value = cv;
                } else {
                    return finish(red, lambda, xi, grad_tol);
                }
            }
            None => return finish(red, lambda, xi, grad_tol),
        }
    }
    finish(red, lambda, xi, grad_tol)
}

fn finish(
    red: &Reduced,
    lambda: f64,
    xi: Vec<Vec<f64>>,
    grad_tol: f64,
) -> Option<Vec<Vec<f64>>> {
    let k = xi.len();
    let scale = 1.0
        + red
            .centroids
            .iter()
            .map(|c| linalg::norm(c))
            .fold(0.0, f64::max);
    for a in 0..k {
        for b in (a + 1)..k {
            if linalg::dist(&xi[a], &xi[b]) < 1e-7 * scale {
                return None; // pattern collapses onto a coarser partition
            }
        }
    }
    let g = reduced_grad(red, lambda, &xi)?;
    if linalg::norm(&g) > grad_tol.max(1e-10 * scale) {
        return None;
    }
    Some(xi)
}

/// Existence of antisymmetric within-group subgradients `q` with
/// `||q_ij|| <= lambda` and `sum_j r_j q<ij> = a_i - centroid` for every
/// `i` in the group, decided by projected gradient on the squared
/// residual.
fn group_subgradients_exist(ds: &Dataset, group: &[usize]) -> bool {
    let m = group.len();
    if m <= 1 {
        return true;
    }
    let d = ds.d();
    let lambda = ds.lambda();
    let w: f64 = group.iter().map(|&i| ds.weight(i)).sum();
    let mut targets = Vec::with_capacity(m);
    let mut centroid = vec![0.0; d];
    for &i in group {
        linalg::add_scaled(&mut centroid, ds.weight(i) / w, ds.point(i));
    }
    for &i in group {
        let t: Vec<f64> = ds
            .point(i)
            .iter()
            .zip(&centroid)
            .map(|(a, c)| a - c)
            .collect();
        targets.push(t);
    }
    let scale = 1.0
        + targets
            .iter()
            .map(|t| linalg::norm(t))
            .fold(0.0, f64::max);

    if m == 2 {
        // r_j q_ij = target_i exactly determines the single vector.
        let q_norm = linalg::norm(&targets[0]) / ds.weight(group[1]);
        return q_norm <= lambda * (1.0 + 1e-12);
    }

    // q[e] for edges (li < lj); residual e_i = sum_j r_j q<ij> - target_i.
    let edges: Vec<(usize, usize)> = (0..m)
        .flat_map(|a| ((a + 1)..m).map(move |b| (a, b)))
        .collect();
    let mut q = vec![vec![0.0; d]; edges.len()];
    let rsum_sq: f64 = group.iter().map(|&i| ds.weight(i) * ds.weight(i)).sum();
    let step = 1.0 / (4.0 * rsum_sq.max(1e-9));
    let mut best = f64::INFINITY;
    let mut prev_best = f64::INFINITY;
    for it in 0..400_000 {
        let mut resid: Vec<Vec<f64>> = targets
            .iter()
            .map(|t| t.iter().map(|v| -v).collect())
            .collect();
        for (e, &(la, lb)) in edges.iter().enumerate() {
            for t in 0..d {
                resid[la][t] += ds.weight(group[lb]) * q[e][t];
                resid[lb][t] -= ds.weight(group[la]) * q[e][t];
            }
        }
        let value: f64 = resid.iter().map(|r| linalg::norm_sq(r)).sum::<f64>() * 0.5;
        if value.sqrt() <= 1e-9 * scale {
            return true;
        }
        best = best.min(value);
        for (e, &(la, lb)) in edges.iter().enumerate() {
            for t in 0..d {
                q[e][t] -= step
                    * (ds.weight(group[lb]) * resid[la][t]
                        - ds.weight(group[la]) * resid[lb][t]);
            }
            let nrm = linalg::norm(&q[e]);
            if nrm > lambda {
                let f = lambda / nrm;
                for v in &mut q[e] {
                    *v *= f;
                }
            }
        }
        // Plateau detection: projected gradient stopped improving while the
        // residual is still clearly above the feasibility threshold.
        if it % 20_000 == 19_999 {
            if best > 0.999 * prev_best && best.sqrt() > 1e-6 * scale {
                return false;
            }
            prev_best = best;
        }
    }
    best.sqrt() <= 1e-7 * scale
}

/// Oracle result: the optimizer's partition and the extensions examined.
pub struct OracleResult {
    pub assignment: Vec<usize>,
    pub objective: f64,
}

/// Finds the exact optimizer's partition by exhaustive search, or `None`
/// if no partition passes the consistency checks (does not happen for
/// generic instances away from fusion values).
pub fn brute_force_partition(ds: &Dataset) -> Option<OracleResult> {
    let n = ds.n();
    let mut best: Option<OracleResult> = None;
    for assignment in all_partitions(n) {
        let groups = groups_of(&assignment);
        let red = reduce(ds, &groups);
        let Some(xi) = minimize_reduced(&red, ds.lambda()) else {
            continue;
        };
        if !groups.iter().all(|g| group_subgradients_exist(ds, g)) {
            continue;
        }
        // Full objective of the extension.
        let mut rows = vec![vec![0.0; ds.d()]; n];
        for (k, g) in groups.iter().enumerate() {
            for &i in g {
                rows[i] = xi[k].clone();
            }
        }
        let x = PointSet::from_rows(&rows);
        let value = soncert::objective::primal_objective(ds, &x).unwrap();
        if best.as_ref().map_or(true, |b| value < b.objective) {
            best = Some(OracleResult {
                assignment: assignment.clone(),
                objective: value,
            });
        }
    }
    best
}

/// Partition equality ignoring label names.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            if (a[i] == a[j]) != (b[i] == b[j]) {
                return false;
            }
        }
    }
    true
}
