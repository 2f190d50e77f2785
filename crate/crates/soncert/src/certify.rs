//! The clustering test: candidate extraction, per-cluster subgradient
//! certificates, separation check, and certificate assembly.
//!
//! Given a feasible lifted pair with duality gap `mu`, every candidate
//! cluster `C` gets a table of CGR subgradients
//!
//! ```text
//! q_ij = -delta_ij + (x_i - x_j - omega_i + omega_j)/r'
//!        - (1/r') sum_{k not in C} r_k (delta<ik> - delta<jk>)
//! ```
//!
//! with `r' = sum_{i in C} r_i` and correction vectors
//! `omega_i = (sigma3_i / s_i) z_i + sigma2_i / s_i`. By construction the
//! `q` table satisfies, at any feasible lifted pair,
//!
//! ```text
//! a_i - (1/r') sum_{l in C} r_l a_l  =  sum_{j in C} r_j q<ij>
//! ```
//!
//! so if additionally `||q_ij|| <= lambda` for all pairs inside `C`
//! (the CGR inequality), `C` provably lies inside one cluster of the exact
//! optimizer. The separation quantity
//! `D_{k,k'} = sum_{l in Ck u Ck'} r_l ||x_l - xbar||^2 > 2 mu` rules out
//! that two candidates share a super-cluster. Both together certify the
//! whole partition.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::admm::{AdmmConfig, PrimalDualIterate};
use crate::dataset::Dataset;
use crate::edge::EdgeTable;
use crate::linalg::{self, PointSet};
use crate::prox::prox_norm;
use crate::socp::{clamp_dual, lift, residual_bounds, residuals, Residuals, SocpPoint};

/// How candidate clusters are read off an iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterMethod {
    /// Greedy balls of radius `mu^{3/4}` around unassigned points.
    Ball,
    /// Connected components of the zero pattern of
    /// `prox_{lambda/nu}(x_i - x_j - delta_ij / nu)`.
    Graph,
}

impl std::fmt::Display for ClusterMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClusterMethod::Ball => write!(f, "ball"),
            ClusterMethod::Graph => write!(f, "graph"),
        }
    }
}

impl std::str::FromStr for ClusterMethod {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ball" => Ok(ClusterMethod::Ball),
            "graph" => Ok(ClusterMethod::Graph),
            other => Err(format!("unknown cluster method '{other}' (ball|graph)")),
        }
    }
}

/// A partition of the point indices, with optional per-cluster
/// "inconclusive" marks set when a certification condition failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateClustering {
    /// `assignment[i]` = cluster id of point `i`.
    pub assignment: Vec<usize>,
    /// Member lists, ascending within each cluster; cluster ids are
    /// assigned in order of each cluster's smallest member.
    pub clusters: Vec<Vec<usize>>,
    /// Ids of clusters that failed a certification condition.
    pub inconclusive: BTreeSet<usize>,
}

impl CandidateClustering {
    fn from_assignment(assignment: Vec<usize>, num_clusters: usize) -> Self {
        let mut clusters = vec![Vec::new(); num_clusters];
        for (i, &c) in assignment.iter().enumerate() {
            clusters[c].push(i);
        }
        CandidateClustering {
            assignment,
            clusters,
            inconclusive: BTreeSet::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    /// True if every cluster of `self` is contained in one cluster of
    /// `coarser` (the agglomeration order along increasing lambda).
    pub fn refines(&self, coarser: &CandidateClustering) -> bool {
        if self.n() != coarser.n() {
            return false;
        }
        self.clusters.iter().all(|members| {
            members
                .windows(2)
                .all(|w| coarser.assignment[w[0]] == coarser.assignment[w[1]])
        })
    }

    /// Same partition regardless of cluster numbering.
    pub fn same_partition(&self, other: &CandidateClustering) -> bool {
        self.refines(other) && other.refines(self)
    }

    /// Restriction to a subset of points, re-labelling clusters compactly
    /// (in order of first appearance) and carrying inconclusive marks over.
    pub fn restrict(&self, subset: &[usize]) -> CandidateClustering {
        let mut remap = std::collections::BTreeMap::new();
        let mut assignment = Vec::with_capacity(subset.len());
        for &i in subset {
            let next = remap.len();
            let local = *remap.entry(self.assignment[i]).or_insert(next);
            assignment.push(local);
        }
        let mut inconclusive = BTreeSet::new();
        for (&orig, &local) in &remap {
            if self.inconclusive.contains(&orig) {
                inconclusive.insert(local);
            }
        }
        let mut out = CandidateClustering::from_assignment(assignment, remap.len());
        out.inconclusive = inconclusive;
        out
    }
}

/// Greedy ball sweep: repeatedly take the smallest unassigned index `i` and
/// cluster every unassigned `k` with `||x_i - x_k|| <= mu^{3/4}` together
/// with it.
///
/// The radius `mu^{3/4}` is used verbatim even though its scale is that of
/// the duality gap, not of the coordinates; the certificate conditions, not
/// this heuristic, carry the correctness burden. The ascending sweep order
/// makes the outcome deterministic even though closeness is not transitive.
pub fn find_clusters_ball(x: &PointSet, mu: f64) -> CandidateClustering {
    let n = x.n();
    let radius = mu.powf(0.75);
    let mut assignment = vec![usize::MAX; n];
    let mut next_cluster = 0;
    for i in 0..n {
        if assignment[i] != usize::MAX {
            continue;
        }
        assignment[i] = next_cluster;
        for k in (i + 1)..n {
            if assignment[k] == usize::MAX && linalg::dist(x.row(i), x.row(k)) <= radius {
                assignment[k] = next_cluster;
            }
        }
        next_cluster += 1;
    }
    CandidateClustering::from_assignment(assignment, next_cluster)
}

/// Prox-graph method: edge `(i,j)` is present iff
/// `prox_{lambda/nu}(x_i - x_j - delta_ij / nu)` is exactly zero; clusters
/// are the connected components (breadth-first search).
pub fn find_clusters_graph(state: &PrimalDualIterate, lambda: f64, nu: f64) -> CandidateClustering {
    let n = state.x.n();
    let d = state.x.d();
    let tau = lambda / nu;
    let mut adj = vec![Vec::new(); n];
    let x = &state.x;
    state.delta.for_each(|i, j, dij| {
        let mut arg = vec![0.0; d];
        for k in 0..d {
            arg[k] = x.row(i)[k] - x.row(j)[k] - dij[k] / nu;
        }
        let v = prox_norm(&arg, tau);
        if v.iter().all(|&c| c == 0.0) {
            adj[i].push(j);
            adj[j].push(i);
        }
    });

    let mut assignment = vec![usize::MAX; n];
    let mut next_cluster = 0;
    let mut queue = VecDeque::new();
    for root in 0..n {
        if assignment[root] != usize::MAX {
            continue;
        }
        assignment[root] = next_cluster;
        queue.push_back(root);
        while let Some(i) = queue.pop_front() {
            for &j in &adj[i] {
                if assignment[j] == usize::MAX {
                    assignment[j] = next_cluster;
                    queue.push_back(j);
                }
            }
        }
        next_cluster += 1;
    }
    CandidateClustering::from_assignment(assignment, next_cluster)
}

/// Correction vectors `omega_i = (sigma3_i / s_i) z_i + sigma2_i / s_i`.
///
/// Feasibility guarantees `s_i >= 1/2`, so the division is safe.
pub fn compute_omega(p: &SocpPoint, res: &Residuals) -> PointSet {
    let n = p.x.n();
    let d = p.x.d();
    let mut omega = PointSet::zeros(n, d);
    for i in 0..n {
        let row = omega.row_mut(i);
        let zi = p.z.row(i);
        let s2 = res.sigma2.row(i);
        for k in 0..d {
            row[k] = (res.sigma3[i] / p.s[i]) * zi[k] + s2[k] / p.s[i];
        }
    }
    omega
}

/// CGR subgradients for one candidate cluster, indexed over the cluster's
/// members (kept sorted ascending; the table is antisymmetric).
#[derive(Debug, Clone)]
pub struct CgrSubgradients {
    pub members: Vec<usize>,
    /// `q` over local member indices; `q.slice(p, q)` is the edge between
    /// `members[p] < members[q]`.
    pub q: EdgeTable,
}

impl CgrSubgradients {
    pub fn max_norm(&self) -> f64 {
        let mut max = 0.0f64;
        self.q.for_each(|_, _, v| max = max.max(linalg::norm(v)));
        max
    }
}

/// Builds the `q` table for cluster `members` at the lifted point `p` with
/// correction vectors `omega`.
pub fn compute_cgr(
    ds: &Dataset,
    p: &SocpPoint,
    omega: &PointSet,
    members: &[usize],
) -> CgrSubgradients {
    debug_assert!(!members.is_empty());
    debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
    let d = ds.d();
    let m = members.len();
    let rprime: f64 = members.iter().map(|&i| ds.weight(i)).sum();
    let mut local = vec![usize::MAX; ds.n()];
    for (li, &i) in members.iter().enumerate() {
        local[i] = li;
    }

    // Outside sums T_i = sum_{k not in C} r_k delta<ik> for i in C, in one
    // pass over the stored edges.
    let mut outside = PointSet::zeros(m, d);
    p.delta.for_each(|i, j, dij| {
        let (li, lj) = (local[i], local[j]);
        if li != usize::MAX && lj == usize::MAX {
            linalg::add_scaled(outside.row_mut(li), ds.weight(j), dij);
        } else if li == usize::MAX && lj != usize::MAX {
            linalg::add_scaled(outside.row_mut(lj), -ds.weight(i), dij);
        }
    });

    let mut q = EdgeTable::zeros(m, d);
    q.for_each_mut(|li, lj, out| {
        let (i, j) = (members[li], members[lj]);
        let dij = p.delta.slice(i, j);
        let (xi, xj) = (p.x.row(i), p.x.row(j));
        let (oi, oj) = (omega.row(i), omega.row(j));
        let (ti, tj) = (outside.row(li), outside.row(lj));
        for k in 0..d {
            out[k] =
                -dij[k] + (xi[k] - xj[k] - oi[k] + oj[k]) / rprime - (ti[k] - tj[k]) / rprime;
        }
    });

    CgrSubgradients {
        members: members.to_vec(),
        q,
    }
}

/// Largest deviation in the defining identity
/// `a_i - (1/r') sum_l r_l a_l - sum_j r_j q<ij>` over the cluster.
///
/// This must vanish (to roundoff) at every feasible lifted point, however
/// far the iterate is from optimal; it is the internal oracle for the
/// subgradient construction.
pub fn cgr_identity_residual(ds: &Dataset, cgr: &CgrSubgradients) -> f64 {
    let d = ds.d();
    let members = &cgr.members;
    let rprime: f64 = members.iter().map(|&i| ds.weight(i)).sum();
    let mut centroid = vec![0.0; d];
    for &l in members {
        linalg::add_scaled(&mut centroid, ds.weight(l) / rprime, ds.point(l));
    }
    let m = members.len();
    let mut worst = 0.0f64;
    let mut buf = vec![0.0; d];
    for li in 0..m {
        let mut resid: Vec<f64> = ds
            .point(members[li])
            .iter()
            .zip(&centroid)
            .map(|(a, c)| a - c)
            .collect();
        for lj in 0..m {
            cgr.q.get_into(li, lj, &mut buf);
            linalg::add_scaled(&mut resid, -ds.weight(members[lj]), &buf);
        }
        worst = worst.max(linalg::norm(&resid));
    }
    worst
}

/// CGR inequality over one cluster: pass iff
/// `max ||q_ij|| <= lambda - noise`. Singletons pass vacuously.
///
/// `noise` is the caller's bound on the floating-point evaluation error of
/// the `q` norms (see [`cgr_noise_floor`]); with `noise = 0` this is the
/// exact-arithmetic condition, non-strict. Certification must stay outside
/// the noise band: a computed norm within one ulp of `lambda` cannot
/// witness feasibility of the exact subgradients, and at fusion values the
/// true margin is exactly zero, so the guarded test keeps failing there
/// instead of flipping on rounding luck.
pub fn cgr_condition(cgr: &CgrSubgradients, lambda: f64, noise: f64) -> (bool, f64) {
    let max_norm = cgr.max_norm();
    (max_norm <= lambda - noise, max_norm)
}

/// Evaluation-noise bound for the subgradient norms: each `q_ij` is an
/// `O(n)`-term sum at the scale of `lambda` and the iterate coordinates.
pub fn cgr_noise_floor(n: usize, lambda: f64, max_norm: f64) -> f64 {
    n.max(4) as f64 * f64::EPSILON * (1.0 + lambda + max_norm)
}

/// Separation data for one pair of candidate clusters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairSeparation {
    pub cluster_a: usize,
    pub cluster_b: usize,
    /// `D = sum_{l in Ca u Cb} r_l ||x_l - xbar||^2` with `xbar` the
    /// weighted centroid of the union.
    pub d: f64,
    /// `D > 2 mu`, strict.
    pub pass: bool,
}

/// Evaluates `D_{k,k'} > 2 mu + gap_noise` for every pair of clusters.
/// With fewer than two clusters there are no pairs and the condition holds
/// vacuously.
///
/// `gap_noise` bounds the cancellation error of the computed duality gap
/// (see [`Residuals::gap_noise`](crate::socp::Residuals::gap_noise)); with
/// `gap_noise = 0` this is the exact-arithmetic strict comparison. The
/// guard matters: the gap is a difference of objective values of order
/// one, so once the true gap falls below the evaluation noise, a raw
/// comparison would let roundoff certify separations whose true margin is
/// zero -- which is precisely the tie that occurs at fusion values.
pub fn separation_condition(
    ds: &Dataset,
    x: &PointSet,
    clusters: &[Vec<usize>],
    mu: f64,
    gap_noise: f64,
) -> Vec<PairSeparation> {
    let d = ds.d();
    let mut out = Vec::new();
    for ka in 0..clusters.len() {
        for kb in (ka + 1)..clusters.len() {
            let union = clusters[ka].iter().chain(clusters[kb].iter());
            let weight: f64 = union.clone().map(|&l| ds.weight(l)).sum();
            let mut centroid = vec![0.0; d];
            for &l in union.clone() {
                linalg::add_scaled(&mut centroid, ds.weight(l) / weight, x.row(l));
            }
            let mut dval = 0.0;
            for &l in union {
                let dist = linalg::dist(x.row(l), &centroid);
                dval += ds.weight(l) * dist * dist;
            }
            out.push(PairSeparation {
                cluster_a: ka,
                cluster_b: kb,
                d: dval,
                pass: dval > 2.0 * mu + gap_noise,
            });
        }
    }
    out
}

/// Outcome of one certification attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Success,
    Failure,
}

/// Per-cluster CGR outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterCheck {
    pub cluster: usize,
    pub max_q_norm: f64,
    pub cgr_pass: bool,
}

/// Internal-consistency diagnostics recorded at each certification.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CertDiagnostics {
    /// Max over clusters of the defining-identity residual, relative to
    /// `1 + max ||a_i||`.
    pub cgr_identity_rel: f64,
    /// `|sum r sigma1 + sum r r eps1 - mu|`, relative to `1 + mu`.
    pub gap_identity_rel: f64,
    /// Number of residual-bound rows violated (must be zero).
    pub bound_violations: usize,
}

/// A full certification record for one iterate.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub mu: f64,
    pub clusters: CandidateClustering,
    pub cluster_checks: Vec<ClusterCheck>,
    pub subgradients: Vec<CgrSubgradients>,
    pub separations: Vec<PairSeparation>,
    pub omega: PointSet,
    pub verdict: Verdict,
    pub method: ClusterMethod,
    pub lambda: f64,
    pub nu: f64,
    pub iteration: usize,
    pub diagnostics: CertDiagnostics,
}

/// Runs the complete test on an iterate: clamp `delta`, lift, compute the
/// gap and residuals, extract candidates, build subgradients, and evaluate
/// the CGR and separation conditions.
///
/// On success the candidate clustering equals the clustering of the exact
/// optimizer. On failure every offending cluster is marked inconclusive.
/// The routine never fails on valid numeric input; it always returns a
/// certificate, possibly with a failure verdict.
pub fn certify(
    ds: &Dataset,
    state: &PrimalDualIterate,
    cfg: &AdmmConfig,
    method: ClusterMethod,
    iteration: usize,
) -> Certificate {
    let delta = clamp_dual(&state.delta, ds.lambda());
    let p = lift(ds, &state.x, &delta).expect("clamped dual must lift");
    let res = residuals(ds, &p).expect("lifted point must be feasible");
    let mu = res.mu;

    // The dual balance beta_i = -sum_j r_j delta<ij> is rebuilt inside the
    // lift; drift here would mean state corruption, not a data problem.
    {
        let sums = crate::objective::weighted_row_sums(&p.delta, ds.weights());
        for i in 0..ds.n() {
            for k in 0..ds.d() {
                let drift = (sums.row(i)[k] + p.beta.row(i)[k]).abs();
                assert!(drift <= 1e-9, "dual balance drift {drift} at node {i}");
            }
        }
    }

    let mut clusters = match method {
        ClusterMethod::Ball => find_clusters_ball(&state.x, mu),
        ClusterMethod::Graph => find_clusters_graph(state, ds.lambda(), cfg.nu),
    };

    let omega = compute_omega(&p, &res);

    let max_a_norm = ds
        .points()
        .iter_rows()
        .map(linalg::norm)
        .fold(0.0, f64::max);
    let mut diagnostics = CertDiagnostics::default();

    let mut cluster_checks = Vec::with_capacity(clusters.num_clusters());
    let mut subgradients = Vec::with_capacity(clusters.num_clusters());
    for (cid, members) in clusters.clusters.iter().enumerate() {
        let cgr = compute_cgr(ds, &p, &omega, members);
        let noise = cgr_noise_floor(ds.n(), ds.lambda(), cgr.max_norm());
        let (pass, max_q_norm) = cgr_condition(&cgr, ds.lambda(), noise);
        let ident = cgr_identity_residual(ds, &cgr) / (1.0 + max_a_norm);
        diagnostics.cgr_identity_rel = diagnostics.cgr_identity_rel.max(ident);
        cluster_checks.push(ClusterCheck {
            cluster: cid,
            max_q_norm,
            cgr_pass: pass,
        });
        subgradients.push(cgr);
    }

    let separations = separation_condition(
        ds,
        &state.x,
        &clusters.clusters,
        mu,
        res.gap_noise(ds.n()),
    );

    // Accounting identity between the residuals and the gap.
    {
        let mut total = 0.0;
        for i in 0..ds.n() {
            total += ds.weight(i) * res.sigma1[i];
        }
        res.eps1
            .for_each(|i, j, e| total += ds.weight(i) * ds.weight(j) * e);
        diagnostics.gap_identity_rel = (total - mu).abs() / (1.0 + mu);
    }
    diagnostics.bound_violations = residual_bounds(ds, &p, &res).violations();

    for check in &cluster_checks {
        if !check.cgr_pass {
            clusters.inconclusive.insert(check.cluster);
        }
    }
    for sep in &separations {
        if !sep.pass {
            clusters.inconclusive.insert(sep.cluster_a);
            clusters.inconclusive.insert(sep.cluster_b);
        }
    }
    let verdict = if clusters.inconclusive.is_empty() {
        Verdict::Success
    } else {
        Verdict::Failure
    };

    Certificate {
        mu,
        clusters,
        cluster_checks,
        subgradients,
        separations,
        omega,
        verdict,
        method,
        lambda: ds.lambda(),
        nu: cfg.nu,
        iteration,
        diagnostics,
    }
}
