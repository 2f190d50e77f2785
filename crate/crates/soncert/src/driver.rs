//! Run orchestration: the solve/certify loop, regularization sweeps,
//! report and plot-data emission, and independent certificate
//! re-verification.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::admm::{admm_step_in_place, init_state, AdmmConfig, PrimalDualIterate};
use crate::certify::{
    certify, cgr_condition, cgr_identity_residual, cgr_noise_floor, compute_cgr, compute_omega,
    find_clusters_ball, find_clusters_graph, separation_condition, CandidateClustering,
    Certificate, ClusterMethod, Verdict,
};
use crate::dataset::Dataset;
use crate::edge::EdgeTable;
use crate::error::{Error, Result};
use crate::experiments::{
    gen_gauss_mixture, gen_half_moons, modified_rand_index, GeneratedData, GroundTruth,
    WeightMode,
};
use crate::files::{read_dataset_csv, write_dataset_csv, CertificateFile};
use crate::linalg::{self, PointSet};
use crate::objective::weighted_row_sums;
use crate::socp::residuals;

/// Where the points and weights come from.
#[derive(Debug, Clone)]
pub enum DataSource {
    Csv(PathBuf),
    HalfMoons {
        n: usize,
        noise_sd: f64,
        seed: u64,
    },
    GaussMixture {
        n: usize,
        sep_sds: f64,
        seed: u64,
        mode: WeightMode,
    },
}

impl DataSource {
    pub fn load(&self) -> Result<GeneratedData> {
        match self {
            DataSource::Csv(path) => {
                let (points, weights, truth) = read_dataset_csv(path)?;
                Ok(GeneratedData {
                    points,
                    weights,
                    truth: truth.unwrap_or(GroundTruth(Vec::new())),
                    means: None,
                })
            }
            DataSource::HalfMoons { n, noise_sd, seed } => gen_half_moons(*n, *noise_sd, *seed),
            DataSource::GaussMixture {
                n,
                sep_sds,
                seed,
                mode,
            } => gen_gauss_mixture(*n, *sep_sds, *seed, *mode),
        }
    }
}

/// Full sweep configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: DataSource,
    /// Regularization values; processed in ascending order.
    pub lambdas: Vec<f64>,
    pub nu: f64,
    pub certify_every: usize,
    pub max_iters: usize,
    pub method: ClusterMethod,
    pub out_dir: Option<PathBuf>,
    /// Start each lambda from the previous solution instead of from
    /// scratch. Off by default: fresh starts keep per-lambda iteration
    /// counts comparable.
    pub warm_start: bool,
    /// Wall-clock guard per lambda, on top of the iteration cap.
    pub time_limit: Option<Duration>,
    /// Keep iterating to the cap even after certification succeeds (the
    /// analytic test suites want fully converged iterates).
    pub run_to_cap: bool,
}

impl RunConfig {
    pub fn admm(&self) -> AdmmConfig {
        AdmmConfig {
            nu: self.nu,
            certify_every: self.certify_every,
            max_iters: self.max_iters,
        }
    }
}

/// Terminal status of one lambda.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunVerdict {
    Success,
    FailureAtCap,
}

impl std::fmt::Display for RunVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunVerdict::Success => write!(f, "success"),
            RunVerdict::FailureAtCap => write!(f, "failure-at-cap"),
        }
    }
}

/// Everything recorded about one lambda of a sweep.
#[derive(Debug, Clone)]
pub struct LambdaRecord {
    pub lambda: f64,
    pub iterations: usize,
    pub mu: f64,
    pub verdict: RunVerdict,
    pub certificate: Certificate,
    pub final_state: PrimalDualIterate,
    pub rand_index: Option<f64>,
    pub digest: String,
    pub wall: Duration,
    /// Iteration of the first successful certification, if any.
    pub first_success: Option<usize>,
    /// Aggregates over every certification attempt of this run.
    pub max_cgr_identity_rel: f64,
    pub max_gap_identity_rel: f64,
    pub bound_violations: usize,
}

/// Sweep output.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub records: Vec<LambdaRecord>,
    pub warm_start: bool,
    pub method: ClusterMethod,
    pub nu: f64,
}

impl RunReport {
    pub fn all_certified(&self) -> bool {
        self.records
            .iter()
            .all(|r| r.verdict == RunVerdict::Success)
    }
}

/// Outcome of the inner solve/certify loop on one instance.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub state: PrimalDualIterate,
    pub certificate: Certificate,
    pub iterations: usize,
    pub first_success: Option<usize>,
    pub max_cgr_identity_rel: f64,
    pub max_gap_identity_rel: f64,
    pub bound_violations: usize,
}

/// Algorithm loop: blocks of `certify_every` ADMM sweeps, a certification
/// attempt after each block, stop on success (unless `run_to_cap`) or at
/// the iteration cap / time limit.
pub fn solve_instance(
    ds: &Dataset,
    cfg: &AdmmConfig,
    method: ClusterMethod,
    init: Option<PrimalDualIterate>,
    run_to_cap: bool,
    time_limit: Option<Duration>,
) -> Result<SolveOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    let mut state = init.unwrap_or_else(|| init_state(ds));
    let mut iter = 0usize;
    let mut first_success = None;
    let mut last_cert: Option<Certificate> = None;
    let mut max_cgr = 0.0f64;
    let mut max_gap = 0.0f64;
    let mut bound_violations = 0usize;

    loop {
        let timed_out = time_limit.map_or(false, |lim| start.elapsed() >= lim);
        let at_cap = iter >= cfg.max_iters;
        let due = iter > 0 && (iter % cfg.certify_every == 0 || at_cap || timed_out);
        if due || (at_cap && last_cert.is_none()) {
            let cert = certify(ds, &state, cfg, method, iter);
            max_cgr = max_cgr.max(cert.diagnostics.cgr_identity_rel);
            max_gap = max_gap.max(cert.diagnostics.gap_identity_rel);
            bound_violations += cert.diagnostics.bound_violations;
            let success = cert.verdict == Verdict::Success;
            if success && first_success.is_none() {
                first_success = Some(iter);
            }
            last_cert = Some(cert);
            if success && !run_to_cap {
                break;
            }
        }
        if at_cap || timed_out {
            break;
        }
        admm_step_in_place(ds, &mut state, cfg, iter)?;
        iter += 1;
    }

    // A fresh instance below the first certification interval still needs
    // one attempt so the outcome always carries a certificate.
    let certificate = match last_cert {
        Some(c) => c,
        None => certify(ds, &state, cfg, method, iter),
    };
    Ok(SolveOutcome {
        state,
        certificate,
        iterations: iter,
        first_success,
        max_cgr_identity_rel: max_cgr,
        max_gap_identity_rel: max_gap,
        bound_violations,
    })
}

fn worker_slots(jobs: usize) -> usize {
    let available = std::thread::available_parallelism().map_or(1, |p| p.get());
    let cap = std::env::var("SON_CERTIFY_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or(available);
    cap.min(available).min(jobs.max(1))
}

/// Runs the sweep of `cfg.lambdas` (ascending). Certificates and the
/// report CSV are written under `cfg.out_dir` when set. Distinct lambdas
/// run on parallel worker slots (capped by `SON_CERTIFY_THREADS`) unless
/// warm starts chain them sequentially; the report is assembled in lambda
/// order either way, so outputs are byte-identical across thread counts.
pub fn run_sweep(cfg: &RunConfig) -> Result<RunReport> {
    if cfg.lambdas.is_empty() {
        return Err(Error::InvalidConfig("lambda list is empty".into()));
    }
    if cfg.lambdas.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(Error::InvalidConfig("lambda values must be > 0".into()));
    }
    let data = cfg.source.load()?;
    let truth = (data.truth.n() == data.points.n()).then_some(&data.truth);
    let mut lambdas = cfg.lambdas.clone();
    lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap());

    if let Some(dir) = &cfg.out_dir {
        std::fs::create_dir_all(dir)?;
    }

    let solve_one = |lambda: f64, init: Option<PrimalDualIterate>| -> Result<LambdaRecord> {
        let ds = Dataset::new(data.points.clone(), data.weights.clone(), lambda)?;
        let begun = Instant::now();
        let outcome = solve_instance(
            &ds,
            &cfg.admm(),
            cfg.method,
            init,
            cfg.run_to_cap,
            cfg.time_limit,
        )?;
        let wall = begun.elapsed();
        let verdict = if outcome.certificate.verdict == Verdict::Success {
            RunVerdict::Success
        } else {
            RunVerdict::FailureAtCap
        };
        let rand_index = truth.map(|t| modified_rand_index(&outcome.certificate.clusters, t));
        let file = CertificateFile::new(&ds, &outcome.state.x, &outcome.state.delta, &outcome.certificate);
        let digest = crate::files::digest_hex(&file.to_json()?);
        Ok(LambdaRecord {
            lambda,
            iterations: outcome.iterations,
            mu: outcome.certificate.mu,
            verdict,
            certificate: outcome.certificate,
            final_state: outcome.state,
            rand_index,
            digest,
            wall,
            first_success: outcome.first_success,
            max_cgr_identity_rel: outcome.max_cgr_identity_rel,
            max_gap_identity_rel: outcome.max_gap_identity_rel,
            bound_violations: outcome.bound_violations,
        })
    };

    let records: Vec<LambdaRecord> = if cfg.warm_start {
        let mut out = Vec::with_capacity(lambdas.len());
        let mut carry: Option<PrimalDualIterate> = None;
        for &lambda in &lambdas {
            let rec = solve_one(lambda, carry.take())?;
            carry = Some(rec.final_state.clone());
            out.push(rec);
        }
        out
    } else {
        let slots = worker_slots(lambdas.len());
        if slots <= 1 {
            let mut out = Vec::with_capacity(lambdas.len());
            for &lambda in &lambdas {
                out.push(solve_one(lambda, None)?);
            }
            out
        } else {
            let next = AtomicUsize::new(0);
            let results: Mutex<Vec<Option<Result<LambdaRecord>>>> =
                Mutex::new((0..lambdas.len()).map(|_| None).collect());
            std::thread::scope(|scope| {
                for _ in 0..slots {
                    scope.spawn(|| loop {
                        let idx = next.fetch_add(1, Ordering::Relaxed);
                        if idx >= lambdas.len() {
                            break;
                        }
                        let rec = solve_one(lambdas[idx], None);
                        results.lock().unwrap()[idx] = Some(rec);
                    });
                }
            });
            results
                .into_inner()
                .unwrap()
                .into_iter()
                .map(|r| r.expect("worker filled every slot"))
                .collect::<Result<Vec<_>>>()?
        }
    };

    let report = RunReport {
        records,
        warm_start: cfg.warm_start,
        method: cfg.method,
        nu: cfg.nu,
    };

    if let Some(dir) = &cfg.out_dir {
        for (idx, rec) in report.records.iter().enumerate() {
            let ds = Dataset::new(data.points.clone(), data.weights.clone(), rec.lambda)?;
            let file = CertificateFile::new(
                &ds,
                &rec.final_state.x,
                &rec.final_state.delta,
                &rec.certificate,
            );
            file.save(&dir.join(format!("certificate_{idx:03}.json")))?;
        }
        write_report_csv(&report, &dir.join("report.csv"))?;
        if matches!(cfg.source, DataSource::HalfMoons { .. } | DataSource::GaussMixture { .. }) {
            write_dataset_csv(
                &dir.join("dataset.csv"),
                &data.points,
                &data.weights,
                truth,
            )?;
        }
    }
    Ok(report)
}

/// Report CSV. Wall times are deliberately excluded so identical
/// configurations produce byte-identical files.
pub fn write_report_csv(report: &RunReport, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("lambda,iterations,mu,verdict,clusters,rand_index,warm_start,certificate_sha256\n");
    for rec in &report.records {
        let rand = rec
            .rand_index
            .map(|v| v.to_string())
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            rec.lambda,
            rec.iterations,
            rec.mu,
            rec.verdict,
            rec.certificate.clusters.num_clusters(),
            rand,
            report.warm_start,
            rec.digest,
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// One row of the plot series (a summary of a [`LambdaRecord`]).
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub lambda: f64,
    pub iterations: usize,
    pub mu: f64,
    pub rand_index: Option<f64>,
}

/// Reads back the summary columns of a report CSV written by
/// [`write_report_csv`].
pub fn read_report_rows(path: &Path) -> Result<Vec<ReportRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidConfig("empty report file".into()))?;
    if !header.starts_with("lambda,iterations,mu,verdict,clusters,rand_index") {
        return Err(Error::InvalidConfig(format!(
            "unrecognized report header: {header}"
        )));
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 6 {
            return Err(Error::InvalidConfig(format!("short report row: {line}")));
        }
        let bad = |what: &str| Error::InvalidConfig(format!("bad {what} in report row: {line}"));
        rows.push(ReportRow {
            lambda: fields[0].parse().map_err(|_| bad("lambda"))?,
            iterations: fields[1].parse().map_err(|_| bad("iterations"))?,
            mu: fields[2].parse().map_err(|_| bad("mu"))?,
            rand_index: if fields[5].is_empty() {
                None
            } else {
                Some(fields[5].parse().map_err(|_| bad("rand_index"))?)
            },
        });
    }
    Ok(rows)
}

/// Emits the figure series: `lambda_iterations.csv`, `lambda_rand_index.csv`
/// and `lambda_mu.csv`, one row per lambda.
pub fn emit_plot_data(report: &RunReport, dir: &Path) -> Result<()> {
    let rows: Vec<ReportRow> = report
        .records
        .iter()
        .map(|rec| ReportRow {
            lambda: rec.lambda,
            iterations: rec.iterations,
            mu: rec.mu,
            rand_index: rec.rand_index,
        })
        .collect();
    emit_plot_data_rows(&rows, dir)
}

/// Same series from pre-parsed rows (the `plotdata` verb path).
pub fn emit_plot_data_rows(rows: &[ReportRow], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut iters = String::from("lambda,iterations\n");
    let mut rand = String::from("lambda,rand_index\n");
    let mut mu = String::from("lambda,mu_final\n");
    for rec in rows {
        iters.push_str(&format!("{},{}\n", rec.lambda, rec.iterations));
        let rv = rec.rand_index.map(|v| v.to_string()).unwrap_or_default();
        rand.push_str(&format!("{},{}\n", rec.lambda, rv));
        mu.push_str(&format!("{},{}\n", rec.lambda, rec.mu));
    }
    std::fs::write(dir.join("lambda_iterations.csv"), iters)?;
    std::fs::write(dir.join("lambda_rand_index.csv"), rand)?;
    std::fs::write(dir.join("lambda_mu.csv"), mu)?;
    Ok(())
}

/// Reason a certificate failed independent re-verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum VerifyFailure {
    /// Unsupported schema version.
    Schema(String),
    /// Array lengths inconsistent with `n`, `d`.
    Dimension(String),
    /// Stored data fails dataset validation (weights, finiteness, lambda).
    InvalidData(String),
    /// Stored data disagrees with the supplied dataset file.
    DatasetMismatch(String),
    /// A stored multiplier lies outside the dual ball.
    DualInfeasible { i: usize, j: usize, norm: f64 },
    /// The residual accounting identity failed (internal inconsistency).
    GapIdentity { error: f64 },
    /// The subgradient defining identity failed for a cluster.
    CgrIdentity { cluster: usize, residual: f64 },
    /// Clusters recomputed from (x, delta) differ from the stored claim.
    ClusteringMismatch,
    /// A cluster's subgradients exceed the CGR bound.
    CgrViolation { cluster: usize, max_norm: f64 },
    /// A cluster pair fails the separation condition.
    SeparationViolation { a: usize, b: usize, d: f64, mu: f64 },
    /// The file does not claim success, so there is nothing to certify.
    NotASuccessCertificate,
}

impl std::fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VerifyFailure::Schema(m) => write!(f, "schema: {m}"),
            VerifyFailure::Dimension(m) => write!(f, "dimension: {m}"),
            VerifyFailure::InvalidData(m) => write!(f, "invalid data: {m}"),
            VerifyFailure::DatasetMismatch(m) => write!(f, "dataset mismatch: {m}"),
            VerifyFailure::DualInfeasible { i, j, norm } => {
                write!(f, "dual infeasible on edge ({i},{j}): ||delta|| = {norm}")
            }
            VerifyFailure::GapIdentity { error } => {
                write!(f, "gap accounting identity off by {error}")
            }
            VerifyFailure::CgrIdentity { cluster, residual } => {
                write!(f, "subgradient identity off by {residual} on cluster {cluster}")
            }
            VerifyFailure::ClusteringMismatch => {
                write!(f, "recomputed clusters differ from stored assignment")
            }
            VerifyFailure::CgrViolation { cluster, max_norm } => {
                write!(f, "CGR inequality fails on cluster {cluster}: max ||q|| = {max_norm}")
            }
            VerifyFailure::SeparationViolation { a, b, d, mu } => {
                write!(f, "separation fails for clusters ({a},{b}): D = {d} <= 2 mu = {}", 2.0 * mu)
            }
            VerifyFailure::NotASuccessCertificate => {
                write!(f, "certificate does not claim success")
            }
        }
    }
}

/// Result of re-verification.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub failures: Vec<VerifyFailure>,
    pub mu: Option<f64>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Re-checks a stored certificate from `(x, delta)` alone: dual
/// feasibility, the duality gap and its residual accounting, the
/// subgradient defining identity, cluster extraction by the stored method,
/// the CGR inequality, and pairwise separation. Stored derived values are
/// recomputed, never trusted; the stored assignment and verdict are only
/// compared against the recomputation.
pub fn verify_certificate(cert_path: &Path, dataset_path: Option<&Path>) -> Result<VerifyReport> {
    let file = CertificateFile::load(cert_path)?;
    let mut failures = Vec::new();

    if file.schema_version != crate::files::CERT_SCHEMA_VERSION {
        failures.push(VerifyFailure::Schema(format!(
            "version {} unsupported (expected {})",
            file.schema_version,
            crate::files::CERT_SCHEMA_VERSION
        )));
        return Ok(VerifyReport { failures, mu: None });
    }
    if let Err(e) = file.check_shape() {
        failures.push(VerifyFailure::Dimension(e.to_string()));
        return Ok(VerifyReport { failures, mu: None });
    }

    let a = PointSet::from_flat(file.n, file.d, file.a.clone());
    let ds = match Dataset::new(a, file.r.clone(), file.lambda) {
        Ok(ds) => ds,
        Err(e) => {
            failures.push(VerifyFailure::InvalidData(e.to_string()));
            return Ok(VerifyReport { failures, mu: None });
        }
    };
    if !(file.nu > 0.0) || !file.nu.is_finite() {
        failures.push(VerifyFailure::InvalidData("nu must be > 0".into()));
        return Ok(VerifyReport { failures, mu: None });
    }

    if let Some(path) = dataset_path {
        let (points, weights, _) = read_dataset_csv(path)?;
        if points != *ds.points() {
            failures.push(VerifyFailure::DatasetMismatch(
                "points differ from dataset file".into(),
            ));
        } else if weights != ds.weights() {
            failures.push(VerifyFailure::DatasetMismatch(
                "weights differ from dataset file".into(),
            ));
        }
    }

    let x = PointSet::from_flat(file.n, file.d, file.x.clone());
    if !x.is_finite() || !file.delta.iter().all(|v| v.is_finite()) {
        failures.push(VerifyFailure::InvalidData(
            "non-finite entries in stored iterate".into(),
        ));
        return Ok(VerifyReport { failures, mu: None });
    }
    let delta = EdgeTable::from_flat(file.n, file.d, file.delta.clone());

    if file.verdict != Verdict::Success {
        failures.push(VerifyFailure::NotASuccessCertificate);
    }

    // Dual feasibility of the stored multipliers (strict up to roundoff).
    let mut worst: Option<(usize, usize, f64)> = None;
    delta.for_each(|i, j, v| {
        let nrm = linalg::norm(v);
        if nrm > ds.lambda() * (1.0 + 1e-12) && worst.map_or(true, |(_, _, w)| nrm > w) {
            worst = Some((i, j, nrm));
        }
    });
    if let Some((i, j, norm)) = worst {
        failures.push(VerifyFailure::DualInfeasible { i, j, norm });
        return Ok(VerifyReport { failures, mu: None });
    }

    let p = crate::socp::lift(&ds, &x, &delta).expect("feasible delta lifts");
    let res = residuals(&ds, &p).expect("lifted point is feasible");
    let mu = res.mu;

    // Residual accounting.
    {
        let mut total = 0.0;
        for i in 0..ds.n() {
            total += ds.weight(i) * res.sigma1[i];
        }
        res.eps1
            .for_each(|i, j, e| total += ds.weight(i) * ds.weight(j) * e);
        let err = (total - mu).abs();
        if err > 1e-9 * (1.0 + mu) {
            failures.push(VerifyFailure::GapIdentity { error: err });
        }
    }
    // Dual balance consistency between beta and delta.
    {
        let sums = weighted_row_sums(&p.delta, ds.weights());
        for i in 0..ds.n() {
            for k in 0..ds.d() {
                let drift = (sums.row(i)[k] + p.beta.row(i)[k]).abs();
                if drift > 1e-9 {
                    failures.push(VerifyFailure::GapIdentity { error: drift });
                }
            }
        }
    }

    let state = PrimalDualIterate {
        x: x.clone(),
        y: p.y.clone(),
        delta: delta.clone(),
    };
    let clusters = match file.method {
        ClusterMethod::Ball => find_clusters_ball(&x, mu),
        ClusterMethod::Graph => find_clusters_graph(&state, ds.lambda(), file.nu),
    };
    let stored = stored_clustering(&file);
    if !clusters.same_partition(&stored) {
        failures.push(VerifyFailure::ClusteringMismatch);
    }

    let omega = compute_omega(&p, &res);
    let max_a = ds
        .points()
        .iter_rows()
        .map(linalg::norm)
        .fold(0.0, f64::max);
    for (cid, members) in clusters.clusters.iter().enumerate() {
        let cgr = compute_cgr(&ds, &p, &omega, members);
        let ident = cgr_identity_residual(&ds, &cgr);
        if ident > 1e-8 * (1.0 + max_a) {
            failures.push(VerifyFailure::CgrIdentity {
                cluster: cid,
                residual: ident,
            });
        }
        let noise = cgr_noise_floor(ds.n(), ds.lambda(), cgr.max_norm());
        let (pass, max_norm) = cgr_condition(&cgr, ds.lambda(), noise);
        if !pass {
            failures.push(VerifyFailure::CgrViolation {
                cluster: cid,
                max_norm,
            });
        }
    }
    for sep in separation_condition(&ds, &x, &clusters.clusters, mu, res.gap_noise(ds.n())) {
        if !sep.pass {
            failures.push(VerifyFailure::SeparationViolation {
                a: sep.cluster_a,
                b: sep.cluster_b,
                d: sep.d,
                mu,
            });
        }
    }

    Ok(VerifyReport {
        failures,
        mu: Some(mu),
    })
}

fn stored_clustering(file: &CertificateFile) -> CandidateClustering {
    let k = file.assignment.iter().max().map_or(0, |m| m + 1);
    let mut clusters = vec![Vec::new(); k];
    for (i, &c) in file.assignment.iter().enumerate() {
        if c < k {
            clusters[c].push(i);
        }
    }
    CandidateClustering {
        assignment: file.assignment.clone(),
        clusters,
        inconclusive: file.inconclusive.iter().copied().collect(),
    }
}
