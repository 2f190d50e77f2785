//! Sum-of-norms (convex) clustering with multiplicative weights, plus a
//! rigorous clustering certificate.
//!
//! The problem solved here is
//!
//! ```text
//! min_x  f'(x) = 1/2 sum_i r_i ||x_i - a_i||^2
//!                + lambda * sum_{i<j} r_i r_j ||x_i - x_j||
//! ```
//!
//! over points `x_1..x_n` in R^d, given data `a_1..a_n`, strictly positive
//! weights `r_i` and a regularization parameter `lambda`. Points whose
//! optimizer coordinates coincide form one cluster. Because iterative
//! solvers only ever produce approximate solutions, reading the clusters
//! off an iterate is unreliable; this crate closes that gap.
//!
//! From any approximate primal-dual pair `(x, delta)` -- for instance an
//! ADMM iterate -- the certification pipeline
//!
//! 1. projects `delta` onto the dual-feasible set ([`socp::clamp_dual`]),
//! 2. lifts the pair to a fully feasible point of an equivalent
//!    second-order cone program ([`socp::lift`]) whose duality gap `mu`
//!    equals `f'(x) - h'(delta)`,
//! 3. extracts candidate clusters ([`certify::find_clusters_ball`] or
//!    [`certify::find_clusters_graph`]),
//! 4. builds per-cluster subgradient certificates `q_ij` and checks the
//!    CGR inequality `||q_ij|| <= lambda` together with the pairwise
//!    separation condition `D_{k,k'} > 2 mu` ([`certify::certify`]).
//!
//! If every check passes, the candidate clustering provably equals the
//! clustering of the exact optimizer, and the certificate can be
//! re-verified independently from `(x, delta)` alone
//! ([`driver::verify_certificate`]).

pub mod admm;
pub mod certify;
pub mod dataset;
pub mod driver;
pub mod edge;
pub mod error;
pub mod experiments;
pub mod files;
pub mod linalg;
pub mod objective;
pub mod prox;
pub mod socp;

pub use admm::{admm_step, init_state, AdmmConfig, PrimalDualIterate};
pub use certify::{
    certify, cgr_condition, compute_cgr, compute_omega, find_clusters_ball, find_clusters_graph,
    separation_condition, CandidateClustering, Certificate, ClusterMethod, Verdict,
};
pub use dataset::Dataset;
pub use edge::{EdgeScalars, EdgeTable};
pub use error::{Error, Result};
pub use experiments::{
    gen_gauss_mixture, gen_half_moons, inner_subset, modified_rand_index, GroundTruth, WeightMode,
};
pub use linalg::PointSet;
pub use objective::{dual_objective, primal_objective};
pub use prox::prox_norm;
pub use socp::{clamp_dual, duality_gap, lift, residual_bounds, residuals, Residuals, SocpPoint};
