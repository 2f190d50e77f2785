//! Browser bindings for the interactive demo page.
//!
//! The exported surface is deliberately small and string-typed: the page
//! drives a [`Session`] that owns a dataset and solver state, steps the
//! solver in chunks, and asks for certification. All structured results
//! cross the boundary as JSON strings so the page needs no generated
//! TypeScript and the crate builds on native targets for testing.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use soncert::admm::{admm_step_in_place, init_state, AdmmConfig, PrimalDualIterate};
use soncert::certify::{certify, ClusterMethod, Verdict};
use soncert::dataset::Dataset;
use soncert::experiments::{gen_gauss_mixture, gen_half_moons, GeneratedData, WeightMode};

#[derive(Serialize)]
struct PointsOut {
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
    labels: Vec<usize>,
}

#[derive(Serialize)]
struct StepOut {
    iteration: usize,
    mu: f64,
    positions: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct ClusterOut {
    members: Vec<usize>,
    max_q_norm: f64,
    cgr_pass: bool,
}

#[derive(Serialize)]
struct CertifyOut {
    iteration: usize,
    mu: f64,
    verdict: String,
    assignment: Vec<usize>,
    clusters: Vec<ClusterOut>,
    min_separation: Option<f64>,
    separation_threshold: f64,
    inconclusive: Vec<usize>,
}

/// One dataset plus solver state, driven from the page.
#[wasm_bindgen]
pub struct Session {
    data: GeneratedData,
    ds: Dataset,
    cfg: AdmmConfig,
    state: PrimalDualIterate,
    iteration: usize,
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("demo payloads serialize")
}

#[wasm_bindgen]
impl Session {
    /// Builds a session over a generated dataset.
    ///
    /// `kind`: "halfmoons" or "mixture"; `param` is the noise standard
    /// deviation for half moons and the mean separation for the mixture.
    #[wasm_bindgen(constructor)]
    pub fn new(kind: &str, n: usize, param: f64, seed: u64, lambda: f64) -> Result<Session, String> {
        let data = match kind {
            "halfmoons" => gen_half_moons(n, param, seed),
            "mixture" => gen_gauss_mixture(n, param, seed, WeightMode::Mixture),
            other => return Err(format!("unknown dataset kind '{other}'")),
        }
        .map_err(|e| e.to_string())?;
        let ds = Dataset::new(data.points.clone(), data.weights.clone(), lambda)
            .map_err(|e| e.to_string())?;
        let state = init_state(&ds);
        Ok(Session {
            data,
            ds,
            cfg: AdmmConfig::default(),
            state,
            iteration: 0,
        })
    }

    /// Original data points, weights and generative labels as JSON.
    pub fn dataset_json(&self) -> String {
        let points = self
            .data
            .points
            .iter_rows()
            .map(|p| [p[0], p[1]])
            .collect();
        to_json(&PointsOut {
            points,
            weights: self.data.weights.clone(),
            labels: self.data.truth.0.clone(),
        })
    }

    /// Re-targets the solve at a new lambda (and optionally nu), restarting
    /// from the initial iterate.
    pub fn set_lambda(&mut self, lambda: f64, nu: f64) -> Result<(), String> {
        self.ds = self.ds.with_lambda(lambda).map_err(|e| e.to_string())?;
        self.cfg.nu = nu;
        self.state = init_state(&self.ds);
        self.iteration = 0;
        Ok(())
    }

    /// Runs `count` solver sweeps and reports the new positions and gap.
    pub fn step(&mut self, count: usize) -> Result<String, String> {
        for _ in 0..count {
            admm_step_in_place(&self.ds, &mut self.state, &self.cfg, self.iteration)
                .map_err(|e| e.to_string())?;
            self.iteration += 1;
        }
        let cert = certify(
            &self.ds,
            &self.state,
            &self.cfg,
            ClusterMethod::Graph,
            self.iteration,
        );
        let positions = self.state.x.iter_rows().map(|p| [p[0], p[1]]).collect();
        Ok(to_json(&StepOut {
            iteration: self.iteration,
            mu: cert.mu,
            positions,
        }))
    }

    /// Runs the full clustering test on the current iterate.
    pub fn certify_json(&self) -> String {
        let cert = certify(
            &self.ds,
            &self.state,
            &self.cfg,
            ClusterMethod::Graph,
            self.iteration,
        );
        let clusters = cert
            .clusters
            .clusters
            .iter()
            .zip(&cert.cluster_checks)
            .map(|(members, check)| ClusterOut {
                members: members.clone(),
                max_q_norm: check.max_q_norm,
                cgr_pass: check.cgr_pass,
            })
            .collect();
        let min_separation = cert
            .separations
            .iter()
            .map(|s| s.d)
            .fold(None, |acc: Option<f64>, d| {
                Some(acc.map_or(d, |a| a.min(d)))
            });
        to_json(&CertifyOut {
            iteration: cert.iteration,
            mu: cert.mu,
            verdict: match cert.verdict {
                Verdict::Success => "success".into(),
                Verdict::Failure => "failure".into(),
            },
            assignment: cert.clusters.assignment.clone(),
            clusters,
            min_separation,
            separation_threshold: 2.0 * cert.mu,
            inconclusive: cert.clusters.inconclusive.iter().copied().collect(),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.ds.lambda()
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn session_drives_solver_and_certifies() {
        let mut s = Session::new("mixture", 30, 4.0, 7, 0.8).unwrap();
        let ds_json = s.dataset_json();
        assert!(ds_json.contains("\"points\""));
        let step: serde_json::Value = serde_json::from_str(&s.step(200).unwrap()).unwrap();
        assert_eq!(step["iteration"], 200);
        let cert: serde_json::Value = serde_json::from_str(&s.certify_json()).unwrap();
        assert!(cert["verdict"] == "success" || cert["verdict"] == "failure");
        assert_eq!(cert["assignment"].as_array().unwrap().len(), 30);
    }

    #[test]
    fn lambda_reset_restarts() {
        let mut s = Session::new("halfmoons", 20, 0.05, 1, 0.4).unwrap();
        s.step(50).unwrap();
        assert_eq!(s.iteration(), 50);
        s.set_lambda(0.9, 1.0).unwrap();
        assert_eq!(s.iteration(), 0);
        assert_eq!(s.lambda(), 0.9);
    }
}
