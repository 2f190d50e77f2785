//! Problem instance: data points, multiplicative weights, regularization.

use crate::error::{Error, Result};
use crate::linalg::{self, PointSet};

/// A sum-of-norms clustering instance.
///
/// Aggregates derived from the data that recur in the certificate bounds
/// (total weight, weighted centroid, weighted spread) are computed once at
/// construction.
#[derive(Debug, Clone)]
pub struct Dataset {
    a: PointSet,
    r: Vec<f64>,
    lambda: f64,
    /// r' = sum_i r_i.
    total_weight: f64,
    /// Weighted centroid of the data.
    centroid: Vec<f64>,
    /// sum_l r_l ||centroid - a_l||^2.
    weighted_spread: f64,
    /// sum_l r_l ||a_l||.
    weighted_norm_sum: f64,
}

impl Dataset {
    pub fn new(a: PointSet, r: Vec<f64>, lambda: f64) -> Result<Self> {
        if a.n() == 0 || a.d() == 0 {
            return Err(Error::InvalidDataset("need n >= 1 and d >= 1".into()));
        }
        if r.len() != a.n() {
            return Err(Error::DimensionMismatch {
                context: "weight vector length",
                expected: a.n(),
                got: r.len(),
            });
        }
        if !a.is_finite() {
            return Err(Error::InvalidDataset("non-finite point coordinate".into()));
        }
        if r.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidDataset(
                "weights must be strictly positive and finite".into(),
            ));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidDataset("lambda must be > 0".into()));
        }

        let total_weight: f64 = r.iter().sum();
        let mut centroid = vec![0.0; a.d()];
        for (i, p) in a.iter_rows().enumerate() {
            linalg::add_scaled(&mut centroid, r[i], p);
        }
        for c in &mut centroid {
            *c /= total_weight;
        }
        let weighted_spread = a
            .iter_rows()
            .enumerate()
            .map(|(i, p)| {
                let dv = linalg::dist(&centroid, p);
                r[i] * dv * dv
            })
            .sum();
        let weighted_norm_sum = a
            .iter_rows()
            .enumerate()
            .map(|(i, p)| r[i] * linalg::norm(p))
            .sum();

        Ok(Self {
            a,
            r,
            lambda,
            total_weight,
            centroid,
            weighted_spread,
            weighted_norm_sum,
        })
    }

    /// Same data and weights, different regularization.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.a.clone(), self.r.clone(), lambda)
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn d(&self) -> usize {
        self.a.d()
    }

    pub fn points(&self) -> &PointSet {
        &self.a
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.a.row(i)
    }

    pub fn weights(&self) -> &[f64] {
        &self.r
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.r[i]
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn centroid(&self) -> &[f64] {
        &self.centroid
    }

    pub fn weighted_spread(&self) -> f64 {
        self.weighted_spread
    }

    pub fn weighted_norm_sum(&self) -> f64 {
        self.weighted_norm_sum
    }
}
