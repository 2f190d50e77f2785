//! Edge-indexed storage over ordered pairs `(i, j)` with `i < j`.
//!
//! Pairwise quantities in this crate (split variables, multipliers,
//! subgradients) obey the antisymmetric convention
//!
//! ```text
//! v<ij> =  v_ij   for i < j,
//!        = -v_ji  for i > j,
//!        =  0     for i = j.
//! ```
//!
//! Only the `i < j` half is stored, in a flat triangular layout; the other
//! orientation is produced by sign flip at lookup so the two can never
//! drift apart.

use serde::{Deserialize, Serialize};

/// Number of stored edges for `n` nodes.
pub fn edge_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Position of edge `(i, j)`, `i < j`, in the flat triangular layout.
#[inline]
pub fn edge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (n - 1) - i * (i + 1) / 2 + (j - 1)
}

/// One vector in R^d per ordered pair `i < j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeTable {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl EdgeTable {
    pub fn zeros(n: usize, d: usize) -> Self {
        Self {
            n,
            d,
            data: vec![0.0; edge_count(n) * d],
        }
    }

    /// Builds from a flat buffer laid out edge-major in `i < j` order.
    pub fn from_flat(n: usize, d: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), edge_count(n) * d, "flat buffer has wrong length");
        Self { n, d, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Stored slice for `i < j`. Panics if `i >= j`.
    #[inline]
    pub fn slice(&self, i: usize, j: usize) -> &[f64] {
        assert!(i < j, "slice() requires i < j; use get_into for i > j");
        let k = edge_index(self.n, i, j) * self.d;
        &self.data[k..k + self.d]
    }

    #[inline]
    pub fn slice_mut(&mut self, i: usize, j: usize) -> &mut [f64] {
        assert!(i < j);
        let k = edge_index(self.n, i, j) * self.d;
        &mut self.data[k..k + self.d]
    }

    pub fn set(&mut self, i: usize, j: usize, v: &[f64]) {
        self.slice_mut(i, j).copy_from_slice(v);
    }

    /// Antisymmetric lookup: writes `v<ij>` into `out` for any `i, j`.
    pub fn get_into(&self, i: usize, j: usize, out: &mut [f64]) {
        if i == j {
            out.fill(0.0);
        } else if i < j {
            out.copy_from_slice(self.slice(i, j));
        } else {
            for (o, v) in out.iter_mut().zip(self.slice(j, i)) {
                *o = -v;
            }
        }
    }

    /// Antisymmetric lookup returning a fresh vector (test convenience).
    pub fn get(&self, i: usize, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.d];
        self.get_into(i, j, &mut out);
        out
    }

    /// Visits every stored edge in ascending `(i, j)` order.
    pub fn for_each(&self, mut f: impl FnMut(usize, usize, &[f64])) {
        let mut k = 0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                f(i, j, &self.data[k..k + self.d]);
                k += self.d;
            }
        }
    }

    pub fn for_each_mut(&mut self, mut f: impl FnMut(usize, usize, &mut [f64])) {
        let mut k = 0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                f(i, j, &mut self.data[k..k + self.d]);
                k += self.d;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// One scalar per ordered pair `i < j` (cone heads `t_ij`, residuals
/// `eps1_ij`). Scalars here are symmetric, not antisymmetric: lookups with
/// `i > j` return the stored value unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeScalars {
    n: usize,
    data: Vec<f64>,
}

impl EdgeScalars {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; edge_count(n)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert_ne!(i, j);
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.data[edge_index(self.n, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < j);
        self.data[edge_index(self.n, i, j)] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn for_each(&self, mut f: impl FnMut(usize, usize, f64)) {
        let mut k = 0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                f(i, j, self.data[k]);
                k += 1;
            }
        }
    }
}
