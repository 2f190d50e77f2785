//! Proximal operator of the Euclidean norm (block soft-thresholding).

use crate::linalg;

/// `argmin_u 1/2 ||u - v||^2 + tau ||u||`, i.e. `(1 - tau/||v||)_+ v`.
///
/// Returns the exact zero vector whenever `||v|| <= tau`; no epsilon floor
/// is applied, so cluster-detection code can test the output against zero
/// bitwise.
pub fn prox_norm(v: &[f64], tau: f64) -> Vec<f64> {
    let mut out = v.to_vec();
    prox_norm_in_place(&mut out, tau);
    out
}

/// In-place variant of [`prox_norm`] for hot loops.
pub fn prox_norm_in_place(v: &mut [f64], tau: f64) {
    debug_assert!(tau >= 0.0);
    let nrm = linalg::norm(v);
    if nrm <= tau {
        v.fill(0.0);
    } else {
        let scale = 1.0 - tau / nrm;
        for x in v.iter_mut() {
            *x *= scale;
        }
    }
}
