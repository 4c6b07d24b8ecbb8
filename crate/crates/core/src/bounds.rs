//! Floating-point diagnostics for how far a replacement must shrink a
//! displacement. Nothing in the exact decision path depends on them.

use crate::error::{Error, Result};

/// A displacement `r` and a margin `eps` with `0 < eps ≤ r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundParams {
    pub r: f64,
    pub eps: f64,
}

impl BoundParams {
    pub fn new(r: f64, eps: f64) -> Result<Self> {
        if !(r.is_finite() && eps.is_finite() && eps > 0.0 && eps <= r) {
            return Err(Error::InvalidBoundParameters(format!(
                "need 0 < eps ≤ r, got r = {r}, eps = {eps}"
            )));
        }
        Ok(BoundParams { r, eps })
    }
}

/// `2·sinh³(eps/2) / sinh(r + eps/2)`.
pub fn eta_bound(r: f64, eps: f64) -> Result<f64> {
    if !(r.is_finite() && eps.is_finite() && r > 0.0 && eps > 0.0) {
        return Err(Error::InvalidBoundParameters(format!(
            "need r, eps > 0, got r = {r}, eps = {eps}"
        )));
    }
    Ok(2.0 * (eps / 2.0).sinh().powi(3) / (r + eps / 2.0).sinh())
}

/// `r − acosh(cosh r − η)`, evaluated without cancellation.
pub fn shrink_margin(r: f64, eps: f64) -> Result<f64> {
    let p = BoundParams::new(r, eps)?;
    let eta = eta_bound(p.r, p.eps)?;
    let (c, s) = (p.r.cosh(), p.r.sinh());
    let b = c - eta;
    if b < 1.0 {
        return Err(Error::InvalidBoundParameters(format!(
            "cosh r − η = {b} is below 1"
        )));
    }
    // (c + s)/(b + √(b² − 1)) = 1/(1 − u)
    let root = (b * b - 1.0).sqrt();
    let u = (eta + eta * (c + b) / (s + root)) / (c + s);
    Ok(-(-u).ln_1p())
}

/// `min(eps, r − acosh(cosh r − η(r, eps)))`.
pub fn delta_bound(r: f64, eps: f64) -> Result<f64> {
    Ok(shrink_margin(r, eps)?.min(eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_one() {
        assert!((eta_bound(1.0, 1.0).unwrap() - 0.132_907_293_417_8).abs() < 1e-12);
        assert!((delta_bound(1.0, 1.0).unwrap() - 0.122_678_231_623_1).abs() < 1e-12);
    }

    #[test]
    fn stable_form_matches_direct_form() {
        for (r, e) in [(1.0, 1.0), (3.0, 0.5), (0.7, 0.2), (6.0, 6.0)] {
            let direct = r - (f64::cosh(r) - eta_bound(r, e).unwrap()).acosh();
            assert!(
                (shrink_margin(r, e).unwrap() - direct).abs() < 1e-12,
                "{r} {e}"
            );
        }
    }

    #[test]
    fn eta_vanishes_with_eps() {
        assert!(eta_bound(2.0, 1e-6).unwrap() < 1e-18);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(eta_bound(0.0, 1.0).is_err());
        assert!(delta_bound(1.0, 2.0).is_err());
        assert!(delta_bound(1.0, f64::NAN).is_err());
        assert!(BoundParams::new(1.0, -1.0).is_err());
    }

    #[test]
    fn grid_checks() {
        for i in 1..=100 {
            let r = 0.05 * i as f64;
            for j in 1..=100 {
                let eps = r * j as f64 / 100.0;
                let d = delta_bound(r, eps).unwrap();
                let margin = shrink_margin(r, eps).unwrap();
                assert!(d > 0.0 && d <= eps, "r = {r}, eps = {eps}");
                assert!(
                    margin <= eps,
                    "simplification fails at r = {r}, eps = {eps}"
                );
            }
        }
        // decreasing in r at fixed eps
        for j in 1..=20 {
            let eps = 0.25 * j as f64;
            let mut prev = f64::INFINITY;
            for i in 0..100 {
                let e = eta_bound(eps + 0.1 * i as f64, eps).unwrap();
                assert!(e < prev);
                prev = e;
            }
        }
    }
}
