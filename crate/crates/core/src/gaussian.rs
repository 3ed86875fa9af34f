//! Closed forms for Gaussian pump and phase-matching functions.
//!
//! With `φ(u) ∝ e^{−u²/2}` and `γ(u) ∝ e^{−u²/2}` the JSA is
//! `exp(−½ (x, y) C (x, y)ᵀ)` for the correlation matrix `C` below, and the
//! purity is `√det C / √(c₁₁ c₂₂) = |r−s| / √((1+r²)(1+s²))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance of [`separability_condition`].
pub const SEPARABILITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub c11: f64,
    pub c12: f64,
    pub c22: f64,
}

impl CorrelationMatrix {
    pub fn det(&self) -> f64 {
        self.c11 * self.c22 - self.c12 * self.c12
    }

    /// Purity of the Gaussian JSA with this quadratic form.
    pub fn purity(&self) -> f64 {
        self.det().max(0.0).sqrt() / (self.c11 * self.c22).sqrt()
    }

    pub fn as_array(&self) -> [[f64; 2]; 2] {
        [[self.c11, self.c12], [self.c12, self.c22]]
    }
}

pub fn gaussian_correlation_matrix(r: f64, s: f64) -> CorrelationMatrix {
    CorrelationMatrix {
        c11: 1.0 + r * r,
        c12: 1.0 + r * s,
        c22: 1.0 + s * s,
    }
}

/// `|r−s| / √((1+r²)(1+s²))`.
pub fn gaussian_purity(r: f64, s: f64) -> Result<f64> {
    if (r - s).abs() < 1e-12 {
        return Err(Error::DegenerateGroupVelocities { r, s });
    }
    Ok((r - s).abs() / ((1.0 + r * r) * (1.0 + s * s)).sqrt())
}

/// `|rs + 1| ≤ tol`: the Gaussian JSA is separable.
pub fn separability_condition(r: f64, s: f64, tol: f64) -> bool {
    (r * s + 1.0).abs() <= tol
}

/// `1 − 1/(2r²)`, the large-`r` expansion of `gaussian_purity(r, 0)`.
pub fn asymptotic_gaussian_purity(r: f64) -> Result<f64> {
    if r == 0.0 || !r.is_finite() {
        return Err(Error::Domain(format!(
            "asymptotic purity needs finite nonzero r (got {r})"
        )));
    }
    Ok(1.0 - 0.5 / (r * r))
}

/// Ridge angle `atan(s²)` of a separable configuration `rs = −1`.
pub fn separable_angle(s: f64) -> f64 {
    (s * s).atan()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correlation_matrices() {
        assert_eq!(
            gaussian_correlation_matrix(1.0, -1.0).as_array(),
            [[2.0, 0.0], [0.0, 2.0]]
        );
        assert_eq!(
            gaussian_correlation_matrix(2.0, -0.5).as_array(),
            [[5.0, 0.0], [0.0, 1.25]]
        );
        let d = gaussian_correlation_matrix(1.0, 1.0);
        assert_eq!(d.as_array(), [[2.0, 2.0], [2.0, 2.0]]);
        assert_eq!(d.det(), 0.0);
    }

    #[test]
    fn purities() {
        assert!((gaussian_purity(1.0, -1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((gaussian_purity(1.0, 0.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(
            gaussian_purity(2.0, 2.0).unwrap_err().kind(),
            "DegenerateGroupVelocities"
        );
        let c = gaussian_correlation_matrix(3.0, 0.4);
        assert!((c.purity() - gaussian_purity(3.0, 0.4).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn separability() {
        assert!(separability_condition(1.0, -1.0, SEPARABILITY_TOLERANCE));
        assert!(separability_condition(4.0, -0.25, SEPARABILITY_TOLERANCE));
        assert!(!separability_condition(1.0, -0.5, SEPARABILITY_TOLERANCE));
    }

    #[test]
    fn asymptotics() {
        assert!((asymptotic_gaussian_purity(10.0).unwrap() - 0.995).abs() < 1e-15);
        assert!((asymptotic_gaussian_purity(1e8).unwrap() - 1.0).abs() < 1e-15);
        let a = asymptotic_gaussian_purity(23.4).unwrap();
        assert!((a - 0.99909).abs() < 5e-6);
        assert!((a - gaussian_purity(23.4, 0.0).unwrap()).abs() < 1e-5);
        assert!(asymptotic_gaussian_purity(0.0).is_err());
    }

    #[test]
    fn separable_angle_matches_ridge() {
        let s: f64 = 0.5;
        let r = -1.0 / s;
        // Ridge of the phase-matching function for r = −1/s.
        assert!((separable_angle(s) - crate::jsa::pmf_angle(r, s).unwrap()).abs() < 1e-15);
    }
}
