//! Moment expansions of the purity for small beam-splitter angles.
//!
//! Everything here depends on the input kets only through
//! `n = ⟨b̂†b̂⟩` and `m = ⟨b̂²⟩`.

use serde::{Deserialize, Serialize};

use crate::c64;
use crate::error::{Error, Result};
use crate::fock::ket::FockKet;

/// Largest `|⟨b̂⟩|` accepted by [`moments`].
pub const DISPLACEMENT_TOLERANCE: f64 = 1e-8;

/// Beyond this angle the small-θ expansion is flagged as unreliable.
pub const SMALL_THETA_LIMIT: f64 = 0.3;

/// Below this `|r|` the asymptotic formula is flagged as unreliable.
pub const ASYMPTOTIC_R_MIN: f64 = 5.0;

/// Second moments of a zero-mean single-mode state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub n: f64,
    pub m: c64,
}

impl Moments {
    pub const VACUUM: Moments = Moments {
        n: 0.0,
        m: c64::new(0.0, 0.0),
    };

    /// `√(n(n+1)) − |m|`, non-negative for physical states and zero exactly
    /// for squeezed vacua.
    pub fn uncertainty_gap(&self) -> f64 {
        (self.n * (self.n + 1.0)).sqrt() - self.m.norm()
    }

    /// Moments of `Ŝ_phase(μ)|0⟩`.
    pub fn squeezed_vacuum(mu: f64, phase: f64) -> Moments {
        let r = mu.ln();
        Moments {
            n: r.sinh().powi(2),
            m: -c64::from_polar(r.sinh() * r.cosh(), phase),
        }
    }
}

/// A formula value with a flag telling whether its inputs are in the range
/// where the approximation behind it holds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Approximation {
    pub value: f64,
    pub valid: bool,
}

/// `n = Σ n|cₙ|²`, `m = Σ √((n+1)(n+2)) c*ₙ cₙ₊₂`.
pub fn moments(k: &FockKet) -> Result<Moments> {
    let norm = k.norm_sqr();
    let disp = k.mean_annihilation().norm() / norm;
    if disp > DISPLACEMENT_TOLERANCE {
        return Err(Error::Displacement(disp));
    }
    let c = &k.coeffs;
    let n = c
        .iter()
        .enumerate()
        .map(|(i, v)| i as f64 * v.norm_sqr())
        .sum::<f64>()
        / norm;
    let m = c
        .windows(3)
        .enumerate()
        .map(|(i, w)| ((i + 1) as f64 * (i + 2) as f64).sqrt() * w[0].conj() * w[2])
        .sum::<c64>()
        / norm;
    Ok(Moments { n, m })
}

/// Moments after `Ŝ(ν)`:
///
/// ```text
/// n′ = (ν²/4 + 1/(4ν²) − ½) + (ν²/2 + 1/(2ν²)) n + (1/(4ν²) − ν²/4)(m + m*)
/// m′ = (ν²/4 + ½ + 1/(4ν²)) m + (ν²/4 − ½ + 1/(4ν²)) m* − (ν² − 1/ν²)(2n + 1)/4
/// ```
pub fn squeeze_moments(input: Moments, nu: f64) -> Result<Moments> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::Domain(format!(
            "squeeze factor must be positive (got {nu})"
        )));
    }
    let (v2, iv2) = (nu * nu, 1.0 / (nu * nu));
    let Moments { n, m } = input;
    let n_out = (v2 / 4.0 + iv2 / 4.0 - 0.5)
        + (v2 / 2.0 + iv2 / 2.0) * n
        + (iv2 / 4.0 - v2 / 4.0) * 2.0 * m.re;
    let m_out = m * (v2 / 4.0 + 0.5 + iv2 / 4.0) + m.conj() * (v2 / 4.0 - 0.5 + iv2 / 4.0)
        - c64::new((v2 - iv2) * (2.0 * n + 1.0) / 4.0, 0.0);
    Ok(Moments { n: n_out, m: m_out })
}

/// The bracket multiplying `(2θ)²` in the small-angle purity:
/// `n_φ n_γ + (n_φ + n_γ)/2 − Re[m*_γ m_φ]`.
pub fn entanglement_bracket(phi: Moments, gamma: Moments) -> f64 {
    phi.n * gamma.n + 0.5 * (phi.n + gamma.n) - (gamma.m.conj() * phi.m).re
}

/// `1 − (2θ)² [n_φ n_γ′ + (n_φ + n_γ′)/2 − Re(m*_γ′ m_φ)]`, valid for
/// `|θ| < 0.3`. `gamma` holds the moments of the already squeezed pump ket.
pub fn purity_small_theta(theta: f64, phi: Moments, gamma: Moments) -> Approximation {
    Approximation {
        value: 1.0 - 4.0 * theta * theta * entanglement_bracket(phi, gamma),
        valid: theta.abs() < SMALL_THETA_LIMIT,
    }
}

/// Pump photon number that minimizes the small-angle entanglement for
/// fixed `φ` moments, with the matching squeezed vacuum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalPump {
    pub n: f64,
    /// Squeeze parameter with `sinh² r = n`.
    pub squeeze_r: f64,
    /// `μ = e^r`.
    pub mu: f64,
    /// Squeezing phase that aligns `m_γ′` with `m_φ`.
    pub phase: f64,
}

impl OptimalPump {
    pub fn moments(&self) -> Moments {
        Moments::squeezed_vacuum(self.mu, self.phase)
    }
}

/// ```text
/// n_opt = [1 + 4n(n+1) − 4|m|² − √((2n+1)²((2n+1)² − 4|m|²))] / (8|m|² − 2(2n+1)²)
/// ```
///
/// evaluated for the moments of `φ`. For physical moments the denominator
/// is at most `−2`, and on the squeezed-state boundary the formula returns
/// `n_φ`.
pub fn optimal_pump_n(phi: Moments) -> Result<OptimalPump> {
    let Moments { n, m } = phi;
    let m2 = m.norm_sqr();
    let bound = n * (n + 1.0);
    if n < 0.0 || m2 > bound + 1e-9 * (1.0 + bound) {
        return Err(Error::Domain(format!(
            "moments violate |m|² ≤ n(n+1): n = {n}, |m|² = {m2}"
        )));
    }
    let m2 = m2.min(bound);
    let a = 2.0 * n + 1.0;
    let denom = 8.0 * m2 - 2.0 * a * a;
    if denom.abs() < 1e-12 {
        return Err(Error::DegenerateOptimum);
    }
    let root = (a * a * (a * a - 4.0 * m2)).max(0.0).sqrt();
    let n_opt = ((1.0 + 4.0 * n * (n + 1.0) - 4.0 * m2 - root) / denom).max(0.0);
    let squeeze_r = n_opt.sqrt().asinh();
    let phase = if m2 > 0.0 {
        m.arg() + std::f64::consts::PI
    } else {
        0.0
    };
    Ok(OptimalPump {
        n: n_opt,
        squeeze_r,
        mu: squeeze_r.exp(),
        phase,
    })
}

/// `1 − (1/(2r²)) (1 − 2 Re m_γ + 2n_γ)(1 + 2 Re m_φ + 2n_φ)`, the large-`r`
/// purity with `s → 0`. Flagged invalid for `|r| < 5`; both factors must be
/// positive.
pub fn asymptotic_purity_general(r: f64, phi: Moments, gamma: Moments) -> Result<Approximation> {
    if r == 0.0 || !r.is_finite() {
        return Err(Error::Domain(format!(
            "asymptotic purity needs finite nonzero r (got {r})"
        )));
    }
    let fg = 1.0 - 2.0 * gamma.m.re + 2.0 * gamma.n;
    let fp = 1.0 + 2.0 * phi.m.re + 2.0 * phi.n;
    if !(fg > 0.0 && fp > 0.0) {
        return Err(Error::Domain(format!(
            "moment factors must be positive (got {fg}, {fp})"
        )));
    }
    Ok(Approximation {
        value: 1.0 - fg * fp / (2.0 * r * r),
        valid: r.abs() >= ASYMPTOTIC_R_MIN,
    })
}
