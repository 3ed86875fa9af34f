//! Closest squeezed vacuum to a given ket.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::c64;
use crate::fock::ket::{squeezed_vacuum_raw, FockKet};

/// Squeeze factors scanned by [`squeezed_fidelity`].
pub const MU_RANGE: (f64, f64) = (1.0 / 20.0, 20.0);

const SCAN_MU: usize = 121;
const SCAN_PHASE: usize = 48;

/// Best squeezed-vacuum approximation `Ŝ_phase(μ)|0⟩` of a ket.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezedFit {
    pub mu: f64,
    /// Rotation of the squeezed quadrature, in `[−π/2, π/2)`.
    pub phase: f64,
    pub fidelity: f64,
}

fn overlap(k: &FockKet, log_mu: f64, phase: f64) -> f64 {
    let sv = squeezed_vacuum_raw(log_mu.exp(), phase, k.dim());
    sv.iter()
        .zip(&k.coeffs)
        .map(|(a, b)| a.conj() * b)
        .sum::<c64>()
        .norm_sqr()
        / k.norm_sqr()
}

/// Golden-section maximization of `f` on `[a, b]`.
fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// `max |⟨k|Ŝ_phase(μ)|0⟩|²` over `μ ∈ [1/20, 20]` and the squeezing phase.
///
/// A coarse log-spaced scan picks the starting cell, then golden-section
/// searches alternate between `ln μ` and the phase until the fidelity stops
/// improving.
pub fn squeezed_fidelity(k: &FockKet) -> SqueezedFit {
    let (lo, hi) = (MU_RANGE.0.ln(), MU_RANGE.1.ln());
    let d_mu = (hi - lo) / (SCAN_MU - 1) as f64;
    let d_ph = PI / SCAN_PHASE as f64;
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..SCAN_MU {
        let lm = lo + i as f64 * d_mu;
        for j in 0..SCAN_PHASE {
            let ph = -FRAC_PI_2 + j as f64 * d_ph;
            let f = overlap(k, lm, ph);
            if f > best.2 {
                best = (lm, ph, f);
            }
        }
    }
    let (mut lm, mut ph, mut fid) = best;
    let (mut w_mu, mut w_ph) = (d_mu, d_ph);
    // Near μ = 1 the phase is barely determined by the scan, so a window
    // grows again whenever the optimum lands on its edge.
    for _ in 0..400 {
        let (nl, _) = golden_max(
            |x| overlap(k, x, ph),
            (lm - w_mu).max(lo),
            (lm + w_mu).min(hi),
            1e-12,
        );
        let (np, nf) = golden_max(|p| overlap(k, nl, p), ph - w_ph, ph + w_ph, 1e-12);
        let gain = nf - fid;
        let (step_mu, step_ph) = ((nl - lm).abs(), (np - ph).abs());
        if nf >= fid {
            lm = nl;
            ph = np;
            fid = nf;
        }
        w_mu = if step_mu > 0.8 * w_mu {
            (2.0 * w_mu).min(hi - lo)
        } else {
            (0.5 * w_mu).max(1e-7)
        };
        w_ph = if step_ph > 0.8 * w_ph {
            (2.0 * w_ph).min(FRAC_PI_2)
        } else {
            (0.5 * w_ph).max(1e-7)
        };
        if gain.abs() < 1e-15 && w_mu <= 1e-6 && w_ph <= 1e-6 {
            break;
        }
    }
    // Fold the phase back into [−π/2, π/2); a π shift of the phase is the
    // same state as inverting μ.
    let mut mu = lm.exp();
    let mut phase = ph;
    while phase >= FRAC_PI_2 {
        phase -= PI;
        mu = 1.0 / mu;
    }
    while phase < -FRAC_PI_2 {
        phase += PI;
        mu = 1.0 / mu;
    }
    SqueezedFit {
        mu,
        phase,
        fidelity: fid,
    }
}
