//! The JSA as a squeezed two-oscillator state after a beam splitter.
//!
//! Read `φ` and `γ` as position wavefunctions of modes `a` and `b`. Then
//!
//! ```text
//! Ψ(x, y) = ⟨x|⟨y| (Ŝ(κ)⊗Ŝ(σ)) Û_BS(θ) (𝕀⊗Ŝ(ν)) |φ⟩|γ⟩
//! ```
//!
//! with the parameters of [`BeamSplitterMap`]. The final local squeezes are
//! rescalings `x → κx`, `y → σy` of the synthesized wavefunction and are
//! applied analytically on the grid.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::c64;
use crate::error::{Error, Result};
use crate::fock::hermite::hermite_table;
use crate::fock::ket::{parity_apply, FockKet};
use crate::fock::ops::{squeeze_ket, BeamSplitter};
use crate::grid::Grid1D;
use crate::jsa::JointAmplitude;

/// Discarded weight beyond which synthesis refuses to produce a JSA.
pub const TRUNCATION_LIMIT: f64 = 0.05;

/// Parameters of the oscillator mapping for given `(r, s)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterMap {
    pub theta: f64,
    pub kappa: f64,
    pub sigma: f64,
    pub nu: f64,
    pub mu: f64,
    /// `|r| < |s|` on input: the roles of `x` and `y` were exchanged.
    pub swapped: bool,
    /// The leading coefficient was negative: `φ` must be reflected.
    pub reflected: bool,
}

/// `κ = √(r(r−s))`, `σ = √(s(s−r))`, `ν = 1/√(−rs)`, `μ = 1`,
/// `tan θ = √(−s/r)`, after arranging `|r| ≥ |s|` and `r > 0`.
pub fn map_params(r: f64, s: f64) -> Result<BeamSplitterMap> {
    if !(r * s < 0.0) || !r.is_finite() || !s.is_finite() {
        return Err(Error::MappingDomain { r, s });
    }
    let swapped = r.abs() < s.abs();
    let (r, s) = if swapped { (s, r) } else { (r, s) };
    let reflected = r < 0.0;
    let (r, s) = if reflected { (-r, -s) } else { (r, s) };
    Ok(BeamSplitterMap {
        theta: (-s / r).sqrt().atan(),
        kappa: (r * (r - s)).sqrt(),
        sigma: (s * (s - r)).sqrt(),
        nu: 1.0 / (-r * s).sqrt(),
        mu: 1.0,
        swapped,
        reflected,
    })
}

/// Builds `Ψ` on `(gx, gy)` from kets of `φ` and `γ`.
///
/// `γ` is squeezed by `ν` into as many levels as it needs, the pair is
/// rotated exactly by the beam splitter and the output coefficients are
/// expanded in Hermite functions of `κx` and `σy`.
pub fn synthesize_jsa_from_fock(
    phi: &FockKet,
    gamma: &FockKet,
    map: &BeamSplitterMap,
    gx: Grid1D,
    gy: Grid1D,
) -> Result<JointAmplitude> {
    let coeffs = output_coefficients(phi, gamma, map)?;
    let (gu, gv) = if map.swapped { (gy, gx) } else { (gx, gy) };
    let values = expand_in_hermite(&coeffs, map.kappa, map.sigma, &gu.points(), &gv.points());
    let j = JointAmplitude::from_matrix(values, gu, gv)?;
    Ok(if map.swapped { j.transposed() } else { j })
}

/// Two-mode coefficients of `Û_BS(θ)(𝕀⊗Ŝ(ν))|φ⟩|γ⟩`, parity applied to `φ`
/// when the map is reflected.
pub fn output_coefficients(
    phi: &FockKet,
    gamma: &FockKet,
    map: &BeamSplitterMap,
) -> Result<DMatrix<c64>> {
    let phi = if map.reflected {
        parity_apply(phi)
    } else {
        phi.clone()
    };
    let squeezed = if map.nu == 1.0 {
        gamma.clone()
    } else {
        squeeze_growing(gamma, map.nu)?
    };
    for k in [&phi, &squeezed] {
        let lost = (1.0 - k.captured_weight).max(k.tail_weight());
        if lost > TRUNCATION_LIMIT {
            return Err(Error::Truncation {
                tail: lost,
                limit: TRUNCATION_LIMIT,
            });
        }
    }
    let input = DMatrix::from_fn(phi.dim(), squeezed.dim(), |n, m| {
        phi.coeffs[n] * squeezed.coeffs[m]
    });
    let bs = BeamSplitter::new(map.theta, phi.dim() + squeezed.dim() - 2);
    Ok(bs.apply(&input))
}

/// Squeezes `k`, widening the output until it holds all but `1e-13` of
/// the squeezed state or reaches `4N + 60` levels.
fn squeeze_growing(k: &FockKet, nu: f64) -> Result<FockKet> {
    let cap = 4 * k.dim() + 60;
    let mut dim = k.dim();
    loop {
        let out = squeeze_ket(k, nu, dim)?;
        if 1.0 - out.captured_weight / k.captured_weight < 1e-13 || dim >= cap {
            return Ok(out);
        }
        dim = (dim + 20).min(cap);
    }
}

/// `√(κσ) Σ cₙₘ ψₙ(κ uᵢ) ψₘ(σ vⱼ)`.
pub(crate) fn expand_in_hermite(
    c: &DMatrix<c64>,
    kappa: f64,
    sigma: f64,
    us: &[f64],
    vs: &[f64],
) -> DMatrix<c64> {
    let scaled_u: Vec<f64> = us.iter().map(|u| kappa * u).collect();
    let scaled_v: Vec<f64> = vs.iter().map(|v| sigma * v).collect();
    let hu = hermite_table(c.nrows(), &scaled_u);
    let hv = hermite_table(c.ncols(), &scaled_v);
    let hu = DMatrix::from_fn(us.len(), c.nrows(), |i, n| c64::new(hu[n][i], 0.0));
    let hv = DMatrix::from_fn(c.ncols(), vs.len(), |m, j| c64::new(hv[m][j], 0.0));
    (hu * c * hv) * c64::new((kappa * sigma).sqrt(), 0.0)
}
