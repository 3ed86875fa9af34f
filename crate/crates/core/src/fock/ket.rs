//! Single-mode kets in a truncated number basis.

use serde::{Deserialize, Serialize};

use crate::c64;
use crate::error::{Error, Result};
use crate::fock::hermite::hermite_table;
use crate::grid::Grid1D;
use crate::spectral::{trapezoid, SpectralFn};

/// Tail or lost weight above which a ket is flagged as under-resolved.
pub const TRUNCATION_WARNING: f64 = 0.01;

/// Number of top levels counted by [`FockKet::tail_weight`].
const TAIL_LEVELS: usize = 5;

/// `Σₙ cₙ|n⟩` for `n < N`.
///
/// Serializes as `{"n": N, "coeffs": [[re, im], …]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "KetJson", try_from = "KetJson")]
pub struct FockKet {
    pub coeffs: Vec<c64>,
    /// Squared norm the ket had before truncation and renormalization,
    /// relative to the exact (untruncated) state. `1` when nothing was lost.
    pub captured_weight: f64,
}

#[derive(Serialize, Deserialize)]
struct KetJson {
    n: usize,
    coeffs: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    captured_weight: Option<f64>,
}

impl From<FockKet> for KetJson {
    fn from(k: FockKet) -> Self {
        KetJson {
            n: k.coeffs.len(),
            coeffs: k.coeffs.iter().map(|c| [c.re, c.im]).collect(),
            captured_weight: Some(k.captured_weight),
        }
    }
}

impl TryFrom<KetJson> for FockKet {
    type Error = Error;

    fn try_from(j: KetJson) -> Result<Self> {
        if j.coeffs.len() != j.n {
            return Err(Error::Format(format!(
                "ket declares n = {} but has {} coefficients",
                j.n,
                j.coeffs.len()
            )));
        }
        let coeffs = j
            .coeffs
            .into_iter()
            .map(|[re, im]| c64::new(re, im))
            .collect();
        let mut k = FockKet::new(coeffs)?;
        k.captured_weight = j.captured_weight.unwrap_or(1.0);
        Ok(k)
    }
}

impl FockKet {
    /// Normalizes `coeffs` to unit norm.
    pub fn new(coeffs: Vec<c64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("ket needs at least one level".into()));
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NumericalFailure("non-finite ket coefficient".into()));
        }
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::Domain("zero ket".into()));
        }
        Ok(Self {
            coeffs: coeffs.into_iter().map(|c| c / norm).collect(),
            captured_weight: 1.0,
        })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| c64::new(c, 0.0)).collect())
    }

    /// `|n⟩` in a space of dimension `dim`.
    pub fn number(n: usize, dim: usize) -> Self {
        assert!(n < dim, "level {n} outside dimension {dim}");
        let mut coeffs = vec![c64::new(0.0, 0.0); dim];
        coeffs[n] = c64::new(1.0, 0.0);
        Self {
            coeffs,
            captured_weight: 1.0,
        }
    }

    pub fn vacuum(dim: usize) -> Self {
        Self::number(0, dim)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `Σ_{n ≥ N−5} |cₙ|²`.
    pub fn tail_weight(&self) -> f64 {
        let start = self.dim().saturating_sub(TAIL_LEVELS);
        self.coeffs[start..].iter().map(|c| c.norm_sqr()).sum()
    }

    /// True when the top levels or the discarded weight exceed
    /// [`TRUNCATION_WARNING`].
    pub fn truncation_warning(&self) -> bool {
        self.tail_weight() > TRUNCATION_WARNING || 1.0 - self.captured_weight > TRUNCATION_WARNING
    }

    /// `⟨self|other⟩`, padding the shorter ket with zeros.
    pub fn inner(&self, other: &FockKet) -> c64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `⟨b̂⟩ = Σ √(n+1) c*ₙ cₙ₊₁`.
    pub fn mean_annihilation(&self) -> c64 {
        self.coeffs
            .windows(2)
            .enumerate()
            .map(|(n, w)| ((n + 1) as f64).sqrt() * w[0].conj() * w[1])
            .sum()
    }

    /// Zero-pads or truncates to `dim` levels without renormalizing.
    pub fn resized(&self, dim: usize) -> FockKet {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(dim, c64::new(0.0, 0.0));
        FockKet {
            coeffs,
            captured_weight: self.captured_weight,
        }
    }

    /// Position wavefunction `Σ cₙ ψₙ(x)` sampled on `grid`.
    pub fn wavefunction(&self, grid: &Grid1D) -> Vec<c64> {
        let xs = grid.points();
        let table = hermite_table(self.dim(), &xs);
        (0..xs.len())
            .map(|j| {
                self.coeffs
                    .iter()
                    .zip(&table)
                    .map(|(c, row)| c * row[j])
                    .sum()
            })
            .collect()
    }

    /// The wavefunction as a sampled spectral function on `grid`.
    pub fn to_spectral(&self, grid: Grid1D) -> Result<SpectralFn> {
        SpectralFn::sampled(grid, self.wavefunction(&grid))
    }
}

/// `cₙ = ∫ψₙ(x) f(x) dx` for `n < dim`, renormalized.
///
/// The discarded weight `1 − Σ|cₙ|²` is stored in
/// [`FockKet::captured_weight`]; check [`FockKet::truncation_warning`].
pub fn project_to_fock(f: &SpectralFn, dim: usize) -> Result<FockKet> {
    f.validate()?;
    if dim == 0 {
        return Err(Error::Domain("truncation must be positive".into()));
    }
    // ψₙ is negligible beyond its turning point √(2n+1) plus a few widths.
    let window = (2.0 * dim as f64 + 1.0).sqrt() + 10.0;
    let (lo, hi) = match f {
        SpectralFn::Sampled { grid, .. } => (grid.min.max(-window), grid.max.min(window)),
        _ => (-window, window),
    };
    let step = (f.feature_scale() / 40.0).min(0.01);
    let n = (((hi - lo) / step).ceil() as usize).max(2) + 1;
    let grid = Grid1D::new(lo, hi, n)?;
    let xs = grid.points();
    let fx: Vec<c64> = xs.iter().map(|&x| f.eval(x)).collect();
    let table = hermite_table(dim, &xs);
    let h = grid.spacing();
    let coeffs: Vec<c64> = table
        .iter()
        .map(|row| {
            let re: Vec<f64> = row.iter().zip(&fx).map(|(p, v)| p * v.re).collect();
            let im: Vec<f64> = row.iter().zip(&fx).map(|(p, v)| p * v.im).collect();
            c64::new(trapezoid(&re, h), trapezoid(&im, h))
        })
        .collect();
    let captured = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let mut ket = FockKet::new(coeffs)?;
    ket.captured_weight = captured.min(1.0);
    Ok(ket)
}

/// `P̂ = exp(iπ b̂†b̂)`: `cₙ → (−1)ⁿ cₙ`, i.e. `ψ(x) → ψ(−x)`.
pub fn parity_apply(k: &FockKet) -> FockKet {
    let coeffs = k
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, &c)| if n % 2 == 0 { c } else { -c })
        .collect();
    FockKet {
        coeffs,
        captured_weight: k.captured_weight,
    }
}

/// `Ŝ(μ)|0⟩` in closed form.
///
/// See [`squeezed_vacuum_phase`].
pub fn squeezed_vacuum(mu: f64, dim: usize) -> Result<FockKet> {
    squeezed_vacuum_phase(mu, 0.0, dim)
}

/// Untruncated coefficients of `exp((ln μ/2)(e^{−iφ}â² − e^{iφ}â†²))|0⟩`
/// for levels `< dim`:
/// `c₂ₖ = (−e^{iφ} tanh r)ᵏ √((2k)!) / (2ᵏ k!) / √(cosh r)` with `r = ln μ`.
pub(crate) fn squeezed_vacuum_raw(mu: f64, phase: f64, dim: usize) -> Vec<c64> {
    let r = mu.ln();
    let step = -c64::from_polar(r.tanh(), phase);
    let mut coeffs = vec![c64::new(0.0, 0.0); dim];
    let mut c = c64::new(1.0 / r.cosh().sqrt(), 0.0);
    let mut k = 0;
    while 2 * k < dim {
        coeffs[2 * k] = c;
        k += 1;
        c *= step * ((2 * k - 1) as f64 / (2 * k) as f64).sqrt();
    }
    coeffs
}

/// Squeezed vacuum with squeezing direction rotated by `phase`. The returned
/// ket is renormalized after truncation; the lost weight is recorded in
/// `captured_weight`.
pub fn squeezed_vacuum_phase(mu: f64, phase: f64, dim: usize) -> Result<FockKet> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::Domain(format!(
            "squeeze factor must be positive (got {mu})"
        )));
    }
    let coeffs = squeezed_vacuum_raw(mu, phase, dim);
    let captured = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let mut ket = FockKet::new(coeffs)?;
    ket.captured_weight = captured.min(1.0);
    Ok(ket)
}
