//! Squeezing and beam-splitter operators on truncated number bases.

use nalgebra::{DMatrix, DVector};

use crate::c64;
use crate::error::{Error, Result};
use crate::fock::ket::FockKet;
use crate::schmidt::singular_values;

/// Extra levels kept while exponentiating a truncated squeeze generator.
pub const SQUEEZE_BUFFER: usize = 20;

/// `(ln μ/2)(e^{−iφ}â² − e^{iφ}â†²)` on `dim` levels.
fn squeeze_generator(mu: f64, phase: f64, dim: usize) -> DMatrix<c64> {
    let half = 0.5 * mu.ln();
    let mut g = DMatrix::zeros(dim, dim);
    for n in 0..dim.saturating_sub(2) {
        let amp = ((n + 1) as f64 * (n + 2) as f64).sqrt() * half;
        g[(n, n + 2)] = c64::from_polar(amp, -phase);
        g[(n + 2, n)] = -c64::from_polar(amp, phase);
    }
    g
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "squeeze factor must be positive (got {mu})"
        )))
    }
}

/// `Ŝ(μ) = exp((ln μ/2)(â² − â†²))` on `dim` levels.
///
/// The generator is exponentiated with [`SQUEEZE_BUFFER`] extra levels and
/// the result cropped, so low rows are accurate while the top rows carry
/// truncation error.
pub fn squeeze_operator(mu: f64, dim: usize) -> Result<DMatrix<c64>> {
    squeeze_operator_phase(mu, 0.0, dim)
}

/// Squeezing along a quadrature rotated by `phase`.
pub fn squeeze_operator_phase(mu: f64, phase: f64, dim: usize) -> Result<DMatrix<c64>> {
    check_mu(mu)?;
    let big = squeeze_generator(mu, phase, dim + SQUEEZE_BUFFER).exp();
    Ok(big.view((0, 0), (dim, dim)).into_owned())
}

/// Applies `Ŝ(μ)` to `k`, returning `out_dim` levels renormalized.
///
/// The operator is built large enough to hold both input and output, and
/// the weight that leaves the first `out_dim` levels is recorded in
/// `captured_weight`.
pub fn squeeze_ket(k: &FockKet, mu: f64, out_dim: usize) -> Result<FockKet> {
    check_mu(mu)?;
    let dim = k.dim().max(out_dim) + SQUEEZE_BUFFER;
    let big = squeeze_generator(mu, 0.0, dim + SQUEEZE_BUFFER).exp();
    let op = big.view((0, 0), (dim, dim));
    let v = DVector::from_iterator(dim, k.resized(dim).coeffs);
    let out = op * &v;
    let kept: Vec<c64> = out.iter().take(out_dim).copied().collect();
    let captured = kept.iter().map(|c| c.norm_sqr()).sum::<f64>() / v.norm_squared();
    let mut ket = FockKet::new(kept)?;
    ket.captured_weight = k.captured_weight * captured.min(1.0);
    Ok(ket)
}

/// `Û_BS(θ) = exp(θ(â†b̂ − âb̂†))`, stored block by block.
///
/// The generator conserves `n_a + n_b`, so on the subspace of total
/// number `K`, spanned by `|n, K−n⟩`, it is a real antisymmetric tridiagonal
/// `(K+1)×(K+1)` matrix. Each block is exponentiated exactly, with no
/// truncation in either mode. In this convention `Û†âÛ = â cos θ + b̂ sin θ`,
/// and a product wavefunction `ψ(x)ψ′(y)` maps to
/// `ψ(x cos θ − y sin θ) ψ′(y cos θ + x sin θ)`.
#[derive(Clone, Debug)]
pub struct BeamSplitter {
    pub theta: f64,
    blocks: Vec<DMatrix<f64>>,
}

impl BeamSplitter {
    /// Precomputes the blocks for total photon numbers `0..=max_total`.
    pub fn new(theta: f64, max_total: usize) -> Self {
        let blocks = (0..=max_total)
            .map(|k| {
                let mut g = DMatrix::zeros(k + 1, k + 1);
                for n in 0..k {
                    let amp = theta * ((n + 1) as f64 * (k - n) as f64).sqrt();
                    g[(n + 1, n)] = amp;
                    g[(n, n + 1)] = -amp;
                }
                g.exp()
            })
            .collect();
        Self { theta, blocks }
    }

    /// Beam splitter able to act exactly on `dim × dim` coefficient matrices.
    pub fn for_dim(theta: f64, dim: usize) -> Self {
        Self::new(theta, 2 * dim.max(1) - 2)
    }

    pub fn max_total(&self) -> usize {
        self.blocks.len() - 1
    }

    /// Block for total number `k`, indexed by the photon number in mode `a`.
    pub fn block(&self, k: usize) -> &DMatrix<f64> {
        &self.blocks[k]
    }

    /// `Û` applied to the two-mode state with coefficients `c[(n, m)]`,
    /// returning the leading `out_dim × out_dim` coefficients. Exact when
    /// `out_dim ≥ rows + cols − 1`.
    pub fn apply_into(&self, c: &DMatrix<c64>, out_dim: usize) -> DMatrix<c64> {
        self.transform(c, out_dim, false)
    }

    /// Full output of [`apply_into`](Self::apply_into) with no truncation.
    pub fn apply(&self, c: &DMatrix<c64>) -> DMatrix<c64> {
        let out = c.nrows() + c.ncols() - 1;
        self.transform(c, out, false)
    }

    /// `Û†` applied to `c`.
    pub fn apply_adjoint_into(&self, c: &DMatrix<c64>, out_dim: usize) -> DMatrix<c64> {
        self.transform(c, out_dim, true)
    }

    fn transform(&self, c: &DMatrix<c64>, out_dim: usize, adjoint: bool) -> DMatrix<c64> {
        let (rows, cols) = c.shape();
        let top = (rows + cols).saturating_sub(2).min(2 * out_dim.max(1) - 2);
        assert!(
            top <= self.max_total(),
            "beam splitter built for total {} < {top}",
            self.max_total()
        );
        let mut out = DMatrix::zeros(out_dim, out_dim);
        let mut input = Vec::new();
        for k in 0..=top {
            // Input levels n with n < rows and k − n < cols.
            let in_lo = k.saturating_sub(cols - 1);
            let in_hi = k.min(rows - 1);
            if in_lo > in_hi {
                continue;
            }
            let out_lo = k.saturating_sub(out_dim - 1);
            let out_hi = k.min(out_dim - 1);
            if out_lo > out_hi {
                continue;
            }
            input.clear();
            input.extend((in_lo..=in_hi).map(|n| c[(n, k - n)]));
            let b = &self.blocks[k];
            for p in out_lo..=out_hi {
                let mut acc = c64::new(0.0, 0.0);
                for (q, v) in (in_lo..=in_hi).zip(&input) {
                    let u = if adjoint { b[(q, p)] } else { b[(p, q)] };
                    acc += v * u;
                }
                out[(p, k - p)] = acc;
            }
        }
        out
    }
}

/// Dense `Û_BS(θ)` on the `dim²`-dimensional product space, basis index
/// `n·dim + m` for `|n⟩⊗|m⟩`.
///
/// Entries linking states with `n + m ≥ dim` to states outside the product
/// space are cropped, so the matrix is exactly unitary on the subspace of
/// total photon number below `dim`.
pub fn beamsplitter_operator(theta: f64, dim: usize) -> DMatrix<f64> {
    let bs = BeamSplitter::for_dim(theta, dim);
    let mut u = DMatrix::zeros(dim * dim, dim * dim);
    for k in 0..=bs.max_total() {
        let lo = k.saturating_sub(dim - 1);
        let hi = k.min(dim - 1);
        for p in lo..=hi {
            for q in lo..=hi {
                u[(p * dim + (k - p), q * dim + (k - q))] = bs.blocks[k][(p, q)];
            }
        }
    }
    u
}

/// Two-mode state `Σ cₙₘ |n⟩⊗|m⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeFockState {
    pub coeffs: DMatrix<c64>,
}

impl TwoModeFockState {
    /// `|a⟩⊗|b⟩`.
    pub fn product(a: &FockKet, b: &FockKet) -> Self {
        Self {
            coeffs: DMatrix::from_fn(a.dim(), b.dim(), |n, m| a.coeffs[n] * b.coeffs[m]),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.norm_squared()
    }

    /// Applies `Ŝ(μa)⊗Ŝ(μb)` on the current dimensions.
    pub fn squeeze_local(&self, mu_a: f64, mu_b: f64) -> Result<Self> {
        let sa = squeeze_operator(mu_a, self.coeffs.nrows())?;
        let sb = squeeze_operator(mu_b, self.coeffs.ncols())?;
        Ok(Self {
            coeffs: &sa * &self.coeffs * sb.transpose(),
        })
    }

    /// Applies the beam splitter with no truncation.
    pub fn beam_split(&self, theta: f64) -> Self {
        let bs = BeamSplitter::new(theta, self.coeffs.nrows() + self.coeffs.ncols() - 2);
        Self {
            coeffs: bs.apply(&self.coeffs),
        }
    }
}

/// Purity of either reduced state: `Σσₖ⁴` over the normalized singular
/// values of the coefficient matrix.
pub fn two_mode_purity(psi: &TwoModeFockState) -> Result<f64> {
    let sv = singular_values(&psi.coeffs)?;
    let norm: f64 = sv.iter().map(|s| s * s).sum();
    if !(norm > 0.0) {
        return Err(Error::Domain("zero two-mode state".into()));
    }
    Ok(sv.iter().map(|s| (s * s / norm).powi(2)).sum())
}
