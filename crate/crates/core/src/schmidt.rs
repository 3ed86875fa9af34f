//! Schmidt decomposition and spectral purity of a sampled JSA.

use nalgebra::{DMatrix, SVD};
use serde::{Deserialize, Serialize};

use crate::c64;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::jsa::JointAmplitude;
use crate::par;

/// Normalized Schmidt coefficients and the purity they imply.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtResult {
    /// `λₖ` in descending order with `Σλₖ² = 1`.
    pub singular_values: Vec<f64>,
    /// `Σλₖ⁴`.
    pub purity: f64,
    /// `1 / purity`, the effective number of mode pairs.
    pub schmidt_number: f64,
}

impl SchmidtResult {
    /// Builds the result from unnormalized singular values.
    pub fn from_singular_values(mut sv: Vec<f64>) -> Result<Self> {
        sv.sort_by(|a, b| b.total_cmp(a));
        let norm = sv.iter().map(|s| s * s).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NumericalFailure("singular values vanish".into()));
        }
        for s in &mut sv {
            *s /= norm;
        }
        let purity = sv.iter().map(|s| s.powi(4)).sum::<f64>();
        Ok(Self {
            singular_values: sv,
            purity,
            schmidt_number: 1.0 / purity,
        })
    }

    /// `λ₁²`, the weight of the leading mode pair.
    pub fn leading_weight(&self) -> f64 {
        self.singular_values.first().map_or(0.0, |l| l * l)
    }
}

/// Orthonormal mode functions with `Ψ(x, y) ≈ Σₖ λₖ uₖ(x) vₖ(y)`.
#[derive(Clone, Debug)]
pub struct SchmidtModes {
    pub coefficients: Vec<f64>,
    /// Column `k` holds `uₖ(xᵢ)`, normalized so that `Σ|uₖ|²Δx = 1`.
    pub modes_x: DMatrix<c64>,
    /// Column `k` holds `vₖ(yⱼ)`.
    pub modes_y: DMatrix<c64>,
    pub x_grid: Grid1D,
    pub y_grid: Grid1D,
}

impl SchmidtModes {
    /// Rebuilds the sampled amplitude from the leading `rank` mode pairs.
    pub fn reconstruct(&self, rank: usize) -> DMatrix<c64> {
        let k = rank.min(self.coefficients.len());
        let mut out = DMatrix::zeros(self.modes_x.nrows(), self.modes_y.nrows());
        for (idx, &lam) in self.coefficients.iter().enumerate().take(k) {
            let u = self.modes_x.column(idx);
            let v = self.modes_y.column(idx);
            out += (u * v.transpose()) * c64::new(lam, 0.0);
        }
        out
    }
}

fn check_finite(j: &JointAmplitude) -> Result<()> {
    if j.values
        .iter()
        .all(|v| v.re.is_finite() && v.im.is_finite())
    {
        Ok(())
    } else {
        Err(Error::NumericalFailure("non-finite JSA entry".into()))
    }
}

fn svd_iterations(m: &DMatrix<c64>) -> usize {
    200 * m.nrows().max(m.ncols()).max(10)
}

/// `[[Re, −Im], [Im, Re]]`. Every singular value of `m` appears twice in it.
fn real_embedding(m: &DMatrix<c64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, k| {
        let v = m[(i % r, k % c)];
        match (i < r, k < c) {
            (true, true) | (false, false) => v.re,
            (true, false) => -v.im,
            (false, true) => v.im,
        }
    })
}

fn is_real(m: &DMatrix<c64>) -> bool {
    m.iter().all(|v| v.im == 0.0)
}

/// Singular values of a complex matrix, always from a real SVD.
///
/// nalgebra's complex bidiagonalization loses about five digits on some
/// chirped amplitudes, so complex input goes through the real embedding.
pub(crate) fn singular_values(m: &DMatrix<c64>) -> Result<Vec<f64>> {
    let niter = svd_iterations(m);
    if is_real(m) {
        let re = m.map(|v| v.re);
        return SVD::try_new(re, false, false, f64::EPSILON, niter)
            .map(|s| s.singular_values.as_slice().to_vec())
            .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()));
    }
    let svd = SVD::try_new(real_embedding(m), false, false, f64::EPSILON, 2 * niter)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let mut doubled = svd.singular_values.as_slice().to_vec();
    doubled.sort_by(|a, b| b.total_cmp(a));
    Ok(doubled.into_iter().step_by(2).collect())
}

/// Purity from the singular values of `Ψᵢⱼ √(ΔxΔy)`.
pub fn purity_schmidt(j: &JointAmplitude) -> Result<SchmidtResult> {
    check_finite(j)?;
    let w = j.cell_area().sqrt();
    let sv = singular_values(&j.values)?;
    SchmidtResult::from_singular_values(sv.into_iter().map(|s| s * w).collect())
}

/// Purity by direct quadrature of `∫dx dx′ |ρ(x, x′)|²` with
/// `ρ(x, x′) = ∫dy Ψ(x, y) Ψ*(x′, y)`.
///
/// Costs `O(nₓ² n_y)` and shares no code with the SVD path.
pub fn purity_integral(j: &JointAmplitude) -> Result<f64> {
    check_finite(j)?;
    let (nx, ny) = j.values.shape();
    let (dx, dy) = (j.x_grid.spacing(), j.y_grid.spacing());
    // Row-major copy so the inner y loop is contiguous.
    let rows: Vec<Vec<c64>> = (0..nx)
        .map(|i| j.values.row(i).iter().copied().collect())
        .collect();
    let total = par::sum_range(nx, |a| {
        let ra = &rows[a];
        let mut acc = 0.0;
        for rb in &rows {
            let mut rho = c64::new(0.0, 0.0);
            for k in 0..ny {
                rho += ra[k] * rb[k].conj();
            }
            acc += (rho * dy).norm_sqr();
        }
        acc
    });
    let norm = j.norm_sq();
    Ok(total * dx * dx / (norm * norm))
}

/// Full Schmidt decomposition on the grid.
pub fn schmidt_decompose(j: &JointAmplitude) -> Result<SchmidtModes> {
    check_finite(j)?;
    let (dx, dy) = (j.x_grid.spacing(), j.y_grid.spacing());
    let a = &j.values * c64::new((dx * dy).sqrt(), 0.0);
    let (sigma, u, v) = if is_real(&a) {
        real_factors(&a)?
    } else {
        complex_factors(&a)?
    };
    let norm = sigma.iter().map(|s| s * s).sum::<f64>().sqrt();
    let coefficients = sigma.iter().map(|s| s / norm).collect();
    let modes_x = u / c64::new(dx.sqrt(), 0.0);
    let modes_y = v / c64::new(dy.sqrt(), 0.0);
    Ok(SchmidtModes {
        coefficients,
        modes_x,
        modes_y,
        x_grid: j.x_grid,
        y_grid: j.y_grid,
    })
}

type Factors = (Vec<f64>, DMatrix<c64>, DMatrix<c64>);

fn real_factors(a: &DMatrix<c64>) -> Result<Factors> {
    let niter = svd_iterations(a);
    let svd = SVD::try_new(a.map(|v| v.re), true, true, f64::EPSILON, niter)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => {
            return Err(Error::NumericalFailure(
                "SVD returned no singular vectors".into(),
            ))
        }
    };
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&p, &q| svd.singular_values[q].total_cmp(&svd.singular_values[p]));
    let sigma = order.iter().map(|&k| svd.singular_values[k]).collect();
    let um = DMatrix::from_fn(u.nrows(), order.len(), |i, c| {
        c64::new(u[(i, order[c])], 0.0)
    });
    let vm = DMatrix::from_fn(v_t.ncols(), order.len(), |i, c| {
        c64::new(v_t[(order[c], i)], 0.0)
    });
    Ok((sigma, um, vm))
}

/// Left vectors `[p; q]` of the embedding map to `p + iq`, a unit multiple of
/// a left vector of `a`. Each one shows up twice, so the copies are dropped by
/// Gram-Schmidt and the right vectors come from `vₖ = Aᵀ ūₖ / σₖ`.
fn complex_factors(a: &DMatrix<c64>) -> Result<Factors> {
    let (r, c) = a.shape();
    let rank = r.min(c);
    let niter = 2 * svd_iterations(a);
    let svd = SVD::try_new(real_embedding(a), true, false, f64::EPSILON, niter)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let ue = svd
        .u
        .ok_or_else(|| Error::NumericalFailure("SVD returned no singular vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&p, &q| svd.singular_values[q].total_cmp(&svd.singular_values[p]));

    let mut sigma = Vec::with_capacity(rank);
    let mut cols: Vec<nalgebra::DVector<c64>> = Vec::with_capacity(rank);
    for threshold in [0.5, 1e-3] {
        for &k in &order {
            if cols.len() == rank {
                break;
            }
            let mut w = nalgebra::DVector::from_fn(r, |i, _| c64::new(ue[(i, k)], ue[(i + r, k)]));
            for q in &cols {
                let proj = q.dotc(&w);
                w -= q * proj;
            }
            let len = w.norm();
            if len > threshold {
                cols.push(w / c64::new(len, 0.0));
                sigma.push(svd.singular_values[k]);
            }
        }
    }
    if cols.len() < rank {
        return Err(Error::NumericalFailure(
            "could not separate complex singular vectors".into(),
        ));
    }
    // Keep the pairing with sigma but restore descending order after the second pass.
    let mut idx: Vec<usize> = (0..rank).collect();
    idx.sort_by(|&p, &q| sigma[q].total_cmp(&sigma[p]));
    let u = DMatrix::from_fn(r, rank, |i, k| cols[idx[k]][i]);
    let sigma: Vec<f64> = idx.iter().map(|&k| sigma[k]).collect();
    let mut v = a.transpose() * u.map(|z| z.conj());
    for (k, mut col) in v.column_iter_mut().enumerate() {
        let len = col.norm();
        if len > f64::MIN_POSITIVE && sigma[k] > 0.0 {
            col /= c64::new(len, 0.0);
        }
    }
    Ok((sigma, u, v))
}
