//! Grid construction of joint spectral amplitudes.

use nalgebra::DMatrix;

use crate::c64;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::par;
use crate::spectral::SpectralFn;

/// Relative boundary amplitude above which a grid is flagged as too narrow.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;

/// Below this separation `r` and `s` count as equal.
const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// `Ψ(xᵢ, yⱼ)` on a rectangular grid, stored with rows indexed by `x`.
#[derive(Clone, Debug)]
pub struct JointAmplitude {
    pub values: DMatrix<c64>,
    pub x_grid: Grid1D,
    pub y_grid: Grid1D,
    /// Set when the amplitude on the grid edge exceeds
    /// [`BOUNDARY_TOLERANCE`] times the peak.
    pub boundary_warning: bool,
}

impl JointAmplitude {
    /// Samples `f` on the grid and renormalizes so that
    /// `Σ|Ψᵢⱼ|² Δx Δy = 1`.
    pub fn from_fn<F>(x_grid: Grid1D, y_grid: Grid1D, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> c64 + Sync + Send,
    {
        x_grid.validate()?;
        y_grid.validate()?;
        let ys = y_grid.points();
        let rows = par::map_range(x_grid.n_points, |i| {
            let x = x_grid.point(i);
            ys.iter().map(|&y| f(x, y)).collect::<Vec<_>>()
        });
        let values = DMatrix::from_fn(x_grid.n_points, y_grid.n_points, |i, j| rows[i][j]);
        Self::from_matrix(values, x_grid, y_grid)
    }

    /// Wraps an existing sample matrix, renormalizing it on the grid.
    pub fn from_matrix(mut values: DMatrix<c64>, x_grid: Grid1D, y_grid: Grid1D) -> Result<Self> {
        if values.nrows() != x_grid.n_points || values.ncols() != y_grid.n_points {
            return Err(Error::Format(format!(
                "matrix is {}x{} but grids have {}x{} points",
                values.nrows(),
                values.ncols(),
                x_grid.n_points,
                y_grid.n_points
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::NumericalFailure("non-finite JSA entry".into()));
        }
        let norm =
            values.iter().map(|v| v.norm_sqr()).sum::<f64>() * x_grid.spacing() * y_grid.spacing();
        if !(norm > 0.0) {
            return Err(Error::InvalidSpectralFn("JSA vanishes on the grid".into()));
        }
        values /= c64::new(norm.sqrt(), 0.0);
        let boundary_warning = boundary_exceeds(&values, BOUNDARY_TOLERANCE);
        Ok(Self {
            values,
            x_grid,
            y_grid,
            boundary_warning,
        })
    }

    /// `Σ|Ψᵢⱼ|² Δx Δy`.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell_area()
    }

    pub fn cell_area(&self) -> f64 {
        self.x_grid.spacing() * self.y_grid.spacing()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// Exchanges the roles of `x` and `y`.
    pub fn transposed(&self) -> Self {
        Self {
            values: self.values.transpose(),
            x_grid: self.y_grid,
            y_grid: self.x_grid,
            boundary_warning: self.boundary_warning,
        }
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn boundary_exceeds(values: &DMatrix<c64>, rel: f64) -> bool {
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let (n, m) = values.shape();
    let limit = rel * peak;
    let row_hit = |i: usize| (0..m).any(|j| values[(i, j)].norm() > limit);
    let col_hit = |j: usize| (0..n).any(|i| values[(i, j)].norm() > limit);
    row_hit(0) || row_hit(n - 1) || col_hit(0) || col_hit(m - 1)
}

fn check_inputs(pmf: &SpectralFn, pump: &SpectralFn, r: f64, s: f64) -> Result<()> {
    if !(r.is_finite() && s.is_finite()) {
        return Err(Error::Domain(format!(
            "r and s must be finite (got {r}, {s})"
        )));
    }
    if (r - s).abs() < DEGENERACY_TOLERANCE {
        return Err(Error::DegenerateGroupVelocities { r, s });
    }
    pmf.validate()?;
    pump.validate()
}

/// `Ψ(x, y) = √|r−s| φ(r x + s y) γ(x + y)`, renormalized on the grid.
pub fn build_jsa(
    pmf: &SpectralFn,
    pump: &SpectralFn,
    r: f64,
    s: f64,
    gx: Grid1D,
    gy: Grid1D,
) -> Result<JointAmplitude> {
    check_inputs(pmf, pump, r, s)?;
    let pref = (r - s).abs().sqrt();
    JointAmplitude::from_fn(gx, gy, |x, y| {
        pmf.eval(r * x + s * y) * pump.eval(x + y) * pref
    })
}

/// Frequency-conversion transfer function
/// `Ψ̃(x, y) = √|r−s| φ(r x − s y) γ*(x − y)`.
pub fn to_frequency_conversion(
    pmf: &SpectralFn,
    pump: &SpectralFn,
    r: f64,
    s: f64,
    gx: Grid1D,
    gy: Grid1D,
) -> Result<JointAmplitude> {
    check_inputs(pmf, pump, r, s)?;
    let pref = (r - s).abs().sqrt();
    JointAmplitude::from_fn(gx, gy, |x, y| {
        pmf.eval(r * x - s * y) * pump.eval(x - y).conj() * pref
    })
}

/// Orientation of the phase-matching ridge, `atan(−s/r)`.
pub fn pmf_angle(r: f64, s: f64) -> Result<f64> {
    if r == 0.0 {
        return Err(Error::UndefinedAngle);
    }
    Ok((-s / r).atan())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid1D {
        Grid1D::symmetric(8.0, 128).unwrap()
    }

    #[test]
    fn normalized_on_the_grid() {
        let j = build_jsa(
            &SpectralFn::sinc(1.0),
            &SpectralFn::gaussian(),
            1.0,
            0.5,
            grid(),
            grid(),
        )
        .unwrap();
        assert!((j.norm_sq() - 1.0).abs() < 1e-12);
        assert!(j.boundary_warning, "sinc tails reach the edge");
    }

    #[test]
    fn gaussian_fits_inside_default_grid() {
        let g = Grid1D::default_for(1.0);
        let j = build_jsa(
            &SpectralFn::gaussian(),
            &SpectralFn::gaussian(),
            1.0,
            -1.0,
            g,
            g,
        )
        .unwrap();
        assert!(!j.boundary_warning);
    }

    #[test]
    fn entries_follow_the_product_form() {
        let (pmf, pump) = (SpectralFn::sech(), SpectralFn::gaussian());
        let g = Grid1D::symmetric(12.0, 161).unwrap();
        let j = build_jsa(&pmf, &pump, 2.0, -0.3, g, g).unwrap();
        // The analytic prefactor already normalizes on a wide grid.
        let (x, y) = (g.point(70), g.point(90));
        let expect = pmf.eval(2.0 * x - 0.3 * y) * pump.eval(x + y) * 2.3f64.sqrt();
        assert!((j.values[(70, 90)] - expect).norm() < 1e-8);
    }

    #[test]
    fn degenerate_group_velocities() {
        let e = build_jsa(
            &SpectralFn::gaussian(),
            &SpectralFn::gaussian(),
            0.7,
            0.7,
            grid(),
            grid(),
        )
        .unwrap_err();
        assert_eq!(e.kind(), "DegenerateGroupVelocities");
    }

    #[test]
    fn invalid_spectral_function() {
        let bad = SpectralFn::Sech { width: -1.0 };
        let e = build_jsa(&bad, &SpectralFn::gaussian(), 1.0, 0.0, grid(), grid()).unwrap_err();
        assert_eq!(e.kind(), "InvalidSpectralFn");
    }

    #[test]
    fn angles() {
        assert!((pmf_angle(1.0, -1.0).unwrap() - PI / 4.0).abs() < 1e-15);
        assert_eq!(pmf_angle(1.0, 0.0).unwrap(), 0.0);
        assert!((pmf_angle(1.0, 0.5).unwrap() + 0.463_647_609).abs() < 1e-9);
        assert!(matches!(pmf_angle(0.0, 1.0), Err(Error::UndefinedAngle)));
    }

    #[test]
    fn conversion_reverses_the_y_axis_for_real_pumps() {
        let (pmf, pump) = (SpectralFn::sinc(1.0), SpectralFn::gaussian());
        let a = build_jsa(&pmf, &pump, 1.0, -1.0, grid(), grid()).unwrap();
        let b = to_frequency_conversion(&pmf, &pump, 1.0, -1.0, grid(), grid()).unwrap();
        let n = grid().n_points;
        for (i, j) in [(3, 5), (60, 64), (100, 17)] {
            assert!((a.values[(i, j)] - b.values[(i, n - 1 - j)]).norm() < 1e-12);
        }
    }
}
