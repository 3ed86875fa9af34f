//! JSAs from refractive-index models, including group velocity dispersion.
//!
//! Frequencies are mapped to the dimensionless grid by
//! `ω₁ = ω̄₁ + x/τ`, `ω₂ = ω̄₂ + y/τ`, `ω₀ = ω₁ + ω₂`. The phase-matching
//! function is evaluated at `−(Δk − K)L/2` with the full mismatch
//! `Δk = k₀(ω₀) − k₁(ω₁) − k₂(ω₂)`; linearizing `k` around the central
//! frequencies turns this argument into exactly `r x + s y`.

pub mod model;

use serde::{Deserialize, Serialize};

pub use model::{omega_to_um, wavelength_to_omega, DispersionModel, IndexModel, SPEED_OF_LIGHT};

use crate::c64;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::jsa::JointAmplitude;
use crate::par;
use crate::schmidt::purity_schmidt;
use crate::spectral::SpectralFn;

/// Relative separation of `r` and `s` below which they are flagged as
/// degenerate.
pub const DEGENERACY_FLAG: f64 = 1e-3;

/// Crystal length, pulse time scale and central wavelengths.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessGeometry {
    pub length_m: f64,
    pub tau_s: f64,
    pub lambda0_m: f64,
    pub lambda1_m: f64,
    pub lambda2_m: f64,
}

impl ProcessGeometry {
    /// Degenerate down-conversion: signal and idler at twice the pump
    /// wavelength.
    pub fn degenerate(length_m: f64, tau_s: f64, pump_m: f64) -> Self {
        Self {
            length_m,
            tau_s,
            lambda0_m: pump_m,
            lambda1_m: 2.0 * pump_m,
            lambda2_m: 2.0 * pump_m,
        }
    }

    pub fn with_tau(&self, tau_s: f64) -> Self {
        Self { tau_s, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length_m > 0.0 && self.tau_s > 0.0) {
            return Err(Error::Domain(format!(
                "length and tau must be positive (got {} m, {} s)",
                self.length_m, self.tau_s
            )));
        }
        let (w0, w1, w2) = self.central_omegas();
        if !((w0 - w1 - w2).abs() <= 1e-6 * w0) {
            return Err(Error::Domain(format!(
                "central frequencies violate energy conservation: {} nm -> {} nm + {} nm",
                self.lambda0_m * 1e9,
                self.lambda1_m * 1e9,
                self.lambda2_m * 1e9
            )));
        }
        Ok(())
    }

    pub fn central_omegas(&self) -> (f64, f64, f64) {
        (
            wavelength_to_omega(self.lambda0_m),
            wavelength_to_omega(self.lambda1_m),
            wavelength_to_omega(self.lambda2_m),
        )
    }
}

/// `k` of mode `mode` at angular frequency `omega`, in 1/m.
pub fn wavevector(model: &DispersionModel, mode: usize, omega: f64) -> Result<f64> {
    model.mode(mode).wavevector(omega)
}

/// `(dk/dω)⁻¹` of mode `mode`, in m/s.
pub fn group_velocity(model: &DispersionModel, mode: usize, omega: f64) -> Result<f64> {
    model.mode(mode).group_velocity(omega)
}

/// Dimensionless group-velocity mismatches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MismatchParams {
    pub r: f64,
    pub s: f64,
    /// `|r − s| < 10⁻³ max(|r|, |s|)`, or both vanish.
    pub degenerate: bool,
}

/// `r = (L/τ)(1/2v₁ − 1/2v₀)`, `s = (L/τ)(1/2v₂ − 1/2v₀)` at the central
/// frequencies.
pub fn rs_from_physics(model: &DispersionModel, geom: &ProcessGeometry) -> Result<MismatchParams> {
    geom.validate()?;
    let (w0, w1, w2) = geom.central_omegas();
    let k0 = model.mode0.inverse_group_velocity(w0)?;
    let k1 = model.mode1.inverse_group_velocity(w1)?;
    let k2 = model.mode2.inverse_group_velocity(w2)?;
    let scale = geom.length_m / (2.0 * geom.tau_s);
    let (r, s) = (scale * (k1 - k0), scale * (k2 - k0));
    let big = r.abs().max(s.abs());
    let degenerate = big == 0.0 || (r - s).abs() < DEGENERACY_FLAG * big;
    Ok(MismatchParams { r, s, degenerate })
}

/// `(k₀(ω₀) − k₁(ω₁) − k₂(ω₂)) L/2` with no grating.
pub fn phase_mismatch_unpoled(
    model: &DispersionModel,
    geom: &ProcessGeometry,
    w0: f64,
    w1: f64,
    w2: f64,
) -> Result<f64> {
    let dk =
        model.mode0.wavevector(w0)? - model.mode1.wavevector(w1)? - model.mode2.wavevector(w2)?;
    Ok(dk * geom.length_m / 2.0)
}

/// Grating wavevector `K`: `2π/Λ` for a given poling period, otherwise the
/// central mismatch (ideal quasi-phase-matching).
pub fn grating_wavevector(model: &DispersionModel, geom: &ProcessGeometry) -> Result<f64> {
    match model.poling_period_m {
        Some(p) => Ok(2.0 * std::f64::consts::PI / p),
        None => {
            let (w0, w1, w2) = geom.central_omegas();
            Ok(model.mode0.wavevector(w0)?
                - model.mode1.wavevector(w1)?
                - model.mode2.wavevector(w2)?)
        }
    }
}

/// Full mismatch argument `(Δk − K) L/2`.
pub fn phase_mismatch_full(
    model: &DispersionModel,
    geom: &ProcessGeometry,
    w0: f64,
    w1: f64,
    w2: f64,
) -> Result<f64> {
    let raw = phase_mismatch_unpoled(model, geom, w0, w1, w2)?;
    Ok(raw - grating_wavevector(model, geom)? * geom.length_m / 2.0)
}

/// Phase-matching profile of the nonlinear region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PmfProfile {
    /// Uniform poling: `sinc(u)/√π`.
    Tophat,
    /// Gaussian poling: `e^{−u²/2}/π^{1/4}`.
    Gaussian,
}

impl PmfProfile {
    pub fn spectral(&self) -> SpectralFn {
        match self {
            PmfProfile::Tophat => SpectralFn::sinc(1.0),
            PmfProfile::Gaussian => SpectralFn::gaussian(),
        }
    }
}

/// Everything needed to evaluate the JSA on a grid, with ranges checked.
struct Kernel<'a> {
    model: &'a DispersionModel,
    geom: ProcessGeometry,
    w: (f64, f64, f64),
    grating_half: f64,
}

impl<'a> Kernel<'a> {
    fn new(
        model: &'a DispersionModel,
        geom: &ProcessGeometry,
        gx: &Grid1D,
        gy: &Grid1D,
    ) -> Result<Self> {
        geom.validate()?;
        let w = geom.central_omegas();
        let t = geom.tau_s;
        for (mode, lo, hi) in [
            (1, w.1 + gx.min / t, w.1 + gx.max / t),
            (2, w.2 + gy.min / t, w.2 + gy.max / t),
            (0, w.0 + (gx.min + gy.min) / t, w.0 + (gx.max + gy.max) / t),
        ] {
            if !(lo > 0.0) {
                let [a, b] = model.mode(mode).valid_um();
                return Err(Error::ModelRange {
                    lambda_um: f64::INFINITY,
                    lo: a,
                    hi: b,
                });
            }
            model.mode(mode).wavevector(lo)?;
            model.mode(mode).wavevector(hi)?;
        }
        let grating_half = grating_wavevector(model, geom)? * geom.length_m / 2.0;
        Ok(Self {
            model,
            geom: *geom,
            w,
            grating_half,
        })
    }

    /// `−(Δk − K)L/2` at dimensionless `(x, y)`; inside the checked ranges
    /// this cannot fail.
    fn argument(&self, x: f64, y: f64) -> f64 {
        let t = self.geom.tau_s;
        let (w1, w2) = (self.w.1 + x / t, self.w.2 + y / t);
        let half = self.geom.length_m / 2.0;
        let k = |m: &IndexModel, w: f64| m.wavevector(w).unwrap_or(f64::NAN);
        let dk =
            k(&self.model.mode0, w1 + w2) - k(&self.model.mode1, w1) - k(&self.model.mode2, w2);
        -(dk * half - self.grating_half)
    }
}

/// Options shared by the GVD JSA builders.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GvdOptions {
    /// Square the pump amplitude, as for a single-pump χ⁽³⁾ process.
    pub chi3: bool,
}

fn pump_factor(pump: &SpectralFn, v: f64, chi3: bool) -> c64 {
    let p = pump.eval(v);
    if chi3 {
        p * p
    } else {
        p
    }
}

/// JSA with the phase-matching function evaluated at the full mismatch.
/// The pump still depends on `x + y` only.
pub fn build_jsa_gvd(
    model: &DispersionModel,
    geom: &ProcessGeometry,
    pmf: &SpectralFn,
    pump: &SpectralFn,
    gx: Grid1D,
    gy: Grid1D,
    opts: GvdOptions,
) -> Result<JointAmplitude> {
    pmf.validate()?;
    pump.validate()?;
    let rs = rs_from_physics(model, geom)?;
    if (rs.r - rs.s).abs() < 1e-12 {
        return Err(Error::DegenerateGroupVelocities { r: rs.r, s: rs.s });
    }
    let kernel = Kernel::new(model, geom, &gx, &gy)?;
    JointAmplitude::from_fn(gx, gy, |x, y| {
        pmf.eval(kernel.argument(x, y)) * pump_factor(pump, x + y, opts.chi3)
    })
}

/// The same JSA with the mismatch linearized to `r x + s y`.
pub fn build_jsa_linear(
    pmf: &SpectralFn,
    pump: &SpectralFn,
    rs: MismatchParams,
    gx: Grid1D,
    gy: Grid1D,
    opts: GvdOptions,
) -> Result<JointAmplitude> {
    if (rs.r - rs.s).abs() < 1e-12 {
        return Err(Error::DegenerateGroupVelocities { r: rs.r, s: rs.s });
    }
    JointAmplitude::from_fn(gx, gy, |x, y| {
        pmf.eval(rs.r * x + rs.s * y) * pump_factor(pump, x + y, opts.chi3)
    })
}

/// Pump wavelength (m) at which pump and idler group velocities coincide
/// for degenerate down-conversion, so that `s = 0`. Bisection on
/// `[lo_m, hi_m]`.
pub fn group_velocity_matched_pump(model: &DispersionModel, lo_m: f64, hi_m: f64) -> Result<f64> {
    let f = |l: f64| -> Result<f64> {
        let w = wavelength_to_omega(l);
        Ok(model.mode0.inverse_group_velocity(w)? - model.mode2.inverse_group_velocity(w / 2.0)?)
    };
    let (mut a, mut b) = (lo_m, hi_m);
    let (mut fa, fb) = (f(a)?, f(b)?);
    if fa == 0.0 && fb == 0.0 {
        // Matched at both ends, as for constant group indices. Any
        // wavelength in between will do.
        return Ok(0.5 * (a + b));
    }
    if fa * fb > 0.0 {
        return Err(Error::Domain(format!(
            "no group-velocity matching between {} and {} nm",
            lo_m * 1e9,
            hi_m * 1e9
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fa * fm <= 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

/// Grid settings for [`purity_vs_r_sweep`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Half-width of the `y` window.
    pub y_half_width: f64,
    pub y_points: usize,
    /// Half-width of the `x` window around the phase-matching ridge, in
    /// units of `1/|r|`.
    pub ridge_half_width: f64,
    /// Samples per unit of `|r| x` across the window.
    pub x_density: f64,
    pub min_x_points: usize,
    pub max_x_points: usize,
    pub chi3: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            y_half_width: 6.0,
            y_points: 384,
            ridge_half_width: 11.0,
            x_density: 16.0,
            min_x_points: 256,
            max_x_points: 1024,
            chi3: false,
        }
    }
}

/// One row of the purity sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub tau_s: f64,
    pub r: f64,
    pub s: f64,
    pub purity_gvd: f64,
    pub purity_linear: f64,
}

/// Position `x₀(y)` of the phase-matching ridge, where the argument
/// vanishes, by Newton iteration from the linearized root.
fn ridge(kernel: &Kernel, rs: MismatchParams, y: f64) -> f64 {
    let mut x = -rs.s * y / rs.r;
    let h = 1e-4 / rs.r.abs().max(1.0);
    for _ in 0..50 {
        let f = kernel.argument(x, y);
        let d = (kernel.argument(x + h, y) - kernel.argument(x - h, y)) / (2.0 * h);
        if !f.is_finite() || !d.is_finite() || d == 0.0 {
            return -rs.s * y / rs.r;
        }
        let step = f / d;
        x -= step;
        if step.abs() < 1e-12 {
            break;
        }
    }
    x
}

/// Grids for one sweep point: fixed `y` window, `x` window enclosing the
/// (possibly curved) ridge over that `y` range.
pub fn sweep_grids(
    model: &DispersionModel,
    geom: &ProcessGeometry,
    cfg: &SweepConfig,
) -> Result<(Grid1D, Grid1D)> {
    let rs = rs_from_physics(model, geom)?;
    let gy = Grid1D::symmetric(cfg.y_half_width, cfg.y_points)?;
    let scale = rs.r.abs().max(1.0);
    let half = cfg.ridge_half_width / scale;
    // The ridge is probed with a provisional x window just wide enough for
    // the range check.
    let probe = Grid1D::symmetric(half, 3)?;
    let kernel = Kernel::new(model, geom, &probe, &gy)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for y in Grid1D::symmetric(cfg.y_half_width, 49)?.points() {
        let x0 = ridge(&kernel, rs, y);
        if x0.is_finite() {
            lo = lo.min(x0);
            hi = hi.max(x0);
        }
    }
    if !lo.is_finite() {
        lo = 0.0;
        hi = 0.0;
    }
    let (xmin, xmax) = (lo - half, hi + half);
    let n = (((xmax - xmin) * scale * cfg.x_density).ceil() as usize)
        .clamp(cfg.min_x_points, cfg.max_x_points);
    Ok((Grid1D::new(xmin, xmax, n)?, gy))
}

/// Purity with and without dispersion beyond group velocity for each `τ`.
pub fn purity_vs_r_sweep(
    model: &DispersionModel,
    base: &ProcessGeometry,
    taus: &[f64],
    pmf: &SpectralFn,
    pump: &SpectralFn,
    cfg: &SweepConfig,
) -> Result<Vec<SweepRow>> {
    let opts = GvdOptions { chi3: cfg.chi3 };
    let rows = par::map_slice(taus, |&tau| -> Result<SweepRow> {
        let geom = base.with_tau(tau);
        let rs = rs_from_physics(model, &geom)?;
        let (gx, gy) = sweep_grids(model, &geom, cfg)?;
        let gvd = build_jsa_gvd(model, &geom, pmf, pump, gx, gy, opts)?;
        let lin = build_jsa_linear(pmf, pump, rs, gx, gy, opts)?;
        Ok(SweepRow {
            tau_s: tau,
            r: rs.r,
            s: rs.s,
            purity_gvd: purity_schmidt(&gvd)?.purity,
            purity_linear: purity_schmidt(&lin)?.purity,
        })
    });
    rows.into_iter().collect()
}

/// Pulse time scales that give the requested `r` values for `base`.
pub fn taus_for_r(
    model: &DispersionModel,
    base: &ProcessGeometry,
    r_values: &[f64],
) -> Result<Vec<f64>> {
    let rs = rs_from_physics(model, base)?;
    if rs.r == 0.0 {
        return Err(Error::DegenerateGroupVelocities { r: rs.r, s: rs.s });
    }
    Ok(r_values.iter().map(|&r| base.tau_s * rs.r / r).collect())
}
