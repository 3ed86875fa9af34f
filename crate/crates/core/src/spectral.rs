//! One-dimensional spectral amplitudes: pump functions `γ` and
//! phase-matching functions `φ`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::c64;
use crate::error::{Error, Result};
use crate::fock::hermite::hermite_wavefunction;
use crate::grid::Grid1D;

/// Signature of a user-supplied amplitude.
pub type AmplitudeFn = dyn Fn(f64) -> c64 + Send + Sync;

/// User-supplied amplitude with a label for diagnostics. Not serializable.
#[derive(Clone)]
pub struct CustomFn {
    pub label: String,
    pub f: Arc<AmplitudeFn>,
    /// Shortest length scale of the function, used to pick quadrature steps.
    pub scale: f64,
}

impl fmt::Debug for CustomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFn")
            .field("label", &self.label)
            .field("scale", &self.scale)
            .finish()
    }
}

/// An L²-normalized spectral amplitude.
///
/// Closed-form kinds are normalized analytically:
///
/// | kind | amplitude |
/// |------|-----------|
/// | `Gaussian { width: w, chirp: c }` | `exp(-(1 + i c) x² / 2w²) / (π^{1/4} √w)` |
/// | `Sinc { alpha: α }` | `sinc(x/α) / √(απ)`, `sinc(u) = sin(u)/u` |
/// | `Sech { width: w }` | `sech(x/w) / √(2w)` |
/// | `Hermite { order: n }` | harmonic-oscillator eigenfunction `ψₙ(x)` |
///
/// `Sampled` interpolates linearly between samples and vanishes outside its
/// grid; it is normalized by trapezoidal quadrature on construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectralFn {
    Gaussian {
        width: f64,
        #[serde(default)]
        chirp: f64,
    },
    Sinc {
        alpha: f64,
    },
    Sech {
        width: f64,
    },
    Hermite {
        order: usize,
    },
    Sampled {
        grid: Grid1D,
        values: Vec<c64>,
    },
    #[serde(skip)]
    Custom(CustomFn),
}

/// `sin(u)/u` with the removable singularity filled in.
pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-8 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

impl SpectralFn {
    /// Unit-width, unchirped Gaussian `exp(-x²/2)/π^{1/4}`.
    pub fn gaussian() -> Self {
        SpectralFn::Gaussian {
            width: 1.0,
            chirp: 0.0,
        }
    }

    /// `sinc(x/α)/√(απ)`.
    pub fn sinc(alpha: f64) -> Self {
        SpectralFn::Sinc { alpha }
    }

    pub fn sech() -> Self {
        SpectralFn::Sech { width: 1.0 }
    }

    /// Samples `values` on `grid` and rescales them to unit L² norm.
    pub fn sampled(grid: Grid1D, values: Vec<c64>) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.n_points {
            return Err(Error::InvalidSpectralFn(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.n_points
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::InvalidSpectralFn("non-finite sample".into()));
        }
        let norm = trapezoid(
            &values.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>(),
            grid.spacing(),
        );
        if !(norm > 0.0) {
            return Err(Error::InvalidSpectralFn(
                "sampled function has zero norm".into(),
            ));
        }
        let scale = norm.sqrt().recip();
        Ok(SpectralFn::Sampled {
            grid,
            values: values.into_iter().map(|v| v * scale).collect(),
        })
    }

    /// Wraps a closure, normalizing it numerically over `[-window, window]`.
    pub fn custom<F>(label: impl Into<String>, scale: f64, window: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> c64 + Send + Sync + 'static,
    {
        if !(scale > 0.0) || !(window > 0.0) {
            return Err(Error::InvalidSpectralFn(
                "custom function needs positive scale and window".into(),
            ));
        }
        let h = (scale / 40.0).min(0.01);
        let n = ((2.0 * window / h).ceil() as usize).max(2) + 1;
        let grid = Grid1D::symmetric(window, n)?;
        let norm = trapezoid(
            &grid
                .points()
                .iter()
                .map(|&x| f(x).norm_sqr())
                .collect::<Vec<_>>(),
            grid.spacing(),
        );
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidSpectralFn(
                "custom function is not normalizable".into(),
            ));
        }
        let k = norm.sqrt().recip();
        Ok(SpectralFn::Custom(CustomFn {
            label: label.into(),
            f: Arc::new(move |x| f(x) * k),
            scale,
        }))
    }

    /// Checks parameters for L²-normalizability.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidSpectralFn(format!(
                    "{name} must be positive and finite (got {v})"
                )))
            }
        };
        match self {
            SpectralFn::Gaussian { width, chirp } => {
                positive("gaussian width", *width)?;
                if !chirp.is_finite() {
                    return Err(Error::InvalidSpectralFn("chirp must be finite".into()));
                }
                Ok(())
            }
            SpectralFn::Sinc { alpha } => positive("sinc alpha", *alpha),
            SpectralFn::Sech { width } => positive("sech width", *width),
            SpectralFn::Hermite { .. } | SpectralFn::Custom(_) => Ok(()),
            SpectralFn::Sampled { grid, values } => {
                grid.validate()?;
                if values.len() != grid.n_points {
                    return Err(Error::InvalidSpectralFn(
                        "sample count does not match grid".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, x: f64) -> c64 {
        match self {
            SpectralFn::Gaussian { width, chirp } => {
                let u = x / width;
                let a = c64::new(-0.5 * u * u, -0.5 * chirp * u * u);
                a.exp() / (PI.powf(0.25) * width.sqrt())
            }
            SpectralFn::Sinc { alpha } => c64::new(sinc(x / alpha) / (alpha * PI).sqrt(), 0.0),
            SpectralFn::Sech { width } => {
                c64::new(1.0 / ((x / width).cosh() * (2.0 * width).sqrt()), 0.0)
            }
            SpectralFn::Hermite { order } => c64::new(hermite_wavefunction(*order, x), 0.0),
            SpectralFn::Sampled { grid, values } => interpolate(grid, values, x),
            SpectralFn::Custom(c) => (c.f)(x),
        }
    }

    /// Shortest length scale of the function.
    pub fn feature_scale(&self) -> f64 {
        match self {
            SpectralFn::Gaussian { width, chirp } => width / (1.0 + chirp.abs()).sqrt(),
            SpectralFn::Sinc { alpha } => *alpha,
            SpectralFn::Sech { width } => *width,
            SpectralFn::Hermite { order } => 1.0 / (2.0 * *order as f64 + 1.0).sqrt(),
            SpectralFn::Sampled { grid, .. } => grid.spacing(),
            SpectralFn::Custom(c) => c.scale,
        }
    }

    /// True when the amplitude is real on the whole line.
    pub fn is_real(&self) -> bool {
        match self {
            SpectralFn::Gaussian { chirp, .. } => *chirp == 0.0,
            SpectralFn::Sampled { values, .. } => values.iter().all(|v| v.im == 0.0),
            SpectralFn::Custom(_) => false,
            _ => true,
        }
    }

    /// Numerical `∫|f|² dx` over `[-window, window]`.
    pub fn norm_sq(&self, window: f64) -> f64 {
        let h = (self.feature_scale() / 40.0).min(0.01);
        let n = ((2.0 * window / h).ceil() as usize).max(2) + 1;
        let g = Grid1D {
            min: -window,
            max: window,
            n_points: n,
        };
        trapezoid(
            &g.points()
                .iter()
                .map(|&x| self.eval(x).norm_sqr())
                .collect::<Vec<_>>(),
            g.spacing(),
        )
    }

    /// Samples the amplitude on `grid`.
    pub fn sample(&self, grid: &Grid1D) -> Vec<c64> {
        grid.points().iter().map(|&x| self.eval(x)).collect()
    }

    /// Short human-readable tag.
    pub fn label(&self) -> String {
        match self {
            SpectralFn::Gaussian { width, chirp } if *chirp == 0.0 => {
                format!("gaussian(w={width})")
            }
            SpectralFn::Gaussian { width, chirp } => format!("gaussian(w={width},chirp={chirp})"),
            SpectralFn::Sinc { alpha } => format!("sinc(alpha={alpha})"),
            SpectralFn::Sech { width } => format!("sech(w={width})"),
            SpectralFn::Hermite { order } => format!("hermite({order})"),
            SpectralFn::Sampled { grid, .. } => format!("sampled({} pts)", grid.n_points),
            SpectralFn::Custom(c) => format!("custom({})", c.label),
        }
    }
}

fn interpolate(grid: &Grid1D, values: &[c64], x: f64) -> c64 {
    if x < grid.min || x > grid.max || !x.is_finite() {
        return c64::new(0.0, 0.0);
    }
    let t = (x - grid.min) / grid.spacing();
    let i = (t.floor() as usize).min(grid.n_points - 2);
    let frac = t - i as f64;
    values[i] * (1.0 - frac) + values[i + 1] * frac
}

/// Composite trapezoid rule on uniformly spaced samples.
pub(crate) fn trapezoid(samples: &[f64], h: f64) -> f64 {
    match samples.len() {
        0 => 0.0,
        1 => 0.0,
        n => h * (samples[1..n - 1].iter().sum::<f64>() + 0.5 * (samples[0] + samples[n - 1])),
    }
}
