use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width of the default dimensionless frequency window.
///
/// Wide enough that the slowly decaying sinc tails are mostly captured, while
/// 512 samples still resolve the narrowest feature with ~20 points.
pub const DEFAULT_HALF_WIDTH: f64 = 11.0;

/// Default number of samples per axis.
pub const DEFAULT_POINTS: usize = 512;

/// Uniformly spaced samples `min, min + Δ, …, max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub min: f64,
    pub max: f64,
    pub n_points: usize,
}

impl Grid1D {
    pub fn new(min: f64, max: f64, n_points: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(Error::Domain(format!(
                "grid bounds must satisfy min < max (got {min}, {max})"
            )));
        }
        if n_points < 2 {
            return Err(Error::Domain(format!(
                "grid needs at least 2 points (got {n_points})"
            )));
        }
        Ok(Self { min, max, n_points })
    }

    /// Symmetric grid `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    /// Default axis for a variable multiplied by `coefficient` inside the
    /// phase-matching function: the window shrinks as `1/max(|c|, 1)` so the
    /// narrow direction stays resolved.
    pub fn default_for(coefficient: f64) -> Self {
        let hw = DEFAULT_HALF_WIDTH / coefficient.abs().max(1.0);
        Self {
            min: -hw,
            max: hw,
            n_points: DEFAULT_POINTS,
        }
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.max
        } else {
            self.min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (self.min + self.max).abs() <= 1e-12 * self.max.abs().max(1.0)
    }

    /// Same bounds with twice the resolution (`2n - 1` points, nesting the
    /// original samples).
    pub fn refined(&self) -> Self {
        Self {
            n_points: 2 * self.n_points - 1,
            ..*self
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        Self::new(self.min, self.max, self.n_points).map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_endpoints() {
        let g = Grid1D::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.spacing(), 0.5);
        assert_eq!(g.points(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(g.is_symmetric());
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(Grid1D::new(1.0, 1.0, 10).is_err());
        assert!(Grid1D::new(0.0, 1.0, 1).is_err());
        assert!(Grid1D::new(f64::NAN, 1.0, 10).is_err());
    }

    #[test]
    fn default_window_narrows_for_large_coefficients() {
        assert_eq!(Grid1D::default_for(0.5).max, DEFAULT_HALF_WIDTH);
        assert!((Grid1D::default_for(-20.0).max - DEFAULT_HALF_WIDTH / 20.0).abs() < 1e-15);
    }

    #[test]
    fn refined_grid_nests_samples() {
        let g = Grid1D::new(-2.0, 3.0, 11).unwrap();
        let f = g.refined();
        for i in 0..g.n_points {
            assert!((g.point(i) - f.point(2 * i)).abs() < 1e-14);
        }
    }
}
