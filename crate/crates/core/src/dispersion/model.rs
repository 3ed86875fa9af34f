//! Refractive-index models and their JSON file format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

fn unbounded() -> [f64; 2] {
    [0.0, 1.0e9]
}

/// Wavelength in micrometres of angular frequency `omega` (rad/s).
pub fn omega_to_um(omega: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / omega * 1e6
}

/// Angular frequency (rad/s) of a vacuum wavelength in metres.
pub fn wavelength_to_omega(lambda_m: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / lambda_m
}

/// Dispersion of one mode. Wavelengths are vacuum wavelengths in µm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form")]
pub enum IndexModel {
    /// `n² = A + B/(λ² − C) − Dλ²`.
    #[serde(rename = "sellmeier-1pole")]
    Sellmeier1 {
        #[serde(rename = "A")]
        a: f64,
        #[serde(rename = "B")]
        b: f64,
        #[serde(rename = "C")]
        c: f64,
        #[serde(rename = "D")]
        d: f64,
        valid_um: [f64; 2],
    },
    /// `n² = A + B/(λ² − C) + E/(λ² − F)`.
    #[serde(rename = "sellmeier-2pole")]
    Sellmeier2 {
        #[serde(rename = "A")]
        a: f64,
        #[serde(rename = "B")]
        b: f64,
        #[serde(rename = "C")]
        c: f64,
        #[serde(rename = "E")]
        e: f64,
        #[serde(rename = "F")]
        f: f64,
        valid_um: [f64; 2],
    },
    /// Frequency-independent index.
    #[serde(rename = "constant")]
    Constant {
        n: f64,
        #[serde(default = "unbounded")]
        valid_um: [f64; 2],
    },
    /// `k(ω) = (n_g ω + (n_p − n_g) ω_ref)/c`: phase index `n_p` at
    /// `λ_ref` and a frequency-independent group index `n_g`, so the
    /// dispersion relation is exactly linear.
    #[serde(rename = "linear")]
    Linear {
        n_phase: f64,
        n_group: f64,
        lambda_ref_um: f64,
        #[serde(default = "unbounded")]
        valid_um: [f64; 2],
    },
}

impl IndexModel {
    pub fn valid_um(&self) -> [f64; 2] {
        match self {
            IndexModel::Sellmeier1 { valid_um, .. }
            | IndexModel::Sellmeier2 { valid_um, .. }
            | IndexModel::Constant { valid_um, .. }
            | IndexModel::Linear { valid_um, .. } => *valid_um,
        }
    }

    fn check_range(&self, lambda_um: f64) -> Result<()> {
        let [lo, hi] = self.valid_um();
        if lambda_um.is_finite() && lambda_um >= lo && lambda_um <= hi {
            Ok(())
        } else {
            Err(Error::ModelRange { lambda_um, lo, hi })
        }
    }

    /// `(n², d(n²)/dλ)` for the Sellmeier forms.
    fn n_squared(&self, l: f64) -> (f64, f64) {
        let l2 = l * l;
        match *self {
            IndexModel::Sellmeier1 { a, b, c, d, .. } => (
                a + b / (l2 - c) - d * l2,
                -2.0 * l * b / (l2 - c).powi(2) - 2.0 * d * l,
            ),
            IndexModel::Sellmeier2 { a, b, c, e, f, .. } => (
                a + b / (l2 - c) + e / (l2 - f),
                -2.0 * l * b / (l2 - c).powi(2) - 2.0 * l * e / (l2 - f).powi(2),
            ),
            IndexModel::Constant { n, .. } => (n * n, 0.0),
            IndexModel::Linear { .. } => unreachable!("linear model has no Sellmeier form"),
        }
    }

    /// Phase index at `lambda_um`.
    pub fn index(&self, lambda_um: f64) -> Result<f64> {
        self.check_range(lambda_um)?;
        if let IndexModel::Linear { .. } = self {
            let omega = wavelength_to_omega(lambda_um * 1e-6);
            return Ok(self.k_of_omega(omega) * SPEED_OF_LIGHT / omega);
        }
        let (n2, _) = self.n_squared(lambda_um);
        if !(n2 > 1.0) {
            return Err(Error::Domain(format!(
                "index model gives n² = {n2} at {lambda_um} um"
            )));
        }
        Ok(n2.sqrt())
    }

    fn k_of_omega(&self, omega: f64) -> f64 {
        match *self {
            IndexModel::Linear {
                n_phase,
                n_group,
                lambda_ref_um,
                ..
            } => {
                let w_ref = wavelength_to_omega(lambda_ref_um * 1e-6);
                (n_group * omega + (n_phase - n_group) * w_ref) / SPEED_OF_LIGHT
            }
            _ => unreachable!(),
        }
    }

    /// `k(ω) = n(λ) ω / c`, in 1/m.
    pub fn wavevector(&self, omega: f64) -> Result<f64> {
        let l = omega_to_um(omega);
        self.check_range(l)?;
        if let IndexModel::Linear { .. } = self {
            return Ok(self.k_of_omega(omega));
        }
        Ok(self.index(l)? * omega / SPEED_OF_LIGHT)
    }

    /// `dk/dω = (n − λ dn/dλ)/c`, in s/m.
    pub fn inverse_group_velocity(&self, omega: f64) -> Result<f64> {
        let l = omega_to_um(omega);
        self.check_range(l)?;
        if let IndexModel::Linear { n_group, .. } = *self {
            return Ok(n_group / SPEED_OF_LIGHT);
        }
        let n = self.index(l)?;
        let (_, dn2) = self.n_squared(l);
        Ok((n - l * dn2 / (2.0 * n)) / SPEED_OF_LIGHT)
    }

    /// Group velocity in m/s.
    pub fn group_velocity(&self, omega: f64) -> Result<f64> {
        Ok(1.0 / self.inverse_group_velocity(omega)?)
    }
}

/// Index models of the pump (0), signal (1) and idler (2) modes.
///
/// On disk:
///
/// ```json
/// { "0": {"form": "sellmeier-1pole", "A": …, "B": …, "C": …, "D": …, "valid_um": [lo, hi]},
///   "1": {…}, "2": {…},
///   "poling_period_m": null,
///   "source": "…" }
/// ```
///
/// `pump`, `signal` and `idler` are accepted as aliases for the mode keys.
/// Without a poling period the process is taken as perfectly
/// quasi-phase-matched at the central frequencies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionModel {
    #[serde(rename = "0", alias = "pump")]
    pub mode0: IndexModel,
    #[serde(rename = "1", alias = "signal")]
    pub mode1: IndexModel,
    #[serde(rename = "2", alias = "idler")]
    pub mode2: IndexModel,
    #[serde(default)]
    pub poling_period_m: Option<f64>,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

impl DispersionModel {
    pub fn mode(&self, i: usize) -> &IndexModel {
        match i {
            0 => &self.mode0,
            1 => &self.mode1,
            2 => &self.mode2,
            _ => panic!("mode index {i} out of range"),
        }
    }

    /// The same index model for all three modes.
    pub fn uniform(model: IndexModel, source: &str) -> Self {
        Self {
            mode0: model.clone(),
            mode1: model.clone(),
            mode2: model,
            poling_period_m: None,
            source: source.into(),
            notes: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..3 {
            let [lo, hi] = self.mode(i).valid_um();
            if !(lo < hi) {
                return Err(Error::Format(format!(
                    "mode {i}: validity window [{lo}, {hi}] is empty"
                )));
            }
        }
        if let Some(p) = self.poling_period_m {
            if !(p > 0.0) {
                return Err(Error::Format(format!(
                    "poling period must be positive (got {p})"
                )));
            }
        }
        Ok(())
    }

    /// KTP after Kato and Takaoka (2002): pump and idler polarized along x,
    /// signal along z.
    pub fn ktp() -> Self {
        Self::from_json(include_str!("../../data/ktp_kato2002.json")).expect("bundled model parses")
    }

    /// Linear dispersion with distinct constant group indices per mode.
    pub fn dispersionless() -> Self {
        Self::from_json(include_str!("../../data/dispersionless.json"))
            .expect("bundled model parses")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_index() {
        let m = IndexModel::Constant {
            n: 2.0,
            valid_um: unbounded(),
        };
        let w = wavelength_to_omega(1e-6);
        assert!((m.wavevector(w).unwrap() - 2.0 * w / SPEED_OF_LIGHT).abs() < 1e-6);
        assert!((m.group_velocity(w).unwrap() - SPEED_OF_LIGHT / 2.0).abs() < 1e-6);
        // an index at or below 1 is not a dielectric
        let vac = IndexModel::Constant {
            n: 1.0,
            valid_um: unbounded(),
        };
        assert_eq!(vac.wavevector(w).unwrap_err().kind(), "DomainError");
    }

    #[test]
    fn group_velocity_matches_finite_differences() {
        let ktp = DispersionModel::ktp();
        for mode in 0..3 {
            for lambda in [0.8e-6, 1.2e-6, 2.4e-6] {
                let w = wavelength_to_omega(lambda);
                let h = w * 1e-5;
                let m = ktp.mode(mode);
                let fd = (m.wavevector(w + h).unwrap() - m.wavevector(w - h).unwrap()) / (2.0 * h);
                let exact = m.inverse_group_velocity(w).unwrap();
                assert!(
                    ((fd - exact) / exact).abs() < 1e-6,
                    "mode {mode} {lambda}: {fd} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn linear_model_has_constant_group_velocity() {
        let m = DispersionModel::dispersionless();
        let a = m.mode1.group_velocity(wavelength_to_omega(1.0e-6)).unwrap();
        let b = m.mode1.group_velocity(wavelength_to_omega(2.0e-6)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn validity_window_is_enforced() {
        let e = DispersionModel::ktp().mode0.index(5.0).unwrap_err();
        assert_eq!(e.kind(), "ModelRangeError");
    }

    #[test]
    fn json_format() {
        let text = r#"{"pump": {"form": "sellmeier-1pole", "A": 2.0, "B": 0.01, "C": 0.02, "D": 0.01, "valid_um": [0.4, 4.0]},
            "signal": {"form": "constant", "n": 1.8},
            "idler": {"form": "constant", "n": 1.9},
            "poling_period_m": 9.0e-6, "source": "test"}"#;
        let m = DispersionModel::from_json(text).unwrap();
        let n = m.mode0.index(1.0).unwrap();
        assert!((n * n - (2.0 + 0.01 / (1.0 - 0.02) - 0.01)).abs() < 1e-14);
        let round: DispersionModel =
            serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(round, m);
        assert!(DispersionModel::from_json(r#"{"0": {"form": "bogus"}}"#).is_err());
    }
}
