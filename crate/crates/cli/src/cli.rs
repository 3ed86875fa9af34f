use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jsa_forge::SpectralFn;
use serde::Serialize;

/// Joint spectral amplitudes, their purity and pump optimization.
///
/// Every file written embeds the resolved run configuration and the
/// program version. Exit status: 0 on success, 2 for invalid input, 3 for
/// numerical failure. Set JSA_FORGE_THREADS to cap the worker threads.
#[derive(Parser, Debug)]
#[command(name = "jsa-forge", version, propagate_version = true)]
pub struct Cli {
    /// Print diagnostics to stderr (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Build a JSA on a grid and write it with its purity.
    Jsa(JsaArgs),
    /// Schmidt purity of a JSA file written by `jsa` or `fc-convert`.
    Purity(PurityArgs),
    /// Compare the oscillator (Fock-space) construction with the grid.
    MapCheck(MapCheckArgs),
    /// Search for the pump ket that maximizes separability.
    Optimize(OptimizeArgs),
    /// Purity against r with and without group velocity dispersion.
    GvdSweep(GvdSweepArgs),
    /// Frequency-conversion transfer function for the same inputs.
    FcConvert(JsaArgs),
    /// Closed-form purity for Gaussian pump and phase matching.
    GaussianPurity(GaussianArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Jsa(_) => "jsa",
            Command::Purity(_) => "purity",
            Command::MapCheck(_) => "map-check",
            Command::Optimize(_) => "optimize",
            Command::GvdSweep(_) => "gvd-sweep",
            Command::FcConvert(_) => "fc-convert",
            Command::GaussianPurity(_) => "gaussian-purity",
        }
    }
}

/// Phase-matching and pump functions.
///
/// Functions are written `kind[:param[:param]]`: `gaussian[:width[:chirp]]`,
/// `sinc[:alpha]`, `sech[:width]`, `hermite:order`.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Functions {
    /// Phase-matching function φ.
    #[arg(long, default_value = "sinc", value_parser = parse_spectral)]
    pub pmf: SpectralFn,

    /// Width α of a sinc phase-matching function; overrides `sinc:alpha`.
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Pump envelope γ.
    #[arg(long, default_value = "gaussian", value_parser = parse_spectral)]
    pub pump: SpectralFn,
}

impl Functions {
    pub fn pmf(&self) -> SpectralFn {
        match (&self.pmf, self.alpha) {
            (SpectralFn::Sinc { .. }, Some(alpha)) => SpectralFn::sinc(alpha),
            (f, _) => f.clone(),
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GridArgs {
    /// Half-width of the x window [default: 11/max(|r|, 1)].
    #[arg(long)]
    pub x_half_width: Option<f64>,
    /// Half-width of the y window [default: 11/max(|s|, 1)].
    #[arg(long)]
    pub y_half_width: Option<f64>,
    /// Samples per axis.
    #[arg(long, default_value_t = jsa_forge::grid::DEFAULT_POINTS)]
    pub points: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    /// Chosen from the file extension: `.bin` is binary, anything else CSV.
    Auto,
    Csv,
    Binary,
}

#[derive(Args, Debug, Serialize)]
pub struct JsaArgs {
    #[command(flatten)]
    pub functions: Functions,

    /// Group-velocity mismatch multiplying x.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "model")]
    pub r: Option<f64>,
    /// Group-velocity mismatch multiplying y.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "model")]
    pub s: Option<f64>,

    /// Take r and s from a dispersion model (`ktp`, `dispersionless` or a
    /// JSON file) and keep the full phase mismatch.
    #[arg(long, conflicts_with_all = ["r", "s"], requires_all = ["length_m", "tau_s", "pump_nm"])]
    pub model: Option<String>,
    /// Crystal length in metres.
    #[arg(long)]
    pub length_m: Option<f64>,
    /// Pulse time scale in seconds.
    #[arg(long)]
    pub tau_s: Option<f64>,
    /// Pump central wavelength in nanometres (degenerate down-conversion).
    #[arg(long)]
    pub pump_nm: Option<f64>,
    /// Square the pump amplitude, as in a single-pump χ(3) process.
    #[arg(long)]
    pub chi3: bool,

    #[command(flatten)]
    pub grid: GridArgs,

    /// Matrix output file.
    #[arg(long, default_value = "jsa.csv")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = MatrixFormat::Auto)]
    pub format: MatrixFormat,
    /// Purity JSON [default: next to --out with a `.purity.json` suffix].
    #[arg(long)]
    pub purity_out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct PurityArgs {
    /// JSA file, CSV or binary.
    pub input: PathBuf,
    /// Also evaluate the purity by direct quadrature of the reduced state.
    #[arg(long)]
    pub oracle: bool,
    /// JSON output [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct MapCheckArgs {
    #[command(flatten)]
    pub functions: Functions,
    #[arg(long, allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    /// Number-basis truncation N.
    #[arg(long, default_value_t = jsa_forge::fock::DEFAULT_TRUNCATION)]
    pub n_trunc: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    /// JSON output [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct OptimizeArgs {
    /// Phase-matching function φ.
    #[arg(long, default_value = "sinc", value_parser = parse_spectral)]
    pub pmf: SpectralFn,
    /// Width α of a sinc phase-matching function; replaces any width given
    /// in --pmf.
    #[arg(long, default_value_t = 0.71)]
    pub alpha: f64,
    /// Beam-splitter angle: radians, or `k/32pi`, `pi/8`, `3pi/32`.
    #[arg(long, value_parser = parse_theta, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 30)]
    pub n_trunc: usize,
    #[arg(long, default_value_t = 80)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Weight of the displacement penalty.
    #[arg(long, default_value_t = 10.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    /// Start every restart at random instead of seeding restart 0.
    #[arg(long)]
    pub no_warm_start: bool,
    #[arg(long, default_value = "results.json")]
    pub out: PathBuf,
}

impl OptimizeArgs {
    pub fn pmf(&self) -> SpectralFn {
        match self.pmf {
            SpectralFn::Sinc { .. } => SpectralFn::sinc(self.alpha),
            ref f => f.clone(),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Uniform poling, sinc phase matching.
    #[value(alias = "sinc")]
    Tophat,
    Gaussian,
}

#[derive(Args, Debug, Serialize)]
pub struct GvdSweepArgs {
    /// `ktp`, `dispersionless` or a JSON model file.
    #[arg(long, default_value = "ktp")]
    pub model: String,
    #[arg(long, value_enum, default_value_t = Profile::Gaussian)]
    pub pmf: Profile,
    #[arg(long, default_value = "gaussian", value_parser = parse_spectral)]
    pub pump: SpectralFn,
    #[arg(long, default_value_t = 0.02)]
    pub length_m: f64,
    /// Reference pulse time scale; the sweep rescales it to hit each r.
    #[arg(long, default_value_t = 2.9e-14)]
    pub tau_s: f64,
    /// Pump wavelength in nm [default: where pump and idler group
    /// velocities match, so that s = 0].
    #[arg(long)]
    pub pump_nm: Option<f64>,
    /// Values of r, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "2,4,8,12,16,23.4,32,45,64,90,120"
    )]
    pub r_values: Vec<f64>,
    #[arg(long)]
    pub chi3: bool,
    #[arg(long, default_value_t = 384)]
    pub y_points: usize,
    #[arg(long, default_value_t = 1024)]
    pub max_x_points: usize,
    #[arg(long, default_value = "sweep.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct GaussianArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    /// JSON output [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn number(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("`{s}` is not a number"))
}

/// `kind[:param[:param]]`.
pub fn parse_spectral(text: &str) -> Result<SpectralFn, String> {
    let mut parts = text.split(':');
    let kind = parts.next().unwrap_or_default().trim().to_ascii_lowercase();
    let params = parts.map(number).collect::<Result<Vec<_>, _>>()?;
    let f = match (kind.as_str(), params.as_slice()) {
        ("gaussian", []) => SpectralFn::gaussian(),
        ("gaussian", [w]) => SpectralFn::Gaussian { width: *w, chirp: 0.0 },
        ("gaussian", [w, c]) => SpectralFn::Gaussian { width: *w, chirp: *c },
        ("sinc", []) => SpectralFn::sinc(1.0),
        ("sinc", [a]) => SpectralFn::sinc(*a),
        ("sech", []) => SpectralFn::sech(),
        ("sech", [w]) => SpectralFn::Sech { width: *w },
        ("hermite", [n]) if *n >= 0.0 && n.fract() == 0.0 => SpectralFn::Hermite { order: *n as usize },
        _ => {
            return Err(format!(
                "unknown function `{text}`; use gaussian[:width[:chirp]], sinc[:alpha], sech[:width] or hermite:order"
            ))
        }
    };
    f.validate().map_err(|e| e.to_string())?;
    Ok(f)
}

/// Radians, or a multiple of π: `k/32pi`, `3pi/32`, `pi/8`, `pi`.
pub fn parse_theta(text: &str) -> Result<f64, String> {
    let t = text.trim().to_ascii_lowercase().replace('π', "pi");
    let value = if let Some(body) = t.strip_suffix("pi") {
        // k/32pi
        let frac = match body.split_once('/') {
            Some((k, d)) => number(k)? / number(d)?,
            None if body.is_empty() => 1.0,
            None => number(body)?,
        };
        frac * PI
    } else if let Some((head, d)) = t.split_once("pi/") {
        // 3pi/32
        let k = if head.is_empty() { 1.0 } else { number(head)? };
        k * PI / number(d)?
    } else {
        number(&t)?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{text}` is not a finite angle"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_forms() {
        let eps = 1e-15;
        assert!((parse_theta("3/32pi").unwrap() - 3.0 * PI / 32.0).abs() < eps);
        assert!((parse_theta("3pi/32").unwrap() - 3.0 * PI / 32.0).abs() < eps);
        assert!((parse_theta("pi/8").unwrap() - PI / 8.0).abs() < eps);
        assert!((parse_theta("1/32π").unwrap() - PI / 32.0).abs() < eps);
        assert!((parse_theta("pi").unwrap() - PI).abs() < eps);
        assert_eq!(parse_theta("0.0982").unwrap(), 0.0982);
        assert!(parse_theta("three").is_err());
        assert!(parse_theta("1/0pi").is_err());
    }

    #[test]
    fn spectral_forms() {
        assert!(
            matches!(parse_spectral("sinc:0.71").unwrap(), SpectralFn::Sinc { alpha } if alpha == 0.71)
        );
        assert!(matches!(
            parse_spectral("Gaussian:1.5:-0.3").unwrap(),
            SpectralFn::Gaussian { width, chirp } if width == 1.5 && chirp == -0.3
        ));
        assert!(matches!(
            parse_spectral("hermite:2").unwrap(),
            SpectralFn::Hermite { order: 2 }
        ));
        assert!(parse_spectral("hermite:1.5").is_err());
        assert!(parse_spectral("sinc:-1").is_err());
        assert!(parse_spectral("lorentz").is_err());
    }
}
