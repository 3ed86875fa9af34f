use std::path::{Path, PathBuf};

use jsa_forge::dispersion::{
    build_jsa_gvd, build_jsa_linear, group_velocity_matched_pump, purity_vs_r_sweep,
    rs_from_physics, taus_for_r, DispersionModel, GvdOptions, MismatchParams, PmfProfile,
    ProcessGeometry, SweepConfig,
};
use jsa_forge::fock::mapping::output_coefficients;
use jsa_forge::fock::{
    map_params, project_to_fock, synthesize_jsa_from_fock, two_mode_purity, BeamSplitterMap,
    FockKet, TwoModeFockState,
};
use jsa_forge::gaussian::{
    gaussian_correlation_matrix, gaussian_purity, separability_condition, CorrelationMatrix,
    SEPARABILITY_TOLERANCE,
};
use jsa_forge::io::{
    read_jsa_binary, read_jsa_csv, write_jsa_binary, write_jsa_csv, write_sweep_csv,
};
use jsa_forge::optimize::{optimize_pump, OptimizerConfig};
use jsa_forge::{
    build_jsa, purity_integral, purity_schmidt, to_frequency_conversion, Error, Grid1D,
    JointAmplitude, Result, SchmidtResult,
};
use serde::Serialize;
use serde_json::json;

use crate::cli::{
    GaussianArgs, GridArgs, GvdSweepArgs, JsaArgs, MapCheckArgs, MatrixFormat, OptimizeArgs,
    Profile, PurityArgs,
};
use crate::config::{summary, RunConfig};

fn warn(verbosity: u8, msg: impl AsRef<str>) {
    if verbosity > 0 {
        eprintln!("warning: {}", msg.as_ref());
    }
}

fn grids(g: &GridArgs, r: f64, s: f64) -> Result<(Grid1D, Grid1D)> {
    let axis = |hw: Option<f64>, c: f64| match hw {
        Some(hw) => Grid1D::symmetric(hw, g.points),
        None => Grid1D::symmetric(Grid1D::default_for(c).max, g.points),
    };
    Ok((axis(g.x_half_width, r)?, axis(g.y_half_width, s)?))
}

fn load_model(name: &str) -> Result<DispersionModel> {
    match name {
        "ktp" => Ok(DispersionModel::ktp()),
        "dispersionless" => Ok(DispersionModel::dispersionless()),
        path => DispersionModel::load(path),
    }
}

fn is_binary(path: &Path, format: MatrixFormat) -> bool {
    match format {
        MatrixFormat::Binary => true,
        MatrixFormat::Csv => false,
        MatrixFormat::Auto => path.extension().is_some_and(|e| e == "bin"),
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "jsa".into());
    path.with_file_name(format!("{stem}{suffix}"))
}

#[derive(Serialize)]
struct JsaReport {
    purity: f64,
    schmidt_number: f64,
    r: f64,
    s: f64,
    boundary_warning: bool,
    /// Purity of the down-conversion JSA built from the same inputs, for
    /// the frequency-conversion transfer function.
    #[serde(skip_serializing_if = "Option::is_none")]
    spdc_purity: Option<f64>,
    schmidt: SchmidtResult,
}

/// `jsa` and `fc-convert`.
pub fn jsa(a: &JsaArgs, cfg: &mut RunConfig, conversion: bool) -> Result<()> {
    let pmf = a.functions.pmf();
    let pump = a.functions.pump.clone();
    let opts = GvdOptions { chi3: a.chi3 };

    let (r, s, geometry) = match &a.model {
        Some(name) => {
            if conversion {
                return Err(Error::Domain(
                    "fc-convert takes --r and --s, not a dispersion model".into(),
                ));
            }
            let model = load_model(name)?;
            let (l, t, p) = (
                a.length_m.unwrap_or_default(),
                a.tau_s.unwrap_or_default(),
                a.pump_nm.unwrap_or_default(),
            );
            let geom = ProcessGeometry::degenerate(l, t, p * 1e-9);
            let rs = rs_from_physics(&model, &geom)?;
            if rs.degenerate {
                warn(
                    cfg.verbosity,
                    format!("r = {} and s = {} are nearly equal", rs.r, rs.s),
                );
            }
            (rs.r, rs.s, Some((model, geom)))
        }
        None => (a.r.unwrap_or_default(), a.s.unwrap_or_default(), None),
    };
    let (gx, gy) = grids(&a.grid, r, s)?;
    cfg.resolve("pmf", &pmf)?;
    cfg.resolve("r", r)?;
    cfg.resolve("s", s)?;
    cfg.resolve("x_grid", gx)?;
    cfg.resolve("y_grid", gy)?;

    let (j, spdc_purity) = match (&geometry, conversion) {
        (Some((model, geom)), _) => {
            cfg.resolve("geometry", geom)?;
            (build_jsa_gvd(model, geom, &pmf, &pump, gx, gy, opts)?, None)
        }
        (None, true) => {
            let fc = to_frequency_conversion(&pmf, &pump, r, s, gx, gy)?;
            let spdc = build_jsa(&pmf, &pump, r, s, gx, gy)?;
            (fc, Some(purity_schmidt(&spdc)?.purity))
        }
        (None, false) if a.chi3 => (
            build_jsa_linear(
                &pmf,
                &pump,
                MismatchParams {
                    r,
                    s,
                    degenerate: false,
                },
                gx,
                gy,
                opts,
            )?,
            None,
        ),
        (None, false) => (build_jsa(&pmf, &pump, r, s, gx, gy)?, None),
    };
    if j.boundary_warning {
        warn(
            cfg.verbosity,
            "the amplitude is not negligible at the grid edge; widen the window",
        );
    }
    let schmidt = purity_schmidt(&j)?;

    let purity_out = a
        .purity_out
        .clone()
        .unwrap_or_else(|| sibling(&a.out, ".purity.json"));
    cfg.output(&a.out);
    cfg.output(&purity_out);
    let config = cfg.to_value()?;
    if is_binary(&a.out, a.format) {
        write_jsa_binary(&a.out, &j, &config)?;
    } else {
        write_jsa_csv(&a.out, &j, &config)?;
    }
    let report = JsaReport {
        purity: schmidt.purity,
        schmidt_number: schmidt.schmidt_number,
        r,
        s,
        boundary_warning: j.boundary_warning,
        spdc_purity,
        schmidt,
    };
    cfg.emit(Some(&purity_out), "result", &report)?;
    println!(
        "{}",
        summary(
            json!({"purity": report.purity, "matrix": a.out, "report": purity_out, "spdc_purity": spdc_purity})
        )
    );
    Ok(())
}

fn read_any(path: &Path) -> Result<JointAmplitude> {
    let head = std::fs::read(path)?;
    match head.first() {
        Some(b'#') | Some(b'x') => read_jsa_csv(path),
        Some(_) => Ok(read_jsa_binary(path)?.0),
        None => Err(Error::Format(format!("{} is empty", path.display()))),
    }
}

#[derive(Serialize)]
struct PurityReport {
    purity: f64,
    schmidt_number: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    purity_integral: Option<f64>,
    boundary_warning: bool,
    schmidt: SchmidtResult,
}

pub fn purity(a: &PurityArgs, cfg: &mut RunConfig) -> Result<()> {
    let j = read_any(&a.input)?;
    let schmidt = purity_schmidt(&j)?;
    let purity_integral = if a.oracle {
        Some(purity_integral(&j)?)
    } else {
        None
    };
    if j.boundary_warning {
        warn(
            cfg.verbosity,
            "the amplitude is not negligible at the grid edge",
        );
    }
    cfg.resolve("x_grid", j.x_grid)?;
    cfg.resolve("y_grid", j.y_grid)?;
    if let Some(p) = &a.out {
        cfg.output(p);
    }
    let report = PurityReport {
        purity: schmidt.purity,
        schmidt_number: schmidt.schmidt_number,
        purity_integral,
        boundary_warning: j.boundary_warning,
        schmidt,
    };
    cfg.emit(a.out.as_deref(), "result", &report)
}

#[derive(Serialize)]
struct MapReport {
    r: f64,
    s: f64,
    map: BeamSplitterMap,
    n_trunc: usize,
    /// `‖Ψ_fock − Ψ_grid‖` on the grid.
    l2_error: f64,
    purity_grid: f64,
    /// From the two-mode number-basis coefficients.
    purity_fock: f64,
    /// From the Fock-space JSA sampled on the grid.
    purity_fock_sampled: f64,
    purity_delta: f64,
    lost_weight_pmf: f64,
    lost_weight_pump: f64,
    truncation_warning: bool,
}

fn lost_weight(k: &FockKet) -> f64 {
    (1.0 - k.captured_weight).max(k.tail_weight())
}

pub fn map_check(a: &MapCheckArgs, cfg: &mut RunConfig) -> Result<()> {
    let (r, s) = (a.r, a.s);
    let map = map_params(r, s)?;
    let pmf = a.functions.pmf();
    let pump = a.functions.pump.clone();
    let (gx, gy) = grids(&a.grid, r, s)?;
    cfg.resolve("pmf", &pmf)?;
    cfg.resolve("x_grid", gx)?;
    cfg.resolve("y_grid", gy)?;

    let kp = project_to_fock(&pmf, a.n_trunc)?;
    let kg = project_to_fock(&pump, a.n_trunc)?;
    let fock = synthesize_jsa_from_fock(&kp, &kg, &map, gx, gy)?;
    let grid = build_jsa(&pmf, &pump, r, s, gx, gy)?;
    let purity_fock = two_mode_purity(&TwoModeFockState {
        coeffs: output_coefficients(&kp, &kg, &map)?,
    })?;
    let purity_grid = purity_schmidt(&grid)?.purity;
    let report = MapReport {
        r,
        s,
        map,
        n_trunc: a.n_trunc,
        l2_error: (&fock.values - &grid.values).norm() * grid.cell_area().sqrt(),
        purity_grid,
        purity_fock,
        purity_fock_sampled: purity_schmidt(&fock)?.purity,
        purity_delta: (purity_fock - purity_grid).abs(),
        lost_weight_pmf: lost_weight(&kp),
        lost_weight_pump: lost_weight(&kg),
        truncation_warning: kp.truncation_warning() || kg.truncation_warning(),
    };
    if report.truncation_warning {
        warn(
            cfg.verbosity,
            format!(
                "N = {} leaves more than 1% of a ket outside the basis",
                a.n_trunc
            ),
        );
    }
    if let Some(p) = &a.out {
        cfg.output(p);
    }
    cfg.emit(a.out.as_deref(), "result", &report)
}

pub fn optimize(a: &OptimizeArgs, cfg: &mut RunConfig) -> Result<()> {
    let pmf = a.pmf();
    let phi = project_to_fock(&pmf, a.n_trunc)?;
    if phi.truncation_warning() {
        warn(
            cfg.verbosity,
            format!(
                "N = {} truncates the phase-matching ket by more than 1%",
                a.n_trunc
            ),
        );
    }
    let oc = OptimizerConfig {
        n_trunc: a.n_trunc,
        lambda: a.lambda,
        restarts: a.restarts,
        theta: a.theta,
        max_iters: a.max_iters,
        seed: a.seed,
        warm_start: !a.no_warm_start,
        ..OptimizerConfig::default()
    };
    cfg.resolve("pmf", &pmf)?;
    cfg.resolve("theta_over_pi", a.theta / std::f64::consts::PI)?;
    cfg.resolve("optimizer", &oc)?;
    let res = optimize_pump(&phi, &oc)?;
    let failed = res.restart_trace.iter().filter(|r| !r.converged).count();
    if failed > 0 {
        warn(
            cfg.verbosity,
            format!("{failed} of {} restarts did not converge", oc.restarts),
        );
    }
    cfg.output(&a.out);
    cfg.emit(Some(&a.out), "result", &res)?;
    println!(
        "{}",
        summary(json!({
            "best_purity": res.best_purity,
            "squeezed_fidelity": res.squeezed_fit.fidelity,
            "mu": res.squeezed_fit.mu,
            "out": a.out,
        }))
    );
    Ok(())
}

/// A pump wavelength at which pump and idler travel together. Pump and
/// idler, at twice the wavelength, must both be inside the window.
fn default_pump(model: &DispersionModel) -> Result<f64> {
    let [lo0, hi0] = model.mode0.valid_um();
    let [lo2, hi2] = model.mode2.valid_um();
    let (lo, hi) = (lo0.max(lo2 / 2.0), hi0.min(hi2 / 2.0));
    let (lo, hi) = (lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo));
    if lo >= hi || lo.is_nan() || hi.is_nan() {
        return Err(Error::Domain(
            "model window leaves no room for a degenerate pump".into(),
        ));
    }
    let whole = group_velocity_matched_pump(model, lo * 1e-6, hi * 1e-6);
    if whole.is_ok() {
        return whole;
    }
    // an even number of crossings; take the shortest wavelength one
    let n = 256;
    let edge = |k: usize| (lo + (hi - lo) * k as f64 / n as f64) * 1e-6;
    (0..n)
        .find_map(|k| group_velocity_matched_pump(model, edge(k), edge(k + 1)).ok())
        .ok_or_else(|| {
            Error::Domain(
                "no group-velocity-matched pump in the model window; pass --pump-nm".into(),
            )
        })
}

pub fn gvd_sweep(a: &GvdSweepArgs, cfg: &mut RunConfig) -> Result<()> {
    let model = load_model(&a.model)?;
    let lambda = match a.pump_nm {
        Some(nm) => nm * 1e-9,
        None => default_pump(&model)?,
    };
    let base = ProcessGeometry::degenerate(a.length_m, a.tau_s, lambda);
    let taus = taus_for_r(&model, &base, &a.r_values)?;
    let sweep = SweepConfig {
        y_points: a.y_points,
        max_x_points: a.max_x_points,
        chi3: a.chi3,
        ..SweepConfig::default()
    };
    let profile = match a.pmf {
        Profile::Tophat => PmfProfile::Tophat,
        Profile::Gaussian => PmfProfile::Gaussian,
    };
    cfg.resolve("pump_nm", lambda * 1e9)?;
    cfg.resolve("model", &model)?;
    cfg.resolve("tau_s", &taus)?;
    cfg.resolve("sweep", &sweep)?;
    let rows = purity_vs_r_sweep(&model, &base, &taus, &profile.spectral(), &a.pump, &sweep)?;
    cfg.output(&a.out);
    write_sweep_csv(&a.out, &rows, &cfg.to_value()?)?;
    let peak = rows
        .iter()
        .max_by(|p, q| p.purity_gvd.total_cmp(&q.purity_gvd));
    println!(
        "{}",
        summary(json!({
            "rows": rows.len(),
            "pump_nm": lambda * 1e9,
            "s": rows.first().map(|r| r.s),
            "peak_r": peak.map(|r| r.r),
            "peak_purity_gvd": peak.map(|r| r.purity_gvd),
            "out": a.out,
        }))
    );
    Ok(())
}

#[derive(Serialize)]
struct GaussianReport {
    r: f64,
    s: f64,
    purity: f64,
    separable: bool,
    correlation_matrix: CorrelationMatrix,
}

pub fn gaussian(a: &GaussianArgs, cfg: &mut RunConfig) -> Result<()> {
    let report = GaussianReport {
        r: a.r,
        s: a.s,
        purity: gaussian_purity(a.r, a.s)?,
        separable: separability_condition(a.r, a.s, SEPARABILITY_TOLERANCE),
        correlation_matrix: gaussian_correlation_matrix(a.r, a.s),
    };
    if let Some(p) = &a.out {
        cfg.output(p);
    }
    cfg.emit(a.out.as_deref(), "result", &report)
}
