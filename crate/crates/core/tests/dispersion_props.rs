//! Index models, unit conversions and the reduction to the linear JSA.

use jsa_forge::dispersion::{
    build_jsa_gvd, build_jsa_linear, phase_mismatch_full, rs_from_physics, wavelength_to_omega,
    DispersionModel, GvdOptions, IndexModel, ProcessGeometry,
};
use jsa_forge::{build_jsa, Grid1D, SpectralFn};
use proptest::prelude::*;

fn linear_model(ng: [f64; 3]) -> DispersionModel {
    let mode = |n_group: f64, lambda_ref_um: f64| IndexModel::Linear {
        n_phase: n_group + 0.03,
        n_group,
        lambda_ref_um,
        valid_um: [0.2, 10.0],
    };
    DispersionModel {
        mode0: mode(ng[0], 0.8),
        mode1: mode(ng[1], 1.6),
        mode2: mode(ng[2], 1.6),
        poling_period_m: None,
        source: "test".into(),
        notes: None,
    }
}

fn geometry(tau_s: f64) -> ProcessGeometry {
    ProcessGeometry::degenerate(0.01, tau_s, 0.8e-6)
}

/// `−(Δk − K)L/2` at dimensionless offsets from the central frequencies.
fn mismatch_at(model: &DispersionModel, geom: &ProcessGeometry, x: f64, y: f64) -> f64 {
    let (w0, w1, w2) = geom.central_omegas();
    let t = geom.tau_s;
    -phase_mismatch_full(model, geom, w0 + (x + y) / t, w1 + x / t, w2 + y / t).unwrap()
}

fn group_indices() -> impl Strategy<Value = [f64; 3]> {
    (1.7..1.9f64, -0.1..0.1f64, -0.1..0.1f64)
        .prop_filter("distinct velocities", |(_, a, b)| (a - b).abs() > 0.01)
        .prop_map(|(n0, a, b)| [n0, n0 + a, n0 + b])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linear_dispersion_reduces_to_the_plain_jsa(ng in group_indices(), tau in 2e-13..2e-12f64) {
        let model = linear_model(ng);
        let geom = geometry(tau);
        let rs = rs_from_physics(&model, &geom).unwrap();
        let g = Grid1D::symmetric(6.0, 64).unwrap();
        let (pmf, pump) = (SpectralFn::sinc(1.0), SpectralFn::Gaussian { width: 1.1, chirp: 0.3 });
        let gvd = build_jsa_gvd(&model, &geom, &pmf, &pump, g, g, GvdOptions { chi3: false }).unwrap();
        let plain = build_jsa(&pmf, &pump, rs.r, rs.s, g, g).unwrap();
        let worst = (&gvd.values - &plain.values).iter().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-8, "max deviation {worst}");
    }

    #[test]
    fn mismatch_is_exactly_linear_without_gvd(
        ng in group_indices(),
        tau in 2e-13..2e-12f64,
        x in -8.0..8.0f64,
        y in -8.0..8.0f64,
    ) {
        let model = linear_model(ng);
        let geom = geometry(tau);
        let rs = rs_from_physics(&model, &geom).unwrap();
        let direct = mismatch_at(&model, &geom, x, y);
        prop_assert!((direct - (rs.r * x + rs.s * y)).abs() < 1e-10, "{}", (direct - (rs.r * x + rs.s * y)).abs());
    }

    #[test]
    fn mismatch_slopes_are_r_and_s(tau in 1e-14..1e-12f64, lambda in 0.95e-6..1.5e-6f64) {
        let model = DispersionModel::ktp();
        let geom = ProcessGeometry::degenerate(0.02, tau, lambda);
        let rs = rs_from_physics(&model, &geom).unwrap();
        let h = 1e-4;
        let dx = (mismatch_at(&model, &geom, h, 0.0) - mismatch_at(&model, &geom, -h, 0.0)) / (2.0 * h);
        let dy = (mismatch_at(&model, &geom, 0.0, h) - mismatch_at(&model, &geom, 0.0, -h)) / (2.0 * h);
        prop_assert!((dx - rs.r).abs() < 1e-5 * rs.r.abs().max(1.0), "{dx} vs {}", rs.r);
        prop_assert!((dy - rs.s).abs() < 1e-5 * rs.r.abs().max(1.0), "{dy} vs {}", rs.s);
    }

    #[test]
    fn chi3_squares_the_pump(r in 0.5..3.0f64, s in -3.0..-0.2f64) {
        let g = Grid1D::symmetric(6.0, 48).unwrap();
        let rs = jsa_forge::dispersion::MismatchParams { r, s, degenerate: false };
        let pmf = SpectralFn::gaussian();
        let pump = SpectralFn::Gaussian { width: 1.0, chirp: 0.5 };
        let sq = build_jsa_linear(&pmf, &pump, rs, g, g, GvdOptions { chi3: true }).unwrap();
        let manual = jsa_forge::JointAmplitude::from_fn(g, g, |x, y| {
            pmf.eval(r * x + s * y) * pump.eval(x + y) * pump.eval(x + y)
        })
        .unwrap();
        let worst = (&sq.values - &manual.values).iter().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-12);
    }
}

#[test]
fn ktp_index_exceeds_one_inside_its_window() {
    let model = DispersionModel::ktp();
    for i in 0..3 {
        let m = model.mode(i);
        let [lo, hi] = m.valid_um();
        for k in 0..=400 {
            let l = lo + (hi - lo) * k as f64 / 400.0;
            let n = m.index(l).unwrap();
            assert!(n > 1.0 && n < 3.0, "mode {i} at {l} um: n = {n}");
        }
        assert_eq!(m.index(lo - 1e-3).unwrap_err().kind(), "ModelRangeError");
        assert_eq!(m.index(hi + 1e-3).unwrap_err().kind(), "ModelRangeError");
    }
}

#[test]
fn slow_axis_is_slower() {
    // z-polarized light is the slow axis of KTP at every wavelength of the window.
    let model = DispersionModel::ktp();
    for l in [0.5, 0.8, 1.2, 2.4, 3.2] {
        assert!(model.mode1.index(l).unwrap() > model.mode0.index(l).unwrap());
    }
}

#[test]
fn sweep_outside_the_window_is_reported() {
    let model = DispersionModel::ktp();
    // 2 × 1.9 um idler is beyond 3.54 um.
    let geom = ProcessGeometry::degenerate(0.02, 1e-13, 1.9e-6);
    assert_eq!(
        rs_from_physics(&model, &geom).unwrap_err().kind(),
        "ModelRangeError"
    );
    let g = Grid1D::symmetric(6.0, 16).unwrap();
    let near_edge = ProcessGeometry::degenerate(0.02, 1e-15, 1.7e-6);
    let err = build_jsa_gvd(
        &model,
        &near_edge,
        &SpectralFn::gaussian(),
        &SpectralFn::gaussian(),
        g,
        g,
        GvdOptions { chi3: false },
    )
    .unwrap_err();
    assert_eq!(err.kind(), "ModelRangeError");
}

#[test]
fn model_files_round_trip() {
    let text = r#"{
        "pump":   {"form": "sellmeier-1pole", "A": 2.1, "B": 0.9, "C": 0.04, "D": 0.01, "valid_um": [0.4, 3.0]},
        "signal": {"form": "sellmeier-1pole", "A": 2.2, "B": 0.9, "C": 0.04, "D": 0.01, "valid_um": [0.4, 3.0]},
        "idler":  {"form": "sellmeier-1pole", "A": 2.1, "B": 0.9, "C": 0.04, "D": 0.01, "valid_um": [0.4, 3.0]},
        "poling_period_m": 9.0e-6,
        "source": "made up"
    }"#;
    let model = DispersionModel::from_json(text).unwrap();
    let again = DispersionModel::from_json(&serde_json::to_string(&model).unwrap()).unwrap();
    assert_eq!(model, again);
    let n = model.mode0.index(1.0).unwrap();
    assert!((n * n - (2.1 + 0.9 / (1.0 - 0.04) - 0.01)).abs() < 1e-12);
    assert!(model.mode1.wavevector(wavelength_to_omega(1e-6)).unwrap() > 0.0);
}

#[test]
fn empty_window_is_rejected() {
    let text = r#"{"0": {"form": "constant", "n": 1.5, "valid_um": [2.0, 1.0]},
                   "1": {"form": "constant", "n": 1.5}, "2": {"form": "constant", "n": 1.5},
                   "source": "x"}"#;
    assert_eq!(
        DispersionModel::from_json(text).unwrap_err().kind(),
        "FormatError"
    );
}
