//! Number-basis operators and the oscillator picture of the JSA.

use std::f64::consts::PI;

use jsa_forge::fock::ops::{
    beamsplitter_operator, squeeze_operator, two_mode_purity, TwoModeFockState,
};
use jsa_forge::fock::{
    map_params, project_to_fock, squeezed_vacuum, synthesize_jsa_from_fock, FockKet,
};
use jsa_forge::{build_jsa, c64, purity_schmidt, Grid1D, SpectralFn};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn max_dev_from_identity(m: &DMatrix<c64>, inner: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..inner {
        for j in 0..inner {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - want).norm());
        }
    }
    worst
}

fn beam_split_purity(a: &FockKet, b: &FockKet, theta: f64) -> f64 {
    two_mode_purity(&TwoModeFockState::product(a, b).beam_split(theta)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Near μ = 1 the squeezed columns stay inside the kept levels, so the
    // cropped operator is unitary on everything but the top ten rows.
    #[test]
    fn squeeze_is_unitary_below_the_top_levels(mu in 0.97..1.03f64, n in 20..40usize) {
        let s = squeeze_operator(mu, n).unwrap();
        prop_assert!(max_dev_from_identity(&(s.adjoint() * &s), n - 10) < 1e-8);
        prop_assert!(max_dev_from_identity(&(&s * s.adjoint()), n - 10) < 1e-8);
    }

    // Stronger squeezing spreads |n⟩ over ~cosh(2 ln μ)·n levels: keep the
    // block well inside.
    #[test]
    fn strong_squeeze_is_unitary_on_a_deep_block(mu in 0.5..2.0f64) {
        let s = squeeze_operator(mu, 140).unwrap();
        prop_assert!(max_dev_from_identity(&(s.adjoint() * &s), 20) < 1e-8);
    }

    #[test]
    fn beam_splitter_is_unitary_and_conserves_number(theta in -PI..PI) {
        let dim = 20;
        let u = beamsplitter_operator(theta, dim).map(|v| c64::new(v, 0.0));
        let interior: Vec<usize> =
            (0..dim - 10).flat_map(|n| (0..dim - 10).map(move |m| n * dim + m)).collect();
        let utu = u.transpose() * &u;
        for &i in &interior {
            for &j in &interior {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((utu[(i, j)] - want).norm() < 1e-8);
            }
        }
        let total = DMatrix::from_fn(dim * dim, dim * dim, |i, j| {
            if i == j { c64::new((i / dim + i % dim) as f64, 0.0) } else { c64::new(0.0, 0.0) }
        });
        let comm = &u * &total - &total * &u;
        prop_assert!(comm.iter().all(|v| v.norm() < 1e-10));
    }

    #[test]
    fn local_squeezing_leaves_entanglement_alone(
        theta in 0.05..1.5f64,
        mu_a in 0.8..1.25f64,
        mu_b in 0.8..1.25f64,
    ) {
        let a = project_to_fock(&SpectralFn::sech(), 14).unwrap().resized(70);
        let b = project_to_fock(&SpectralFn::Hermite { order: 2 }, 14).unwrap().resized(70);
        let out = TwoModeFockState::product(&a, &b).beam_split(theta);
        let before = two_mode_purity(&out).unwrap();
        let after = two_mode_purity(&out.squeeze_local(mu_a, mu_b).unwrap()).unwrap();
        prop_assert!((before - after).abs() < 1e-8, "{before} vs {after}");
    }
}

#[test]
fn equally_squeezed_vacua_stay_separable() {
    for mu in [0.5, 1.0, 2.0] {
        let v = squeezed_vacuum(mu, 60).unwrap();
        for theta in [PI / 8.0, PI / 4.0] {
            let p = beam_split_purity(&v, &v, theta);
            assert!((p - 1.0).abs() < 1e-6, "mu = {mu}, theta = {theta}: {p}");
        }
    }
}

#[test]
fn unequally_squeezed_vacua_entangle() {
    for (ma, mb) in [(1.0, 1.5), (0.5, 1.0), (2.0, 0.5), (1.5, 2.25)] {
        let (a, b) = (
            squeezed_vacuum(ma, 60).unwrap(),
            squeezed_vacuum(mb, 60).unwrap(),
        );
        for theta in [PI / 8.0, PI / 4.0] {
            let p = beam_split_purity(&a, &b, theta);
            assert!(p < 1.0 - 1e-3, "mu = ({ma}, {mb}), theta = {theta}: {p}");
        }
    }
}

#[test]
fn oscillator_picture_reproduces_the_grid() {
    let phis = [
        SpectralFn::gaussian(),
        SpectralFn::sinc(1.0),
        SpectralFn::sech(),
        SpectralFn::Hermite { order: 1 },
    ];
    let pumps = [SpectralFn::gaussian(), SpectralFn::sinc(1.0)];
    for (r, s) in [(1.0, -1.0), (2.0, -0.5), (4.0, -0.25)] {
        let (gx, gy) = (Grid1D::default_for(r), Grid1D::default_for(s));
        let map = map_params(r, s).unwrap();
        for phi in &phis {
            for pump in &pumps {
                let slow = matches!(phi, SpectralFn::Sinc { .. })
                    || matches!(pump, SpectralFn::Sinc { .. });
                let n = if slow { 60 } else { 30 };
                let (kp, kg) = (
                    project_to_fock(phi, n).unwrap(),
                    project_to_fock(pump, n).unwrap(),
                );
                let lost = [&kp, &kg]
                    .iter()
                    .map(|k| (1.0 - k.captured_weight).max(k.tail_weight()))
                    .fold(0.0, f64::max);
                let fock = synthesize_jsa_from_fock(&kp, &kg, &map, gx, gy).unwrap();
                let p_fock = purity_schmidt(&fock).unwrap().purity;
                let p_grid = purity_schmidt(&build_jsa(phi, pump, r, s, gx, gy).unwrap())
                    .unwrap()
                    .purity;
                let tol = (10.0 * lost).max(1e-3);
                assert!(
                    (p_fock - p_grid).abs() < tol,
                    "{} x {} at ({r}, {s}): fock {p_fock} grid {p_grid} tol {tol}",
                    phi.label(),
                    pump.label()
                );
            }
        }
    }
}

#[test]
fn smooth_inputs_match_the_grid_tightly() {
    // Without the sinc tail the only error left is quadrature.
    let g = Grid1D::symmetric(11.0, 256).unwrap();
    let phi = SpectralFn::Hermite { order: 1 };
    let pump = SpectralFn::Gaussian {
        width: 1.2,
        chirp: 0.4,
    };
    let (kp, kg) = (
        project_to_fock(&phi, 30).unwrap(),
        project_to_fock(&pump, 30).unwrap(),
    );
    for (r, s) in [(1.5, -0.4), (-0.3, 2.5)] {
        let fock = synthesize_jsa_from_fock(&kp, &kg, &map_params(r, s).unwrap(), g, g).unwrap();
        let grid = build_jsa(&phi, &pump, r, s, g, g).unwrap();
        let diff = (&fock.values - &grid.values).norm() * grid.cell_area().sqrt();
        assert!(diff < 1e-5, "({r}, {s}): L2 distance {diff}");
    }
}
