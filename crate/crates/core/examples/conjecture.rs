//! Does the optimal pump always look like a squeezed vacuum?
//!
//! For each phase-matching ket and each θ = kπ/32 the optimizer's best pump
//! is compared with its closest squeezed vacuum. Fidelities below 0.999 are
//! printed as counterexample candidates; they are evidence, not failures.
//!
//!     cargo run --release --example conjecture -- [restarts] [seed]

use std::f64::consts::PI;

use jsa_forge::c64;
use jsa_forge::fock::{project_to_fock, FockKet};
use jsa_forge::optimize::{optimize_pump, OptimizerConfig};
use jsa_forge::SpectralFn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N: usize = 30;

fn random_even_ket(seed: u64) -> FockKet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<c64> = (0..N)
        .map(|n| {
            if n % 2 == 0 && n < 12 {
                c64::new(rng.random_range(-1.0..1.0), 0.0) / (1.0 + n as f64)
            } else {
                c64::new(0.0, 0.0)
            }
        })
        .collect();
    FockKet::new(coeffs).expect("nonzero ket")
}

fn main() {
    let mut args = std::env::args().skip(1);
    let restarts: usize = args
        .next()
        .map_or(20, |a| a.parse().expect("restarts must be an integer"));
    let seed: u64 = args
        .next()
        .map_or(0, |a| a.parse().expect("seed must be an integer"));

    let kets = [
        (
            "sinc(0.71)",
            project_to_fock(&SpectralFn::sinc(0.71), N).unwrap(),
        ),
        ("sech", project_to_fock(&SpectralFn::sech(), N).unwrap()),
        (
            "hermite(2)",
            project_to_fock(&SpectralFn::Hermite { order: 2 }, N).unwrap(),
        ),
        ("random even", random_even_ket(seed)),
    ];

    println!(
        "{:<12} {:>6} {:>10} {:>10} {:>8}",
        "phi", "k", "purity", "fidelity", "mu"
    );
    let mut candidates = Vec::new();
    for (name, phi) in &kets {
        for k in 1..=8 {
            let cfg = OptimizerConfig {
                n_trunc: N,
                restarts,
                seed,
                ..OptimizerConfig::with_theta(k as f64 * PI / 32.0)
            };
            let res = match optimize_pump(phi, &cfg) {
                Ok(r) => r,
                Err(e) => {
                    println!("{name:<12} {k:>6} failed: {e}");
                    continue;
                }
            };
            let fit = res.squeezed_fit;
            println!(
                "{name:<12} {k:>6} {:>10.6} {:>10.6} {:>8.4}",
                res.best_purity, fit.fidelity, fit.mu
            );
            if fit.fidelity < 0.999 {
                candidates.push((*name, k, fit.fidelity));
            }
        }
    }
    if candidates.is_empty() {
        println!("\nno candidates below 0.999");
    } else {
        println!("\ncandidates below 0.999:");
        for (name, k, f) in candidates {
            println!("  {name} at {k}pi/32: {f:.6}");
        }
    }
}
