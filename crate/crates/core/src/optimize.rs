//! Search for the pump ket that keeps the beam-splitter output separable.
//!
//! For a fixed phase-matching ket `|φ⟩` and angle `θ` the objective is
//!
//! ```text
//! F(γ′) = (Q − λ|⟨γ′|b̂|γ′⟩|²) / ⟨γ′|γ′⟩²,   Q = ‖C C†‖²_F,  C = Û_BS(θ)(|φ⟩⊗|γ′⟩)
//! ```
//!
//! over unnormalized `|γ′⟩ = Σ (uₙ + i vₙ)|n⟩`. `Q/⟨γ′|γ′⟩²` is the purity of
//! the output, so `F` is the purity minus a penalty on the pump displacement,
//! and it is invariant under complex rescaling of `γ′`.
//!
//! Each restart runs an L-BFGS ascent with an Armijo backtracking line
//! search, so the objective never decreases along a run.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::c64;
use crate::error::{Error, Result};
use crate::fock::fidelity::{squeezed_fidelity, SqueezedFit};
use crate::fock::ket::{squeezed_vacuum_raw, FockKet};
use crate::fock::mapping::{BeamSplitterMap, TRUNCATION_LIMIT};
use crate::fock::ops::{squeeze_ket, BeamSplitter};
use crate::grid::Grid1D;
use crate::par;
use crate::perturbative::{moments, optimal_pump_n};
use crate::spectral::SpectralFn;

const HISTORY: usize = 10;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACK: usize = 60;
/// Consecutive iterations without measurable progress before a run stops.
const STALL_ITERS: usize = 8;
/// A stalled run still counts as converged below this scaled gradient.
const STALL_GRAD: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Truncation `N` of the pump ket.
    pub n_trunc: usize,
    /// Weight `λ` of the displacement penalty.
    pub lambda: f64,
    pub restarts: usize,
    pub theta: f64,
    pub max_iters: usize,
    /// Stop when `‖∇F‖·‖params‖` falls below this.
    pub grad_tol: f64,
    pub seed: u64,
    /// Start restart 0 from the best of the vacuum and the squeezed vacuum
    /// predicted by the small-angle analysis.
    pub warm_start: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            n_trunc: 30,
            lambda: 10.0,
            restarts: 80,
            theta: std::f64::consts::FRAC_PI_8,
            max_iters: 2000,
            grad_tol: 1e-8,
            seed: 0,
            warm_start: true,
        }
    }
}

impl OptimizerConfig {
    pub fn with_theta(theta: f64) -> Self {
        Self {
            theta,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) {
            return Err(Error::Domain(format!(
                "lambda must be positive (got {})",
                self.lambda
            )));
        }
        if self.restarts == 0 {
            return Err(Error::Domain("at least one restart is required".into()));
        }
        if self.n_trunc < 2 {
            return Err(Error::Domain("truncation must be at least 2".into()));
        }
        if !self.theta.is_finite() || !(self.grad_tol > 0.0) {
            return Err(Error::Domain(
                "theta and grad_tol must be finite, grad_tol positive".into(),
            ));
        }
        Ok(())
    }
}

/// Final state of one restart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub index: usize,
    pub purity: f64,
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimizationResult {
    /// Normalized, with its largest coefficient real and positive.
    pub best_ket: FockKet,
    pub best_purity: f64,
    pub best_index: usize,
    pub squeezed_fit: SqueezedFit,
    pub restart_trace: Vec<RestartRecord>,
}

/// Objective with its fixed data: the `φ` ket and the precomputed beam
/// splitter.
pub struct Objective {
    phi: Vec<c64>,
    n: usize,
    lambda: f64,
    bs: BeamSplitter,
}

/// Value, gradient and purity at one point.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub cost: f64,
    pub purity: f64,
    pub gradient: Vec<f64>,
}

fn to_ket(params: &[f64]) -> Vec<c64> {
    let n = params.len() / 2;
    (0..n).map(|b| c64::new(params[b], params[n + b])).collect()
}

fn from_ket(coeffs: &[c64]) -> Vec<f64> {
    coeffs
        .iter()
        .map(|c| c.re)
        .chain(coeffs.iter().map(|c| c.im))
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl Objective {
    pub fn new(phi: &FockKet, cfg: &OptimizerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            phi: phi.coeffs.clone(),
            n: cfg.n_trunc,
            lambda: cfg.lambda,
            bs: BeamSplitter::new(cfg.theta, phi.dim() + cfg.n_trunc - 2),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn check(&self, params: &[f64]) -> Result<f64> {
        if params.len() != 2 * self.n {
            return Err(Error::Domain(format!(
                "expected {} parameters, got {}",
                2 * self.n,
                params.len()
            )));
        }
        let s = dot(params, params);
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Domain(
                "parameter vector must be nonzero and finite".into(),
            ));
        }
        Ok(s)
    }

    /// Objective value only.
    pub fn cost(&self, params: &[f64]) -> Result<f64> {
        Ok(self.evaluate(params)?.cost)
    }

    /// Value and analytic gradient.
    pub fn evaluate(&self, params: &[f64]) -> Result<Evaluation> {
        let s = self.check(params)?;
        let n = self.n;
        let gamma = to_ket(params);
        let input = DMatrix::from_fn(self.phi.len(), n, |a, b| self.phi[a] * gamma[b]);
        let c = self.bs.apply(&input);
        let rho = &c * c.adjoint();
        let q = rho.norm_squared();
        let d: c64 = (0..n - 1)
            .map(|k| gamma[k].conj() * ((k + 1) as f64).sqrt() * gamma[k + 1])
            .sum();
        let s2 = s * s;
        let cost = (q - self.lambda * d.norm_sqr()) / s2;

        // dQ = 4 Re Σ conj(dγ_b) z_b with z = (φ† ⊗ 𝕀) Û†(ρ C).
        let g = &rho * &c;
        let h = self.bs.apply_adjoint_into(&g, self.phi.len().max(n));
        let z: Vec<c64> = (0..n)
            .map(|b| {
                (0..self.phi.len())
                    .map(|a| self.phi[a].conj() * h[(a, b)])
                    .sum()
            })
            .collect();

        let mut grad = vec![0.0; 2 * n];
        for b in 0..n {
            let up = if b + 1 < n {
                ((b + 1) as f64).sqrt() * gamma[b + 1]
            } else {
                c64::new(0.0, 0.0)
            };
            let down = if b > 0 {
                (b as f64).sqrt() * gamma[b - 1].conj()
            } else {
                c64::new(0.0, 0.0)
            };
            let dd_u = up + down;
            let dd_v = c64::new(0.0, -1.0) * up + c64::new(0.0, 1.0) * down;
            let dpen_u = 2.0 * (d.conj() * dd_u).re;
            let dpen_v = 2.0 * (d.conj() * dd_v).re;
            let dq_u = 4.0 * z[b].re;
            let dq_v = 4.0 * z[b].im;
            grad[b] = (dq_u - self.lambda * dpen_u) / s2 - 2.0 * cost * 2.0 * params[b] / s;
            grad[n + b] = (dq_v - self.lambda * dpen_v) / s2 - 2.0 * cost * 2.0 * params[n + b] / s;
        }
        Ok(Evaluation {
            cost,
            purity: q / s2,
            gradient: grad,
        })
    }
}

/// `F` for the given parameters.
pub fn cost(params: &[f64], phi: &FockKet, cfg: &OptimizerConfig) -> Result<f64> {
    Objective::new(phi, cfg)?.cost(params)
}

/// `∂F/∂(u, v)`.
pub fn gradient(params: &[f64], phi: &FockKet, cfg: &OptimizerConfig) -> Result<Vec<f64>> {
    Ok(Objective::new(phi, cfg)?.evaluate(params)?.gradient)
}

/// One ascent run.
#[derive(Clone, Debug)]
pub struct Ascent {
    pub params: Vec<f64>,
    pub cost: f64,
    pub purity: f64,
    /// Objective after each accepted step, starting with the initial value.
    pub history: Vec<f64>,
    pub converged: bool,
    pub scaled_grad: f64,
}

/// L-BFGS ascent from `start`.
pub fn ascend(obj: &Objective, start: Vec<f64>, max_iters: usize, grad_tol: f64) -> Result<Ascent> {
    let mut x = start;
    let x_norm = norm(&x);
    x.iter_mut().for_each(|v| *v /= x_norm);
    let mut ev = obj.evaluate(&x)?;
    let mut history = vec![ev.cost];
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut stall = 0;
    let mut converged = false;
    let mut scaled = norm(&ev.gradient) * norm(&x);

    for _ in 0..max_iters {
        scaled = norm(&ev.gradient) * norm(&x);
        if scaled <= grad_tol {
            converged = true;
            break;
        }
        // Work with f = −F so the two-loop recursion is the usual descent one.
        let g: Vec<f64> = ev.gradient.iter().map(|v| -v).collect();
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(pairs.len());
        for (s, y, rho) in pairs.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        let scale = pairs
            .back()
            .map_or(1.0 / norm(&g).max(1e-300), |(s, y, _)| {
                dot(s, y) / dot(y, y)
            });
        q.iter_mut().for_each(|v| *v *= scale);
        for ((s, y, rho), a) in pairs.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            pairs.clear();
            dir = g.iter().map(|v| -v / norm(&g)).collect();
            slope = dot(&g, &dir);
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACK {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + t * di).collect();
            if let Ok(e) = obj.evaluate(&trial) {
                if -e.cost <= -ev.cost + ARMIJO * t * slope && e.cost >= ev.cost {
                    accepted = Some((trial, e));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((x_new, ev_new)) = accepted else {
            converged = scaled <= STALL_GRAD;
            break;
        };
        let gain = ev_new.cost - ev.cost;
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = ev
            .gradient
            .iter()
            .zip(&ev_new.gradient)
            .map(|(a, b)| a - b)
            .collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 * norm(&s) * norm(&y) {
            if pairs.len() == HISTORY {
                pairs.pop_front();
            }
            pairs.push_back((s, y, 1.0 / sy));
        }
        x = x_new;
        ev = ev_new;
        history.push(ev.cost);

        // The objective is scale invariant; keep the parameters near the
        // unit sphere so curvature pairs stay comparable.
        let nx = norm(&x);
        if !(0.5..=2.0).contains(&nx) {
            x.iter_mut().for_each(|v| *v /= nx);
            ev = obj.evaluate(&x)?;
            pairs.clear();
        }

        if gain <= 1e-15 * (1.0 + ev.cost.abs()) {
            stall += 1;
            if stall >= STALL_ITERS {
                scaled = norm(&ev.gradient) * norm(&x);
                converged = scaled <= STALL_GRAD;
                break;
            }
        } else {
            stall = 0;
        }
    }
    if !converged {
        scaled = norm(&ev.gradient) * norm(&x);
        converged = scaled <= grad_tol;
    }
    Ok(Ascent {
        params: x,
        cost: ev.cost,
        purity: ev.purity,
        history,
        converged,
        scaled_grad: scaled,
    })
}

/// Starting parameters for restart `index`: standard normal draws from a
/// ChaCha8 stream selected by the restart index.
pub fn random_start(seed: u64, index: usize, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    (0..2 * n)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect()
}

/// Warm start: the better of the vacuum and the squeezed vacuum whose photon
/// number minimizes the small-angle entanglement.
pub fn warm_start(obj: &Objective, phi: &FockKet) -> Result<Vec<f64>> {
    let n = obj.dim();
    let mut vacuum = vec![0.0; 2 * n];
    vacuum[0] = 1.0;
    let Ok(opt) = moments(phi).and_then(optimal_pump_n) else {
        return Ok(vacuum);
    };
    let squeezed = from_ket(&squeezed_vacuum_raw(opt.mu, opt.phase, n));
    let (cv, cs) = (obj.cost(&vacuum)?, obj.cost(&squeezed)?);
    Ok(if cs > cv { squeezed } else { vacuum })
}

/// Rotates the global phase so the largest coefficient is real and positive.
fn canonical_phase(coeffs: &[c64]) -> Vec<c64> {
    let lead =
        coeffs.iter().copied().fold(
            c64::new(0.0, 0.0),
            |a, c| if c.norm() > a.norm() { c } else { a },
        );
    let rot = if lead.norm() > 0.0 {
        lead.conj() / lead.norm()
    } else {
        c64::new(1.0, 0.0)
    };
    coeffs.iter().map(|c| c * rot).collect()
}

/// Maximizes `F` over `cfg.restarts` independent starts and returns the
/// highest-purity converged ket.
pub fn optimize_pump(phi: &FockKet, cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    let obj = Objective::new(phi, cfg)?;
    let warm = if cfg.warm_start {
        Some(warm_start(&obj, phi)?)
    } else {
        None
    };
    let runs = par::map_range(cfg.restarts, |i| {
        let start = match (&warm, i) {
            (Some(w), 0) => w.clone(),
            _ => random_start(cfg.seed, i, cfg.n_trunc),
        };
        ascend(&obj, start, cfg.max_iters, cfg.grad_tol)
    });
    let runs: Vec<Ascent> = runs.into_iter().collect::<Result<_>>()?;
    let trace: Vec<RestartRecord> = runs
        .iter()
        .enumerate()
        .map(|(index, a)| RestartRecord {
            index,
            purity: a.purity,
            cost: a.cost,
            iterations: a.history.len() - 1,
            converged: a.converged,
        })
        .collect();
    let best = trace
        .iter()
        .filter(|r| r.converged)
        .fold(None::<&RestartRecord>, |b, r| match b {
            Some(b) if b.purity >= r.purity => Some(b),
            _ => Some(r),
        })
        .copied();
    let Some(best) = best else {
        return Err(Error::OptimizationFailure {
            trace: trace.iter().map(|r| (r.index, r.purity)).collect(),
        });
    };
    let ket = FockKet::new(canonical_phase(&to_ket(&runs[best.index].params)))?;
    let squeezed_fit = squeezed_fidelity(&ket);
    Ok(OptimizationResult {
        best_ket: ket,
        best_purity: best.purity,
        best_index: best.index,
        squeezed_fit,
        restart_trace: trace,
    })
}

/// Physical pump `Ŝ(1/ν)|γ′⟩`, synthesized as a sampled function on `g`.
pub fn recover_physical_pump(
    gamma_prime: &FockKet,
    map: &BeamSplitterMap,
    g: Grid1D,
) -> Result<SpectralFn> {
    let out_dim = gamma_prime.dim() + 40;
    let k = if map.nu == 1.0 {
        gamma_prime.clone()
    } else {
        squeeze_ket(gamma_prime, 1.0 / map.nu, out_dim)?
    };
    let lost = 1.0 - k.captured_weight;
    if lost > TRUNCATION_LIMIT {
        return Err(Error::Truncation {
            tail: lost,
            limit: TRUNCATION_LIMIT,
        });
    }
    k.to_spectral(g)
}
