//! Joint spectral amplitudes (JSAs) of waveguided χ⁽²⁾ processes and their
//! separability.
//!
//! The crate is organised around three pictures of the same object:
//!
//! * the **grid picture** ([`jsa`], [`schmidt`]): `Ψ(x, y)` sampled on a
//!   rectangular grid of dimensionless frequencies, with purity obtained from a
//!   singular value decomposition;
//! * the **oscillator picture** ([`fock`]): the pump and phase-matching
//!   functions read as position wavefunctions of two harmonic oscillators that
//!   are squeezed and mixed on a beam splitter, represented in a truncated
//!   number basis;
//! * the **closed-form picture** ([`gaussian`], [`perturbative`]): exact
//!   Gaussian results and small-angle moment expansions.
//!
//! [`optimize`] searches for the pump ket that maximises separability for a
//! fixed phase-matching ket, and [`dispersion`] builds JSAs from refractive
//! index models including group velocity dispersion.
//!
//! Data-parallel loops (grid fills, quadratures, optimizer restarts, sweeps)
//! run on rayon when the `parallel` feature is enabled and sequentially
//! otherwise. The two agree to rounding: parallel sums are reduced in a
//! different order.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersion;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod grid;
pub mod io;
pub mod jsa;
pub mod optimize;
mod par;
pub mod perturbative;
pub mod schmidt;
pub mod spectral;

pub use error::{Error, Result};
pub use grid::Grid1D;
pub use jsa::{build_jsa, pmf_angle, to_frequency_conversion, JointAmplitude};
pub use schmidt::{
    purity_integral, purity_schmidt, schmidt_decompose, SchmidtModes, SchmidtResult,
};
pub use spectral::SpectralFn;

/// Double-precision complex number used throughout.
#[allow(non_camel_case_types)]
pub type c64 = num_complex::Complex64;

/// Crate version, echoed into every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
