//! Truncated number-basis picture of the JSA.

pub mod fidelity;
pub mod hermite;
pub mod ket;
pub mod mapping;
pub mod ops;

pub use fidelity::{squeezed_fidelity, SqueezedFit};
pub use hermite::{hermite_table, hermite_wavefunction};
pub use ket::{parity_apply, project_to_fock, squeezed_vacuum, squeezed_vacuum_phase, FockKet};
pub use mapping::{map_params, synthesize_jsa_from_fock, BeamSplitterMap};
pub use ops::{
    beamsplitter_operator, squeeze_ket, squeeze_operator, squeeze_operator_phase, two_mode_purity,
    BeamSplitter, TwoModeFockState,
};

/// Truncation used when none is given.
pub const DEFAULT_TRUNCATION: usize = 30;
