//! Contact-geometric thermodynamics.
//!
//! Equilibria are Legendrian submanifolds of the thermodynamic phase space
//! `(z, S, T, p, q)` with the Gibbs form `dz - S dT - Σ p dq`; admissible
//! processes are paths on which the form is non-negative. The crate builds
//! equilibrium Legendrians for finite microstate systems and two closed-form
//! models (ideal gas, Curie-Weiss magnet), finds Reeb chords between them,
//! and simulates slow isotopies, jumps and Fokker-Planck relaxation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chords;
pub mod error;
pub mod figures;
pub mod io;
pub mod microstate;
pub mod models;
pub mod phase_space;
pub mod processes;
pub mod roots;
pub mod verify;

pub use chords::{cw_chord, find_chords, find_model_chords, gas_chord, Chord};
pub use error::{Result, ThermoError};
pub use microstate::{
    entropy, free_energy, gibbs, internal_energy, lift_to_extended, pressures, AffineHamiltonian, Density,
    GibbsResult, MicrostateSpace,
};
pub use models::{CurieWeissParams, FrontFunction, IdealGasParams, ModelKind};
pub use phase_space::{
    check_path_nonnegative, eval_extended_form, eval_reduced_form, ExtendedPoint, ExtendedVelocity, NonnegReport,
    ReducedPoint, ReducedVelocity, ReductionSpec, SampledPath,
};
pub use processes::{
    fokker_planck_relax, run_slow_isotopy, stirling_cycle, ultrafast_jump, Schedule, SlowModel, TemperatureProfile,
};
