//! Dispersive media and their spectral phase.
//!
//! Elements carry an arm sign (`+1` probe, `−1` reference) and a pass count;
//! a [`MediumStack`] phase is the signed sum of its element phases.

pub mod jet;
mod medium;
mod sellmeier;

pub use medium::{
    phase_from_index, stack_phase, taylor_from_index, taylor_from_index_fd, taylor_phase, ArmSign, MediumModel,
    MediumSpec, MediumStack, TaylorCoefficients,
};
pub use sellmeier::{
    builtin_names, sellmeier_index, DataIdentity, IndexModel, IndexTerm, SellmeierSet, MG_LT, N_BK7, WATER,
};
