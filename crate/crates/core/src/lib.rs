//! Simulation of low-coherence (LCI) and two-photon (TPI) interferometry
//! through dispersive media, plus the chirped quasi-phase-matching grating
//! used as the photon-pair source.
//!
//! Numerical modules are generic over [`scalar::Real`]; the aliases below
//! fix the scalar to `f64`, which is what the runner and CLI use.

pub mod analysis;
pub mod dispersion;
pub mod error;
pub mod interferometry;
pub mod qpm;
pub mod runner;
pub mod scalar;
pub mod spectra;

pub use error::{Error, Result};
pub use scalar::{Real, SPEED_OF_LIGHT};

pub type FrequencyGrid = spectra::FrequencyGrid<f64>;
pub type SpectralDensity = spectra::SpectralDensity<f64>;
pub type MediumSpec = dispersion::MediumSpec<f64>;
pub type MediumStack = dispersion::MediumStack<f64>;
pub type SellmeierSet = dispersion::SellmeierSet<f64>;
pub type TaylorCoefficients = dispersion::TaylorCoefficients<f64>;
pub type QpmGrating = qpm::QpmGrating<f64>;
pub type DelayAxis = interferometry::DelayAxis<f64>;
pub type Interferogram = interferometry::Interferogram<f64>;
pub type FwhmReport = analysis::FwhmReport<f64>;
