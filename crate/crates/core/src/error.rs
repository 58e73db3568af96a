use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the simulation and analysis modules.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),

    #[error("spectrum truncated: band half-width {band:.6e} rad/s exceeds grid half-span {span:.6e} rad/s")]
    SpectrumTruncation { band: f64, span: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("spectrum ingestion failed ({path}): {reason}")]
    Ingestion { path: PathBuf, reason: String },

    #[error("medium '{medium}' uses the {found} model, expected {expected}")]
    ModelMismatch {
        medium: String,
        expected: &'static str,
        found: &'static str,
    },

    #[error("wavelength {wavelength_nm:.3} nm is outside the validity range [{min_nm}, {max_nm}] nm of index set '{set}'")]
    WavelengthOutOfRange {
        set: String,
        wavelength_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("invalid index data ({origin}): {reason}")]
    IndexData { origin: String, reason: String },

    #[error("position {z:.6e} m is outside the device [0, {length:.6e}] m")]
    PositionOutOfRange { z: f64, length: f64 },

    #[error("no phase-matching solution: {0}")]
    NoPhaseMatch(String),

    #[error("spectral grid under-resolves the delay range: {samples_per_cycle:.2} samples per phase cycle (need >= {required})")]
    UnderResolved { samples_per_cycle: f64, required: f64 },

    #[error("no localized lobe: the profile never returns below its half level")]
    NoLocalization,

    #[error("ambiguous width: {} disjoint lobes above the half level: {lobes:?}", lobes.len())]
    AmbiguousLobes { lobes: Vec<(f64, f64)> },

    #[error("gaussian fit did not converge after {iterations} iterations (best fwhm {best_fwhm:.6e} m, rms {best_rms:.3e})")]
    FitFailure {
        iterations: usize,
        best_fwhm: f64,
        best_rms: f64,
    },

    #[error("expected a dip below the baseline, found a peak")]
    NotADip,

    #[error("asymmetry undefined: total dip deficit is zero")]
    UndefinedAsymmetry,

    #[error("operation needs a {expected} interferogram")]
    WrongKind { expected: &'static str },

    #[error("invalid scenario configuration:\n  {}", issues.join("\n  "))]
    Config { issues: Vec<String> },

    #[error("quadrature did not converge: doubling deviation {deviation:.3e} (need < 1e-6)")]
    Unconverged { deviation: f64 },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
