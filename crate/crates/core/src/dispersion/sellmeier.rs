//! Refractive-index models loaded from versioned data files.

use std::fmt;
use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use super::jet::IndexArg;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Water at 20 °C (Daimon & Masumura 2007).
pub const WATER: &str = "water";
/// Schott N-BK7.
pub const N_BK7: &str = "n-bk7";
/// MgO-doped lithium tantalate, extraordinary polarization.
pub const MG_LT: &str = "mg-lt-e";

const BUILTIN_FILES: &[(&str, &str, &str)] = &[
    (WATER, "water_daimon2007.toml", include_str!("../../data/water_daimon2007.toml")),
    (N_BK7, "nbk7_schott.toml", include_str!("../../data/nbk7_schott.toml")),
    (MG_LT, "mglt_dolev2009.toml", include_str!("../../data/mglt_dolev2009.toml")),
];

/// Any dispersion model that yields `n` from a vacuum wavelength.
pub trait IndexModel<T: Real> {
    fn label(&self) -> &str;

    /// Validity range in meters.
    fn validity(&self) -> (T, T);

    /// Index at a vacuum wavelength given in micrometers.
    fn index_at_um<A: IndexArg<T>>(&self, wavelength_um: A) -> A;

    fn check_range(&self, wavelength: T) -> Result<()> {
        let (lo, hi) = self.validity();
        if !(wavelength >= lo && wavelength <= hi) {
            return Err(Error::WavelengthOutOfRange {
                set: self.label().to_string(),
                wavelength_nm: wavelength.as_f64() * 1e9,
                min_nm: lo.as_f64() * 1e9,
                max_nm: hi.as_f64() * 1e9,
            });
        }
        Ok(())
    }
}

/// Provenance of a data file, recorded in run reports.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct DataIdentity {
    pub name: String,
    pub version: u32,
    pub source: String,
    pub origin: String,
    pub sha256: String,
}

impl fmt::Display for DataIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} v{} ({}, sha256 {})",
            self.name,
            self.version,
            self.origin,
            &self.sha256[..12]
        )
    }
}

/// One additive contribution to `n²(λ)`, `λ` in micrometers.
#[derive(Clone, Debug, PartialEq)]
pub enum IndexTerm<T> {
    /// `b·λ²/(λ² − c)`
    Sellmeier { b: T, c: T },
    /// `a/(λ² − c)`
    Pole { a: T, c: T },
    /// `coefficient·λ^exponent`
    Power { coefficient: T, exponent: i32 },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    name: String,
    version: u32,
    #[serde(default)]
    source: String,
    valid_range_nm: [f64; 2],
    #[serde(default)]
    constant: f64,
    terms: Vec<RawTerm>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawTerm {
    Sellmeier { b: f64, c: f64 },
    Pole { a: f64, c: f64 },
    Power { coefficient: f64, exponent: i32 },
}

/// `n²(λ) = constant + Σ terms`, valid on a closed wavelength interval.
#[derive(Clone, Debug, PartialEq)]
pub struct SellmeierSet<T> {
    constant: T,
    terms: Vec<IndexTerm<T>>,
    valid_min: T,
    valid_max: T,
    identity: DataIdentity,
}

impl<T: Real> SellmeierSet<T> {
    pub fn from_toml_str(text: &str, origin: &str) -> Result<Self> {
        let bad = |reason: String| Error::IndexData {
            origin: origin.to_string(),
            reason,
        };
        let raw: RawFile = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        let [lo, hi] = raw.valid_range_nm;
        if !(lo > 0.0 && hi > lo) {
            return Err(bad(format!("invalid validity range [{lo}, {hi}] nm")));
        }
        if raw.terms.is_empty() {
            return Err(bad("no dispersion terms".into()));
        }
        let terms = raw
            .terms
            .iter()
            .map(|t| match *t {
                RawTerm::Sellmeier { b, c } => IndexTerm::Sellmeier { b: T::lit(b), c: T::lit(c) },
                RawTerm::Pole { a, c } => IndexTerm::Pole { a: T::lit(a), c: T::lit(c) },
                RawTerm::Power {
                    coefficient,
                    exponent,
                } => IndexTerm::Power {
                    coefficient: T::lit(coefficient),
                    exponent,
                },
            })
            .collect();
        let digest = Sha256::digest(text.as_bytes());
        let set = Self {
            constant: T::lit(raw.constant),
            terms,
            valid_min: T::lit(lo * 1e-9),
            valid_max: T::lit(hi * 1e-9),
            identity: DataIdentity {
                name: raw.name,
                version: raw.version,
                source: raw.source,
                origin: origin.to_string(),
                sha256: format!("{digest:x}"),
            },
        };
        set.check_physical().map_err(bad)?;
        Ok(set)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading index file {}", path.display()), e))?;
        Self::from_toml_str(&text, &path.display().to_string())
    }

    /// One of the index sets shipped with the crate ([`WATER`], [`N_BK7`], [`MG_LT`]).
    pub fn builtin(name: &str) -> Result<Self> {
        let (_, file, text) = BUILTIN_FILES
            .iter()
            .find(|(n, _, _)| *n == name)
            .ok_or_else(|| Error::IndexData {
                origin: format!("builtin:{name}"),
                reason: format!(
                    "unknown builtin index set (available: {})",
                    builtin_names().join(", ")
                ),
            })?;
        Self::from_toml_str(text, &format!("builtin:{file}"))
    }

    pub fn identity(&self) -> &DataIdentity {
        &self.identity
    }

    pub fn terms(&self) -> &[IndexTerm<T>] {
        &self.terms
    }

    fn check_physical(&self) -> std::result::Result<(), String> {
        let samples = 257;
        for i in 0..samples {
            let f = T::from_usize_lossy(i) / T::from_usize_lossy(samples - 1);
            let lambda = self.valid_min + (self.valid_max - self.valid_min) * f;
            let n2 = self.n_squared(lambda * T::lit(1e6));
            if !(n2 > T::one()) || !n2.is_finite() {
                return Err(format!(
                    "n^2 = {} is not > 1 at {:.1} nm",
                    n2,
                    lambda.as_f64() * 1e9
                ));
            }
        }
        Ok(())
    }

    fn n_squared<A: IndexArg<T>>(&self, wavelength_um: A) -> A {
        let l2 = wavelength_um * wavelength_um;
        let mut acc = A::constant(self.constant);
        for term in &self.terms {
            acc = acc
                + match *term {
                    IndexTerm::Sellmeier { b, c } => A::constant(b) * l2 / (l2 - A::constant(c)),
                    IndexTerm::Pole { a, c } => A::constant(a) / (l2 - A::constant(c)),
                    IndexTerm::Power {
                        coefficient,
                        exponent,
                    } => A::constant(coefficient) * wavelength_um.powi(exponent),
                };
        }
        acc
    }
}

impl<T: Real> IndexModel<T> for SellmeierSet<T> {
    fn label(&self) -> &str {
        &self.identity.name
    }

    fn validity(&self) -> (T, T) {
        (self.valid_min, self.valid_max)
    }

    fn index_at_um<A: IndexArg<T>>(&self, wavelength_um: A) -> A {
        self.n_squared(wavelength_um).sqrt()
    }
}

pub fn builtin_names() -> Vec<&'static str> {
    BUILTIN_FILES.iter().map(|(n, _, _)| *n).collect()
}

/// Refractive index at a vacuum wavelength (m).
pub fn sellmeier_index<T: Real, M: IndexModel<T>>(model: &M, wavelength: T) -> Result<T> {
    model.check_range(wavelength)?;
    Ok(model.index_at_um(wavelength * T::lit(1e6)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn water_index_near_one_point_three_three() {
        let water = SellmeierSet::<f64>::builtin(WATER).unwrap();
        let n = sellmeier_index(&water, 802e-9).unwrap();
        assert!(n > 1.2 && n < 1.4, "{n}");
        // sodium D line, tabulated 1.3330 at 20 C
        let nd = sellmeier_index(&water, 589.3e-9).unwrap();
        assert!((nd - 1.3330).abs() < 5e-4, "{nd}");
    }

    #[test]
    fn water_index_is_smooth_and_normally_dispersive() {
        let water = SellmeierSet::<f64>::builtin(WATER).unwrap();
        let n = |l: f64| sellmeier_index(&water, l).unwrap();
        assert!((n(802e-9) - n(802e-9 + 1e-12)).abs() < 1e-6);
        assert!(n(500e-9) > n(700e-9));
        assert!(n(700e-9) > n(900e-9));
    }

    #[test]
    fn bk7_matches_catalogue_nd() {
        let bk7 = SellmeierSet::<f64>::builtin(N_BK7).unwrap();
        let nd = sellmeier_index(&bk7, 587.56e-9).unwrap();
        assert!((nd - 1.5168).abs() < 1e-4, "{nd}");
    }

    #[test]
    fn out_of_range_is_an_error() {
        let water = SellmeierSet::<f64>::builtin(WATER).unwrap();
        let err = sellmeier_index(&water, 1500e-9).unwrap_err();
        assert!(matches!(err, Error::WavelengthOutOfRange { .. }), "{err}");
    }

    #[test]
    fn malformed_files_are_rejected() {
        let no_terms = "name='x'\nversion=1\nvalid_range_nm=[400.0, 900.0]\nterms=[]\n";
        assert!(SellmeierSet::<f64>::from_toml_str(no_terms, "t").is_err());
        let sub_unity = "name='x'\nversion=1\nvalid_range_nm=[400.0, 900.0]\nconstant=0.5\n\
                         [[terms]]\nkind='power'\ncoefficient=0.1\nexponent=0\n";
        assert!(SellmeierSet::<f64>::from_toml_str(sub_unity, "t").is_err());
        let bad_range = "name='x'\nversion=1\nvalid_range_nm=[900.0, 400.0]\n\
                         [[terms]]\nkind='sellmeier'\nb=1.0\nc=0.01\n";
        assert!(SellmeierSet::<f64>::from_toml_str(bad_range, "t").is_err());
        assert!(SellmeierSet::<f64>::builtin("unobtainium").is_err());
    }

    #[test]
    fn identity_tracks_content() {
        let a = SellmeierSet::<f64>::builtin(WATER).unwrap();
        let b = SellmeierSet::<f64>::builtin(WATER).unwrap();
        assert_eq!(a.identity(), b.identity());
        assert_eq!(a.identity().sha256.len(), 64);
        assert_ne!(a.identity().sha256, SellmeierSet::<f64>::builtin(N_BK7).unwrap().identity().sha256);
    }

    #[test]
    fn f32_evaluation_agrees_coarsely() {
        let w64 = SellmeierSet::<f64>::builtin(WATER).unwrap();
        let w32 = SellmeierSet::<f32>::builtin(WATER).unwrap();
        let a = sellmeier_index(&w64, 802e-9).unwrap();
        let b = sellmeier_index(&w32, 802e-9_f32).unwrap();
        assert!((a - b as f64).abs() < 1e-5);
    }
}
