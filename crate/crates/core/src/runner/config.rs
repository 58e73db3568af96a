//! Scenario files and the builtin scenarios.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dispersion::{builtin_names, ArmSign, DataIdentity, MediumModel, MediumSpec, MediumStack, SellmeierSet,
    TaylorCoefficients, N_BK7, WATER};
use crate::error::{Error, Result};
use crate::interferometry::DelayAxis;
use crate::spectra::{gaussian_spectrum, load_tabulated_spectrum, rectangular_spectrum, tapered_spectrum,
    FrequencyGrid, SpectralDensity};

/// Prefix selecting an index set shipped with the crate.
pub const BUILTIN_PREFIX: &str = "builtin:";

pub const BUILTIN_SCENARIOS: [&str; 5] = ["fig4a", "fig4b", "fig4c", "fig4d", "water3mm"];

const FS: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Lci,
    Tpi,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Lci => "lci",
            ScenarioKind::Tpi => "tpi",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumType {
    Rectangular,
    Tapered,
    Gaussian,
    File,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(rename = "type")]
    pub shape: SpectrumType,
    pub center_nm: f64,
    /// Full width (rectangular, tapered) or FWHM (gaussian).
    #[serde(default)]
    pub bandwidth_thz: f64,
    #[serde(default)]
    pub edge_width_thz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Vacuum,
    Taylor,
    Sellmeier,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub name: String,
    pub model: ModelKind,
    pub length_mm: f64,
    #[serde(default = "one_pass")]
    pub passes: i64,
    #[serde(default = "probe_arm")]
    pub arm_sign: i64,
    /// fs/mm
    #[serde(default)]
    pub beta1_fs_per_mm: f64,
    /// fs²/mm
    #[serde(default)]
    pub beta2_fs2_per_mm: f64,
    /// fs³/mm
    #[serde(default)]
    pub beta3_fs3_per_mm: f64,
    /// `builtin:<name>` or a path relative to the scenario file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<String>,
}

fn one_pass() -> i64 {
    1
}

fn probe_arm() -> i64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TpiConfig {
    pub visibility: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_n_freq")]
    pub n_freq: usize,
    /// Grid half-span in units of the spectrum's half-extent.
    #[serde(default = "default_span_factor")]
    pub span_factor: f64,
    pub delay_range_um: f64,
    #[serde(default = "default_n_delay")]
    pub n_delay: usize,
}

fn default_n_freq() -> usize {
    16385
}

fn default_span_factor() -> f64 {
    1.0
}

fn default_n_delay() -> usize {
    2001
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv, OutputFormat::Json]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub kind: ScenarioKind,
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub media: Vec<MediumConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tpi: Option<TpiConfig>,
    pub grid: GridConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
    /// Directory that relative file references resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Everything needed to compute one interferogram.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
    pub spectrum: SpectralDensity<f64>,
    pub stack: MediumStack<f64>,
    pub axis: DelayAxis<f64>,
    pub visibility: Option<f64>,
    pub data_files: Vec<DataIdentity>,
}

fn default_spectrum() -> SpectrumConfig {
    SpectrumConfig {
        shape: SpectrumType::Rectangular,
        center_nm: 802.0,
        bandwidth_thz: 166.0,
        edge_width_thz: 0.0,
        file: None,
    }
}

fn sellmeier_medium(name: &str, set: &str, length_mm: f64, passes: i64) -> MediumConfig {
    MediumConfig {
        name: name.into(),
        model: ModelKind::Sellmeier,
        length_mm,
        passes,
        arm_sign: 1,
        beta1_fs_per_mm: 0.0,
        beta2_fs2_per_mm: 0.0,
        beta3_fs3_per_mm: 0.0,
        index: Some(format!("{BUILTIN_PREFIX}{set}")),
    }
}

fn grid(delay_range_um: f64) -> GridConfig {
    GridConfig {
        n_freq: default_n_freq(),
        span_factor: default_span_factor(),
        delay_range_um,
        n_delay: default_n_delay(),
    }
}

impl ScenarioConfig {
    /// One of [`BUILTIN_SCENARIOS`].
    pub fn builtin(name: &str) -> Option<Self> {
        let glass = || sellmeier_medium("glass", N_BK7, 0.15, 2);
        let (kind, media, visibility, range) = match name {
            "fig4a" => (ScenarioKind::Lci, vec![glass()], None, 10.0),
            "fig4b" => (
                ScenarioKind::Lci,
                vec![glass(), sellmeier_medium("water", WATER, 1.0, 2)],
                None,
                30.0,
            ),
            "fig4c" => (ScenarioKind::Tpi, vec![], Some(0.73), 10.0),
            "fig4d" => (ScenarioKind::Tpi, vec![sellmeier_medium("water", WATER, 1.0, 1)], Some(0.67), 10.0),
            "water3mm" => (ScenarioKind::Tpi, vec![sellmeier_medium("water", WATER, 3.0, 1)], Some(0.67), 10.0),
            _ => return None,
        };
        Some(Self {
            name: name.into(),
            kind,
            spectrum: default_spectrum(),
            media,
            tpi: visibility.map(|visibility| TpiConfig { visibility }),
            grid: grid(range),
            outputs: OutputsConfig::default(),
            base_dir: PathBuf::from("."),
        })
    }

    pub fn from_toml_str(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut config: Self = toml::from_str(text).map_err(|e| Error::Config {
            issues: vec![e.to_string().trim().to_string()],
        })?;
        config.base_dir = base_dir.into();
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading scenario {}", path.display()), e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml_str(&text, base).map_err(|e| match e {
            Error::Config { issues } => Error::Config {
                issues: issues.into_iter().map(|i| format!("{}: {i}", path.display())).collect(),
            },
            other => other,
        })
    }

    /// A builtin scenario name or a path to a scenario file.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        match Self::builtin(name_or_path) {
            Some(config) => Ok(config),
            None if Path::new(name_or_path).exists() => Self::from_file(name_or_path),
            None => Err(Error::Config {
                issues: vec![format!(
                    "'{name_or_path}' is neither a builtin scenario ({}) nor an existing file",
                    BUILTIN_SCENARIOS.join(", ")
                )],
            }),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }

    fn resolve_path(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// Schema-level and range checks, file existence included; every issue
    /// names the offending field.
    pub fn validate(&self) -> Result<()> {
        let mut issues = Vec::new();
        let mut issue = |field: &str, message: String| issues.push(format!("{field}: {message}"));

        let s = &self.spectrum;
        if !(s.center_nm > 0.0) {
            issue("spectrum.center_nm", format!("must be positive, got {}", s.center_nm));
        }
        if !(s.bandwidth_thz > 0.0) && s.shape != SpectrumType::File {
            issue("spectrum.bandwidth_thz", format!("must be positive, got {}", s.bandwidth_thz));
        }
        if s.shape == SpectrumType::Tapered && !(s.edge_width_thz >= 0.0 && s.edge_width_thz <= s.bandwidth_thz) {
            issue(
                "spectrum.edge_width_thz",
                format!("must lie in [0, bandwidth_thz], got {}", s.edge_width_thz),
            );
        }
        if s.shape == SpectrumType::File {
            match &s.file {
                None => issue("spectrum.file", "required for type = \"file\"".into()),
                Some(f) => {
                    let resolved = self.resolve_path(f);
                    if !resolved.is_file() {
                        issue("spectrum.file", format!("file not found: {}", resolved.display()));
                    }
                }
            }
        }

        for (i, m) in self.media.iter().enumerate() {
            let field = |f: &str| format!("media[{i}].{f}");
            if !(m.passes == 1 || m.passes == 2) {
                issue(&field("passes"), format!("must be 1 or 2, got {}", m.passes));
            }
            if !(m.arm_sign == 1 || m.arm_sign == -1) {
                issue(&field("arm_sign"), format!("must be +1 or -1, got {}", m.arm_sign));
            }
            if !(m.length_mm >= 0.0) || !m.length_mm.is_finite() {
                issue(&field("length_mm"), format!("must be >= 0, got {}", m.length_mm));
            }
            match (m.model, &m.index) {
                (ModelKind::Sellmeier, None) => issue(&field("index"), "required for model = \"sellmeier\"".into()),
                (ModelKind::Sellmeier, Some(index)) => {
                    if let Some(name) = index.strip_prefix(BUILTIN_PREFIX) {
                        if !builtin_names().contains(&name) {
                            issue(
                                &field("index"),
                                format!("unknown builtin '{name}' (available: {})", builtin_names().join(", ")),
                            );
                        }
                    } else {
                        let resolved = self.resolve_path(Path::new(index));
                        if !resolved.is_file() {
                            issue(&field("index"), format!("file not found: {}", resolved.display()));
                        }
                    }
                }
                (_, Some(_)) => issue(&field("index"), "only valid for model = \"sellmeier\"".into()),
                _ => {}
            }
        }

        match (self.kind, &self.tpi) {
            (ScenarioKind::Tpi, None) => issue("tpi.visibility", "required for kind = \"tpi\"".into()),
            (_, Some(t)) if !(t.visibility >= 0.0 && t.visibility <= 1.0) => {
                issue("tpi.visibility", format!("must lie in [0, 1], got {}", t.visibility));
            }
            _ => {}
        }

        let g = &self.grid;
        if g.n_freq < 3 || g.n_freq % 2 == 0 {
            issue("grid.n_freq", format!("must be odd and >= 3, got {}", g.n_freq));
        }
        if !(g.span_factor >= 1.0) {
            issue("grid.span_factor", format!("must be >= 1, got {}", g.span_factor));
        }
        if !(g.delay_range_um > 0.0) {
            issue("grid.delay_range_um", format!("must be positive, got {}", g.delay_range_um));
        }
        if g.n_delay < 3 {
            issue("grid.n_delay", format!("must be >= 3, got {}", g.n_delay));
        }
        if self.outputs.formats.is_empty() {
            issue("outputs.formats", "at least one format is required".into());
        }

        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::Config { issues })
        }
    }

    /// Validates the configuration and materializes spectrum, stack and axis.
    pub fn build(&self) -> Result<Scenario> {
        self.validate()?;
        let s = &self.spectrum;
        let center = s.center_nm * 1e-9;
        let bandwidth = s.bandwidth_thz * 1e12;
        let edge = s.edge_width_thz * 1e12;
        let half_extent = match s.shape {
            SpectrumType::Rectangular => std::f64::consts::PI * bandwidth,
            SpectrumType::Tapered => std::f64::consts::PI * (bandwidth + edge),
            SpectrumType::Gaussian => 3.0 * std::f64::consts::PI * bandwidth,
            // tables: cover the band given, or ±25% of ω₀
            SpectrumType::File if bandwidth > 0.0 => std::f64::consts::PI * bandwidth,
            SpectrumType::File => 0.25 * crate::scalar::angular_frequency(center),
        };
        let grid = FrequencyGrid::around_wavelength(center, half_extent * self.grid.span_factor, self.grid.n_freq)?;
        let mut data_files = Vec::new();
        let spectrum = match s.shape {
            SpectrumType::Rectangular => rectangular_spectrum(center, bandwidth, &grid)?,
            SpectrumType::Tapered => tapered_spectrum(center, bandwidth, edge, &grid)?,
            SpectrumType::Gaussian => gaussian_spectrum(center, bandwidth, &grid)?,
            SpectrumType::File => {
                let path = self.resolve_path(s.file.as_deref().expect("validated"));
                let bytes = std::fs::read(&path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
                data_files.push(DataIdentity {
                    name: path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
                    version: 0,
                    source: "spectrum table".into(),
                    origin: path.display().to_string(),
                    sha256: format!("{:x}", Sha256::digest(&bytes)),
                });
                load_tabulated_spectrum(&path, &grid)?
            }
        };

        let mut stack = MediumStack::empty();
        for m in &self.media {
            let model = match m.model {
                ModelKind::Vacuum => MediumModel::Vacuum,
                ModelKind::Taylor => MediumModel::Taylor(TaylorCoefficients::new(
                    m.beta1_fs_per_mm * FS / 1e-3,
                    m.beta2_fs2_per_mm * FS * FS / 1e-3,
                    m.beta3_fs3_per_mm * FS * FS * FS / 1e-3,
                )),
                ModelKind::Sellmeier => {
                    let index = m.index.as_deref().expect("validated");
                    let set = match index.strip_prefix(BUILTIN_PREFIX) {
                        Some(name) => SellmeierSet::builtin(name)?,
                        None => SellmeierSet::from_file(self.resolve_path(Path::new(index)))?,
                    };
                    MediumModel::Sellmeier(Arc::new(set))
                }
            };
            let arm = ArmSign::from_sign(m.arm_sign as i32)?;
            stack.push(MediumSpec::new(m.name.clone(), model, m.length_mm * 1e-3, m.passes as u8, arm)?);
        }
        for set in stack.index_sets() {
            data_files.push(set.identity().clone());
        }

        let axis = DelayAxis::symmetric(self.grid.delay_range_um * 1e-6, self.grid.n_delay)?;
        Ok(Scenario {
            name: self.name.clone(),
            kind: self.kind,
            spectrum,
            stack,
            axis,
            visibility: self.tpi.as_ref().map(|t| t.visibility),
            data_files,
        })
    }

    /// Sets the numeric field at a dotted path such as `media.water.length_mm`
    /// or `spectrum.bandwidth_thz`; array elements are addressed by index or
    /// by their `name`.
    pub fn with_parameter(&self, path: &str, value: f64) -> Result<Self> {
        let bad = |reason: String| Error::Config {
            issues: vec![format!("{path}: {reason}")],
        };
        let mut root = serde_json::to_value(self).map_err(|e| bad(e.to_string()))?;
        let mut node = &mut root;
        for segment in path.split('.') {
            node = match node {
                serde_json::Value::Object(map) => map
                    .get_mut(segment)
                    .ok_or_else(|| bad(format!("no field '{segment}'")))?,
                serde_json::Value::Array(items) => {
                    let position = match segment.parse::<usize>() {
                        Ok(i) if i < items.len() => i,
                        _ => items
                            .iter()
                            .position(|item| item.get("name").and_then(|n| n.as_str()) == Some(segment))
                            .ok_or_else(|| bad(format!("no element '{segment}'")))?,
                    };
                    &mut items[position]
                }
                _ => return Err(bad(format!("cannot descend into '{segment}'"))),
            };
        }
        let replacement = match node {
            serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => {
                if value.fract() != 0.0 {
                    return Err(bad(format!("integer field cannot take {value}")));
                }
                serde_json::Value::from(value as i64)
            }
            serde_json::Value::Number(_) => serde_json::Value::from(value),
            _ => return Err(bad("not a numeric field".into())),
        };
        *node = replacement;
        let mut updated: Self = serde_json::from_value(root).map_err(|e| bad(e.to_string()))?;
        updated.base_dir = self.base_dir.clone();
        Ok(updated)
    }
}

/// Loads (or expands) a scenario and checks it without computing anything.
pub fn validate_config(name_or_path: &str) -> Result<ScenarioConfig> {
    let config = ScenarioConfig::resolve(name_or_path)?;
    config.validate()?;
    Ok(config)
}
