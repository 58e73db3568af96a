//! Scenario-driven runs: interferogram CSVs, JSON reports and parameter sweeps.

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

pub use config::{
    validate_config, GridConfig, MediumConfig, ModelKind, OutputFormat, OutputsConfig, Scenario, ScenarioConfig,
    ScenarioKind, SpectrumConfig, SpectrumType, TpiConfig, BUILTIN_PREFIX, BUILTIN_SCENARIOS,
};

use crate::analysis::{dip_asymmetry, dip_visibility, fwhm_gaussian_fit, fwhm_midline, FwhmReport};
use crate::dispersion::DataIdentity;
use crate::error::{Error, Result};
use crate::interferometry::{lci_interferogram, quadrature_check, tpi_coincidence, Interferogram, SignalKind};
use crate::qpm::significant;

pub const SOFTWARE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

const CSV_DIGITS: i32 = 12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub kind: ScenarioKind,
    /// Absent when the run did not converge or the width is undefined.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fwhm_um: Option<f64>,
    pub method: Option<String>,
    /// TPI only: half-depth width of the dip.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub midline_fwhm_um: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub visibility: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymmetry: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_residual: Option<f64>,
    pub convergence_deviation: f64,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analysis_error: Option<String>,
    pub spectral_nodes: usize,
    pub delay_samples: usize,
    pub data_files: Vec<DataIdentity>,
    pub software_version: String,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub interferogram: Interferogram<f64>,
    pub csv_path: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(|e| Error::io(format!("writing {}", tmp.display()), e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(format!("renaming into {}", path.display()), e))
}

/// `delay_um,value[,envelope]` with 12 significant digits.
pub fn interferogram_csv(interferogram: &Interferogram<f64>) -> String {
    let mut out = String::from(if interferogram.envelope.is_some() {
        "delay_um,value,envelope\n"
    } else {
        "delay_um,value\n"
    });
    for (i, d) in interferogram.axis.delays().into_iter().enumerate() {
        let _ = write!(
            out,
            "{},{}",
            significant(d * 1e6, CSV_DIGITS),
            significant(interferogram.values[i], CSV_DIGITS)
        );
        if let Some(env) = &interferogram.envelope {
            let _ = write!(out, ",{}", significant(env[i], CSV_DIGITS));
        }
        out.push('\n');
    }
    out
}

/// Computes the interferogram of a built scenario.
pub fn simulate(scenario: &Scenario) -> Result<Interferogram<f64>> {
    match scenario.kind {
        ScenarioKind::Lci => lci_interferogram(&scenario.spectrum, &scenario.stack, &scenario.axis),
        ScenarioKind::Tpi => tpi_coincidence(
            &scenario.spectrum,
            &scenario.stack,
            scenario.visibility.expect("validated"),
            &scenario.axis,
        ),
    }
}

fn signal_kind(scenario: &Scenario) -> SignalKind<f64> {
    match scenario.kind {
        ScenarioKind::Lci => SignalKind::Lci,
        ScenarioKind::Tpi => SignalKind::Tpi {
            visibility: scenario.visibility.expect("validated"),
        },
    }
}

fn primary_width(scenario: &Scenario, interferogram: &Interferogram<f64>) -> Result<FwhmReport<f64>> {
    match scenario.kind {
        ScenarioKind::Lci => fwhm_midline(interferogram),
        ScenarioKind::Tpi => fwhm_gaussian_fit(interferogram, scenario.visibility.expect("validated")),
    }
}

/// Simulates and analyzes a scenario without touching the filesystem.
///
/// The width is omitted from the report unless the spectral doubling check
/// passes.
pub fn evaluate(config: &ScenarioConfig) -> Result<(RunReport, Interferogram<f64>)> {
    let scenario = config.build()?;
    let interferogram = simulate(&scenario)?;
    let check = quadrature_check(&scenario.spectrum, &scenario.stack, &scenario.axis, signal_kind(&scenario))?;
    let converged = check.passed;

    let (mut visibility, mut asymmetry, mut midline) = (None, None, None);
    if scenario.kind == ScenarioKind::Tpi {
        visibility = dip_visibility(&interferogram).ok();
        asymmetry = dip_asymmetry(&interferogram).ok();
        midline = fwhm_midline(&interferogram).ok().map(|r| r.fwhm * 1e6);
    }
    let width = primary_width(&scenario, &interferogram);
    let analysis_error = width.as_ref().err().map(ToString::to_string);
    let width = width.ok();
    let report = RunReport {
        scenario: scenario.name.clone(),
        kind: scenario.kind,
        fwhm_um: width.as_ref().filter(|_| converged).map(|w| w.fwhm * 1e6),
        method: width.as_ref().map(|w| w.method.as_str().to_string()),
        midline_fwhm_um: midline.filter(|_| converged),
        visibility,
        asymmetry,
        fit_residual: width.as_ref().and_then(|w| w.fit_residual),
        convergence_deviation: check.max_relative_deviation,
        converged,
        analysis_error,
        spectral_nodes: check.n_coarse,
        delay_samples: scenario.axis.len(),
        data_files: scenario.data_files.clone(),
        software_version: SOFTWARE_VERSION.to_string(),
    };
    Ok((report, interferogram))
}

/// Runs a scenario and writes `<name>.csv` and `<name>.json` into `out_dir`
/// (or the configured output directory).
///
/// Unconverged runs still write their flagged report, then return
/// [`Error::Unconverged`]; failed width extraction likewise returns the
/// analysis error after writing.
pub fn run_scenario(config: &ScenarioConfig, out_dir: Option<&Path>) -> Result<RunOutcome> {
    let (report, interferogram) = evaluate(config)?;
    let dir = out_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| config.outputs.directory.clone());
    let mut outcome = RunOutcome {
        report,
        interferogram,
        csv_path: None,
        report_path: None,
    };
    if config.outputs.formats.contains(&OutputFormat::Csv) {
        let path = dir.join(format!("{}.csv", config.name));
        write_atomic(&path, interferogram_csv(&outcome.interferogram).as_bytes())?;
        outcome.csv_path = Some(path);
    }
    if config.outputs.formats.contains(&OutputFormat::Json) {
        let path = dir.join(format!("{}.json", config.name));
        let mut json = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
        json.push('\n');
        write_atomic(&path, json.as_bytes())?;
        outcome.report_path = Some(path);
    }
    if !outcome.report.converged {
        return Err(Error::Unconverged {
            deviation: outcome.report.convergence_deviation,
        });
    }
    if let Some(reason) = &outcome.report.analysis_error {
        return Err(Error::Domain(format!("width extraction failed: {reason}")));
    }
    Ok(outcome)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub fwhm_um: Option<f64>,
    pub visibility: Option<f64>,
    pub asymmetry: Option<f64>,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSummary {
    pub parameter: String,
    pub rows: Vec<SweepRow>,
    pub summary_path: PathBuf,
}

impl SweepSummary {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.status != "ok").count()
    }
}

fn optional(value: Option<f64>) -> String {
    value.map(|v| significant(v, CSV_DIGITS)).unwrap_or_default()
}

/// One run per value of the numeric field at `parameter`. Each run writes
/// its artifacts into `<out>/<parameter>=<value>/`; failures are recorded in
/// the row status and the sweep continues.
pub fn sweep(config: &ScenarioConfig, parameter: &str, values: &[f64], out_dir: Option<&Path>) -> Result<SweepSummary> {
    if values.is_empty() {
        return Err(Error::Config {
            issues: vec![format!("{parameter}: no sweep values given")],
        });
    }
    let variants = values
        .iter()
        .map(|&v| {
            let mut c = config.with_parameter(parameter, v)?;
            c.name = format!("{}_{}={}", config.name, parameter, v);
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;
    let dir = out_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| config.outputs.directory.clone());
    let rows: Vec<SweepRow> = variants
        .par_iter()
        .zip(values)
        .map(|(variant, &value)| {
            let run_dir = dir.join(format!("{parameter}={value}"));
            match run_scenario(variant, Some(&run_dir)) {
                Ok(o) => SweepRow {
                    value,
                    fwhm_um: o.report.fwhm_um,
                    visibility: o.report.visibility,
                    asymmetry: o.report.asymmetry,
                    status: "ok".into(),
                },
                Err(e) => SweepRow {
                    value,
                    fwhm_um: None,
                    visibility: None,
                    asymmetry: None,
                    status: format!("error: {}", e.to_string().replace([',', '\n'], ";")),
                },
            }
        })
        .collect();
    let mut csv = String::from("value,fwhm_um,visibility,asymmetry,status\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            r.value,
            optional(r.fwhm_um),
            optional(r.visibility),
            optional(r.asymmetry),
            r.status
        );
    }
    let summary_path = dir.join(format!("{}_sweep_{}.csv", config.name, parameter));
    write_atomic(&summary_path, csv.as_bytes())?;
    Ok(SweepSummary {
        parameter: parameter.to_string(),
        rows,
        summary_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(name: &str) -> ScenarioConfig {
        let mut c = ScenarioConfig::builtin(name).unwrap();
        c.grid.n_freq = 4097;
        c.grid.n_delay = 401;
        c
    }

    #[test]
    fn builtins_validate() {
        for name in BUILTIN_SCENARIOS {
            let c = ScenarioConfig::builtin(name).unwrap();
            c.validate().unwrap();
            let round = ScenarioConfig::from_toml_str(&c.to_toml(), ".").unwrap();
            assert_eq!(round, c);
        }
        assert!(ScenarioConfig::builtin("fig5").is_none());
    }

    #[test]
    fn validation_names_fields() {
        let mut c = ScenarioConfig::builtin("fig4b").unwrap();
        c.media[1].passes = 3;
        c.media[0].index = Some("missing/bk7.toml".into());
        let Err(Error::Config { issues }) = c.validate() else { panic!() };
        assert!(issues.iter().any(|i| i.starts_with("media[1].passes")));
        assert!(issues.iter().any(|i| i.starts_with("media[0].index") && i.contains("missing/bk7.toml")));

        let mut t = ScenarioConfig::builtin("fig4c").unwrap();
        t.tpi = Some(TpiConfig { visibility: 1.5 });
        t.grid.n_freq = 100;
        let Err(Error::Config { issues }) = t.validate() else { panic!() };
        assert_eq!(issues.len(), 2);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = ScenarioConfig::builtin("fig4c").unwrap().to_toml() + "\nbogus = 1\n";
        assert!(matches!(ScenarioConfig::from_toml_str(&text, "."), Err(Error::Config { .. })));
    }

    #[test]
    fn parameter_paths() {
        let c = ScenarioConfig::builtin("fig4b").unwrap();
        let d = c.with_parameter("media.water.length_mm", 2.5).unwrap();
        assert_eq!(d.media[1].length_mm, 2.5);
        let d = c.with_parameter("media.0.length_mm", 0.3).unwrap();
        assert_eq!(d.media[0].length_mm, 0.3);
        let d = c.with_parameter("grid.n_delay", 501.0).unwrap();
        assert_eq!(d.grid.n_delay, 501);
        assert!(c.with_parameter("grid.n_delay", 1.5).is_err());
        assert!(c.with_parameter("media.oil.length_mm", 1.0).is_err());
        assert!(c.with_parameter("name", 1.0).is_err());
    }

    #[test]
    fn csv_layout() {
        let (report, ig) = evaluate(&small("fig4a")).unwrap();
        let csv = interferogram_csv(&ig);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("delay_um,value,envelope"));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0], "-10.0000000000");
        assert_eq!(first[1].trim_start_matches('-').replace('.', "").trim_start_matches('0').len(), 12);
        assert_eq!(csv.lines().count(), 402);
        assert!(report.fwhm_um.is_some());
    }

    #[test]
    fn runs_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let c = small("fig4d");
        let a = run_scenario(&c, Some(&dir.path().join("a"))).unwrap();
        let b = run_scenario(&c, Some(&dir.path().join("b"))).unwrap();
        let read = |p: &Option<PathBuf>| std::fs::read(p.as_ref().unwrap()).unwrap();
        assert_eq!(read(&a.csv_path), read(&b.csv_path));
        assert_eq!(read(&a.report_path), read(&b.report_path));
        let json: serde_json::Value = serde_json::from_slice(&read(&a.report_path)).unwrap();
        assert_eq!(json["kind"], "tpi");
        assert_eq!(json["data_files"][0]["name"], "water");
    }

    #[test]
    fn unconverged_runs_are_flagged() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = ScenarioConfig::builtin("water3mm").unwrap();
        c.grid.n_freq = 65;
        c.grid.n_delay = 101;
        match run_scenario(&c, Some(dir.path())) {
            Err(Error::UnderResolved { .. }) | Err(Error::Unconverged { .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sweep_records_failures_per_row() {
        let dir = tempfile::tempdir().unwrap();
        let c = small("fig4c");
        let s = sweep(&c, "tpi.visibility", &[0.5, 2.0], Some(dir.path())).unwrap();
        assert_eq!(s.rows.len(), 2);
        assert_eq!(s.rows[0].status, "ok");
        assert!(s.rows[1].status.starts_with("error"));
        assert_eq!(s.failures(), 1);
        let text = std::fs::read_to_string(&s.summary_path).unwrap();
        assert!(text.starts_with("value,fwhm_um,visibility,asymmetry,status\n"));
    }
}
