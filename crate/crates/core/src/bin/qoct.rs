use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qoct_core::qpm::{domain_walls, emission_span, write_domain_walls, QpmGrating};
use qoct_core::runner::{run_scenario, sweep, validate_config, ScenarioConfig};
use qoct_core::{dispersion::SellmeierSet, Result};

#[derive(Parser)]
#[command(name = "qoct", version, about = "LCI / two-photon interferometry simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write its CSV and JSON report.
    Run {
        /// Builtin scenario name (fig4a, fig4b, fig4c, fig4d, water3mm) or a TOML file.
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario once per value of a numeric field.
    Sweep {
        #[arg(long)]
        scenario: String,
        /// Dotted field path, e.g. `media.water.length_mm`.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scenario file without computing anything.
    Validate { path: String },
    /// Write the domain-wall listing of a linearly chirped grating.
    ExportGrating {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20.0)]
        length_mm: f64,
        #[arg(long, default_value_t = 3.12)]
        period_start_um: f64,
        #[arg(long, default_value_t = 3.34)]
        period_end_um: f64,
        #[arg(long, default_value_t = 0.65)]
        duty: f64,
        /// Index set used to report the emission span.
        #[arg(long, default_value = "mg-lt-e")]
        index: String,
        #[arg(long, default_value_t = 401.0)]
        pump_nm: f64,
    },
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map(|x| format!("{x:.digits$}")).unwrap_or_else(|| "-".into())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { scenario, out } => {
            let config = ScenarioConfig::resolve(&scenario)?;
            let outcome = run_scenario(&config, out.as_deref())?;
            let r = &outcome.report;
            println!(
                "{} [{}] fwhm {} um ({}) visibility {} asymmetry {} deviation {:.2e}",
                r.scenario,
                r.kind.as_str(),
                fmt_opt(r.fwhm_um, 4),
                r.method.as_deref().unwrap_or("-"),
                fmt_opt(r.visibility, 4),
                fmt_opt(r.asymmetry, 4),
                r.convergence_deviation
            );
            for path in outcome.csv_path.iter().chain(&outcome.report_path) {
                println!("wrote {}", path.display());
            }
        }
        Command::Sweep {
            scenario,
            param,
            values,
            out,
        } => {
            let config = ScenarioConfig::resolve(&scenario)?;
            let summary = sweep(&config, &param, &values, out.as_deref())?;
            println!("{:>12}  {:>10}  {:>10}  {:>10}  status", param, "fwhm_um", "visibility", "asymmetry");
            for row in &summary.rows {
                println!(
                    "{:>12}  {:>10}  {:>10}  {:>10}  {}",
                    row.value,
                    fmt_opt(row.fwhm_um, 4),
                    fmt_opt(row.visibility, 4),
                    fmt_opt(row.asymmetry, 4),
                    row.status
                );
            }
            println!("wrote {}", summary.summary_path.display());
            if summary.failures() > 0 {
                return Err(qoct_core::Error::Domain(format!("{} sweep row(s) failed", summary.failures())));
            }
        }
        Command::Validate { path } => {
            let config = validate_config(&path)?;
            println!("{}: ok ({} scenario '{}')", path, config.kind.as_str(), config.name);
        }
        Command::ExportGrating {
            out,
            length_mm,
            period_start_um,
            period_end_um,
            duty,
            index,
            pump_nm,
        } => {
            let grating = QpmGrating::new(length_mm * 1e-3, period_start_um * 1e-6, period_end_um * 1e-6, duty)?;
            let walls = domain_walls(&grating);
            write_domain_walls(&grating, &walls, &out)?;
            println!("{} inverted domains, {} walls -> {}", walls.inverted_count(), walls.walls().len(), out.display());
            let set = SellmeierSet::builtin(&index).or_else(|_| SellmeierSet::from_file(&index))?;
            match emission_span(&grating, &set, pump_nm * 1e-9) {
                Ok(span) => println!("emission span {:.1}-{:.1} nm ({})", span.min * 1e9, span.max * 1e9, set.identity()),
                Err(e) => println!("emission span: {e}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
