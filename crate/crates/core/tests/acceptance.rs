//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use qoct_core::analysis::{dip_asymmetry, dip_visibility, fwhm_gaussian_fit};
use qoct_core::dispersion::{
    sellmeier_index, ArmSign, MediumModel, MediumSpec, MediumStack, SellmeierSet, TaylorCoefficients, MG_LT, N_BK7,
    WATER,
};
use qoct_core::interferometry::{lci_interferogram, tpi_coincidence, DelayAxis, Interferogram, InterferogramKind};
use qoct_core::qpm::{domain_walls, emission_span, qpm_order_efficiency, QpmGrating};
use qoct_core::runner::{evaluate, RunReport, Scenario, ScenarioConfig, ScenarioKind};
use qoct_core::spectra::{rectangular_spectrum, FrequencyGrid, SpectralDensity};
use qoct_core::SPEED_OF_LIGHT as C;

const LAMBDA0: f64 = 802e-9;
const BANDWIDTH: f64 = 166e12;

struct Suite {
    failures: usize,
    total: usize,
}

impl Suite {
    fn check(&mut self, id: &str, pass: bool, detail: String) {
        println!("[{}] {id:<3} {detail}", if pass { "PASS" } else { "FAIL" });
        self.total += 1;
        if !pass {
            self.failures += 1;
        }
    }
}

fn report(config: &ScenarioConfig) -> RunReport {
    let (report, _) = evaluate(config).unwrap_or_else(|e| panic!("{}: {e}", config.name));
    report
}

fn builtin(name: &str) -> ScenarioConfig {
    ScenarioConfig::builtin(name).unwrap()
}

fn within(value: Option<f64>, target: f64, rel: f64) -> bool {
    value.is_some_and(|v| (v - target).abs() <= rel * target)
}

fn show(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "none".into())
}

fn default_spectrum(n: usize) -> SpectralDensity<f64> {
    let grid = FrequencyGrid::around_wavelength(LAMBDA0, PI * BANDWIDTH, n).unwrap();
    rectangular_spectrum(LAMBDA0, BANDWIDTH, &grid).unwrap()
}

/// Independent reference: midpoint Riemann sum on cells 4× finer than the
/// simulation grid, direct sin/cos, phase from the index data with the group
/// delay removed by a central difference.
fn riemann_oracle(scenario: &Scenario) -> Vec<f64> {
    let grid = scenario.spectrum.grid();
    let omega0 = grid.center_angular_frequency();
    let half = grid.half_span();
    let cells = 4 * (grid.len() - 1);
    let width = 2.0 * half / cells as f64;
    let phase = |detuning: f64| -> f64 {
        scenario
            .stack
            .elements()
            .iter()
            .map(|e| {
                let omega = omega0 + detuning;
                let set = match e.model() {
                    MediumModel::Sellmeier(set) => set,
                    _ => panic!("oracle expects index-model media"),
                };
                let n = sellmeier_index(set.as_ref(), 2.0 * PI * C / omega).unwrap();
                f64::from(e.arm().value()) * f64::from(e.passes()) * e.length() * n * omega / C
            })
            .sum()
    };
    let h = 1e11;
    let group_delay = (phase(h) - phase(-h)) / (2.0 * h);
    let phi0 = phase(0.0);
    let nodes: Vec<(f64, f64)> = (0..cells)
        .map(|j| {
            let detuning = -half + (j as f64 + 0.5) * width;
            let weight = if detuning.abs() <= PI * BANDWIDTH { 1.0 } else { 0.0 };
            (detuning, weight)
        })
        .collect();
    let total: f64 = nodes.iter().map(|(_, w)| w * width).sum();
    let centered: Vec<f64> = nodes.iter().map(|&(d, _)| phase(d) - phi0 - group_delay * d).collect();
    let times: Vec<f64> = scenario.axis.delays().iter().map(|d| 2.0 * d / C).collect();
    match scenario.kind {
        ScenarioKind::Lci => times
            .par_iter()
            .map(|&tau| {
                let mut re = 0.0;
                for (&(d, w), &p) in nodes.iter().zip(&centered) {
                    re += w * width * ((omega0 + d) * tau - p).cos();
                }
                1.0 + re / total
            })
            .collect(),
        ScenarioKind::Tpi => {
            let v = scenario.visibility.unwrap();
            let m = nodes.len();
            times
                .par_iter()
                .map(|&tau| {
                    let mut re = 0.0;
                    for k in 0..m {
                        let (d, w) = nodes[k];
                        let psi = centered[k] - centered[m - 1 - k];
                        re += w * width * (psi - 2.0 * d * tau).cos();
                    }
                    1.0 - v * re / total
                })
                .collect()
        }
    }
}

fn taylor_stack(beta2: f64, beta3: f64, length: f64) -> MediumStack<f64> {
    MediumStack::empty().with(
        MediumSpec::taylor("t", TaylorCoefficients::new(0.0, beta2, beta3), length, 1, ArmSign::Probe).unwrap(),
    )
}

fn main() -> ExitCode {
    let mut suite = Suite { failures: 0, total: 0 };

    // 1
    let mut bare_lci = builtin("fig4a");
    bare_lci.media.clear();
    bare_lci.name = "lci-bare".into();
    let lci0 = report(&bare_lci);
    suite.check(
        "1",
        lci0.converged && within(lci0.fwhm_um, 1.1, 0.05),
        format!("dispersion-free LCI midline FWHM {} um (target 1.1 +/- 5%)", show(lci0.fwhm_um)),
    );

    // 2
    let tpi0 = report(&builtin("fig4c"));
    suite.check(
        "2a",
        tpi0.converged && within(tpi0.fwhm_um, 0.54, 0.05),
        format!("dispersion-free TPI Gaussian-fit FWHM {} um (target 0.54 +/- 5%)", show(tpi0.fwhm_um)),
    );
    let ratio = tpi0.midline_fwhm_um.zip(lci0.fwhm_um).map(|(t, l)| t / l);
    suite.check(
        "2b",
        ratio.is_some_and(|r| (r - 0.5).abs() <= 0.01),
        format!(
            "TPI/LCI midline width ratio {} ({} / {} um, target 0.50 +/- 0.01)",
            show(ratio),
            show(tpi0.midline_fwhm_um),
            show(lci0.fwhm_um)
        ),
    );

    // 3
    let glass = report(&builtin("fig4a"));
    suite.check(
        "3",
        glass.converged && within(glass.fwhm_um, 1.5, 0.20),
        format!("LCI 150 um glass FWHM {} um (target 1.5 +/- 20%)", show(glass.fwhm_um)),
    );

    // 4
    let water_lci = report(&builtin("fig4b"));
    suite.check(
        "4",
        water_lci.converged && within(water_lci.fwhm_um, 7.8, 0.15),
        format!("LCI 1 mm water FWHM {} um (target 7.8 +/- 15%)", show(water_lci.fwhm_um)),
    );

    // 5
    let water_tpi = report(&builtin("fig4d"));
    let in_range = water_tpi.fwhm_um.is_some_and(|w| (0.54..=0.60).contains(&w));
    suite.check(
        "5a",
        water_tpi.converged && in_range,
        format!("TPI 1 mm water Gaussian-fit FWHM {} um (target [0.54, 0.60])", show(water_tpi.fwhm_um)),
    );
    let difference = water_tpi.fwhm_um.zip(tpi0.fwhm_um).map(|(a, b)| (a - b).abs());
    suite.check(
        "5b",
        difference.is_some_and(|d| d <= 0.03),
        format!("|FWHM_water - FWHM_bare| = {} um (target <= 0.03)", show(difference)),
    );

    // 6
    let thick = report(&builtin("water3mm"));
    suite.check(
        "6",
        thick.converged && thick.fwhm_um.is_some_and(|w| w <= 0.66),
        format!("TPI 3 mm water FWHM {} um (target <= 0.66)", show(thick.fwhm_um)),
    );

    // 7
    let spectrum = default_spectrum(16385);
    let axis = DelayAxis::symmetric(10e-6, 501).unwrap();
    let bare_dip = tpi_coincidence(&spectrum, &MediumStack::empty(), 0.73, &axis).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);
    let mut worst = 0.0_f64;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for _ in 0..100 {
        let product = 10f64.powf(rng.gen_range(-30.0..-24.0));
        let length = rng.gen_range(0.1e-3..10e-3);
        let passes = rng.gen_range(1..=2u8);
        let arm = if rng.gen_bool(0.5) { ArmSign::Probe } else { ArmSign::Reference };
        let beta2 = product / length * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        lo = lo.min(product);
        hi = hi.max(product);
        let stack = MediumStack::empty().with(
            MediumSpec::taylor("b2", TaylorCoefficients::new(0.0, beta2, 0.0), length, passes, arm).unwrap(),
        );
        let dip = tpi_coincidence(&spectrum, &stack, 0.73, &axis).unwrap();
        for (a, b) in dip.values.iter().zip(&bare_dip.values) {
            worst = worst.max((a - b).abs());
        }
    }
    suite.check(
        "7",
        worst <= 1e-12 && hi / lo > 1e5,
        format!(
            "100 beta2-only stacks (|beta2 L| {lo:.1e}..{hi:.1e} s^2): max |dC| = {worst:.1e} (target <= 1e-12)"
        ),
    );

    // 8
    let water_beta3 = 33e-45 / 1e-3;
    let plus = tpi_coincidence(&spectrum, &taylor_stack(0.0, water_beta3, 3e-3), 0.67, &axis).unwrap();
    let minus = tpi_coincidence(&spectrum, &taylor_stack(0.0, -water_beta3, 3e-3), 0.67, &axis).unwrap();
    let even = tpi_coincidence(&spectrum, &taylor_stack(24.7e-30 / 1e-3, 0.0, 3e-3), 0.67, &axis).unwrap();
    let (ap, am, a2) = (
        dip_asymmetry(&plus).unwrap(),
        dip_asymmetry(&minus).unwrap(),
        dip_asymmetry(&even).unwrap(),
    );
    suite.check(
        "8",
        ap.abs() > 0.0 && ap.signum() == -am.signum() && a2.abs() < 1e-9,
        format!("asymmetry +beta3 {ap:.4e}, -beta3 {am:.4e}, beta2-only {a2:.1e}"),
    );

    // 9
    let water = Arc::new(SellmeierSet::builtin(WATER).unwrap());
    let bk7 = Arc::new(SellmeierSet::builtin(N_BK7).unwrap());
    let w = MediumSpec::new("water", MediumModel::Sellmeier(water), 1e-3, 2, ArmSign::Probe).unwrap();
    let g = MediumSpec::new("glass", MediumModel::Sellmeier(bk7), 0.15e-3, 2, ArmSign::Probe).unwrap();
    let compensated = MediumStack::empty()
        .with(w.clone())
        .with(g.clone())
        .with(w.mirrored())
        .with(g.mirrored());
    let lci_axis = DelayAxis::symmetric(30e-6, 2001).unwrap();
    let bare = lci_interferogram(&spectrum, &MediumStack::empty(), &lci_axis).unwrap();
    let comp = lci_interferogram(&spectrum, &compensated, &lci_axis).unwrap();
    let phantom = bare
        .values
        .iter()
        .zip(&comp.values)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    suite.check(
        "9",
        phantom <= 1e-12,
        format!("phantom compensation max |dI| = {phantom:.1e} (target <= 1e-12)"),
    );

    // 10
    let grating = QpmGrating::<f64>::chirped_lt_device();
    let count = domain_walls(&grating).inverted_count();
    let (l, a, b) = (20e-3_f64, 3.12e-6_f64, 3.34e-6_f64);
    let oracle = (l / (b - a) * (b / a).ln()).floor();
    let amplitude_ratio = qpm_order_efficiency(1, 0.5).unwrap() / qpm_order_efficiency(3, 0.5).unwrap();
    let efficiency_ratio: f64 = amplitude_ratio * amplitude_ratio;
    suite.check(
        "10",
        (count as f64 - oracle).abs() <= 1.0 && count > 6000 && (efficiency_ratio - 9.0).abs() < 1e-12,
        format!("{count} inverted domains (analytic {oracle}); order-1/order-3 efficiency {efficiency_ratio:.15}"),
    );

    // 11
    let lt = SellmeierSet::builtin(MG_LT).unwrap();
    match emission_span(&grating, &lt, 401e-9) {
        Ok(span) => {
            let (lo, hi) = (span.min * 1e9, span.max * 1e9);
            suite.check(
                "11",
                lo < 802.0 && hi > 802.0 && (lo - 660.0).abs() <= 25.0 && (hi - 1040.0).abs() <= 25.0,
                format!("emission span {lo:.1}-{hi:.1} nm (target 660-1040 +/- 25 nm; index {})", lt.identity()),
            );
        }
        Err(e) => suite.check("11", false, format!("emission span failed: {e}")),
    }

    // 12
    let mut worst_oracle = 0.0_f64;
    let mut rows = Vec::new();
    for name in ["fig4a", "fig4b", "fig4c", "fig4d"] {
        let scenario = builtin(name).build().unwrap();
        let computed = match scenario.kind {
            ScenarioKind::Lci => lci_interferogram(&scenario.spectrum, &scenario.stack, &scenario.axis),
            ScenarioKind::Tpi => tpi_coincidence(
                &scenario.spectrum,
                &scenario.stack,
                scenario.visibility.unwrap(),
                &scenario.axis,
            ),
        }
        .unwrap();
        let reference = riemann_oracle(&scenario);
        let scale = reference.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let diff = computed
            .values
            .iter()
            .zip(&reference)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        worst_oracle = worst_oracle.max(diff / scale);
        rows.push(format!("{name} {:.1e}", diff / scale));
    }
    suite.check(
        "12",
        worst_oracle < 1e-6,
        format!("trapezoid vs 4x Riemann oracle: {} (target < 1e-6)", rows.join(", ")),
    );

    // 13
    let fit_axis = DelayAxis::symmetric(10e-6, 2001).unwrap();
    let mut worst_sigma = 0.0_f64;
    for (sigma, v, d0) in [(0.3e-6, 0.73, 0.0), (0.21e-6, 0.67, 0.4e-6), (1.5e-6, 0.5, -1.0e-6), (0.08e-6, 1.0, 0.0)] {
        let values = fit_axis
            .delays()
            .iter()
            .map(|d: &f64| 1.0 - v * (-(d - d0).powi(2) / (2.0 * sigma * sigma)).exp())
            .collect();
        let dip = Interferogram::from_samples(fit_axis.clone(), values, InterferogramKind::TpiCoincidence, None, Some(v))
            .unwrap();
        let fitted = fwhm_gaussian_fit(&dip, v).unwrap().fwhm / (2.0 * (2.0 * 2f64.ln()).sqrt());
        worst_sigma = worst_sigma.max((fitted / sigma - 1.0).abs());
    }
    let mut worst_visibility = 0.0_f64;
    for v in [0.2, 0.5, 0.67, 0.73, 1.0] {
        let dip = tpi_coincidence(&spectrum, &MediumStack::empty(), v, &axis).unwrap();
        worst_visibility = worst_visibility.max((dip_visibility(&dip).unwrap() - v).abs());
    }
    suite.check(
        "13",
        worst_sigma < 1e-6 && worst_visibility < 1e-3,
        format!("fit sigma error {worst_sigma:.1e} (target < 1e-6); visibility round trip {worst_visibility:.1e} (target < 1e-3)"),
    );

    println!("{} of {} criteria failed", suite.failures, suite.total);
    if suite.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
