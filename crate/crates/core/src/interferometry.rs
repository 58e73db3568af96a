//! Low-coherence fringes and monochromatic-pump coincidence dips.
//!
//! Both signals are trapezoid sums over the detuning grid of a
//! [`SpectralDensity`]. The stack phase is centered before use: its value at
//! `Ω = 0` and its linear (group-delay) part are removed, which only shifts
//! the curves along the delay axis.

use num_complex::Complex;
use rayon::prelude::*;

use crate::dispersion::{stack_phase, MediumStack};
use crate::error::{Error, Result};
use crate::scalar::{delay_to_time, Real};
use crate::spectra::SpectralDensity;

/// Minimum number of integrand samples per phase cycle.
pub const SAMPLES_PER_CYCLE: f64 = 8.0;

/// Relative deviation under which a doubling check passes.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-6;

/// Nodes between exact re-evaluations of the rotating phasor.
const RESYNC: usize = 64;

/// Uniform axis of delays `d = cτ/2` (m).
#[derive(Clone, Debug, PartialEq)]
pub struct DelayAxis<T> {
    start: T,
    step: T,
    len: usize,
}

impl<T: Real> DelayAxis<T> {
    pub fn uniform(start: T, step: T, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Domain("delay axis needs at least one sample".into()));
        }
        if !(step > T::zero()) && len > 1 {
            return Err(Error::Domain(format!("delay step must be positive, got {}", step)));
        }
        Ok(Self { start, step, len })
    }

    /// `len` samples spanning `[−range, +range]`.
    pub fn symmetric(range: T, len: usize) -> Result<Self> {
        if !(range > T::zero()) || len < 2 {
            return Err(Error::Domain(format!(
                "symmetric axis needs range > 0 and >= 2 samples, got {} and {len}",
                range
            )));
        }
        let step = T::lit(2.0) * range / T::from_usize_lossy(len - 1);
        Self::uniform(-range, step, len)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn delay(&self, i: usize) -> T {
        self.start + T::from_usize_lossy(i) * self.step
    }

    pub fn delays(&self) -> Vec<T> {
        (0..self.len).map(|i| self.delay(i)).collect()
    }

    /// Time delays `τ = 2d/c` (s).
    pub fn times(&self) -> Vec<T> {
        (0..self.len).map(|i| delay_to_time(self.delay(i))).collect()
    }

    pub fn first(&self) -> T {
        self.start
    }

    pub fn last(&self) -> T {
        self.delay(self.len - 1)
    }

    /// Same span with `2n − 1` samples.
    pub fn refined(&self) -> Self {
        Self {
            start: self.start,
            step: self.step / T::lit(2.0),
            len: 2 * self.len - 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InterferogramKind {
    LciFringe,
    TpiCoincidence,
}

impl InterferogramKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InterferogramKind::LciFringe => "lci",
            InterferogramKind::TpiCoincidence => "tpi",
        }
    }
}

/// Baseline-normalized signal sampled on a [`DelayAxis`].
#[derive(Clone, Debug, PartialEq)]
pub struct Interferogram<T> {
    pub axis: DelayAxis<T>,
    pub values: Vec<T>,
    pub kind: InterferogramKind,
    /// Complex-integral magnitude, LCI only.
    pub envelope: Option<Vec<T>>,
    /// Visibility the dip was built with, TPI only.
    pub visibility_used: Option<T>,
}

impl<T: Real> Interferogram<T> {
    /// Builds an interferogram from externally produced samples.
    pub fn from_samples(
        axis: DelayAxis<T>,
        values: Vec<T>,
        kind: InterferogramKind,
        envelope: Option<Vec<T>>,
        visibility_used: Option<T>,
    ) -> Result<Self> {
        if values.len() != axis.len() || envelope.as_ref().is_some_and(|e| e.len() != axis.len()) {
            return Err(Error::Domain(format!(
                "{} samples for a {}-sample delay axis",
                values.len(),
                axis.len()
            )));
        }
        Ok(Self {
            axis,
            values,
            kind,
            envelope,
            visibility_used,
        })
    }
}

/// Which signal a [`quadrature_check`] recomputes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SignalKind<T> {
    Lci,
    Tpi { visibility: T },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport<T> {
    pub n_coarse: usize,
    pub n_fine: usize,
    /// `max |fine − coarse| / max |fine|` over the delay axis.
    pub max_relative_deviation: T,
    pub passed: bool,
}

/// Stack phase at every grid node, `φ(Ω_k)`, uncentered.
fn raw_phase<T: Real>(spectrum: &SpectralDensity<T>, stack: &MediumStack<T>) -> Result<Vec<T>> {
    let grid = spectrum.grid();
    let center = grid.center_angular_frequency();
    (0..grid.len())
        .map(|k| stack_phase(stack, center, grid.detuning(k)))
        .collect()
}

/// Centered stack phase `φ(Ω) − φ(0) − τ_g·Ω` at every grid node, where
/// `τ_g` is the stack group delay at `ω₀`.
pub fn net_phase<T: Real>(spectrum: &SpectralDensity<T>, stack: &MediumStack<T>) -> Result<Vec<T>> {
    let grid = spectrum.grid();
    let tau_g = stack.group_delay(grid.center_angular_frequency())?;
    let phi = raw_phase(spectrum, stack)?;
    let phi0 = phi[(grid.len() - 1) / 2];
    Ok(phi
        .iter()
        .enumerate()
        .map(|(k, &p)| p - phi0 - tau_g * grid.detuning(k))
        .collect())
}

/// Antisymmetric kernel phase `φ(+Ω) − φ(−Ω) − 2τ_g·Ω`. Nodes `k` and
/// `n − 1 − k` are exact negatives, so even contributions cancel exactly.
pub fn antisymmetric_phase<T: Real>(spectrum: &SpectralDensity<T>, stack: &MediumStack<T>) -> Result<Vec<T>> {
    let grid = spectrum.grid();
    let n = grid.len();
    let tau_g = stack.group_delay(grid.center_angular_frequency())?;
    let phi = raw_phase(spectrum, stack)?;
    let two = T::lit(2.0);
    Ok((0..n)
        .map(|k| phi[k] - phi[n - 1 - k] - two * tau_g * grid.detuning(k))
        .collect())
}

/// Checks the per-node phase advance `rate·h·τ − Δψ` against
/// [`SAMPLES_PER_CYCLE`] on nodes that carry weight.
fn nyquist_guard<T: Real>(
    spectrum: &SpectralDensity<T>,
    phase: &[T],
    rate: T,
    axis: &DelayAxis<T>,
) -> Result<()> {
    let h = spectrum.grid().spacing();
    let w = spectrum.weights();
    let (t_lo, t_hi) = (delay_to_time(axis.first()), delay_to_time(axis.last()));
    let mut worst = T::zero();
    for k in 0..w.len() - 1 {
        if w[k] == T::zero() || w[k + 1] == T::zero() {
            continue;
        }
        let dpsi = phase[k + 1] - phase[k];
        let a = (rate * h * t_lo - dpsi).abs();
        let b = (rate * h * t_hi - dpsi).abs();
        worst = worst.max(a).max(b);
    }
    if worst == T::zero() {
        return Ok(());
    }
    let per_cycle = (T::TAU() / worst).as_f64();
    if per_cycle < SAMPLES_PER_CYCLE {
        return Err(Error::UnderResolved {
            samples_per_cycle: per_cycle,
            required: SAMPLES_PER_CYCLE,
        });
    }
    Ok(())
}

/// `Σ_k c_k·exp(i·rate·Ω_k·τ)` for every delay, with `Ω_k` the grid nodes.
///
/// The phasor is advanced by complex rotation and recomputed exactly every
/// [`RESYNC`] nodes.
fn transform<T: Real>(spectrum: &SpectralDensity<T>, coeffs: &[Complex<T>], rate: T, times: &[T]) -> Vec<Complex<T>> {
    let grid = spectrum.grid();
    let n = grid.len();
    let h = grid.spacing();
    let active: Vec<usize> = (0..n).filter(|&k| coeffs[k] != Complex::new(T::zero(), T::zero())).collect();
    let (first, last) = match (active.first(), active.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return vec![Complex::new(T::zero(), T::zero()); times.len()],
    };
    times
        .par_iter()
        .map(|&tau| {
            let step = Complex::from_polar(T::one(), rate * h * tau);
            let mut acc = Complex::new(T::zero(), T::zero());
            let mut k = first;
            while k <= last {
                let end = (k + RESYNC).min(last + 1);
                let mut phasor = Complex::from_polar(T::one(), rate * grid.detuning(k) * tau);
                for c in &coeffs[k..end] {
                    acc += c * phasor;
                    phasor = phasor * step;
                }
                k = end;
            }
            acc
        })
        .collect()
}

fn require_normalized<T: Real>(spectrum: &SpectralDensity<T>) -> Result<()> {
    if !spectrum.is_normalized() {
        return Err(Error::Domain("spectrum must be normalized".into()));
    }
    Ok(())
}

fn lci_unchecked<T: Real>(
    spectrum: &SpectralDensity<T>,
    phase: &[T],
    axis: &DelayAxis<T>,
) -> Interferogram<T> {
    let grid = spectrum.grid();
    let weights = grid.trapezoid_weights();
    let coeffs: Vec<Complex<T>> = spectrum
        .weights()
        .iter()
        .zip(&weights)
        .zip(phase)
        .map(|((&s, &w), &p)| Complex::from_polar(s * w, -p))
        .collect();
    let times = axis.times();
    let amplitude = transform(spectrum, &coeffs, T::one(), &times);
    let carrier = grid.center_angular_frequency();
    let values = times
        .iter()
        .zip(&amplitude)
        .map(|(&tau, a)| T::one() + (Complex::from_polar(T::one(), carrier * tau) * a).re)
        .collect();
    let envelope = amplitude.iter().map(|a| a.norm()).collect();
    Interferogram {
        axis: axis.clone(),
        values,
        kind: InterferogramKind::LciFringe,
        envelope: Some(envelope),
        visibility_used: None,
    }
}

fn tpi_unchecked<T: Real>(
    spectrum: &SpectralDensity<T>,
    phase: &[T],
    visibility: T,
    axis: &DelayAxis<T>,
) -> Interferogram<T> {
    let grid = spectrum.grid();
    let weights = grid.trapezoid_weights();
    let coeffs: Vec<Complex<T>> = spectrum
        .weights()
        .iter()
        .zip(&weights)
        .zip(phase)
        .map(|((&s, &w), &p)| Complex::from_polar(s * w, p))
        .collect();
    let times = axis.times();
    let kernel = transform(spectrum, &coeffs, T::lit(-2.0), &times);
    let values = kernel.iter().map(|k| T::one() - visibility * k.re).collect();
    Interferogram {
        axis: axis.clone(),
        values,
        kind: InterferogramKind::TpiCoincidence,
        envelope: None,
        visibility_used: Some(visibility),
    }
}

/// LCI fringe `I(τ) = 1 + Re ∫S(Ω)e^{i((ω₀+Ω)τ − φ(Ω))}dΩ` and its envelope
/// `|∫S(Ω)e^{i(Ωτ − φ(Ω))}dΩ|`, with `φ` the centered stack phase.
pub fn lci_interferogram<T: Real>(
    spectrum: &SpectralDensity<T>,
    stack: &MediumStack<T>,
    axis: &DelayAxis<T>,
) -> Result<Interferogram<T>> {
    require_normalized(spectrum)?;
    let phase = net_phase(spectrum, stack)?;
    nyquist_guard(spectrum, &phase, T::one(), axis)?;
    Ok(lci_unchecked(spectrum, &phase, axis))
}

/// Coincidence dip `C(τ) = 1 − V·Re ∫S(Ω)e^{i[φ(Ω) − φ(−Ω)]}e^{−2iΩτ}dΩ`.
pub fn tpi_coincidence<T: Real>(
    spectrum: &SpectralDensity<T>,
    stack: &MediumStack<T>,
    visibility: T,
    axis: &DelayAxis<T>,
) -> Result<Interferogram<T>> {
    require_normalized(spectrum)?;
    check_visibility(visibility)?;
    let phase = antisymmetric_phase(spectrum, stack)?;
    nyquist_guard(spectrum, &phase, T::lit(-2.0), axis)?;
    Ok(tpi_unchecked(spectrum, &phase, visibility, axis))
}

fn check_visibility<T: Real>(visibility: T) -> Result<()> {
    if !(visibility >= T::zero() && visibility <= T::one()) {
        return Err(Error::Domain(format!("visibility must lie in [0, 1], got {}", visibility)));
    }
    Ok(())
}

fn compute_unguarded<T: Real>(
    spectrum: &SpectralDensity<T>,
    stack: &MediumStack<T>,
    axis: &DelayAxis<T>,
    kind: SignalKind<T>,
) -> Result<Vec<T>> {
    Ok(match kind {
        SignalKind::Lci => lci_unchecked(spectrum, &net_phase(spectrum, stack)?, axis).values,
        SignalKind::Tpi { visibility } => {
            check_visibility(visibility)?;
            tpi_unchecked(spectrum, &antisymmetric_phase(spectrum, stack)?, visibility, axis).values
        }
    })
}

/// Recomputes the signal with twice the spectral resolution and reports the
/// largest change. The Nyquist guard is not applied, so under-resolved grids
/// are reported rather than rejected.
pub fn quadrature_check<T: Real>(
    spectrum: &SpectralDensity<T>,
    stack: &MediumStack<T>,
    axis: &DelayAxis<T>,
    kind: SignalKind<T>,
) -> Result<ConvergenceReport<T>> {
    require_normalized(spectrum)?;
    let fine_spectrum = spectrum.resampled(&spectrum.grid().refined())?;
    let coarse = compute_unguarded(spectrum, stack, axis, kind)?;
    let fine = compute_unguarded(&fine_spectrum, stack, axis, kind)?;
    let scale = fine.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let diff = coarse
        .iter()
        .zip(&fine)
        .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()));
    let deviation = if scale > T::zero() { diff / scale } else { diff };
    Ok(ConvergenceReport {
        n_coarse: spectrum.grid().len(),
        n_fine: fine_spectrum.grid().len(),
        max_relative_deviation: deviation,
        passed: deviation < T::lit(CONVERGENCE_TOLERANCE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{ArmSign, MediumModel, MediumSpec, SellmeierSet, TaylorCoefficients, WATER};
    use crate::spectra::{rectangular_spectrum, tapered_spectrum, FrequencyGrid};
    use std::f64::consts::PI;
    use std::sync::Arc;

    const LAMBDA0: f64 = 802e-9;
    const BANDWIDTH: f64 = 166e12;

    fn spectrum(n: usize) -> SpectralDensity<f64> {
        let grid = FrequencyGrid::around_wavelength(LAMBDA0, PI * BANDWIDTH, n).unwrap();
        rectangular_spectrum(LAMBDA0, BANDWIDTH, &grid).unwrap()
    }

    fn water(length: f64, passes: u8, arm: ArmSign) -> MediumSpec<f64> {
        let set = Arc::new(SellmeierSet::builtin(WATER).unwrap());
        MediumSpec::new("water", MediumModel::Sellmeier(set), length, passes, arm).unwrap()
    }

    fn beta(b2: f64, b3: f64, length: f64) -> MediumSpec<f64> {
        MediumSpec::taylor("t", TaylorCoefficients::new(0.0, b2, b3), length, 1, ArmSign::Probe).unwrap()
    }

    /// Direct sum with independent sin/cos, for comparison with the recurrence.
    fn direct_lci(s: &SpectralDensity<f64>, phase: &[f64], tau: f64) -> (f64, f64) {
        let g = s.grid();
        let w = g.trapezoid_weights();
        let (mut re, mut im) = (0.0, 0.0);
        for k in 0..g.len() {
            let arg = g.detuning(k) * tau - phase[k];
            re += w[k] * s.weights()[k] * arg.cos();
            im += w[k] * s.weights()[k] * arg.sin();
        }
        let carrier = g.center_angular_frequency() * tau;
        (1.0 + re * carrier.cos() - im * carrier.sin(), re.hypot(im))
    }

    #[test]
    fn axis_geometry() {
        let axis = DelayAxis::<f64>::symmetric(10e-6, 2001).unwrap();
        assert_eq!(axis.first(), -10e-6);
        assert!((axis.last() - 10e-6).abs() < 1e-18);
        assert!((axis.delay(1000)).abs() < 1e-20);
        assert!((axis.step() - 1e-8).abs() < 1e-22);
        let t = axis.times();
        assert!((t[2000] - 2.0 * 10e-6 / crate::scalar::SPEED_OF_LIGHT).abs() < 1e-25);
        assert_eq!(axis.refined().len(), 4001);
        assert!(DelayAxis::<f64>::symmetric(0.0, 10).is_err());
        assert!(DelayAxis::<f64>::symmetric(1.0, 1).is_err());
    }

    #[test]
    fn recurrence_matches_direct_evaluation() {
        let s = spectrum(4097);
        let stack = MediumStack::empty().with(water(1e-3, 2, ArmSign::Probe));
        let axis = DelayAxis::symmetric(30e-6, 41).unwrap();
        let lci = lci_interferogram(&s, &stack, &axis).unwrap();
        let phase = net_phase(&s, &stack).unwrap();
        for (i, tau) in axis.times().into_iter().enumerate() {
            let (v, e) = direct_lci(&s, &phase, tau);
            assert!((lci.values[i] - v).abs() < 1e-12);
            assert!((lci.envelope.as_ref().unwrap()[i] - e).abs() < 1e-12);
        }
    }

    #[test]
    fn monochromatic_source_never_localizes() {
        let grid = FrequencyGrid::around_wavelength(LAMBDA0, PI * BANDWIDTH, 65).unwrap();
        // narrower than one grid step: only the center node carries weight
        let s = rectangular_spectrum(LAMBDA0, 1e9, &grid).unwrap();
        let axis = DelayAxis::symmetric(10e-6, 201).unwrap();
        let lci = lci_interferogram(&s, &MediumStack::empty(), &axis).unwrap();
        let omega0 = grid.center_angular_frequency();
        for (i, tau) in axis.times().into_iter().enumerate() {
            assert!((lci.envelope.as_ref().unwrap()[i] - 1.0).abs() < 1e-12);
            assert!((lci.values[i] - 1.0 - (omega0 * tau).cos()).abs() < 1e-9);
        }
        let report = quadrature_check(&s, &MediumStack::empty(), &axis, SignalKind::Lci).unwrap();
        assert_eq!(report.max_relative_deviation, 0.0);
    }

    #[test]
    fn fringe_bounded_by_envelope() {
        let s = spectrum(4097);
        let stack = MediumStack::empty().with(water(1e-3, 2, ArmSign::Probe));
        let axis = DelayAxis::symmetric(30e-6, 601).unwrap();
        let lci = lci_interferogram(&s, &stack, &axis).unwrap();
        for (v, e) in lci.values.iter().zip(lci.envelope.as_ref().unwrap()) {
            assert!(*v >= -1e-12);
            assert!((v - 1.0).abs() <= e + 1e-12);
        }
    }

    #[test]
    fn phantom_compensation_is_exact() {
        let s = spectrum(4097);
        let axis = DelayAxis::symmetric(10e-6, 401).unwrap();
        let bare = lci_interferogram(&s, &MediumStack::empty(), &axis).unwrap();
        let w = water(2e-3, 2, ArmSign::Probe);
        let stack = MediumStack::empty().with(w.clone()).with(w.mirrored());
        let comp = lci_interferogram(&s, &stack, &axis).unwrap();
        for (a, b) in bare.values.iter().zip(&comp.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn tpi_dip_depth_and_even_cancellation() {
        let s = spectrum(4097);
        let axis = DelayAxis::symmetric(10e-6, 401).unwrap();
        let bare = tpi_coincidence(&s, &MediumStack::empty(), 0.73, &axis).unwrap();
        assert!((bare.values[200] - 0.27).abs() < 1e-12);
        let even = MediumStack::empty().with(beta(3e-25, 0.0, 5e-3));
        let dip = tpi_coincidence(&s, &even, 0.73, &axis).unwrap();
        for (a, b) in bare.values.iter().zip(&dip.values) {
            assert!((a - b).abs() < 1e-12);
        }
        for v in &dip.values {
            assert!(*v >= 0.27 - 1e-12 && *v <= 1.73 + 1e-12);
        }
    }

    #[test]
    fn odd_dispersion_mirrors_the_dip() {
        let s = spectrum(4097);
        let axis = DelayAxis::symmetric(10e-6, 401).unwrap();
        let b3 = 1e-40;
        let plus = tpi_coincidence(&s, &MediumStack::empty().with(beta(0.0, b3, 3e-3)), 0.67, &axis).unwrap();
        let minus = tpi_coincidence(&s, &MediumStack::empty().with(beta(0.0, -b3, 3e-3)), 0.67, &axis).unwrap();
        let n = axis.len();
        let mut asymmetric = false;
        for i in 0..n {
            assert!((plus.values[i] - minus.values[n - 1 - i]).abs() < 1e-12);
            asymmetric |= (plus.values[i] - plus.values[n - 1 - i]).abs() > 1e-6;
        }
        assert!(asymmetric);
    }

    #[test]
    fn spectrum_scale_does_not_matter() {
        let s = spectrum(1025);
        let scaled = SpectralDensity::from_weights(s.grid().clone(), s.weights().iter().map(|w| w * 37.5).collect())
            .unwrap()
            .normalize()
            .unwrap();
        let axis = DelayAxis::symmetric(10e-6, 101).unwrap();
        let stack = MediumStack::empty().with(water(1e-3, 1, ArmSign::Probe));
        let a = tpi_coincidence(&s, &stack, 0.7, &axis).unwrap();
        let b = tpi_coincidence(&scaled, &stack, 0.7, &axis).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn coarse_grids_are_rejected_and_flagged() {
        let s = spectrum(65);
        let axis = DelayAxis::symmetric(10e-6, 201).unwrap();
        let stack = MediumStack::empty().with(water(3e-3, 1, ArmSign::Probe));
        assert!(matches!(
            tpi_coincidence(&s, &stack, 0.67, &axis),
            Err(Error::UnderResolved { .. })
        ));
        let report = quadrature_check(&s, &stack, &axis, SignalKind::Tpi { visibility: 0.67 }).unwrap();
        assert!(!report.passed);
        assert!(report.max_relative_deviation > 1e-3);
    }

    #[test]
    fn default_grid_converges() {
        let s = spectrum(16385);
        let axis = DelayAxis::symmetric(10e-6, 201).unwrap();
        let report = quadrature_check(&s, &MediumStack::empty(), &axis, SignalKind::Tpi { visibility: 1.0 }).unwrap();
        assert!(report.passed, "{:?}", report);
        assert_eq!(report.n_fine, 32769);
    }

    #[test]
    fn invalid_inputs() {
        let s = spectrum(65);
        let axis = DelayAxis::symmetric(1e-6, 11).unwrap();
        assert!(tpi_coincidence(&s, &MediumStack::empty(), 1.2, &axis).is_err());
        let raw = SpectralDensity::from_weights(s.grid().clone(), vec![1.0; 65]).unwrap();
        assert!(lci_interferogram(&raw, &MediumStack::empty(), &axis).is_err());
    }

    #[test]
    fn tapered_edges_barely_change_the_fringe() {
        let grid = FrequencyGrid::around_wavelength(LAMBDA0, PI * (BANDWIDTH + 10e12), 8193).unwrap();
        let rect = rectangular_spectrum(LAMBDA0, BANDWIDTH, &grid).unwrap();
        let taper = tapered_spectrum(LAMBDA0, BANDWIDTH, 10e12, &grid).unwrap();
        let axis = DelayAxis::symmetric(5e-6, 1001).unwrap();
        let env = |s: &SpectralDensity<f64>| lci_interferogram(s, &MediumStack::empty(), &axis).unwrap().envelope.unwrap();
        let half_width = |e: &[f64]| {
            let above = e.iter().filter(|v| **v >= 0.5).count();
            above as f64 * axis.step()
        };
        let (a, b) = (half_width(&env(&rect)), half_width(&env(&taper)));
        assert!((a - b).abs() / a < 0.05, "{a} {b}");
    }

    #[test]
    fn f32_dip_is_coarse_but_sane() {
        let grid = FrequencyGrid::<f32>::around_wavelength(LAMBDA0 as f32, (PI * BANDWIDTH) as f32, 1025).unwrap();
        let s = rectangular_spectrum(LAMBDA0 as f32, BANDWIDTH as f32, &grid).unwrap();
        let axis = DelayAxis::<f32>::symmetric(5e-6, 101).unwrap();
        let dip = tpi_coincidence(&s, &MediumStack::empty(), 0.73, &axis).unwrap();
        assert!((dip.values[50] - 0.27).abs() < 1e-4);
    }
}
