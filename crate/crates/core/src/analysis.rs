//! Width, depth and asymmetry of simulated interferograms.

use crate::error::{Error, Result};
use crate::interferometry::{Interferogram, InterferogramKind};
use crate::scalar::Real;

/// Fraction of samples at each end of the axis used as the baseline.
pub const OUTER_FRACTION: f64 = 0.1;

const MAX_ITERATIONS: usize = 200;
const PARAMETER_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FwhmMethod {
    /// Half level between envelope baseline and envelope peak.
    MidlineEnvelope,
    /// Half level between dip baseline and dip minimum.
    MidlineDip,
    GaussianFit,
}

impl FwhmMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            FwhmMethod::MidlineEnvelope => "midline_envelope",
            FwhmMethod::MidlineDip => "midline_dip",
            FwhmMethod::GaussianFit => "gaussian_fit",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FwhmReport<T> {
    /// Full width in delay units `cτ/2` (m).
    pub fwhm: T,
    pub method: FwhmMethod,
    /// LCI: mean fringe value over the axis. TPI: outer-sample mean, or the
    /// fitted `B` for the Gaussian fit.
    pub baseline: T,
    /// Envelope peak (LCI) or dip minimum (TPI).
    pub extremum: T,
    /// Delay of the lobe or dip center (m).
    pub center: T,
    pub visibility: Option<T>,
    pub asymmetry: Option<T>,
    /// RMS of the fit residual relative to the fitted baseline.
    pub fit_residual: Option<T>,
}

fn outer_mean<T: Real>(values: &[T]) -> T {
    let n = values.len();
    let edge = ((n as f64 * OUTER_FRACTION).floor() as usize).max(1).min(n);
    let sum: T = values[..edge].iter().copied().sum::<T>() + values[n - edge..].iter().copied().sum::<T>();
    sum / T::from_usize_lossy(2 * edge)
}

fn mean<T: Real>(values: &[T]) -> T {
    values.iter().copied().sum::<T>() / T::from_usize_lossy(values.len())
}

/// Width of the lobe where `profile ≥ level`, with crossings interpolated
/// linearly.
///
/// Runs above `level` separated only by shallow notches that stay above
/// `floor` count as one lobe; runs separated by deeper gaps are disjoint
/// and make the width ambiguous.
fn lobe_width<T: Real>(delays: &[T], profile: &[T], level: T, floor: T) -> Result<(T, T)> {
    let n = profile.len();
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < n {
        if profile[i] >= level {
            let start = i;
            while i < n && profile[i] >= level {
                i += 1;
            }
            match runs.last_mut() {
                Some(last) if profile[last.1..start].iter().all(|v| *v > floor) => last.1 = i - 1,
                _ => runs.push((start, i - 1)),
            }
        } else {
            i += 1;
        }
    }
    let crossing = |a: usize, b: usize| {
        let (pa, pb) = (profile[a], profile[b]);
        delays[a] + (delays[b] - delays[a]) * (level - pa) / (pb - pa)
    };
    match runs.as_slice() {
        [] => Err(Error::NoLocalization),
        [(first, last)] => {
            if *first == 0 || *last == n - 1 {
                return Err(Error::NoLocalization);
            }
            Ok((crossing(first - 1, *first), crossing(*last, last + 1)))
        }
        many => Err(Error::AmbiguousLobes {
            lobes: many
                .iter()
                .map(|&(a, b)| (delays[a].as_f64(), delays[b].as_f64()))
                .collect(),
        }),
    }
}

/// Half level and notch floor between `base` and `extremum`.
fn levels<T: Real>(base: T, extremum: T) -> (T, T) {
    (
        base + (extremum - base) / T::lit(2.0),
        base + (extremum - base) / T::lit(4.0),
    )
}

/// Midline FWHM.
///
/// LCI: half level between the envelope's far-delay mean and its peak,
/// applied to the envelope. TPI: half level between the outer-sample
/// baseline and the dip minimum, applied to the dip.
pub fn fwhm_midline<T: Real>(interferogram: &Interferogram<T>) -> Result<FwhmReport<T>> {
    let delays = interferogram.axis.delays();
    if delays.len() < 3 {
        return Err(Error::NoLocalization);
    }
    match interferogram.kind {
        InterferogramKind::LciFringe => {
            let envelope = interferogram
                .envelope
                .as_ref()
                .ok_or(Error::WrongKind { expected: "lci with envelope" })?;
            let base = outer_mean(envelope);
            let (peak_at, peak) = envelope
                .iter()
                .copied()
                .enumerate()
                .fold((0, T::neg_infinity()), |m, (i, v)| if v > m.1 { (i, v) } else { m });
            if !(peak - base > T::epsilon().sqrt() * peak.abs().max(T::one())) {
                return Err(Error::NoLocalization);
            }
            let (half, floor) = levels(base, peak);
            let (left, right) = lobe_width(&delays, envelope, half, floor)?;
            Ok(FwhmReport {
                fwhm: right - left,
                method: FwhmMethod::MidlineEnvelope,
                baseline: mean(&interferogram.values),
                extremum: peak,
                center: delays[peak_at],
                visibility: None,
                asymmetry: None,
                fit_residual: None,
            })
        }
        InterferogramKind::TpiCoincidence => {
            let values = &interferogram.values;
            let base = outer_mean(values);
            let (min_at, min) = minimum(values);
            if !(base - min > T::epsilon().sqrt() * base.abs().max(T::one())) {
                return Err(Error::NoLocalization);
            }
            let flipped: Vec<T> = values.iter().map(|v| -*v).collect();
            let (half, floor) = levels(-base, -min);
            let (left, right) = lobe_width(&delays, &flipped, half, floor)?;
            Ok(FwhmReport {
                fwhm: right - left,
                method: FwhmMethod::MidlineDip,
                baseline: base,
                extremum: min,
                center: delays[min_at],
                visibility: dip_visibility(interferogram).ok(),
                asymmetry: dip_asymmetry(interferogram).ok(),
                fit_residual: None,
            })
        }
    }
}

/// First index of the smallest value.
fn minimum<T: Real>(values: &[T]) -> (usize, T) {
    values
        .iter()
        .copied()
        .enumerate()
        .fold((0, T::infinity()), |m, (i, v)| if v < m.1 { (i, v) } else { m })
}

fn require_dip<T: Real>(interferogram: &Interferogram<T>) -> Result<()> {
    if interferogram.kind != InterferogramKind::TpiCoincidence {
        return Err(Error::WrongKind { expected: "tpi" });
    }
    Ok(())
}

/// A profile whose excursion above the baseline exceeds its deficit below
/// it is a peak, not a dip.
fn check_dip_sign<T: Real>(values: &[T], base: T, min: T) -> Result<()> {
    let max = values.iter().copied().fold(T::neg_infinity(), T::max);
    if max - base > base - min {
        return Err(Error::NotADip);
    }
    Ok(())
}

/// `(baseline − min)/baseline` with the baseline taken from the outer
/// samples on both sides.
pub fn dip_visibility<T: Real>(interferogram: &Interferogram<T>) -> Result<T> {
    require_dip(interferogram)?;
    let values = &interferogram.values;
    let base = outer_mean(values);
    let (_, min) = minimum(values);
    check_dip_sign(values, base, min)?;
    Ok(((base - min) / base).max(T::zero()))
}

/// Normalized third central moment of the deficit `w(d) = baseline − C(d)`
/// over the central lobe: the contiguous samples around the minimum where
/// `w > 0`. Side lobes above the baseline are excluded.
pub fn dip_asymmetry<T: Real>(interferogram: &Interferogram<T>) -> Result<T> {
    require_dip(interferogram)?;
    let values = &interferogram.values;
    let base = outer_mean(values);
    let delays = interferogram.axis.delays();
    let (min_at, min) = minimum(values);
    if !(base - min > T::zero()) {
        return Err(Error::UndefinedAsymmetry);
    }
    let mut lo = min_at;
    while lo > 0 && values[lo - 1] < base {
        lo -= 1;
    }
    let mut hi = min_at;
    while hi + 1 < values.len() && values[hi + 1] < base {
        hi += 1;
    }
    let w: Vec<T> = values[lo..=hi].iter().map(|v| base - *v).collect();
    let d = &delays[lo..=hi];
    let total: T = w.iter().copied().sum();
    let mu = w.iter().zip(d).map(|(w, d)| *w * *d).sum::<T>() / total;
    let moment = |p: i32| w.iter().zip(d).map(|(w, d)| *w * (*d - mu).powi(p)).sum::<T>() / total;
    let m2 = moment(2);
    if !(m2 > T::zero()) {
        return Err(Error::UndefinedAsymmetry);
    }
    Ok(moment(3) / m2.powf(T::lit(1.5)))
}

/// Fit state in scaled delay units `x = (d − origin)/scale`.
#[derive(Clone, Copy, Debug)]
struct Fit<T> {
    base: T,
    center: T,
    sigma: T,
    sse: T,
}

struct Problem<'a, T> {
    x: &'a [T],
    y: &'a [T],
    visibility: T,
}

impl<T: Real> Problem<'_, T> {
    fn shape(&self, xi: T, center: T, sigma: T) -> T {
        let u = (xi - center) / sigma;
        T::one() - self.visibility * (-(u * u) / T::lit(2.0)).exp()
    }

    /// Best `B` for fixed center and width, with its squared error.
    fn profile(&self, center: T, sigma: T) -> Fit<T> {
        let (mut num, mut den) = (T::zero(), T::zero());
        for (&xi, &yi) in self.x.iter().zip(self.y) {
            let s = self.shape(xi, center, sigma);
            num += s * yi;
            den += s * s;
        }
        let base = num / den;
        Fit {
            base,
            center,
            sigma,
            sse: self.sse(base, center, sigma),
        }
    }

    fn sse(&self, base: T, center: T, sigma: T) -> T {
        self.x
            .iter()
            .zip(self.y)
            .map(|(&xi, &yi)| {
                let r = base * self.shape(xi, center, sigma) - yi;
                r * r
            })
            .sum()
    }

    /// Normal equations `JᵀJ` and `Jᵀr` for parameters `(B, d₀, σ)`.
    fn normal_equations(&self, fit: &Fit<T>) -> ([[T; 3]; 3], [T; 3]) {
        let mut jtj = [[T::zero(); 3]; 3];
        let mut jtr = [T::zero(); 3];
        for (&xi, &yi) in self.x.iter().zip(self.y) {
            let u = (xi - fit.center) / fit.sigma;
            let g = (-(u * u) / T::lit(2.0)).exp();
            let bvg = fit.base * self.visibility * g;
            let row = [T::one() - self.visibility * g, -bvg * u / fit.sigma, -bvg * u * u / fit.sigma];
            let r = fit.base * row[0] - yi;
            for a in 0..3 {
                jtr[a] += row[a] * r;
                for b in 0..3 {
                    jtj[a][b] += row[a] * row[b];
                }
            }
        }
        (jtj, jtr)
    }
}

/// Solves a 3×3 system by Gaussian elimination with partial pivoting.
fn solve3<T: Real>(mut a: [[T; 3]; 3], mut b: [T; 3]) -> Option<[T; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col] == T::zero() || !a[pivot][col].is_finite() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = [T::zero(); 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Least-squares fit of `B·[1 − V·exp(−(d − d₀)²/(2σ²))]` over the whole
/// axis with `V` fixed; `fwhm = 2σ√(2 ln 2)`.
///
/// Starts from the sample minimum (earliest on ties), the half-deficit width
/// and the outer-sample mean, scans a coarse `(d₀, σ)` grid with `B`
/// profiled out, then refines with Levenberg–Marquardt.
pub fn fwhm_gaussian_fit<T: Real>(interferogram: &Interferogram<T>, fixed_visibility: T) -> Result<FwhmReport<T>> {
    require_dip(interferogram)?;
    if !(fixed_visibility > T::zero() && fixed_visibility <= T::one()) {
        return Err(Error::Domain(format!(
            "fit visibility must lie in (0, 1], got {}",
            fixed_visibility
        )));
    }
    let values = &interferogram.values;
    let delays = interferogram.axis.delays();
    let base0 = outer_mean(values);
    let (min_at, min) = minimum(values);
    check_dip_sign(values, base0, min)?;
    if !(min < base0) {
        return Err(Error::NotADip);
    }
    let d0 = delays[min_at];
    let sigma_guess = {
        let flipped: Vec<T> = values.iter().map(|v| -*v).collect();
        let (half, floor) = levels(-base0, -min);
        match lobe_width(&delays, &flipped, half, floor) {
            Ok((l, r)) => (r - l) / T::lit(2.355),
            Err(_) => interferogram.axis.step() * T::lit(4.0),
        }
    }
    .max(interferogram.axis.step() / T::lit(2.0));

    // scaled coordinates keep every parameter O(1)
    let scale = sigma_guess;
    let x: Vec<T> = delays.iter().map(|d| (*d - d0) / scale).collect();
    let peak = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let y: Vec<T> = values.iter().map(|v| *v / peak).collect();
    let problem = Problem {
        x: &x,
        y: &y,
        visibility: fixed_visibility,
    };

    let mut best = Fit {
        base: base0 / peak,
        center: T::zero(),
        sigma: T::one(),
        sse: problem.sse(base0 / peak, T::zero(), T::one()),
    };
    for i in -8..=8 {
        let sigma = T::lit(2f64.powf(f64::from(i) / 4.0));
        for j in -8..=8 {
            let candidate = problem.profile(T::lit(f64::from(j) / 4.0), sigma);
            if candidate.sse < best.sse {
                best = candidate;
            }
        }
    }

    let mut lambda = T::lit(1e-3);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (jtj, jtr) = problem.normal_equations(&best);
        let mut damped = jtj;
        for (k, row) in damped.iter_mut().enumerate() {
            row[k] += lambda * jtj[k][k].max(T::epsilon());
        }
        let Some(step) = solve3(damped, jtr.map(|v| -v)) else {
            lambda *= T::lit(10.0);
            continue;
        };
        let trial = Fit {
            base: best.base + step[0],
            center: best.center + step[1],
            sigma: (best.sigma + step[2]).abs(),
            sse: T::zero(),
        };
        let trial = Fit {
            sse: problem.sse(trial.base, trial.center, trial.sigma),
            ..trial
        };
        let tol = T::lit(PARAMETER_TOLERANCE);
        let small = step[0].abs() <= tol * best.base.abs()
            && step[1].abs() <= tol * (best.center.abs() + best.sigma)
            && step[2].abs() <= tol * best.sigma;
        if trial.sse <= best.sse {
            best = trial;
            lambda = (lambda / T::lit(10.0)).max(T::lit(1e-12));
        } else {
            lambda *= T::lit(10.0);
        }
        if small {
            converged = true;
            break;
        }
        if lambda > T::lit(1e16) {
            break;
        }
    }

    let fwhm_factor = T::lit(2.0 * (2.0 * 2f64.ln()).sqrt());
    let fwhm = best.sigma * scale * fwhm_factor;
    let rms = (best.sse / T::from_usize_lossy(y.len())).sqrt() / best.base.abs();
    if !converged {
        return Err(Error::FitFailure {
            iterations,
            best_fwhm: fwhm.as_f64(),
            best_rms: rms.as_f64(),
        });
    }
    Ok(FwhmReport {
        fwhm,
        method: FwhmMethod::GaussianFit,
        baseline: best.base * peak,
        extremum: min,
        center: d0 + best.center * scale,
        visibility: dip_visibility(interferogram).ok(),
        asymmetry: dip_asymmetry(interferogram).ok(),
        fit_residual: Some(rms),
    })
}
