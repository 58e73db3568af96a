//! Linearly chirped first-order quasi-phase-matching grating.
//!
//! The grating is treated geometrically: each position `z` phase-matches the
//! collinear pair whose mismatch vanishes for the local period `Λ(z)`.

use std::fmt::Write as _;
use std::path::Path;

use crate::dispersion::{sellmeier_index, IndexModel};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct QpmGrating<T> {
    device_length: T,
    period_start: T,
    period_end: T,
    duty_ratio: T,
}

impl<T: Real> QpmGrating<T> {
    pub fn new(device_length: T, period_start: T, period_end: T, duty_ratio: T) -> Result<Self> {
        if !(device_length > T::zero()) {
            return Err(Error::Domain(format!("device length must be positive, got {}", device_length)));
        }
        if !(period_start > T::zero() && period_end >= period_start) {
            return Err(Error::Domain(format!(
                "periods must satisfy 0 < start <= end, got {} .. {}",
                period_start, period_end
            )));
        }
        if !(duty_ratio > T::zero() && duty_ratio < T::one()) {
            return Err(Error::Domain(format!("duty ratio must lie in (0, 1), got {}", duty_ratio)));
        }
        Ok(Self {
            device_length,
            period_start,
            period_end,
            duty_ratio,
        })
    }

    /// 20 mm device chirped from 3.12 µm to 3.34 µm, duty ratio 0.65.
    pub fn chirped_lt_device() -> Self {
        Self::new(T::lit(20e-3), T::lit(3.12e-6), T::lit(3.34e-6), T::lit(0.65)).expect("valid device")
    }

    pub fn device_length(&self) -> T {
        self.device_length
    }

    pub fn period_start(&self) -> T {
        self.period_start
    }

    pub fn period_end(&self) -> T {
        self.period_end
    }

    pub fn duty_ratio(&self) -> T {
        self.duty_ratio
    }

    /// `(Λ_end − Λ_start)/Λ_mid`
    pub fn relative_chirp(&self) -> T {
        let mid = (self.period_start + self.period_end) / T::lit(2.0);
        (self.period_end - self.period_start) / mid
    }

    fn period_unchecked(&self, z: T) -> T {
        self.period_start + (self.period_end - self.period_start) * z / self.device_length
    }
}

/// Local poling period `Λ(z)` for `0 ≤ z ≤ L`.
pub fn chirped_period<T: Real>(grating: &QpmGrating<T>, z: T) -> Result<T> {
    if !(z >= T::zero() && z <= grating.device_length) {
        return Err(Error::PositionOutOfRange {
            z: z.as_f64(),
            length: grating.device_length.as_f64(),
        });
    }
    Ok(grating.period_unchecked(z))
}

/// Domain-wall positions; segment `i` (between walls `i` and `i+1`) is
/// inverted when `i` is even.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainWallList<T> {
    walls: Vec<T>,
    inverted_count: usize,
}

impl<T: Real> DomainWallList<T> {
    pub fn walls(&self) -> &[T] {
        &self.walls
    }

    pub fn inverted_count(&self) -> usize {
        self.inverted_count
    }

    /// `(start, end)` of every inverted domain.
    pub fn inverted_domains(&self) -> impl Iterator<Item = (T, T)> + '_ {
        (0..self.inverted_count).map(move |j| (self.walls[2 * j], self.walls[2 * j + 1]))
    }
}

/// Marches from `z = 0`, alternating an inverted domain of width `D·Λ` and
/// a non-inverted one of width `(1 − D)·Λ`, with `Λ` the period at each
/// domain's own midpoint. Only inverted domains that fit entirely are
/// placed; the last wall is the device end.
pub fn domain_walls<T: Real>(grating: &QpmGrating<T>) -> DomainWallList<T> {
    let length = grating.device_length;
    let tol = length * T::lit(1e-12);
    let duty = grating.duty_ratio;
    let slope = (grating.period_end - grating.period_start) / length;
    let half = T::lit(0.5);
    // w = f·Λ(z + w/2) solved for a linear chirp
    let width = |z: T, fraction: T| fraction * grating.period_unchecked(z) / (T::one() - fraction * slope * half);
    let mut walls = vec![T::zero()];
    let mut count = 0;
    let mut z = T::zero();
    loop {
        let inverted_end = z + width(z, duty);
        if inverted_end > length + tol {
            break;
        }
        count += 1;
        if inverted_end >= length - tol {
            walls.push(length);
            break;
        }
        walls.push(inverted_end);
        let next = inverted_end + width(inverted_end, T::one() - duty);
        if next >= length - tol {
            break;
        }
        walls.push(next);
        z = next;
    }
    if *walls.last().unwrap() < length {
        walls.push(length);
    }
    DomainWallList {
        walls,
        inverted_count: count,
    }
}

/// Formats `value` with `digits` significant digits in plain decimal notation.
pub(crate) fn significant(value: f64, digits: i32) -> String {
    if value == 0.0 {
        return format!("{:.*}", (digits - 1) as usize, 0.0);
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (digits - 1 - magnitude).max(0) as usize;
    format!("{value:.decimals$}")
}

/// Fabrication-style listing: `#` header with the grating parameters, then
/// one wall position per line in µm with 9 significant digits.
pub fn format_domain_walls<T: Real>(grating: &QpmGrating<T>, walls: &DomainWallList<T>) -> String {
    let mut out = String::new();
    let um = |x: T| x.as_f64() * 1e6;
    let _ = writeln!(out, "# chirped QPM domain walls");
    let _ = writeln!(out, "# device_length_um = {}", significant(um(grating.device_length), 9));
    let _ = writeln!(out, "# period_start_um = {}", significant(um(grating.period_start), 9));
    let _ = writeln!(out, "# period_end_um = {}", significant(um(grating.period_end), 9));
    let _ = writeln!(out, "# duty_ratio = {}", significant(grating.duty_ratio.as_f64(), 9));
    let _ = writeln!(out, "# inverted_domains = {}", walls.inverted_count);
    let _ = writeln!(out, "# walls = {}", walls.walls.len());
    let _ = writeln!(out, "# z_um");
    for &w in &walls.walls {
        let _ = writeln!(out, "{}", significant(um(w), 9));
    }
    out
}

pub fn write_domain_walls<T: Real>(
    grating: &QpmGrating<T>,
    walls: &DomainWallList<T>,
    path: impl AsRef<Path>,
) -> Result<()> {
    crate::runner::write_atomic(path.as_ref(), format_domain_walls(grating, walls).as_bytes())
}

/// Fourier amplitude of order `m` of a rectangular duty-`D` grating,
/// `|2/(mπ)·sin(mπD)|`. Efficiency ratios are squared amplitude ratios.
pub fn qpm_order_efficiency<T: Real>(order: u32, duty: T) -> Result<T> {
    if order == 0 || order % 2 == 0 {
        return Err(Error::Domain(format!("QPM order must be odd and >= 1, got {order}")));
    }
    if !(duty > T::zero() && duty < T::one()) {
        return Err(Error::Domain(format!("duty ratio must lie in (0, 1), got {}", duty)));
    }
    let m = T::lit(f64::from(order));
    Ok((T::lit(2.0) / (m * T::PI()) * (m * T::PI() * duty).sin()).abs())
}

fn wavevector<T: Real, M: IndexModel<T>>(model: &M, wavelength: T) -> Result<T> {
    Ok(T::TAU() * sellmeier_index(model, wavelength)? / wavelength)
}

fn idler_wavelength<T: Real>(pump: T, signal: T) -> Result<T> {
    let inv = T::one() / pump - T::one() / signal;
    if !(inv > T::zero()) {
        return Err(Error::Domain(format!(
            "no physical idler for pump {:.3} nm and signal {:.3} nm",
            pump.as_f64() * 1e9,
            signal.as_f64() * 1e9
        )));
    }
    Ok(T::one() / inv)
}

/// Collinear mismatch `Δk = k_p − k_s − k_i − 2π/Λ` (rad/m), with the idler
/// fixed by energy conservation.
pub fn phase_mismatch<T: Real, M: IndexModel<T>>(model: &M, pump: T, signal: T, period: T) -> Result<T> {
    let idler = idler_wavelength(pump, signal)?;
    Ok(wavevector(model, pump)? - wavevector(model, signal)? - wavevector(model, idler)? - T::TAU() / period)
}

/// Period that phase-matches a given signal wavelength (Δk is affine in 1/Λ).
pub fn matched_period<T: Real, M: IndexModel<T>>(model: &M, pump: T, signal: T) -> Result<T> {
    let idler = idler_wavelength(pump, signal)?;
    let dk = wavevector(model, pump)? - wavevector(model, signal)? - wavevector(model, idler)?;
    if !(dk > T::zero()) {
        return Err(Error::NoPhaseMatch(format!("material mismatch {} rad/m is not positive", dk)));
    }
    Ok(T::TAU() / dk)
}

/// Period matched at degeneracy (`λ_s = λ_i = 2λ_p`).
pub fn degenerate_period<T: Real, M: IndexModel<T>>(model: &M, pump: T) -> Result<T> {
    matched_period(model, pump, T::lit(2.0) * pump)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseMatchPoint<T> {
    pub z: T,
    pub period: T,
    pub signal: T,
    pub idler: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmissionSpan<T> {
    pub min: T,
    pub max: T,
    /// Solutions at the grating ends that phase-match.
    pub points: Vec<PhaseMatchPoint<T>>,
    /// Whether the degenerate period lies inside the chirp range.
    pub contains_degeneracy: bool,
}

/// Signal wavelength in `(lo, 2λ_p]` with `Δk = 0`, if the bracket changes sign.
fn solve_signal<T: Real, M: IndexModel<T>>(model: &M, pump: T, period: T) -> Result<Option<T>> {
    let (valid_lo, valid_hi) = model.validity();
    let hi = T::lit(2.0) * pump;
    // the idler must stay inside the index validity range
    let idler_limit = T::one() / (T::one() / pump - T::one() / valid_hi);
    let mut lo = idler_limit.max(valid_lo) * (T::one() + T::lit(1e-12));
    if !(lo < hi) {
        return Ok(None);
    }
    let f = |s: T| phase_mismatch(model, pump, s, period);
    let f_hi = f(hi)?;
    if f_hi == T::zero() {
        return Ok(Some(hi));
    }
    let mut f_lo = f(lo)?;
    if f_lo.signum() == f_hi.signum() {
        return Ok(None);
    }
    let mut upper = hi;
    for _ in 0..200 {
        let mid = (lo + upper) / T::lit(2.0);
        if mid <= lo || mid >= upper {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == T::zero() {
            return Ok(Some(mid));
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            upper = mid;
        }
    }
    Ok(Some((lo + upper) / T::lit(2.0)))
}

/// Wavelength span emitted by the chirped grating under local phase matching.
///
/// Both grating ends are solved by bisection on the signal wavelength; an end
/// whose period lies below the degenerate period has no collinear solution
/// and contributes nothing. If the chirp range contains the degenerate
/// period, `2λ_p` is part of the span.
pub fn emission_span<T: Real, M: IndexModel<T>>(
    grating: &QpmGrating<T>,
    model: &M,
    pump: T,
) -> Result<EmissionSpan<T>> {
    model.check_range(pump)?;
    let degenerate = T::lit(2.0) * pump;
    let deg_period = degenerate_period(model, pump)?;
    let tol = T::lit(1e-12);
    let contains_degeneracy = deg_period >= grating.period_start * (T::one() - tol)
        && deg_period <= grating.period_end * (T::one() + tol);
    let mut points = Vec::new();
    let ends = if grating.period_start == grating.period_end {
        vec![T::zero()]
    } else {
        vec![T::zero(), grating.device_length]
    };
    for z in ends {
        let period = grating.period_unchecked(z);
        if let Some(signal) = solve_signal(model, pump, period)? {
            let idler = idler_wavelength(pump, signal).unwrap_or(degenerate);
            points.push(PhaseMatchPoint {
                z,
                period,
                signal,
                idler,
            });
        }
    }
    let mut wavelengths: Vec<T> = points.iter().flat_map(|p| [p.signal, p.idler]).collect();
    if contains_degeneracy {
        wavelengths.push(degenerate);
    }
    if wavelengths.is_empty() {
        return Err(Error::NoPhaseMatch(format!(
            "periods {:.4}..{:.4} µm never phase-match pump {:.1} nm (degenerate period {:.4} µm)",
            grating.period_start.as_f64() * 1e6,
            grating.period_end.as_f64() * 1e6,
            pump.as_f64() * 1e9,
            deg_period.as_f64() * 1e6
        )));
    }
    let min = wavelengths.iter().copied().fold(T::infinity(), T::min);
    let max = wavelengths.iter().copied().fold(T::neg_infinity(), T::max);
    Ok(EmissionSpan {
        min,
        max,
        points,
        contains_degeneracy,
    })
}
