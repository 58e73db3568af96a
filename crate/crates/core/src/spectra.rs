//! Source and biphoton-detuning spectra on a uniform detuning grid.
//!
//! Spectra are stored versus the angular detuning `Ω = ω − ω₀`, not versus
//! wavelength. The grid is symmetric and always contains `Ω = 0`, so the
//! node of `+Ω` and the node of `−Ω` are exact negatives of each other.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{angular_frequency, wavelength, Real};

/// Relative slack used when comparing band edges against grid nodes.
const EDGE_SLACK: f64 = 1e-12;

/// Uniform symmetric grid of angular detuning about `ω₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGrid<T> {
    center: T,
    half_span: T,
    n_points: usize,
}

impl<T: Real> FrequencyGrid<T> {
    /// `n_points` must be odd and at least 3 so that `Ω = 0` is a node.
    pub fn new(center_angular_frequency: T, half_span: T, n_points: usize) -> Result<Self> {
        if n_points < 3 || n_points % 2 == 0 {
            return Err(Error::InvalidGrid(format!(
                "n_points must be odd and >= 3, got {n_points}"
            )));
        }
        if !(half_span > T::zero()) || !half_span.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "half span must be positive, got {}",
                half_span
            )));
        }
        if !(center_angular_frequency - half_span > T::zero()) {
            return Err(Error::InvalidGrid(format!(
                "grid reaches non-positive optical frequency (ω₀ = {}, Ω_max = {})",
                center_angular_frequency, half_span
            )));
        }
        Ok(Self {
            center: center_angular_frequency,
            half_span,
            n_points,
        })
    }

    pub fn around_wavelength(center_wavelength: T, half_span: T, n_points: usize) -> Result<Self> {
        if !(center_wavelength > T::zero()) {
            return Err(Error::Domain("center wavelength must be positive".into()));
        }
        Self::new(angular_frequency(center_wavelength), half_span, n_points)
    }

    pub fn center_angular_frequency(&self) -> T {
        self.center
    }

    pub fn center_wavelength(&self) -> T {
        wavelength(self.center)
    }

    pub fn half_span(&self) -> T {
        self.half_span
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn mid(&self) -> usize {
        (self.n_points - 1) / 2
    }

    pub fn spacing(&self) -> T {
        self.half_span / T::from_usize_lossy(self.mid())
    }

    /// Detuning of node `k`; node `n − 1 − k` is its exact negative.
    pub fn detuning(&self, k: usize) -> T {
        let m = self.mid();
        let h = self.spacing();
        if k >= m {
            T::from_usize_lossy(k - m) * h
        } else {
            -(T::from_usize_lossy(m - k) * h)
        }
    }

    pub fn detunings(&self) -> Vec<T> {
        (0..self.n_points).map(|k| self.detuning(k)).collect()
    }

    /// Trapezoid quadrature weights (`h/2` at the ends, `h` inside).
    pub fn trapezoid_weights(&self) -> Vec<T> {
        let h = self.spacing();
        let mut w = vec![h; self.n_points];
        w[0] = h / T::lit(2.0);
        w[self.n_points - 1] = h / T::lit(2.0);
        w
    }

    pub fn trapezoid(&self, values: &[T]) -> T {
        assert_eq!(values.len(), self.n_points, "values must live on the grid");
        let h = self.spacing();
        let n = values.len();
        let inner: T = values[1..n - 1].iter().copied().sum();
        h * (inner + (values[0] + values[n - 1]) / T::lit(2.0))
    }

    /// Same span with `2n − 1` nodes; every old node is kept.
    pub fn refined(&self) -> Self {
        Self {
            center: self.center,
            half_span: self.half_span,
            n_points: 2 * self.n_points - 1,
        }
    }

    fn check_center_wavelength(&self, center_wavelength: T) -> Result<()> {
        let omega = angular_frequency(center_wavelength);
        let rel = ((omega - self.center) / self.center).abs();
        if rel > T::lit(1e-9) {
            return Err(Error::Domain(format!(
                "center wavelength {:.6e} m does not match the grid center {:.6e} m",
                center_wavelength.as_f64(),
                self.center_wavelength().as_f64()
            )));
        }
        Ok(())
    }

    fn check_covers(&self, band_half_width: T) -> Result<()> {
        if band_half_width > self.half_span * (T::one() + T::lit(EDGE_SLACK)) {
            return Err(Error::SpectrumTruncation {
                band: band_half_width.as_f64(),
                span: self.half_span.as_f64(),
            });
        }
        Ok(())
    }
}

/// Wavelength-density table, wavelengths ascending in meters.
#[derive(Clone, Debug, PartialEq)]
pub struct WavelengthTable<T> {
    wavelengths: Vec<T>,
    intensities: Vec<T>,
}

impl<T: Real> WavelengthTable<T> {
    pub fn new(mut rows: Vec<(T, T)>) -> std::result::Result<Self, String> {
        if rows.len() < 2 {
            return Err(format!("need at least 2 data rows, found {}", rows.len()));
        }
        let ascending = rows[1].0 > rows[0].0;
        for pair in rows.windows(2) {
            let ok = if ascending {
                pair[1].0 > pair[0].0
            } else {
                pair[1].0 < pair[0].0
            };
            if !ok {
                return Err(format!(
                    "wavelengths must be strictly monotone (at {} nm)",
                    (pair[1].0 * T::lit(1e9)).as_f64()
                ));
            }
        }
        if let Some(bad) = rows.iter().find(|r| !(r.0 > T::zero())) {
            return Err(format!("non-positive wavelength {}", bad.0));
        }
        if let Some(bad) = rows.iter().find(|r| !(r.1 >= T::zero()) || !r.1.is_finite()) {
            return Err(format!("invalid intensity {}", bad.1));
        }
        if rows.iter().all(|r| r.1 == T::zero()) {
            return Err("all intensities are zero".into());
        }
        if !ascending {
            rows.reverse();
        }
        let (wavelengths, intensities) = rows.into_iter().unzip();
        Ok(Self {
            wavelengths,
            intensities,
        })
    }

    pub fn range(&self) -> (T, T) {
        (self.wavelengths[0], *self.wavelengths.last().unwrap())
    }

    /// Linear interpolation of the wavelength density; zero outside the table.
    pub fn density(&self, lambda: T) -> T {
        let (lo, hi) = self.range();
        if lambda < lo || lambda > hi {
            return T::zero();
        }
        let i = self.wavelengths.partition_point(|&w| w <= lambda);
        if i == 0 {
            return self.intensities[0];
        }
        if i >= self.wavelengths.len() {
            return *self.intensities.last().unwrap();
        }
        let (x0, x1) = (self.wavelengths[i - 1], self.wavelengths[i]);
        let (y0, y1) = (self.intensities[i - 1], self.intensities[i]);
        y0 + (y1 - y0) * (lambda - x0) / (x1 - x0)
    }
}

/// How a spectrum was built; used to re-evaluate it on a refined grid.
#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumShape<T> {
    Rectangular { bandwidth: T },
    Tapered { bandwidth: T, edge_width: T },
    Gaussian { fwhm: T },
    Tabulated(Arc<WavelengthTable<T>>),
    /// Raw node weights; refinement interpolates linearly.
    Sampled,
}

impl<T: Real> SpectrumShape<T> {
    /// Unnormalized weight at absolute angular frequency `omega`.
    fn weight(&self, detuning: T, omega: T) -> T {
        let pi = T::PI();
        let two = T::lit(2.0);
        match self {
            SpectrumShape::Rectangular { bandwidth } => {
                if detuning.abs() <= pi * *bandwidth * (T::one() + T::lit(EDGE_SLACK)) {
                    T::one()
                } else {
                    T::zero()
                }
            }
            SpectrumShape::Tapered {
                bandwidth,
                edge_width,
            } => {
                // distance from center in Hz
                let nu = detuning.abs() / (two * pi);
                let inner = (*bandwidth - *edge_width) / two;
                let outer = (*bandwidth + *edge_width) / two;
                let slack = T::one() + T::lit(EDGE_SLACK);
                if nu <= inner * slack {
                    T::one()
                } else if nu >= outer {
                    T::zero()
                } else {
                    (T::one() + (pi * (nu - inner) / *edge_width).cos()) / two
                }
            }
            SpectrumShape::Gaussian { fwhm } => {
                let sigma = pi * *fwhm / (two * two.ln()).sqrt();
                (-(detuning * detuning) / (two * sigma * sigma)).exp()
            }
            SpectrumShape::Tabulated(table) => {
                let lambda = wavelength(omega);
                table.density(lambda) * lambda * lambda / (T::TAU() * T::c())
            }
            SpectrumShape::Sampled => unreachable!("sampled spectra are interpolated"),
        }
    }
}

/// Nonnegative spectral weights `S(Ω)` on a [`FrequencyGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDensity<T> {
    grid: FrequencyGrid<T>,
    weights: Vec<T>,
    shape: SpectrumShape<T>,
    normalized: bool,
}

impl<T: Real> SpectralDensity<T> {
    /// Wraps raw weights; call [`SpectralDensity::normalize`] before use.
    pub fn from_weights(grid: FrequencyGrid<T>, weights: Vec<T>) -> Result<Self> {
        if weights.len() != grid.len() {
            return Err(Error::Domain(format!(
                "{} weights for a {}-point grid",
                weights.len(),
                grid.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= T::zero()) || !w.is_finite()) {
            return Err(Error::Domain(format!("spectral weight {} is not a finite nonnegative number", w)));
        }
        Ok(Self {
            grid,
            weights,
            shape: SpectrumShape::Sampled,
            normalized: false,
        })
    }

    fn from_shape(grid: &FrequencyGrid<T>, shape: SpectrumShape<T>) -> Result<Self> {
        let center = grid.center_angular_frequency();
        let weights = grid
            .detunings()
            .into_iter()
            .map(|d| shape.weight(d, center + d))
            .collect();
        Self {
            grid: grid.clone(),
            weights,
            shape,
            normalized: false,
        }
        .normalize()
    }

    /// Scales the weights to unit trapezoid integral over `Ω`.
    pub fn normalize(mut self) -> Result<Self> {
        let total = self.integral();
        if !(total > T::zero()) {
            return Err(Error::Domain("spectrum has no weight on the grid".into()));
        }
        for w in &mut self.weights {
            *w /= total;
        }
        self.normalized = true;
        Ok(self)
    }

    pub fn integral(&self) -> T {
        self.grid.trapezoid(&self.weights)
    }

    pub fn grid(&self) -> &FrequencyGrid<T> {
        &self.grid
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn shape(&self) -> &SpectrumShape<T> {
        &self.shape
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Re-evaluates the spectrum on another grid with the same center.
    pub fn resampled(&self, grid: &FrequencyGrid<T>) -> Result<Self> {
        if grid.center_angular_frequency() != self.grid.center_angular_frequency() {
            return Err(Error::Domain("resampling requires the same grid center".into()));
        }
        match &self.shape {
            SpectrumShape::Sampled => {
                let src = self.grid.detunings();
                let h = self.grid.spacing();
                let n = src.len();
                let weights = grid
                    .detunings()
                    .into_iter()
                    .map(|d| {
                        let x = (d - src[0]) / h;
                        if x < T::zero() || x > T::from_usize_lossy(n - 1) {
                            return T::zero();
                        }
                        let i = x.floor().to_usize().unwrap_or(0).min(n - 2);
                        let f = x - T::from_usize_lossy(i);
                        self.weights[i] * (T::one() - f) + self.weights[i + 1] * f
                    })
                    .collect();
                let out = Self::from_weights(grid.clone(), weights)?;
                if self.normalized {
                    out.normalize()
                } else {
                    Ok(out)
                }
            }
            shape => Self::from_shape(grid, shape.clone()),
        }
    }
}

/// Flat-top spectrum of full width `bandwidth` (Hz): `|Ω| ≤ π·bandwidth`.
pub fn rectangular_spectrum<T: Real>(
    center_wavelength: T,
    bandwidth: T,
    grid: &FrequencyGrid<T>,
) -> Result<SpectralDensity<T>> {
    if !(bandwidth > T::zero()) {
        return Err(Error::Domain(format!("bandwidth must be positive, got {}", bandwidth)));
    }
    grid.check_center_wavelength(center_wavelength)?;
    grid.check_covers(T::PI() * bandwidth)?;
    SpectralDensity::from_shape(grid, SpectrumShape::Rectangular { bandwidth })
}

/// Flat top with raised-cosine edges of width `edge_width` (Hz) centered on
/// the nominal band edges, so the spectral FWHM stays `bandwidth`.
pub fn tapered_spectrum<T: Real>(
    center_wavelength: T,
    bandwidth: T,
    edge_width: T,
    grid: &FrequencyGrid<T>,
) -> Result<SpectralDensity<T>> {
    if !(bandwidth > T::zero()) {
        return Err(Error::Domain(format!("bandwidth must be positive, got {}", bandwidth)));
    }
    if !(edge_width >= T::zero()) || edge_width > bandwidth {
        return Err(Error::Domain(format!(
            "edge width must lie in [0, bandwidth], got {}",
            edge_width
        )));
    }
    if edge_width == T::zero() {
        return rectangular_spectrum(center_wavelength, bandwidth, grid);
    }
    grid.check_center_wavelength(center_wavelength)?;
    grid.check_covers(T::PI() * (bandwidth + edge_width))?;
    SpectralDensity::from_shape(
        grid,
        SpectrumShape::Tapered {
            bandwidth,
            edge_width,
        },
    )
}

/// Gaussian in `Ω` with full width at half maximum `fwhm` (Hz).
pub fn gaussian_spectrum<T: Real>(
    center_wavelength: T,
    fwhm: T,
    grid: &FrequencyGrid<T>,
) -> Result<SpectralDensity<T>> {
    if !(fwhm > T::zero()) {
        return Err(Error::Domain(format!("fwhm must be positive, got {}", fwhm)));
    }
    grid.check_center_wavelength(center_wavelength)?;
    grid.check_covers(T::lit(3.0) * T::PI() * fwhm)?;
    SpectralDensity::from_shape(grid, SpectrumShape::Gaussian { fwhm })
}

/// Parses a two-column `wavelength_nm, intensity` table.
///
/// Lines starting with `#` and blank lines are ignored; columns are split on
/// tabs, commas or runs of spaces.
pub fn parse_wavelength_table<T: Real>(text: &str) -> std::result::Result<WavelengthTable<T>, String> {
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == '\t' || c == ',' || c == ' ')
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(format!(
                "line {}: expected 2 columns, found {}",
                lineno + 1,
                fields.len()
            ));
        }
        let parse = |s: &str| -> std::result::Result<f64, String> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| format!("line {}: '{}': {}", lineno + 1, s, e))
        };
        let nm = parse(fields[0])?;
        let intensity = parse(fields[1])?;
        rows.push((T::lit(nm * 1e-9), T::lit(intensity)));
    }
    WavelengthTable::new(rows)
}

/// Loads a wavelength-density table and converts it to a detuning density
/// on `grid` (Jacobian `λ²/(2πc)`), zero outside the tabulated range.
pub fn load_tabulated_spectrum<T: Real>(
    path: impl AsRef<Path>,
    grid: &FrequencyGrid<T>,
) -> Result<SpectralDensity<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading spectrum table {}", path.display()), e))?;
    let ingestion = |reason: String| Error::Ingestion {
        path: path.to_path_buf(),
        reason,
    };
    let table = parse_wavelength_table(&text).map_err(ingestion)?;
    SpectralDensity::from_shape(grid, SpectrumShape::Tabulated(Arc::new(table))).map_err(|e| match e {
        Error::Domain(_) => ingestion("table has no weight inside the grid".into()),
        other => other,
    })
}

/// Writes the spectrum as a wavelength-density table readable by
/// [`load_tabulated_spectrum`].
pub fn write_tabulated_spectrum<T: Real>(
    spectrum: &SpectralDensity<T>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let grid = spectrum.grid();
    let center = grid.center_angular_frequency();
    let mut out = String::from("# wavelength_nm\tintensity\n");
    // descending detuning = ascending wavelength
    for k in (0..grid.len()).rev() {
        let lambda = wavelength(center + grid.detuning(k));
        let density = spectrum.weights()[k] * T::TAU() * T::c() / (lambda * lambda);
        let _ = writeln!(
            out,
            "{:.17e}\t{:.17e}",
            (lambda * T::lit(1e9)).as_f64(),
            density.as_f64()
        );
    }
    let path = path.as_ref();
    std::fs::write(path, out).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}
