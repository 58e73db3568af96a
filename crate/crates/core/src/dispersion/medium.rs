use std::sync::Arc;

use super::jet::{IndexArg, Jet};
use super::sellmeier::{sellmeier_index, IndexModel, SellmeierSet};
use crate::error::{Error, Result};
use crate::scalar::{angular_frequency, wavelength, Real};

/// Propagation-constant expansion per unit length:
/// `β₁` in s/m, `β₂` in s²/m, `β₃` in s³/m.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TaylorCoefficients<T> {
    pub beta1: T,
    pub beta2: T,
    pub beta3: T,
}

impl<T: Real> TaylorCoefficients<T> {
    pub fn new(beta1: T, beta2: T, beta3: T) -> Self {
        Self { beta1, beta2, beta3 }
    }

    /// `β₁Ω + β₂Ω²/2 + β₃Ω³/6` per unit length.
    pub fn phase_per_length(&self, detuning: T) -> T {
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        let o2 = detuning * detuning;
        self.beta1 * detuning + self.beta2 * o2 / two + self.beta3 * o2 * detuning / six
    }
}

/// Which interferometer arm an element sits in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArmSign {
    /// Sample / probe arm, `+1`.
    Probe,
    /// Reference arm, `−1`.
    Reference,
}

impl ArmSign {
    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(ArmSign::Probe),
            -1 => Ok(ArmSign::Reference),
            other => Err(Error::Domain(format!("arm sign must be +1 or -1, got {other}"))),
        }
    }

    pub fn value(self) -> i32 {
        match self {
            ArmSign::Probe => 1,
            ArmSign::Reference => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            ArmSign::Probe => ArmSign::Reference,
            ArmSign::Reference => ArmSign::Probe,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MediumModel<T> {
    Vacuum,
    Taylor(TaylorCoefficients<T>),
    Sellmeier(Arc<SellmeierSet<T>>),
}

impl<T> MediumModel<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            MediumModel::Vacuum => "vacuum",
            MediumModel::Taylor(_) => "taylor",
            MediumModel::Sellmeier(_) => "sellmeier",
        }
    }
}

/// A dispersive element of given length traversed `passes` times.
#[derive(Clone, Debug, PartialEq)]
pub struct MediumSpec<T> {
    name: String,
    model: MediumModel<T>,
    length: T,
    passes: u8,
    arm: ArmSign,
}

impl<T: Real> MediumSpec<T> {
    pub fn new(
        name: impl Into<String>,
        model: MediumModel<T>,
        length: T,
        passes: u8,
        arm: ArmSign,
    ) -> Result<Self> {
        let name = name.into();
        if !(length >= T::zero()) || !length.is_finite() {
            return Err(Error::Domain(format!("medium '{name}': length must be >= 0, got {}", length)));
        }
        if !(passes == 1 || passes == 2) {
            return Err(Error::Domain(format!("medium '{name}': passes must be 1 or 2, got {passes}")));
        }
        Ok(Self {
            name,
            model,
            length,
            passes,
            arm,
        })
    }

    pub fn taylor(name: impl Into<String>, coefficients: TaylorCoefficients<T>, length: T, passes: u8, arm: ArmSign) -> Result<Self> {
        Self::new(name, MediumModel::Taylor(coefficients), length, passes, arm)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn model(&self) -> &MediumModel<T> {
        &self.model
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn passes(&self) -> u8 {
        self.passes
    }

    pub fn arm(&self) -> ArmSign {
        self.arm
    }

    /// Same element moved to the other arm.
    pub fn mirrored(&self) -> Self {
        Self {
            arm: self.arm.flipped(),
            ..self.clone()
        }
    }

    pub fn with_passes(&self, passes: u8) -> Result<Self> {
        Self::new(self.name.clone(), self.model.clone(), self.length, passes, self.arm)
    }

    /// `arm_sign · passes · length`
    fn scale(&self) -> T {
        T::lit(f64::from(self.arm.value()) * f64::from(self.passes)) * self.length
    }

    /// Spectral phase at detuning `Ω` about `center` (rad/s).
    pub fn phase(&self, center: T, detuning: T) -> Result<T> {
        match &self.model {
            MediumModel::Vacuum => Ok(self.scale() * (center + detuning) / T::c()),
            MediumModel::Taylor(_) => taylor_phase(self, detuning),
            MediumModel::Sellmeier(_) => phase_from_index(self, center + detuning),
        }
    }

    /// Group delay `arm · passes · L · β₁` at `center` (s).
    pub fn group_delay(&self, center: T) -> Result<T> {
        let beta1 = match &self.model {
            MediumModel::Vacuum => T::one() / T::c(),
            MediumModel::Taylor(t) => t.beta1,
            MediumModel::Sellmeier(set) => taylor_from_index(set.as_ref(), wavelength(center))?.beta1,
        };
        Ok(self.scale() * beta1)
    }
}

/// Taylor-model phase `arm·passes·L·(β₁Ω + β₂Ω²/2 + β₃Ω³/6)`; the constant
/// `β₀` term is dropped.
pub fn taylor_phase<T: Real>(spec: &MediumSpec<T>, detuning: T) -> Result<T> {
    match &spec.model {
        MediumModel::Taylor(t) => Ok(spec.scale() * t.phase_per_length(detuning)),
        other => Err(Error::ModelMismatch {
            medium: spec.name.clone(),
            expected: "taylor",
            found: other.kind(),
        }),
    }
}

/// Index-model phase `arm·passes·L·n(ω)·ω/c` at absolute angular frequency.
pub fn phase_from_index<T: Real>(spec: &MediumSpec<T>, omega: T) -> Result<T> {
    match &spec.model {
        MediumModel::Sellmeier(set) => {
            let n = sellmeier_index(set.as_ref(), wavelength(omega))?;
            Ok(spec.scale() * n * omega / T::c())
        }
        other => Err(Error::ModelMismatch {
            medium: spec.name.clone(),
            expected: "sellmeier",
            found: other.kind(),
        }),
    }
}

fn check_fd_window<T: Real, M: IndexModel<T>>(model: &M, center: T, reach: T) -> Result<()> {
    model.check_range(wavelength(center + reach))?;
    model.check_range(wavelength(center - reach))
}

/// Per-unit-length `β₁, β₂, β₃` of `k(ω) = n(ω)ω/c` at a center wavelength,
/// by third-order forward-mode differentiation through the index formula.
///
/// Requires `ω₀ ± 3·10⁻³ω₀` inside the model's validity range, the same
/// window the finite-difference route needs.
pub fn taylor_from_index<T: Real, M: IndexModel<T>>(model: &M, center_wavelength: T) -> Result<TaylorCoefficients<T>> {
    let center = angular_frequency(center_wavelength);
    check_fd_window(model, center, T::lit(3e-3) * center)?;
    // expand in x = ω/ω₀ to keep the jet coefficients O(1)
    let x = Jet::variable(T::one());
    let lambda_um = Jet::constant(center_wavelength * T::lit(1e6)) / x;
    let n = model.index_at_um(lambda_um);
    let k = n * x * Jet::constant(center / T::c());
    Ok(TaylorCoefficients {
        beta1: k.derivative(1) / center,
        beta2: k.derivative(2) / (center * center),
        beta3: k.derivative(3) / (center * center * center),
    })
}

/// Central finite differences of `k(ω)` with step `h = step_fraction·ω₀`,
/// refined by one Richardson extrapolation (`h` and `h/2`).
///
/// Limited by roundoff in `k ≈ 10⁷ rad/m`: at `step_fraction = 1e-3` the
/// `β₂` error is of order `10⁻⁴` relative in `f64`.
pub fn taylor_from_index_fd<T: Real, M: IndexModel<T>>(
    model: &M,
    center_wavelength: T,
    step_fraction: T,
) -> Result<TaylorCoefficients<T>> {
    let center = angular_frequency(center_wavelength);
    let h = step_fraction * center;
    check_fd_window(model, center, T::lit(3.0) * h)?;
    let k = |omega: T| -> T { model.index_at_um(wavelength(omega) * T::lit(1e6)) * omega / T::c() };
    let two = T::lit(2.0);
    let estimate = |h: T| -> [T; 3] {
        let (km2, km1, k0, kp1, kp2) = (
            k(center - two * h),
            k(center - h),
            k(center),
            k(center + h),
            k(center + two * h),
        );
        [
            (kp1 - km1) / (two * h),
            (kp1 - two * k0 + km1) / (h * h),
            (kp2 - two * kp1 + two * km1 - km2) / (two * h * h * h),
        ]
    };
    let coarse = estimate(h);
    let fine = estimate(h / two);
    let refine = |i: usize| (T::lit(4.0) * fine[i] - coarse[i]) / T::lit(3.0);
    Ok(TaylorCoefficients {
        beta1: refine(0),
        beta2: refine(1),
        beta3: refine(2),
    })
}

/// Ordered elements whose phases add with their arm signs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MediumStack<T> {
    elements: Vec<MediumSpec<T>>,
}

impl<T: Real> MediumStack<T> {
    pub fn new(elements: Vec<MediumSpec<T>>) -> Self {
        Self { elements }
    }

    pub fn empty() -> Self {
        Self { elements: Vec::new() }
    }

    pub fn push(&mut self, element: MediumSpec<T>) {
        self.elements.push(element);
    }

    pub fn with(mut self, element: MediumSpec<T>) -> Self {
        self.elements.push(element);
        self
    }

    pub fn elements(&self) -> &[MediumSpec<T>] {
        &self.elements
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Net group delay of the stack (s).
    pub fn group_delay(&self, center: T) -> Result<T> {
        self.elements
            .iter()
            .try_fold(T::zero(), |acc, e| Ok(acc + e.group_delay(center)?))
    }

    /// Distinct index data sets referenced by the stack.
    pub fn index_sets(&self) -> Vec<&SellmeierSet<T>> {
        let mut out: Vec<&SellmeierSet<T>> = Vec::new();
        for e in &self.elements {
            if let MediumModel::Sellmeier(set) = e.model() {
                if !out.iter().any(|s| s.identity() == set.identity()) {
                    out.push(set);
                }
            }
        }
        out
    }
}

/// Signed sum of the element phases at detuning `Ω` about `center`.
pub fn stack_phase<T: Real>(stack: &MediumStack<T>, center: T, detuning: T) -> Result<T> {
    stack
        .elements
        .iter()
        .try_fold(T::zero(), |acc, e| Ok(acc + e.phase(center, detuning)?))
}
