//! Third-order forward-mode differentiation.
//!
//! A [`Jet`] carries the truncated Taylor series `a₀ + a₁t + a₂t² + a₃t³` of a
//! quantity around an expansion point, so evaluating a formula on jets yields
//! its first three derivatives without finite-difference cancellation.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Real;

/// Arithmetic needed to evaluate a dispersion formula, implemented both for
/// plain scalars and for jets.
pub trait IndexArg<T: Real>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn constant(value: T) -> Self;
    fn sqrt(self) -> Self;
    fn value(self) -> T;

    fn powi(self, exponent: i32) -> Self {
        let mut acc = Self::constant(T::one());
        for _ in 0..exponent.unsigned_abs() {
            acc = acc * self;
        }
        if exponent < 0 {
            Self::constant(T::one()) / acc
        } else {
            acc
        }
    }
}

impl<T: Real> IndexArg<T> for T {
    fn constant(value: T) -> Self {
        value
    }
    fn sqrt(self) -> Self {
        num_traits::Float::sqrt(self)
    }
    fn value(self) -> T {
        self
    }
    fn powi(self, exponent: i32) -> Self {
        num_traits::Float::powi(self, exponent)
    }
}

/// Truncated Taylor series of order 3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<T> {
    pub coeffs: [T; 4],
}

impl<T: Real> Jet<T> {
    /// The independent variable expanded about `x0`.
    pub fn variable(x0: T) -> Self {
        Self {
            coeffs: [x0, T::one(), T::zero(), T::zero()],
        }
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> T {
        let fact = [1.0, 1.0, 2.0, 6.0][k];
        self.coeffs[k] * T::lit(fact)
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut c = self.coeffs;
        for (a, b) in c.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
        Self { coeffs: c }
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut c = self.coeffs;
        for (a, b) in c.iter_mut().zip(rhs.coeffs) {
            *a -= b;
        }
        Self { coeffs: c }
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            coeffs: self.coeffs.map(|a| -a),
        }
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.coeffs, rhs.coeffs);
        let mut c = [T::zero(); 4];
        for i in 0..4 {
            for j in 0..4 - i {
                c[i + j] += a[i] * b[j];
            }
        }
        Self { coeffs: c }
    }
}

impl<T: Real> Div for Jet<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let (a, b) = (self.coeffs, rhs.coeffs);
        let mut q = [T::zero(); 4];
        for k in 0..4 {
            let mut acc = a[k];
            for j in 1..=k {
                acc -= b[j] * q[k - j];
            }
            q[k] = acc / b[0];
        }
        Self { coeffs: q }
    }
}

impl<T: Real> IndexArg<T> for Jet<T> {
    fn constant(value: T) -> Self {
        Self {
            coeffs: [value, T::zero(), T::zero(), T::zero()],
        }
    }

    fn sqrt(self) -> Self {
        let a = self.coeffs;
        let mut s = [T::zero(); 4];
        s[0] = a[0].sqrt();
        let two = T::lit(2.0);
        for k in 1..4 {
            let mut acc = a[k];
            for j in 1..k {
                acc -= s[j] * s[k - j];
            }
            s[k] = acc / (two * s[0]);
        }
        Self { coeffs: s }
    }

    fn value(self) -> T {
        self.coeffs[0]
    }
}
