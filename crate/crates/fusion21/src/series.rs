//! Truncated formal power series with integer or floating coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// What one unit of degree stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeriesVar {
    /// powers of x^2
    X2,
    /// powers of x^4
    X4,
    /// powers of y = w/z
    Y,
    /// powers of y^{1/2}
    YHalf,
}

impl fmt::Display for SeriesVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SeriesVar::X2 => "x^2",
            SeriesVar::X4 => "x^4",
            SeriesVar::Y => "y",
            SeriesVar::YHalf => "y^(1/2)",
        };
        f.write_str(s)
    }
}

pub trait Coeff:
    Copy + PartialEq + fmt::Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Multiplicative inverse when it exists in the coefficient ring.
    fn inverse(self) -> Option<Self>;
    fn to_f64(self) -> f64;
}

impl Coeff for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn inverse(self) -> Option<Self> {
        match self {
            1 => Some(1),
            -1 => Some(-1),
            _ => None,
        }
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn inverse(self) -> Option<Self> {
        if self != 0.0 {
            Some(1.0 / self)
        } else {
            None
        }
    }
    fn to_f64(self) -> f64 {
        self
    }
}

/// Coefficients of degrees `0..=cutoff` in one variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSeries<T> {
    pub var: SeriesVar,
    coeffs: Vec<T>,
}

pub type IntSeries = TruncatedSeries<i64>;
pub type FloatSeries = TruncatedSeries<f64>;

impl<T: Coeff> TruncatedSeries<T> {
    pub fn zero(var: SeriesVar, cutoff: usize) -> Self {
        TruncatedSeries { var, coeffs: vec![T::zero(); cutoff + 1] }
    }

    pub fn one(var: SeriesVar, cutoff: usize) -> Self {
        let mut s = Self::zero(var, cutoff);
        s.coeffs[0] = T::one();
        s
    }

    /// Build from coefficients, padding with zeros or truncating to `cutoff`.
    pub fn from_coeffs(var: SeriesVar, cutoff: usize, mut c: Vec<T>) -> Self {
        c.resize(cutoff + 1, T::zero());
        TruncatedSeries { var, coeffs: c }
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, d: usize) -> T {
        self.coeffs.get(d).copied().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn set(&mut self, d: usize, v: T) {
        if d < self.coeffs.len() {
            self.coeffs[d] = v;
        }
    }

    pub fn truncate(&self, cutoff: usize) -> Self {
        Self::from_coeffs(self.var, cutoff, self.coeffs.clone())
    }

    fn check_compat(&self, other: &Self) {
        assert_eq!(self.var, other.var, "series in different variables");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compat(other);
        let n = self.cutoff().min(other.cutoff());
        let c = (0..=n).map(|d| self.coeffs[d] + other.coeffs[d]).collect();
        Self::from_coeffs(self.var, n, c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_compat(other);
        let n = self.cutoff().min(other.cutoff());
        let c = (0..=n).map(|d| self.coeffs[d] - other.coeffs[d]).collect();
        Self::from_coeffs(self.var, n, c)
    }

    pub fn scale(&self, k: T) -> Self {
        let c = self.coeffs.iter().map(|&a| a * k).collect();
        Self::from_coeffs(self.var, self.cutoff(), c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compat(other);
        let n = self.cutoff().min(other.cutoff());
        let mut c = vec![T::zero(); n + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a == T::zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                c[i + j] = c[i + j] + a * b;
            }
        }
        Self::from_coeffs(self.var, n, c)
    }

    /// Division by a series whose constant term is a unit of the ring.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_compat(other);
        let inv0 = other.coeffs[0]
            .inverse()
            .ok_or_else(|| domain(format!("constant term {:?} is not a unit", other.coeffs[0])))?;
        let n = self.cutoff().min(other.cutoff());
        let mut q = vec![T::zero(); n + 1];
        for d in 0..=n {
            let mut acc = self.coeffs[d];
            for j in 1..=d {
                acc = acc - other.coeffs[j] * q[d - j];
            }
            q[d] = acc * inv0;
        }
        Ok(Self::from_coeffs(self.var, n, q))
    }

    /// Multiply by `(1 + sign * v^deg)`.
    pub fn mul_binomial(&mut self, deg: usize, sign: T) {
        if deg == 0 {
            for c in self.coeffs.iter_mut() {
                *c = *c + sign * *c;
            }
            return;
        }
        for d in (deg..self.coeffs.len()).rev() {
            self.coeffs[d] = self.coeffs[d] + sign * self.coeffs[d - deg];
        }
    }

    /// Multiply by `1/(1 - v^deg)` for `deg >= 1`.
    pub fn div_one_minus(&mut self, deg: usize) {
        assert!(deg >= 1);
        for d in deg..self.coeffs.len() {
            self.coeffs[d] = self.coeffs[d] + self.coeffs[d - deg];
        }
    }

    /// Multiply by `v^k`.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.cutoff();
        let mut c = vec![T::zero(); n + 1];
        if k <= n {
            c[k..].copy_from_slice(&self.coeffs[..=n - k]);
        }
        Self::from_coeffs(self.var, n, c)
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != T::zero())
    }

    pub fn to_float(&self) -> FloatSeries {
        let c = self.coeffs.iter().map(|c| c.to_f64()).collect();
        TruncatedSeries::from_coeffs(self.var, self.cutoff(), c)
    }

    /// Evaluate at a numeric value of the variable.
    pub fn eval(&self, v: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * v + c.to_f64())
    }
}

impl IntSeries {
    /// `prod_{n >= 0} (1 + sign * v^{a + n*step})`, the exact expansion of `(-+v^a; v^step)_inf`.
    pub fn pochhammer(var: SeriesVar, a: usize, step: usize, sign: i64, cutoff: usize) -> Self {
        let mut s = Self::one(var, cutoff);
        let mut m = a;
        while m <= cutoff {
            s.mul_binomial(m, sign);
            if step == 0 {
                break;
            }
            m += step;
        }
        s
    }

    /// `1/(v^a; v^step)_inf`.
    pub fn inv_pochhammer(var: SeriesVar, a: usize, step: usize, cutoff: usize) -> Self {
        assert!(a >= 1 && step >= 1);
        let mut s = Self::one(var, cutoff);
        let mut m = a;
        while m <= cutoff {
            s.div_one_minus(m);
            m += step;
        }
        s
    }
}

impl FloatSeries {
    /// `(a y; q)_inf` as a series in y, keeping factors until `|a q^n|` is negligible.
    pub fn qpoch_linear(var: SeriesVar, a: f64, q: f64, cutoff: usize, max_factors: usize) -> Self {
        let mut s = Self::one(var, cutoff);
        let mut c = a;
        for _ in 0..max_factors {
            if c.abs() < 1e-300 {
                break;
            }
            s.mul_binomial(1, -c);
            c *= q;
        }
        s
    }

    /// Largest coefficient-wise relative deviation, normalized per degree by
    /// the larger of the two magnitudes (and by `floor` for tiny coefficients).
    pub fn max_rel_diff(&self, other: &Self, floor: f64) -> f64 {
        let n = self.cutoff().min(other.cutoff());
        (0..=n)
            .map(|d| {
                let (a, b) = (self.coeffs[d], other.coeffs[d]);
                (a - b).abs() / a.abs().max(b.abs()).max(floor)
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_pentagonal() {
        // (q;q)_inf = 1 - q - q^2 + q^5 + q^7 - ...
        let s = IntSeries::pochhammer(SeriesVar::X2, 1, 1, -1, 12);
        assert_eq!(s.coeffs(), &[1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1]);
    }

    #[test]
    fn partitions() {
        let p = IntSeries::inv_pochhammer(SeriesVar::X2, 1, 1, 10);
        assert_eq!(p.coeffs(), &[1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
        let e = IntSeries::pochhammer(SeriesVar::X2, 1, 1, -1, 10);
        assert_eq!(p.mul(&e), IntSeries::one(SeriesVar::X2, 10));
        assert_eq!(IntSeries::one(SeriesVar::X2, 10).div(&e).unwrap(), p);
    }

    #[test]
    fn non_unit_division_rejected() {
        let two = IntSeries::from_coeffs(SeriesVar::X2, 3, vec![2]);
        assert!(IntSeries::one(SeriesVar::X2, 3).div(&two).is_err());
    }

    #[test]
    fn float_linear_poch() {
        // (y; 0)_inf = 1 - y
        let s = FloatSeries::qpoch_linear(SeriesVar::Y, 1.0, 0.0, 4, 60);
        assert_eq!(s.coeffs(), &[1.0, -1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn shift_and_eval() {
        let s = IntSeries::from_coeffs(SeriesVar::X4, 4, vec![1, 2]).shift(2);
        assert_eq!(s.coeffs(), &[0, 0, 1, 2, 0]);
        assert_eq!(s.valuation(), Some(2));
        assert!((s.eval(0.5) - (0.25 + 2.0 * 0.125)).abs() < 1e-15);
    }
}
