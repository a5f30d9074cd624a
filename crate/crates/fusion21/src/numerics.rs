//! Small numeric helpers shared by the weight modules and the checks.

use crate::error::{Error, Result};

/// Denominators smaller than this fraction of the natural scale are poles.
pub const POLE_THRESHOLD: f64 = 1e-13;

/// Return `den` unless it sits on a pole relative to `scale`.
pub fn guard(what: &str, den: f64, scale: f64) -> Result<f64> {
    if !den.is_finite() || den.abs() < POLE_THRESHOLD * scale.abs() {
        return Err(Error::Singular { what: what.to_string(), value: den.abs() });
    }
    Ok(den)
}

/// Two-point linear Richardson extrapolation of `f(delta)` to `delta = 0`.
pub fn richardson<F: FnMut(f64) -> Result<f64>>(mut f: F, d1: f64, d2: f64) -> Result<f64> {
    let f1 = f(d1)?;
    let f2 = f(d2)?;
    Ok((d1 * f2 - d2 * f1) / (d1 - d2))
}

/// Limit of `f` at `at` from symmetric samples `at +- d`, extrapolated in `d^2`.
/// Good for removable 0/0 points where one-sided samples carry a linear error.
pub fn symmetric_limit<F: FnMut(f64) -> Result<f64>>(mut f: F, at: f64, d1: f64, d2: f64) -> Result<f64> {
    let mut g = |d: f64| -> Result<f64> { Ok(0.5 * (f(at - d)? + f(at + d)?)) };
    let g1 = g(d1)?;
    let g2 = g(d2)?;
    let (s1, s2) = (d1 * d1, d2 * d2);
    Ok((s1 * g2 - s2 * g1) / (s1 - s2))
}

/// Max-norm residual normalized by the largest participating magnitude.
#[derive(Debug, Clone, Copy, Default)]
pub struct Residual {
    pub diff: f64,
    pub scale: f64,
}

impl Residual {
    pub fn push(&mut self, lhs: f64, rhs: f64) {
        self.diff = self.diff.max((lhs - rhs).abs());
        self.scale = self.scale.max(lhs.abs()).max(rhs.abs());
    }

    pub fn push_scale(&mut self, s: f64) {
        self.scale = self.scale.max(s.abs());
    }

    pub fn merge(&mut self, other: Residual) {
        self.diff = self.diff.max(other.diff);
        self.scale = self.scale.max(other.scale);
    }

    pub fn value(&self) -> f64 {
        if self.scale == 0.0 {
            if self.diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.diff / self.scale
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_removes_linear_term() {
        let v = richardson(|d| Ok(2.0 + 3.0 * d), 1e-3, 1e-4).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_limit_of_removable_point() {
        let v = symmetric_limit(|u| Ok((u - 1.0).sin() / (u - 1.0)), 1.0, 1e-3, 5e-4).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn guard_flags_small_denominator() {
        assert!(guard("x", 1e-20, 1.0).is_err());
        assert!(guard("x", f64::NAN, 1.0).is_err());
        assert_eq!(guard("x", 0.5, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn residual_normalizes() {
        let mut r = Residual::default();
        r.push(2.0, 2.0 + 1e-6);
        r.push(-4.0, -4.0);
        assert!((r.value() - 1e-6 / 4.0).abs() < 1e-15);
    }
}
