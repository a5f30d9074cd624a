//! Theta functions, bracket symbols and q-Pochhammer products.
//!
//! Two independent routes are kept for the theta functions: a product route
//! built on the Jacobi triple product, used on all real evaluation paths, and a
//! complex characteristic-series route used as a cross-check.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, usage, Result};
use crate::params::ModelParams;

/// Terms below this fraction of the running sum are dropped.
const SERIES_REL_CUT: f64 = 1e-18;
const MAX_SERIES_TERMS: usize = 100_000;

/// Characteristic theta series
/// `sum_m exp(pi i (m+a) [ (m+a) tau + 2 (u+b) ])`.
pub fn theta_char(a: f64, b: f64, u: Complex64, tau: Complex64, params: &ModelParams) -> Result<Complex64> {
    if !(tau.im > 0.0) {
        return Err(domain(format!("theta nome needs Im(tau) > 0, got {tau}")));
    }
    let cut = SERIES_REL_CUT.min(params.rel_tol / 100.0);
    let i_pi = Complex64::new(0.0, PI);
    let term = |m: i64| -> Complex64 {
        let ma = m as f64 + a;
        (i_pi * ma * (tau * ma + (u + b) * 2.0)).exp()
    };
    // start at the peak of the Gaussian envelope
    let centre = (-u.im / tau.im - a).round() as i64;
    let mut sum = term(centre);
    let mut max_term = sum.norm();
    for n in 1..MAX_SERIES_TERMS as i64 {
        let t1 = term(centre + n);
        let t2 = term(centre - n);
        sum += t1 + t2;
        let biggest = t1.norm().max(t2.norm());
        max_term = max_term.max(biggest);
        if biggest <= cut * sum.norm() || biggest <= 1e-30 * max_term {
            return Ok(sum);
        }
    }
    Err(domain("theta series failed to converge"))
}

/// Jacobi theta functions with characteristics (1/2,-1/2), (1/2,0), (0,0), (0,1/2).
pub fn jtheta(j: u8, u: Complex64, tau: Complex64, params: &ModelParams) -> Result<Complex64> {
    let (a, b) = match j {
        1 => (0.5, -0.5),
        2 => (0.5, 0.0),
        3 => (0.0, 0.0),
        4 => (0.0, 0.5),
        _ => return Err(usage(format!("theta index must be 1..4, got {j}"))),
    };
    theta_char(a, b, u, tau, params)
}

/// `(z; q)_inf` truncated at `cutoff` factors.
pub fn qpoch(z: f64, q: f64, cutoff: usize) -> f64 {
    let mut p = 1.0;
    let mut t = z;
    for _ in 0..cutoff {
        if t.abs() < 1e-18 {
            break;
        }
        p *= 1.0 - t;
        t *= q;
    }
    p
}

fn qpoch_c(z: Complex64, q: f64, cutoff: usize) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    let mut t = z;
    for _ in 0..cutoff {
        if t.norm() < 1e-18 {
            break;
        }
        p *= 1.0 - t;
        t *= q;
    }
    p
}

fn check_base(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(domain(format!("product base must lie in (0,1), got {q}")));
    }
    Ok(())
}

/// Multi-base product `(z; q_1, ..., q_m)_inf = prod (1 - z q_1^{i_1} ... q_m^{i_m})`.
pub fn qpoch_multi(z: Complex64, qs: &[f64], params: &ModelParams) -> Result<Complex64> {
    for &q in qs {
        check_base(q)?;
    }
    fn rec(z: Complex64, qs: &[f64], cutoff: usize) -> Complex64 {
        match qs.split_first() {
            None => 1.0 - z,
            Some((&q, rest)) => {
                let mut p = Complex64::new(1.0, 0.0);
                let mut t = z;
                for _ in 0..cutoff {
                    if t.norm() < 1e-18 {
                        break;
                    }
                    p *= rec(t, rest, cutoff);
                    t *= q;
                }
                p
            }
        }
    }
    if qs.is_empty() {
        return Ok(1.0 - z);
    }
    Ok(rec(z, qs, params.product_cutoff))
}

/// Real two-base product used by the vertex normalizations.
pub(crate) fn qpoch2(z: f64, q1: f64, q2: f64, cutoff: usize) -> f64 {
    let mut p = 1.0;
    let mut t1 = z;
    for _ in 0..cutoff {
        if t1.abs() < 1e-18 {
            break;
        }
        p *= qpoch(t1, q2, cutoff);
        t1 *= q1;
    }
    p
}

/// `Theta_q(z) = (z;q)(q/z;q)(q;q)` by the product route.
pub fn triple_product(z: Complex64, q: f64, params: &ModelParams) -> Result<Complex64> {
    check_base(q)?;
    let n = params.product_cutoff;
    Ok(qpoch_c(z, q, n) * qpoch_c(q / z, q, n) * qpoch(q, q, n))
}

/// `Theta_q(z) = sum_m q^{m(m-1)/2} (-z)^m` by the bilateral-sum route.
pub fn triple_product_sum(z: Complex64, q: f64, params: &ModelParams) -> Result<Complex64> {
    check_base(q)?;
    if z.norm() == 0.0 {
        return Err(domain("bilateral sum undefined at z = 0"));
    }
    let cut = SERIES_REL_CUT.min(params.rel_tol / 100.0);
    let lq = q.ln();
    let term = |m: i64| -> Complex64 {
        let mf = m as f64;
        let mag = (mf * (mf - 1.0) / 2.0 * lq).exp();
        (-z).powi(m as i32) * mag
    };
    // envelope peaks near m = 1/2 - ln|z|/ln q
    let centre = (0.5 - z.norm().ln() / lq).round() as i64;
    let mut sum = term(centre);
    let mut max_term = sum.norm();
    for n in 1..MAX_SERIES_TERMS as i64 {
        let t1 = term(centre + n);
        let t2 = term(centre - n);
        sum += t1 + t2;
        let biggest = t1.norm().max(t2.norm());
        max_term = max_term.max(biggest);
        if biggest <= cut * sum.norm() || biggest <= 1e-30 * max_term {
            return Ok(sum);
        }
    }
    Err(domain("bilateral theta sum failed to converge"))
}

/// Real triple product on the evaluation path.
pub(crate) fn theta_q(z: f64, q: f64, cutoff: usize) -> f64 {
    qpoch(z, q, cutoff) * qpoch(q / z, q, cutoff) * qpoch(q, q, cutoff)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BracketShape {
    /// `[u]`
    Square,
    /// `{u}`
    Curly,
    /// `[[u]]`
    DSquare,
    /// `{{u}}`
    DCurly,
}

/// Bracket shape together with the modulus shift: `r_shift` 0, 1, 2 selects
/// r, r' = r-1, r'' = r-2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BracketKind {
    pub shape: BracketShape,
    r_shift: u8,
}

impl BracketKind {
    pub fn new(shape: BracketShape, r_shift: u8) -> Result<Self> {
        if r_shift > 2 {
            return Err(usage(format!("r_shift must be 0, 1 or 2, got {r_shift}")));
        }
        Ok(BracketKind { shape, r_shift })
    }

    pub fn square() -> Self {
        BracketKind { shape: BracketShape::Square, r_shift: 0 }
    }

    pub fn r_shift(&self) -> u8 {
        self.r_shift
    }
}

/// Bracket of the given shape with modulus `t`.
pub fn bracket_t(u: f64, shape: BracketShape, t: f64, params: &ModelParams) -> f64 {
    let x = params.x;
    let q = x.powf(2.0 * t);
    let n = params.product_cutoff;
    match shape {
        BracketShape::Square => x.powf(u * u / t - u) * theta_q(x.powf(2.0 * u), q, n),
        BracketShape::Curly => x.powf(u * u / t - u) * theta_q(-x.powf(2.0 * u), q, n),
        BracketShape::DSquare => x.powf(u * u / t) * theta_q(x.powf(2.0 * u + t), q, n),
        BracketShape::DCurly => x.powf(u * u / t) * theta_q(-x.powf(2.0 * u + t), q, n),
    }
}

pub fn bracket(u: f64, kind: BracketKind, params: &ModelParams) -> f64 {
    bracket_t(u, kind.shape, params.r - kind.r_shift as f64, params)
}

/// `[u]` with modulus r.
pub fn sq(u: f64, params: &ModelParams) -> f64 {
    bracket_t(u, BracketShape::Square, params.r, params)
}

/// `[u]''` with modulus r - 2.
pub fn sq_pp(u: f64, params: &ModelParams) -> f64 {
    bracket_t(u, BracketShape::Square, params.r2(), params)
}

fn check_h_args(j: u8, t: f64) -> Result<()> {
    if !(1..=4).contains(&j) {
        return Err(usage(format!("h index must be 1..4, got {j}")));
    }
    if !(t > 0.0) {
        return Err(domain(format!("h modulus t must be positive, got {t}")));
    }
    Ok(())
}

/// `h_j^{(t)}(u)` by the product route.
pub fn h_func(j: u8, t: f64, u: f64, params: &ModelParams) -> Result<f64> {
    check_h_args(j, t)?;
    Ok(h_product(j, t, u, params))
}

pub(crate) fn h_product(j: u8, t: f64, u: f64, params: &ModelParams) -> f64 {
    let eps = params.epsilon;
    let pre = (eps * t / PI).sqrt();
    let damp = (-eps * t / 4.0).exp();
    match j {
        1 => pre * damp * bracket_t(u, BracketShape::Square, t, params),
        2 => pre * bracket_t(u, BracketShape::DSquare, t, params),
        3 => pre * bracket_t(u, BracketShape::DCurly, t, params),
        _ => pre * damp * bracket_t(u, BracketShape::Curly, t, params),
    }
}

/// `h_j^{(t)}(u) = theta_j(u/t; pi i/(eps t))` by the series route.
pub fn h_func_series(j: u8, t: f64, u: f64, params: &ModelParams) -> Result<f64> {
    check_h_args(j, t)?;
    let tau = Complex64::new(0.0, PI / (params.epsilon * t));
    Ok(jtheta(j, Complex64::new(u / t, 0.0), tau, params)?.re)
}

/// Shorthand for `h_j^{(2r)}`, the theta functions of argument `v/2r`.
pub(crate) fn hh(j: u8, v: f64, params: &ModelParams) -> f64 {
    h_product(j, 2.0 * params.r, v, params)
}

/// Shorthand for `h_j^{(r)}`.
pub(crate) fn h(j: u8, v: f64, params: &ModelParams) -> f64 {
    h_product(j, params.r, v, params)
}
