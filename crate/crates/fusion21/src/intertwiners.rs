//! Intertwining vectors of the vertex-face correspondence, their duals, and
//! the scalar L-operator in its contraction and closed forms.
//!
//! Orientation: `tau(u, k, k')` and `t_fused(u, k, k')` carry height `k` up
//! and `k'` down; `t_star(u, k, k')` carries `k` down and `k'` up.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::elliptic::{h, hh, sq};
use crate::error::{usage, Result};
use crate::face_weights::step;
use crate::numerics::{guard, richardson};
use crate::params::ModelParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntertwinerVector {
    pub labels: Vec<i32>,
    pub components: Vec<f64>,
    pub k: f64,
    pub k_prime: f64,
    pub u: f64,
    pub dual: bool,
}

impl IntertwinerVector {
    pub fn get(&self, label: i32) -> f64 {
        self.labels.iter().position(|&l| l == label).map_or(0.0, |i| self.components[i])
    }

    pub fn dot(&self, other: &IntertwinerVector) -> f64 {
        self.components.iter().zip(&other.components).map(|(a, b)| a * b).sum()
    }
}

fn h_scale(p: &ModelParams) -> f64 {
    h(2, 0.0, p).abs().max(h(3, 0.0, p).abs())
}

fn hd(j: u8, v: f64, p: &ModelParams) -> Result<f64> {
    guard(&format!("h_{j}({v})"), h(j, v, p), h_scale(p))
}

/// Spin-1/2 intertwining vector with components labelled (+1, -1).
pub fn tau(u: f64, k: f64, k_prime: f64, p: &ModelParams) -> Result<IntertwinerVector> {
    let s = match step(k, k_prime) {
        Some(s @ (1 | -1)) => s as f64,
        _ => return Err(usage(format!("tau needs |k - k'| = 1, got k={k}, k'={k_prime}"))),
    };
    let v = k - s * u;
    Ok(IntertwinerVector {
        labels: vec![1, -1],
        components: vec![hh(3, v, p) / SQRT_2, hh(4, v, p) / SQRT_2],
        k,
        k_prime,
        u,
        dual: false,
    })
}

fn fused_step(k: f64, k_prime: f64) -> Result<i32> {
    match step(k, k_prime) {
        Some(s @ (2 | 0 | -2)) => Ok(s),
        _ => Err(usage(format!("fused adjacency needs k' - k in {{-2,0,2}}, got k={k}, k'={k_prime}"))),
    }
}

/// Fused intertwining vector with components labelled (1, 0, -1).
pub fn t_fused(u: f64, k: f64, k_prime: f64, p: &ModelParams) -> Result<IntertwinerVector> {
    let st = fused_step(k, k_prime)?;
    let pre = 1.0 / (2.0 * hd(1, u + 0.5, p)?);
    let comps = if st != 0 {
        let q = (st / 2) as f64;
        let v = k - q * u;
        vec![
            pre * hh(3, v + 1.5 * q, p) * hh(3, v - 0.5 * q, p),
            pre * 2.0 * h(4, 1.0, p) * h(4, v + 0.5 * q, p),
            pre * hh(4, v + 1.5 * q, p) * hh(4, v - 0.5 * q, p),
        ]
    } else {
        vec![
            pre * hh(3, k - u - 0.5, p) * hh(3, k + u + 0.5, p),
            pre * 2.0 * h(4, k, p) * h(4, u + 0.5, p),
            pre * hh(4, k - u - 0.5, p) * hh(4, k + u + 0.5, p),
        ]
    };
    Ok(IntertwinerVector { labels: vec![1, 0, -1], components: comps, k, k_prime, u, dual: false })
}

/// Dual fused vector `t*(u)^{k'}_k`.
pub fn t_star(u: f64, k: f64, k_prime: f64, p: &ModelParams) -> Result<IntertwinerVector> {
    let st = fused_step(k, k_prime)?;
    let comps = if st != 0 {
        let q = (st / 2) as f64;
        let den = 2.0 * hd(1, u - 0.5, p)? * hd(1, k, p)? * hd(1, k + q, p)?;
        let v = k + q * u + 0.5 * q;
        let (a, b) = (hh(4, v, p), hh(3, v, p));
        vec![a * a / den, -a * b / den, b * b / den]
    } else {
        let (hm, hp) = (hd(1, k - 1.0, p)?, hd(1, k + 1.0, p)?);
        let den = 2.0 * hd(1, u - 0.5, p)? * hm * hd(1, k, p)? * hp;
        let side = |j: u8| {
            -(hh(j, k + u + 0.5, p) * hh(j, k - u + 1.5, p) * hm + hh(j, k - u - 0.5, p) * hh(j, k + u - 1.5, p) * hp)
                / den
        };
        let mid = h(4, u - 0.5, p) * (h(4, k + 1.0, p) * hm + h(4, k - 1.0, p) * hp) / den;
        vec![side(4), mid, side(3)]
    };
    Ok(IntertwinerVector { labels: vec![1, 0, -1], components: comps, k, k_prime, u, dual: true })
}

/// `t*` with r replaced by r - 2.
pub fn t_star_dprime(u: f64, l: f64, l_prime: f64, p: &ModelParams) -> Result<IntertwinerVector> {
    t_star(u, l, l_prime, &p.shifted_bracket()?)
}

/// `t_fused` with r replaced by r - 2.
pub fn t_fused_dprime(u: f64, l: f64, l_prime: f64, p: &ModelParams) -> Result<IntertwinerVector> {
    t_fused(u, l, l_prime, &p.shifted_bracket()?)
}

/// `L[[a0', a1'], [a0, a1] | u0] = sum_j t*_j(-u0)^{a1}_{a0} t^j(-u0)^{a0'}_{a1'}`.
pub fn l_op_sum(a0p: f64, a1p: f64, a0: f64, a1: f64, u0: f64, p: &ModelParams) -> Result<f64> {
    let ts = t_star(-u0, a0, a1, p)?;
    let t = t_fused(-u0, a0p, a1p, p)?;
    Ok(ts.dot(&t))
}

/// The five closed-form patterns of the L-operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LPattern {
    /// both heights step by the same nonzero amount
    Parallel,
    /// both step, in opposite directions
    Opposite,
    /// only the upper pair steps
    UpperStep,
    /// only the lower pair steps
    LowerStep,
    /// neither steps
    Flat,
}

impl LPattern {
    pub const ALL: [LPattern; 5] =
        [LPattern::Parallel, LPattern::Opposite, LPattern::UpperStep, LPattern::LowerStep, LPattern::Flat];

    pub fn classify(kp: f64, kp2: f64, k: f64, k2: f64) -> Result<LPattern> {
        let su = fused_step(kp, kp2)?;
        let sl = fused_step(k, k2)?;
        Ok(match (su, sl) {
            (0, 0) => LPattern::Flat,
            (_, 0) => LPattern::UpperStep,
            (0, _) => LPattern::LowerStep,
            (a, b) if a == b => LPattern::Parallel,
            _ => LPattern::Opposite,
        })
    }
}

/// Closed form `L[[k', k'2], [k, k2] | u0]`.
pub fn l_op_explicit(kp: f64, kp2: f64, k: f64, k2: f64, u0: f64, p: &ModelParams) -> Result<f64> {
    let scale = sq(p.r / 2.0, p).abs();
    let b = |v: f64| sq(v, p);
    let bd = |v: f64| guard(&format!("[{v}]"), sq(v, p), scale);
    let bb = |v: f64| b(v) * b(v - 1.0) / (b(2.0) * b(1.0));
    let bbd = |v: f64| guard(&format!("[{v};2]"), bb(v), scale * scale / (b(2.0) * b(1.0)).abs());
    let pole = |_: ()| -> Result<f64> { Ok(bd(u0 + 0.5)? * bd(u0 - 0.5)?) };
    let pattern = LPattern::classify(kp, kp2, k, k2)?;
    let v = match pattern {
        LPattern::Parallel => {
            let s = if step(k, k2) == Some(-2) { 1.0 } else { -1.0 };
            bb(s * (k + kp) / 2.0) * bb(u0 + s * (k - kp + s) / 2.0) / (bbd(s * k)? * bbd(u0 + 0.5)?)
        }
        LPattern::Opposite => {
            let s = if step(kp, kp2) == Some(2) { 1.0 } else { -1.0 };
            bb(s * (k - kp) / 2.0) * bb(u0 + s * (k + kp + s) / 2.0) / (bbd(s * k)? * bbd(u0 + 0.5)?)
        }
        LPattern::UpperStep => {
            let s = if step(kp, kp2) == Some(2) { 1.0 } else { -1.0 };
            b((k + kp) / 2.0) * b((k - kp) / 2.0) * b(u0 + s * (k + kp + s) / 2.0) * b(u0 + s * (kp - k + s) / 2.0)
                / (bd(k + 1.0)? * bd(k - 1.0)? * pole(())?)
                * b(2.0)
                / bd(1.0)?
        }
        LPattern::LowerStep => {
            let s = if step(k, k2) == Some(2) { 1.0 } else { -1.0 };
            b((k + kp) / 2.0) * b((k - kp) / 2.0) * b(u0 - s * (k + kp + s) / 2.0) * b(u0 - s * (k - kp + s) / 2.0)
                / (bd(k)? * bd(k + s)? * pole(())?)
        }
        LPattern::Flat => {
            let first = b((k + kp) / 2.0)
                * b((k + kp) / 2.0 - 1.0)
                * b(u0 + (k - kp - 1.0) / 2.0)
                * b(u0 - (k - kp - 1.0) / 2.0)
                / (bd(k)? * bd(k - 1.0)? * pole(())?);
            let second = b((k - kp) / 2.0)
                * b((k - kp) / 2.0 + 1.0)
                * b(u0 + (k + kp + 1.0) / 2.0)
                * b(u0 - (k + kp + 1.0) / 2.0)
                / (bd(k)? * bd(k + 1.0)? * pole(())?);
            first + second
        }
    };
    Ok(v)
}

/// Shifted L-operator `L''[[l'', l'], [l1, l] | w]`, `w = u0 - u`.
pub fn l_dprime(l_pp: f64, l_p: f64, l1: f64, l: f64, w: f64, p: &ModelParams) -> Result<f64> {
    l_op_explicit(l_pp, l_p, l1, l, w, &p.shifted_bracket()?)
}

/// The two displayed `L''` values in bracket'' form:
/// `(l-2, l; l, l)` and `(l-2, l; l+2, l)`.
pub fn l_dprime_display(l: f64, w: f64, upper_step: bool, p: &ModelParams) -> Result<f64> {
    let ps = p.shifted_bracket()?;
    let b = |v: f64| sq(v, &ps);
    let scale = b(ps.r / 2.0).abs();
    let bd = |v: f64| guard(&format!("[{v}]''"), b(v), scale);
    if !upper_step {
        Ok(b(2.0) * b(w + l - 0.5) / (bd(l + 1.0)? * bd(w + 0.5)?))
    } else {
        Ok(b(1.0) * b(2.0) * b(w + l - 0.5) * b(w + l + 0.5)
            / (bd(l + 1.0)? * bd(l + 2.0)? * bd(w - 0.5)? * bd(w + 0.5)?))
    }
}

/// `lim_{w -> -1/2} [w + 1/2] L[[k', k''], [k, k-2] | w]` by two-point
/// extrapolation from `w = -1/2 + delta`.
pub fn residue_limit(kp: f64, kpp: f64, k: f64, p: &ModelParams) -> Result<f64> {
    richardson(|d| Ok(sq(d, p) * l_op_explicit(kp, kpp, k, k - 2.0, -0.5 + d, p)?), 1e-4, 1e-5)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> ModelParams {
        ModelParams::from_epsilon(1.0, 7.5).unwrap()
    }

    #[test]
    fn tau_components() {
        let pr = p();
        let t = tau(0.3, 2.0, 3.0, &pr).unwrap();
        let want = crate::elliptic::h_func_series(3, 2.0 * pr.r, 2.0 - 0.3, &pr).unwrap() / SQRT_2;
        assert!((t.get(1) - want).abs() < 1e-12 * want.abs());
        assert!(tau(0.3, 2.0, 4.0, &pr).is_err());
    }

    #[test]
    fn inversion() {
        let pr = p();
        let (u, k) = (0.3, 3.25);
        for kp in [k - 2.0, k, k + 2.0] {
            for kpp in [k - 2.0, k, k + 2.0] {
                let v = t_star(u, k, kp, &pr).unwrap().dot(&t_fused(u, k, kpp, &pr).unwrap());
                let want = if kp == kpp { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-12, "{kp} {kpp} {v}");
            }
        }
    }

    #[test]
    fn sum_and_closed_forms_agree() {
        let pr = p();
        let (u0, k) = (0.23, 3.3);
        for kp in [k - 2.0, k, k + 2.0, k + 4.0] {
            for d1 in [-2.0, 0.0, 2.0] {
                for d0 in [-2.0, 0.0, 2.0] {
                    let a = l_op_sum(kp, kp + d1, k, k + d0, u0, &pr).unwrap();
                    let e = l_op_explicit(kp, kp + d1, k, k + d0, u0, &pr).unwrap();
                    assert!((a - e).abs() < 1e-11 * (1.0 + e.abs()), "{kp} {d1} {d0}: {a} {e}");
                }
            }
        }
    }

    #[test]
    fn l_dprime_displays() {
        let pr = p();
        let (l, w) = (3.4, 0.17);
        let a = l_dprime(l - 2.0, l, l, l, w, &pr).unwrap();
        let b = l_dprime_display(l, w, false, &pr).unwrap();
        assert!((a - b).abs() < 1e-12 * b.abs());
        let a = l_dprime(l - 2.0, l, l + 2.0, l, w, &pr).unwrap();
        let b = l_dprime_display(l, w, true, &pr).unwrap();
        assert!((a - b).abs() < 1e-12 * b.abs());
    }
}
