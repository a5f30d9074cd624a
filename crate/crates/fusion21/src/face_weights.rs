//! SOS and 2x2 fusion SOS Boltzmann weights.
//!
//! Heights are real: weights depend on them only through bracket arguments,
//! and admissibility is decided on height differences. Arguments are ordered
//! `(c, d, b, a)` = (NW, NE, SW, SE).

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::elliptic::sq;
use crate::error::{usage, Result};
use crate::numerics::{guard, Residual};
use crate::params::ModelParams;
use crate::vertex_weights::{inv_kappa22, kappa_bar, ModelTag, WeightTensor};

pub const HALF_STEPS: [i32; 2] = [1, -1];
pub const FUSED_STEPS: [i32; 3] = [2, 0, -2];

/// Integer step from `a` to `b` if the difference is (numerically) one.
pub fn step(a: f64, b: f64) -> Option<i32> {
    let d = b - a;
    let n = d.round();
    ((d - n).abs() < 1e-9).then_some(n as i32)
}

pub(crate) fn adjacent(a: f64, b: f64, steps: &[i32]) -> bool {
    step(a, b).is_some_and(|s| steps.contains(&s))
}

struct Br<'a> {
    p: &'a ModelParams,
    scale: f64,
}

impl<'a> Br<'a> {
    fn new(p: &'a ModelParams) -> Self {
        Br { p, scale: sq(p.r / 2.0, p).abs() }
    }
    fn n(&self, u: f64) -> f64 {
        sq(u, self.p)
    }
    fn d(&self, u: f64) -> Result<f64> {
        guard(&format!("[{u}]"), sq(u, self.p), self.scale)
    }
    fn bb(&self, u: f64, m: usize) -> f64 {
        (0..m).map(|i| self.n(u - i as f64) / self.n((m - i) as f64)).product()
    }
    fn bb_d(&self, u: f64, m: usize) -> Result<f64> {
        guard(&format!("[{u};{m}]"), self.bb(u, m), 1.0)
    }
}

/// `[u]_m / [m]_m` with `[u]_m = [u][u-1]...[u-m+1]`.
pub fn bracket_binom(u: f64, m: i32, p: &ModelParams) -> Result<f64> {
    if m < 0 {
        return Err(usage(format!("bracket binomial order must be >= 0, got {m}")));
    }
    let br = Br::new(p);
    let mut v = 1.0;
    for i in 0..m {
        v *= br.n(u - i as f64) / br.d((m - i) as f64)?;
    }
    Ok(v)
}

/// Spin-1/2 SOS weight including the `1/kappa` normalization.
pub fn w_sos(c: f64, d: f64, b: f64, a: f64, u: f64, p: &ModelParams) -> Result<f64> {
    if !(adjacent(a, b, &HALF_STEPS)
        && adjacent(a, d, &HALF_STEPS)
        && adjacent(b, c, &HALF_STEPS)
        && adjacent(d, c, &HALF_STEPS))
    {
        return Ok(0.0);
    }
    let br = Br::new(p);
    let k = a;
    let kap = kappa_bar(u, p);
    if step(b, d) == Some(0) {
        if step(a, c) != Some(0) {
            return Ok(1.0 / kap);
        }
        let s = (b - a).round();
        return Ok(br.n(1.0) * br.n(k + s * u) / (br.d(1.0 - u)? * br.d(k)?) / kap);
    }
    let s = (d - a).round();
    Ok(-br.n(u) * br.n(k + s) / (br.d(1.0 - u)? * br.d(k)?) / kap)
}

/// Unnormalized fused weight `W22bar`.
pub fn w22bar(c: f64, d: f64, b: f64, a: f64, u: f64, p: &ModelParams) -> Result<f64> {
    if !(adjacent(a, b, &FUSED_STEPS)
        && adjacent(a, d, &FUSED_STEPS)
        && adjacent(b, c, &FUSED_STEPS)
        && adjacent(d, c, &FUSED_STEPS))
    {
        return Ok(0.0);
    }
    let br = Br::new(p);
    let k = a;
    let off = |h: f64| step(a, h).expect("adjacency checked");
    let (oc, od, ob) = (off(c), off(d), off(b));
    let b_ = |v: f64| br.n(v);
    let bb = |v: f64, m: usize| br.bb(v, m);
    for pp in [1i32, -1] {
        let q = pp as f64;
        let (p2, p4) = (2 * pp, 4 * pp);
        let v = match (oc, od, ob) {
            t if t == (p4, p2, p2) => Some(bb(2.0 - u, 2)),
            t if t == (p2, p2, p2) => Some(b_(1.0 - u) * b_(k + q + q * u) / (br.d(1.0)? * br.d(k + q)?)),
            t if t == (p2, 0, 0) => Some(b_(1.0 - u) * b_(k + q - q * u) / (br.d(1.0)? * br.d(k + q)?)),
            t if t == (p2, p2, 0) => Some(b_(k + 3.0 * q) / br.d(k + q)? * bb(1.0 - u, 2)),
            t if t == (p2, 0, p2) => Some(b_(k - q) / br.d(k + q)? * bb(1.0 - u, 2)),
            t if t == (0, p2, p2) => Some(bb(q * k + u + 1.0, 2) / br.bb_d(q * k + 1.0, 2)?),
            t if t == (0, p2, -p2) => Some(bb(q * k + 2.0, 2) / br.bb_d(q * k, 2)? * bb(u + 1.0, 2)),
            t if t == (0, 0, p2) => Some(-b_(k - q) * b_(u) * b_(k + q * u) / (br.d(2.0)? * br.d(k)? * br.d(k + q)?)),
            t if t == (0, p2, 0) => Some(
                -b_(2.0) * b_(k + 2.0 * q) * b_(u) * b_(k + q * u)
                    / (br.d(1.0)?.powi(2) * br.d(k - 1.0)? * br.d(k + 1.0)?),
            ),
            _ => None,
        };
        if let Some(v) = v {
            return Ok(v);
        }
    }
    debug_assert_eq!((oc, od, ob), (0, 0, 0));
    Ok(b_(k - 1.0 + u) * b_(k - u) / (br.d(k)? * br.d(k - 1.0)?)
        + b_(k - 1.0) * b_(k + 2.0) / (br.d(k)? * br.d(k + 1.0)?) * bb(1.0 - u, 2))
}

/// Normalized fused weight `W22 = W22bar / (kappa22 [2-u; 2])`.
pub fn w22(c: f64, d: f64, b: f64, a: f64, u: f64, p: &ModelParams) -> Result<f64> {
    let wb = w22bar(c, d, b, a, u, p)?;
    if wb == 0.0 {
        return Ok(0.0);
    }
    let norm = Br::new(p).bb_d(2.0 - u, 2)?;
    Ok(wb * inv_kappa22(u, p) / norm)
}

/// `-W22` with r replaced by r - 2.
pub fn w22_dprime(c: f64, d: f64, b: f64, a: f64, u: f64, p: &ModelParams) -> Result<f64> {
    let ps = p.shifted_bracket()?;
    Ok(-w22(c, d, b, a, u, &ps)?)
}

/// Which face weight a helper should evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaceModel {
    Sos,
    W22,
    W22pp,
}

impl FaceModel {
    pub fn steps(&self) -> &'static [i32] {
        match self {
            FaceModel::Sos => &HALF_STEPS,
            _ => &FUSED_STEPS,
        }
    }

    pub fn eval(&self, c: f64, d: f64, b: f64, a: f64, u: f64, p: &ModelParams) -> Result<f64> {
        match self {
            FaceModel::Sos => w_sos(c, d, b, a, u, p),
            FaceModel::W22 => w22(c, d, b, a, u, p),
            FaceModel::W22pp => w22_dprime(c, d, b, a, u, p),
        }
    }

    fn tag(&self) -> ModelTag {
        match self {
            FaceModel::Sos => ModelTag::W,
            FaceModel::W22 => ModelTag::W22,
            FaceModel::W22pp => ModelTag::W22pp,
        }
    }
}

/// Memo table for face weights within one check run.
pub struct FaceCache<'a> {
    model: FaceModel,
    p: &'a ModelParams,
    table: HashMap<[u64; 5], f64>,
}

impl<'a> FaceCache<'a> {
    pub fn new(model: FaceModel, p: &'a ModelParams) -> Self {
        FaceCache { model, p, table: HashMap::new() }
    }

    pub fn get(&mut self, c: f64, d: f64, b: f64, a: f64, u: f64) -> Result<f64> {
        let key = [c.to_bits(), d.to_bits(), b.to_bits(), a.to_bits(), u.to_bits()];
        if let Some(&v) = self.table.get(&key) {
            return Ok(v);
        }
        let v = self.model.eval(c, d, b, a, u, self.p)?;
        self.table.insert(key, v);
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// Star-triangle residual around base height `k0`:
/// `sum_g W(e,g,c,b|u12) W(g,h,b,a|u13) W(e,f,g,h|u23)
///   = sum_g W(c,g,b,a|u23) W(e,f,c,g|u13) W(f,h,g,a|u12)`.
pub fn face_ybe(model: FaceModel, k0: f64, u1: f64, u2: f64, u3: f64, p: &ModelParams) -> Result<Residual> {
    face_ybe_with(model, k0, u1, u2, u3, p, |_, _, _, _, _, w| w)
}

/// Same as `face_ybe` with a hook that may alter each weight (used for
/// sensitivity tests).
pub fn face_ybe_with(
    model: FaceModel,
    k0: f64,
    u1: f64,
    u2: f64,
    u3: f64,
    p: &ModelParams,
    hook: impl Fn(f64, f64, f64, f64, f64, f64) -> f64,
) -> Result<Residual> {
    let steps = model.steps();
    let mut cache = FaceCache::new(model, p);
    let mut w =
        |c: f64, d: f64, b: f64, a: f64, u: f64| -> Result<f64> { Ok(hook(c, d, b, a, u, cache.get(c, d, b, a, u)?)) };
    let nb = |h: f64| steps.iter().map(move |&s| h + s as f64);
    let a = k0;
    let mut res = Residual::default();
    for b in nb(a) {
        for c in nb(b) {
            for e in nb(c) {
                for h in nb(a) {
                    for f in nb(h) {
                        if !adjacent(f, e, steps) {
                            continue;
                        }
                        let mut l = 0.0;
                        for g in nb(b) {
                            l += w(e, g, c, b, u1 - u2)? * w(g, h, b, a, u1 - u3)? * w(e, f, g, h, u2 - u3)?;
                        }
                        let mut r = 0.0;
                        for g in nb(a) {
                            r += w(c, g, b, a, u2 - u3)? * w(e, f, c, g, u1 - u3)? * w(f, h, g, a, u1 - u2)?;
                        }
                        res.push(l, r);
                    }
                }
            }
        }
    }
    Ok(res)
}

/// All admissible weights around SE height `a`, labels `(c-a, d-a, b-a)`.
pub fn face_tensor(model: FaceModel, a: f64, u: f64, p: &ModelParams) -> Result<WeightTensor> {
    let steps = model.steps();
    let side: Vec<i32> = steps.to_vec();
    let diag: Vec<i32> = if steps.len() == 2 { vec![2, 0, -2] } else { vec![4, 2, 0, -2, -4] };
    let mut t = WeightTensor::new(model.tag(), u, vec![diag.clone(), side.clone(), side.clone()]);
    t.base_height = Some(a);
    for &oc in &diag {
        for &od in &side {
            for &ob in &side {
                let (c, d, b) = (a + oc as f64, a + od as f64, a + ob as f64);
                if adjacent(b, c, steps) && adjacent(d, c, steps) {
                    t.set(&[oc, od, ob], model.eval(c, d, b, a, u, p)?);
                }
            }
        }
    }
    Ok(t)
}

/// CSV of the unnormalized fused table at SE height `k`.
pub fn w22bar_table_csv(k: f64, u: f64, p: &ModelParams) -> Result<String> {
    let mut s = String::from("c,d,b,a,u,w22bar\n");
    for oc in [4, 2, 0, -2, -4] {
        for od in FUSED_STEPS {
            for ob in FUSED_STEPS {
                let (c, d, b) = (k + oc as f64, k + od as f64, k + ob as f64);
                if adjacent(b, c, &FUSED_STEPS) && adjacent(d, c, &FUSED_STEPS) {
                    let v = w22bar(c, d, b, k, u, p)?;
                    let _ = writeln!(s, "{c},{d},{b},{k},{u},{v:.17e}");
                }
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(r: f64) -> ModelParams {
        ModelParams::from_epsilon(1.0, r).unwrap()
    }

    #[test]
    fn binomial_basics() {
        let pr = p(4.5);
        assert_eq!(bracket_binom(0.7, 0, &pr).unwrap(), 1.0);
        assert!((bracket_binom(2.0, 2, &pr).unwrap() - 1.0).abs() < 1e-14);
        assert!(bracket_binom(0.7, -1, &pr).is_err());
    }

    #[test]
    fn sos_initial_condition() {
        let pr = p(4.5);
        let k = 3.0;
        assert!((w_sos(k + 2.0, k + 1.0, k + 1.0, k, 0.0, &pr).unwrap() - 1.0).abs() < 1e-14);
        assert!((w_sos(k, k + 1.0, k + 1.0, k, 0.0, &pr).unwrap() - 1.0).abs() < 1e-14);
        assert!(w_sos(k, k + 1.0, k - 1.0, k, 0.0, &pr).unwrap().abs() < 1e-15);
        assert_eq!(w_sos(k, k + 1.0, k + 3.0, k, 0.3, &pr).unwrap(), 0.0);
    }

    #[test]
    fn w22_initial_condition() {
        let pr = p(7.5);
        let t = face_tensor(FaceModel::W22, 3.3, 0.0, &pr).unwrap();
        assert_eq!(t.structural_count(), 19);
        for (idx, v) in t.entries() {
            if !t.is_structural(&idx) {
                continue;
            }
            let want = if idx[1] == idx[2] { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-12, "{idx:?} {v}");
        }
    }

    #[test]
    fn dprime_is_minus_shifted() {
        let pr = p(7.5);
        let ps = pr.shifted().unwrap();
        let a = w22_dprime(3.3, 3.3, 5.3, 3.3, 0.2, &pr).unwrap();
        let b = w22(3.3, 3.3, 5.3, 3.3, 0.2, &ps).unwrap();
        assert_eq!(a + b, 0.0);
    }

    #[test]
    fn star_triangle_sos_and_fused() {
        let pr = p(7.5);
        let r = face_ybe(FaceModel::Sos, 3.2, 0.7, 0.3, 0.1, &pr).unwrap();
        assert!(r.value() < 1e-12, "{}", r.value());
        let r = face_ybe(FaceModel::W22, 3.3, 0.7, 0.3, 0.1, &pr).unwrap();
        assert!(r.value() < 1e-12, "{}", r.value());
    }

    #[test]
    fn table_csv_has_all_rows() {
        let csv = w22bar_table_csv(3.3, 0.4, &p(5.0)).unwrap();
        assert_eq!(csv.lines().count(), 20);
    }
}
