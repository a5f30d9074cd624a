//! Seeded sampling of every identity check and the suite runner.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::SuiteConfig;
use crate::elliptic::{sq, sq_pp};
use crate::error::{domain, Error, Result};
use crate::face_weights::{
    adjacent, face_ybe, face_ybe_with, w22, w22_dprime, w_sos, FaceModel, FUSED_STEPS, HALF_STEPS,
};
use crate::intertwiners::{
    l_op_explicit, l_op_sum, residue_limit, t_fused, t_star, t_star_dprime, tau, IntertwinerVector, LPattern,
};
use crate::numerics::{guard, Residual};
use crate::ope_algebra::{self, CommRel, PairTag};
use crate::params::ModelParams;
use crate::report::{CheckReport, Sample, SuiteReport};
use crate::spectra;
use crate::vertex_weights::{check_fusion_projector, r18v, r21v, r8v, s21v, ybe_residual, WeightTensor, ONE};

// ---------------------------------------------------------------------------
// sampling

/// Deterministic sampler. Each check family draws from its own stream so a
/// filtered run sees the same samples as a full one.
pub struct SampleGrid {
    rng: ChaCha8Rng,
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

impl SampleGrid {
    pub fn new(seed: u64, family: &str) -> Self {
        SampleGrid { rng: ChaCha8Rng::seed_from_u64(seed ^ fnv1a(family)) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    pub fn int(&mut self, lo: i64, hi_incl: i64) -> i64 {
        self.rng.gen_range(lo..=hi_incl)
    }

    /// A real height in (1, r) with every shift `k + j`, |j| <= 8, at least
    /// 0.05 away from the zeros `r Z` of the brackets.
    pub fn height(&mut self, r: f64) -> f64 {
        loop {
            let k = self.uniform(1.0, r);
            if generic_height(k, r) {
                return k;
            }
        }
    }

    /// `(u1, u2)` with `u2 in (0, 0.3)`, `u1 - u2 in (0.05, 0.45)`, both away
    /// from the pole of `t*` at 1/2.
    pub fn u_pair(&mut self) -> (f64, f64) {
        loop {
            let u2 = self.uniform(0.0, 0.3);
            let u1 = u2 + self.uniform(0.05, 0.45);
            if (u1 - 0.5).abs() > 0.05 && (u2 - 0.5).abs() > 0.05 {
                return (u1, u2);
            }
        }
    }

    pub fn u_triple(&mut self) -> (f64, f64, f64) {
        let u3 = self.uniform(0.0, 0.3);
        let u2 = u3 + self.uniform(0.05, 0.45);
        let u1 = u2 + self.uniform(0.05, 0.45);
        (u1, u2, u3)
    }

    /// Uniform in (-lim, lim) at least 0.05 from +-1/2.
    pub fn u_away_from_half(&mut self, lim: f64) -> f64 {
        loop {
            let u = self.uniform(-lim, lim);
            if (u.abs() - 0.5).abs() > 0.05 {
                return u;
            }
        }
    }
}

pub fn generic_height(k: f64, r: f64) -> bool {
    (-8..=8).all(|j| {
        let m = (k + j as f64).rem_euclid(r);
        m > 0.05 && m < r - 0.05
    })
}

fn at(p: &ModelParams) -> Sample {
    Sample::at(p)
}

fn indexed(mut rep: CheckReport, i: usize) -> CheckReport {
    rep.sample_index = i;
    rep
}

fn report(id: &str, sample: Sample, res: Result<f64>, tol: f64) -> CheckReport {
    match res {
        Ok(v) => CheckReport::new(id, 0, sample, v, tol),
        Err(e) => CheckReport::failed(id, 0, sample, tol, &e),
    }
}

// ---------------------------------------------------------------------------
// vertex-face correspondence

fn nb(h: f64, steps: &[i32]) -> impl Iterator<Item = f64> + '_ {
    steps.iter().map(move |&s| h + s as f64)
}

/// `sum R(u1-u2)[i1,i2,o1,o2] t(u1)^d_a[i1] t(u2)^c_d[i2]
///   = sum_b t(u1)^c_b[o1] t(u2)^b_a[o2] W(c,d,b,a|u1-u2)`,
/// with `t(u, upper, lower)`.
pub fn vertex_face_direct<T, W>(
    r: &WeightTensor,
    steps: &[i32],
    t: T,
    w: W,
    u1: f64,
    u2: f64,
    a: f64,
) -> Result<Residual>
where
    T: Fn(f64, f64, f64) -> Result<IntertwinerVector>,
    W: Fn(f64, f64, f64, f64, f64) -> Result<f64>,
{
    let labels = r.alphabet(0).to_vec();
    let mut res = Residual::default();
    for d in nb(a, steps) {
        for c in nb(d, steps) {
            let (ta, tb) = (t(u1, d, a)?, t(u2, c, d)?);
            let bs: Vec<f64> = nb(a, steps).filter(|&b| adjacent(b, c, steps)).collect();
            let mut right = Vec::new();
            for &b in &bs {
                right.push((t(u1, c, b)?, t(u2, b, a)?, w(c, d, b, a, u1 - u2)?));
            }
            for &o1 in &labels {
                for &o2 in &labels {
                    let mut l = 0.0;
                    for &i1 in &labels {
                        for &i2 in &labels {
                            l += r.get(&[i1, i2, o1, o2]) * ta.get(i1) * tb.get(i2);
                        }
                    }
                    let rr: f64 = right.iter().map(|(x, y, wv)| x.get(o1) * y.get(o2) * wv).sum();
                    res.push(l, rr);
                }
            }
        }
    }
    Ok(res)
}

/// `sum t*(u1)^b_c[o1] t*(u2)^a_b[o2] R(u1-u2)[i1,i2,o1,o2]
///   = sum_d W(c,d,b,a|u1-u2) t*(u1)^a_d[i1] t*(u2)^d_c[i2]`,
/// with `ts(u, lower, upper)`.
pub fn vertex_face_dual<T, W>(
    r: &WeightTensor,
    steps: &[i32],
    ts: T,
    w: W,
    u1: f64,
    u2: f64,
    a: f64,
) -> Result<Residual>
where
    T: Fn(f64, f64, f64) -> Result<IntertwinerVector>,
    W: Fn(f64, f64, f64, f64, f64) -> Result<f64>,
{
    let labels = r.alphabet(0).to_vec();
    let mut res = Residual::default();
    for b in nb(a, steps) {
        for c in nb(b, steps) {
            let (sa, sb) = (ts(u1, c, b)?, ts(u2, b, a)?);
            let ds: Vec<f64> = nb(a, steps).filter(|&d| adjacent(d, c, steps)).collect();
            let mut right = Vec::new();
            for &d in &ds {
                right.push((w(c, d, b, a, u1 - u2)?, ts(u1, d, a)?, ts(u2, c, d)?));
            }
            for &i1 in &labels {
                for &i2 in &labels {
                    let mut l = 0.0;
                    for &o1 in &labels {
                        for &o2 in &labels {
                            l += sa.get(o1) * sb.get(o2) * r.get(&[i1, i2, o1, o2]);
                        }
                    }
                    let rr: f64 = right.iter().map(|(wv, x, y)| wv * x.get(i1) * y.get(i2)).sum();
                    res.push(l, rr);
                }
            }
        }
    }
    Ok(res)
}

pub fn vertex_face_halfspin_residual(u1: f64, u2: f64, a: f64, p: &ModelParams) -> Result<Residual> {
    let r = r8v(u1 - u2, p)?;
    vertex_face_direct(&r, &HALF_STEPS, |u, k, kp| tau(u, k, kp, p), |c, d, b, a, u| w_sos(c, d, b, a, u, p), u1, u2, a)
}

pub fn vertex_face_fused_residual(u1: f64, u2: f64, a: f64, p: &ModelParams) -> Result<Residual> {
    let r = r21v(u1 - u2, p)?;
    vertex_face_direct(
        &r,
        &FUSED_STEPS,
        |u, k, kp| t_fused(u, k, kp, p),
        |c, d, b, a, u| w22(c, d, b, a, u, p),
        u1,
        u2,
        a,
    )
}

pub fn dual_vertex_face_residual(u1: f64, u2: f64, a: f64, p: &ModelParams) -> Result<Residual> {
    let r = r21v(u1 - u2, p)?;
    vertex_face_dual(
        &r,
        &FUSED_STEPS,
        |u, lo, up| t_star(u, lo, up, p),
        |c, d, b, a, u| w22(c, d, b, a, u, p),
        u1,
        u2,
        a,
    )
}

pub fn s_dual_vertex_face_residual(u1: f64, u2: f64, a: f64, p: &ModelParams) -> Result<Residual> {
    let s = s21v(u1 - u2, p)?;
    vertex_face_dual(
        &s,
        &FUSED_STEPS,
        |u, lo, up| t_star_dprime(u, lo, up, p),
        |c, d, b, a, u| w22_dprime(c, d, b, a, u, p),
        u1,
        u2,
        a,
    )
}

fn vf_report(id: &str, u1: f64, u2: f64, a: f64, p: &ModelParams, res: Result<Residual>) -> CheckReport {
    report(id, at(p).with_u(&[u1, u2]).with_heights(&[a]), res.map(|r| r.value()), p.rel_tol)
}

pub fn check_vertex_face_halfspin(u1: f64, u2: f64, a: f64, p: &ModelParams) -> CheckReport {
    vf_report("check_vertex_face_halfspin", u1, u2, a, p, vertex_face_halfspin_residual(u1, u2, a, p))
}

pub fn check_vertex_face_fused(u1: f64, u2: f64, a: f64, p: &ModelParams) -> CheckReport {
    vf_report("check_vertex_face_fused", u1, u2, a, p, vertex_face_fused_residual(u1, u2, a, p))
}

pub fn check_dual_vertex_face(u1: f64, u2: f64, a: f64, p: &ModelParams) -> CheckReport {
    vf_report("check_dual_vertex_face", u1, u2, a, p, dual_vertex_face_residual(u1, u2, a, p))
}

pub fn check_s_dual_vertex_face(u1: f64, u2: f64, a: f64, p: &ModelParams) -> CheckReport {
    vf_report("check_s_dual_vertex_face", u1, u2, a, p, s_dual_vertex_face_residual(u1, u2, a, p))
}

// ---------------------------------------------------------------------------
// Yang-Baxter

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YbeModel {
    R8,
    R21,
    W,
    W22,
}

impl YbeModel {
    pub fn id(&self) -> &'static str {
        match self {
            YbeModel::R8 => "check_ybe_R8",
            YbeModel::R21 => "check_ybe_R21",
            YbeModel::W => "check_ybe_W",
            YbeModel::W22 => "check_ybe_W22",
        }
    }
}

pub fn ybe_model_residual(model: YbeModel, u: (f64, f64, f64), k0: f64, p: &ModelParams) -> Result<Residual> {
    let (u1, u2, u3) = u;
    let vertex = |f: fn(f64, &ModelParams) -> Result<WeightTensor>| -> Result<Residual> {
        Ok(ybe_residual(&f(u1 - u2, p)?, &f(u1 - u3, p)?, &f(u2 - u3, p)?))
    };
    match model {
        YbeModel::R8 => vertex(r8v),
        YbeModel::R21 => vertex(r21v),
        YbeModel::W => face_ybe(FaceModel::Sos, k0, u1, u2, u3, p),
        YbeModel::W22 => face_ybe(FaceModel::W22, k0, u1, u2, u3, p),
    }
}

pub fn check_ybe(model: YbeModel, u: (f64, f64, f64), k0: f64, p: &ModelParams) -> CheckReport {
    let sample = at(p).with_u(&[u.0, u.1, u.2]);
    let sample = if matches!(model, YbeModel::W | YbeModel::W22) { sample.with_heights(&[k0]) } else { sample };
    report(model.id(), sample, ybe_model_residual(model, u, k0, p).map(|r| r.value()), p.rel_tol)
}

/// `R8(u12) R18(u13) R18(u23)` mixed relation; informational.
pub fn check_mixed_ybe(u: (f64, f64, f64), p: &ModelParams) -> CheckReport {
    let (u1, u2, u3) = u;
    let res = (|| Ok(ybe_residual(&r8v(u1 - u2, p)?, &r18v(u1 - u3, p)?, &r18v(u2 - u3, p)?).value()))();
    report("check_ybe_mixed", at(p).with_u(&[u1, u2, u3]), res, p.rel_tol).informational()
}

/// Residual of the star-triangle relation with one weight scaled by
/// `1 + delta`, as `|log10(residual / delta)|`; small means the check is
/// sensitive at the expected order.
pub fn perturbation_sensitivity(model: FaceModel, delta: f64, p: &ModelParams) -> Result<f64> {
    let k0 = 2.37;
    let (u1, u2, u3) = (0.61, 0.33, 0.12);
    let base = face_ybe(model, k0, u1, u2, u3, p)?.value();
    let target = (k0 + 2.0 * model.steps()[0] as f64, k0 + model.steps()[0] as f64, k0 + model.steps()[0] as f64);
    let pert = face_ybe_with(model, k0, u1, u2, u3, p, |c, d, b, _a, _u, w| {
        if (c - target.0).abs() < 1e-9 && (d - target.1).abs() < 1e-9 && (b - target.2).abs() < 1e-9 {
            w * (1.0 + delta)
        } else {
            w
        }
    })?
    .value();
    if base > delta * 1e-3 {
        return Err(domain(format!("unperturbed residual {base:e} too large to resolve delta")));
    }
    Ok((pert / delta).log10().abs())
}

// ---------------------------------------------------------------------------
// inversion and L-operator

/// Both contractions of `t*` with `t` against Kronecker deltas.
pub fn inversion_residual(u: f64, k: f64, p: &ModelParams) -> Result<f64> {
    let hs: Vec<f64> = nb(k, &FUSED_STEPS).collect();
    let mut diff = 0.0f64;
    for &kp in &hs {
        let ts = t_star(u, k, kp, p)?;
        for &kpp in &hs {
            let v = ts.dot(&t_fused(u, k, kpp, p)?);
            diff = diff.max((v - if kp == kpp { 1.0 } else { 0.0 }).abs());
        }
    }
    let pairs: Vec<(IntertwinerVector, IntertwinerVector)> =
        hs.iter().map(|&kp| Ok((t_fused(u, k, kp, p)?, t_star(u, k, kp, p)?))).collect::<Result<_>>()?;
    for j in ONE {
        for jp in ONE {
            let v: f64 = pairs.iter().map(|(t, s)| t.get(j) * s.get(jp)).sum();
            diff = diff.max((v - if j == jp { 1.0 } else { 0.0 }).abs());
        }
    }
    Ok(diff)
}

pub fn check_inversion(u: f64, k: f64, p: &ModelParams) -> CheckReport {
    report("check_inversion", at(p).with_u(&[u]).with_heights(&[k]), inversion_residual(u, k, p), p.rel_tol)
}

/// `L[[a0, a1'], [a0, a1] | u0] = delta(a1, a1')`.
pub fn lop_inversion_residual(u0: f64, a0: f64, p: &ModelParams) -> Result<f64> {
    let mut diff = 0.0f64;
    for a1 in nb(a0, &FUSED_STEPS) {
        for a1p in nb(a0, &FUSED_STEPS) {
            let v = l_op_sum(a0, a1p, a0, a1, u0, p)?;
            diff = diff.max((v - if a1 == a1p { 1.0 } else { 0.0 }).abs());
        }
    }
    Ok(diff)
}

pub fn check_lop_inversion(u0: f64, a0: f64, p: &ModelParams) -> CheckReport {
    report("check_lop_inversion", at(p).with_u(&[u0]).with_heights(&[a0]), lop_inversion_residual(u0, a0, p), p.rel_tol)
}

/// Height offsets `(k' - k, k'2 - k', k2 - k)` realizing each pattern.
pub fn pattern_offsets(pattern: LPattern, flip: bool) -> (f64, f64, f64) {
    let s = if flip { -2.0 } else { 2.0 };
    match pattern {
        LPattern::Parallel => (0.0, s, s),
        LPattern::Opposite => (2.0, s, -s),
        LPattern::UpperStep => (-2.0, s, 0.0),
        LPattern::LowerStep => (2.0, 0.0, s),
        LPattern::Flat => (4.0, 0.0, 0.0),
    }
}

/// Contraction vs closed form, normalized by the largest single product in
/// the contraction.
pub fn lop_cross_route_residual(kp: f64, kp2: f64, k: f64, k2: f64, u0: f64, p: &ModelParams) -> Result<f64> {
    let ts = t_star(-u0, k, k2, p)?;
    let t = t_fused(-u0, kp, kp2, p)?;
    let terms = ONE.iter().map(|&j| (ts.get(j) * t.get(j)).abs()).fold(0.0f64, f64::max);
    let a = l_op_sum(kp, kp2, k, k2, u0, p)?;
    let b = l_op_explicit(kp, kp2, k, k2, u0, p)?;
    let scale = a.abs().max(b.abs()).max(terms);
    Ok(if scale == 0.0 { 0.0 } else { (a - b).abs() / scale })
}

/// The three limits `[w + 1/2] L[[k', k''], [k, k-2] | w]` at `w = -1/2`
/// for `k'' in {k', k' +- 2}` agree. At `k' = k - 2` all three vanish and
/// the residual is their largest magnitude instead of the relative spread.
pub fn residue_degeneracy_residual(kp: f64, k: f64, p: &ModelParams) -> Result<(f64, [f64; 3])> {
    let v = [residue_limit(kp, kp - 2.0, k, p)?, residue_limit(kp, kp, k, p)?, residue_limit(kp, kp + 2.0, k, p)?];
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if (k - 2.0 - kp).abs() < 1e-9 {
        return Ok((scale, v));
    }
    let spread = v.iter().fold(f64::MIN, |m, x| m.max(*x)) - v.iter().fold(f64::MAX, |m, x| m.min(*x));
    Ok((if scale == 0.0 { 0.0 } else { spread / scale }, v))
}

pub fn check_residue_degeneracy(kp: f64, k: f64, p: &ModelParams, tol: f64) -> CheckReport {
    let sample = at(p).with_heights(&[kp, k]);
    match residue_degeneracy_residual(kp, k, p) {
        Ok((res, v)) => CheckReport::new("check_residue_degeneracy", 0, sample, res, tol)
            .with_notes(format!("limits {:.12e} {:.12e} {:.12e}", v[0], v[1], v[2])),
        Err(e) => CheckReport::failed("check_residue_degeneracy", 0, sample, tol, &e),
    }
}

// ---------------------------------------------------------------------------
// scalar theta identities

fn bracket_guard(v: f64, p: &ModelParams) -> Result<f64> {
    guard(&format!("[{v}]"), sq(v, p), sq(p.r / 2.0, p))
}

pub fn three_term_residual(s: i64, k: f64, p: &ModelParams) -> Result<f64> {
    let b = |v: f64| sq(v, p);
    let s = s as f64;
    let d1 = bracket_guard(k - 2.0 * s - 1.0, p)?;
    let d3 = bracket_guard(k - 2.0 * s - 3.0, p)?;
    let t1 = b(1.0) * b(s + 1.0) * b(k - s + 1.0) / d1;
    let t2 = b(2.0) * b(s + 2.0) * b(k - 2.0 * s - 2.0) * b(k - s) / (d1 * d3);
    let t3 = b(1.0) * b(s + 3.0) * b(k - s - 1.0) / d3;
    let scale = t1.abs().max(t2.abs()).max(t3.abs());
    Ok((t1 - t2 + t3).abs() / scale)
}

pub fn check_three_term_identity(s: i64, k: f64, p: &ModelParams) -> CheckReport {
    report(
        "check_three_term_identity",
        at(p).with_heights(&[k]).with_ints(&[s]),
        three_term_residual(s, k, p),
        p.rel_tol,
    )
}

pub fn addition_theorem_residual(u: f64, u0: f64, v1: f64, l: f64, p: &ModelParams) -> Result<f64> {
    let b = |v: f64| sq_pp(v, p);
    let ps = p.shifted_bracket()?;
    let g = |v: f64| guard(&format!("[{v}]''"), b(v), sq(ps.r / 2.0, &ps));
    let (a, c) = (v1 - u0, u0 - u);
    let t1 = b(l + 1.0) / g(1.0)? * b(a - 0.5) / g(a + 0.5)? * b(v1 - u + l - 1.0) / g(v1 - u - 1.0)?;
    let t2 = b(l) / g(1.0)? * b(c - 0.5) / g(c + 0.5)? * b(v1 - u + l) / g(v1 - u - 1.0)? * b(a - 1.5) / g(a + 0.5)?;
    let rhs = b(c + l + 0.5) / g(c + 0.5)? * b(a - 0.5 + l) / g(a + 0.5)?;
    let scale = t1.abs().max(t2.abs()).max(rhs.abs());
    Ok((t1 - t2 - rhs).abs() / scale)
}

pub fn check_addition_theorem(u: f64, u0: f64, v1: f64, l: f64, p: &ModelParams) -> CheckReport {
    report(
        "check_addition_theorem",
        at(p).with_u(&[u, u0, v1]).with_heights(&[l]),
        addition_theorem_residual(u, u0, v1, l, p),
        p.rel_tol,
    )
}

/// `c_s = (-1)^s [s+1][k-2s][k-s+1] / ([1][k][k+1])`.
pub fn tail_coefficient(s: i64, k: f64, p: &ModelParams) -> Result<f64> {
    let b = |v: f64| sq(v, p);
    let sf = s as f64;
    let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * b(sf + 1.0) * b(k - 2.0 * sf) * b(k - sf + 1.0)
        / (b(1.0) * bracket_guard(k, p)? * bracket_guard(k + 1.0, p)?))
}

/// Max over s of the normalized three-term recursion residual
/// `[1]c_s/([k'+2][k'+1]) + [2]c_{s+1}/([k'+1][k'-1]) + [1]c_{s+2}/([k'-1][k'-2])`,
/// `k' = k - 2s - 2`.
pub fn tail_recursion_residual(s_max: i64, k: f64, p: &ModelParams) -> Result<f64> {
    let b = |v: f64| sq(v, p);
    let mut worst = 0.0f64;
    for s in 0..=s_max {
        let kp = k - 2.0 * s as f64 - 2.0;
        let g = |v: f64| bracket_guard(v, p);
        let t1 = b(1.0) * tail_coefficient(s, k, p)? / (g(kp + 2.0)? * g(kp + 1.0)?);
        let t2 = b(2.0) * tail_coefficient(s + 1, k, p)? / (g(kp + 1.0)? * g(kp - 1.0)?);
        let t3 = b(1.0) * tail_coefficient(s + 2, k, p)? / (g(kp - 1.0)? * g(kp - 2.0)?);
        let scale = t1.abs().max(t2.abs()).max(t3.abs());
        worst = worst.max((t1 + t2 + t3).abs() / scale);
    }
    Ok(worst)
}

pub fn check_tail_coefficient_recursion(s_max: i64, k: f64, p: &ModelParams) -> CheckReport {
    let sample = at(p).with_heights(&[k]).with_ints(&[s_max]);
    let c0 = tail_coefficient(0, k, p).map(|c| (c - 1.0).abs()).unwrap_or(f64::INFINITY);
    report(
        "check_tail_coefficient_recursion",
        sample,
        tail_recursion_residual(s_max, k, p).map(|r| r.max(c0)),
        p.rel_tol,
    )
}

// ---------------------------------------------------------------------------
// low temperature

/// Fitted exponent of each exchange entry `R(u)[s1,s2,s2,s1]` in
/// `zeta = x^u` at fixed x, from two zeta values.
pub fn lowtemp_exponents(x: f64, r: f64, zeta: [f64; 2]) -> Result<Vec<((i32, i32), f64)>> {
    let p = ModelParams::from_x(x, r)?;
    let ts: Vec<WeightTensor> = zeta.iter().map(|z| r21v(z.ln() / x.ln(), &p)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for s1 in ONE {
        for s2 in ONE {
            let e: Vec<f64> = ts.iter().map(|t| t.get(&[s1, s2, s2, s1]).abs()).collect();
            out.push(((s1, s2), (e[0] / e[1]).ln() / (zeta[0] / zeta[1]).ln()));
        }
    }
    Ok(out)
}

/// Largest ratio `|non-exchange entry| / |exchange entry of its column|`.
pub fn lowtemp_leakage(x: f64, r: f64, zeta: f64) -> Result<f64> {
    let p = ModelParams::from_x(x, r)?;
    let t = r21v(zeta.ln() / x.ln(), &p)?;
    let mut worst = 0.0f64;
    for idx in t.indices() {
        let ex = t.get(&[idx[0], idx[1], idx[1], idx[0]]).abs();
        if idx[2] != idx[1] || idx[3] != idx[0] {
            worst = worst.max(t.get(&idx).abs() / ex);
        }
    }
    Ok(worst)
}

pub fn check_lowtemp_r21(r: f64, xs: [f64; 2], zeta: [f64; 2], tol: f64) -> CheckReport {
    let p = ModelParams::from_x(xs[1], r).unwrap_or_default();
    let sample = Sample::at(&p).with_u(&zeta);
    let run = || -> Result<(f64, String)> {
        let coarse = lowtemp_exponents(xs[0], r, zeta)?;
        let fine = lowtemp_exponents(xs[1], r, zeta)?;
        let mut worst = 0.0f64;
        let mut notes = Vec::new();
        for (((s1, s2), e_fine), (_, e_coarse)) in fine.iter().zip(&coarse) {
            let want = spectra::h_bond(*s1, *s2)? as f64;
            let err = (e_fine - want).abs() / want.max(1.0);
            worst = worst.max(err);
            notes.push(format!("({s1},{s2}):{e_coarse:.4}->{e_fine:.4}/{want}"));
        }
        let leak = [lowtemp_leakage(xs[0], r, zeta[0])?, lowtemp_leakage(xs[1], r, zeta[0])?];
        if !(leak[1] < leak[0]) {
            worst = f64::INFINITY;
        }
        notes.push(format!("off-exchange ratio {:.3e}->{:.3e}", leak[0], leak[1]));
        Ok((worst, notes.join(" ")))
    };
    match run() {
        Ok((res, notes)) => CheckReport::new("check_lowtemp_r21", 0, sample, res, tol).with_notes(notes),
        Err(e) => CheckReport::failed("check_lowtemp_r21", 0, sample, tol, &e),
    }
}

// ---------------------------------------------------------------------------
// runner

/// A family of checks sharing an id prefix and a sample stream.
struct Family {
    id: &'static str,
    run: fn(&SuiteConfig, &mut SampleGrid) -> Result<Vec<CheckReport>>,
}

fn grid_point(points: &[ModelParams], i: usize) -> ModelParams {
    points[i % points.len()]
}

fn fam_ybe(cfg: &SuiteConfig, g: &mut SampleGrid) -> Result<Vec<CheckReport>> {
    let pts = cfg.grid.points(cfg.rel_tol)?;
    let mut out = Vec::new();
    for model in [YbeModel::R8, YbeModel::R21, YbeModel::W, YbeModel::W22] {
        for i in 0..cfg.samples.ybe {
            let p = grid_point(&pts, i);
            let u = g.u_triple();
            let k0 = g.height(p.r);
            out.push(indexed(check_ybe(model, u, k0, &p), i));
        }
    }
    for i in 0..cfg.samples.ybe.min(10) {
        let p = grid_point(&pts, i);
        out.push(indexed(check_mixed_ybe(g.u_triple(), &p), i));
    }
    Ok(out)
}

fn fam_vertex_face(cfg: &SuiteConfig, g: &mut SampleGrid) -> Result<Vec<CheckReport>> {
    let pts = cfg.grid.points(cfg.rel_tol)?;
    type Check = fn(f64, f64, f64, &ModelParams) -> CheckReport;
    let checks: [Check; 4] =
        [check_vertex_face_halfspin, check_vertex_face_fused, check_dual_vertex_face, check_s_dual_vertex_face];
    let mut out = Vec::new();
    for check in checks {
        for i in 0..cfg.samples.vertex_face {
            let p = grid_point(&pts, i);
            let (u1, u2) = g.u_pair();
            let a = g.height(p.r);
            out.push(indexed(check(u1, u2, a, &p), i));
        }
    }
    Ok(out)
}

fn fam_inversion(cfg: &SuiteConfig, g: &mut SampleGrid) -> Result<Vec<CheckReport>> {
    let pts = cfg.grid.points(cfg.rel_tol)?;
    let mut out = Vec::new();
    for i in 0..cfg.samples.inversion {
        let p = grid_point(&pts, i);
        let u = g.u_away_from_half(1.0);
        let k = g.height(p.r);
        out.push(indexed(check_inversion(u, k, &p), i));
    }
    for i in 0..cfg.samples.l_operator {
        let p = grid_point(&pts, i);
        let u0 = g.u_away_from_half(1.4);
        let k = g.height(p.r);
        out.push(indexed(check_lop_inversion(u0, k, &p), i));
    }
    Ok(out)
}

fn fam_projector(cfg: &SuiteConfig, _: &mut SampleGrid) -> Result<Vec<CheckReport>> {
    let pts = cfg.grid.points(cfg.rel_tol)?;
    Ok((0..cfg.samples.projector_points)
        .map(|i| {
            let p = grid_point(&pts, i);
            let rep = check_fusion_projector(&p)
                .unwrap_or_else(|e| CheckReport::failed("check_fusion_projector", 0, at(&p), p.rel_tol, &e));
            indexed(rep, i)
        })
        .collect())
}

fn fam_lop(cfg: &SuiteConfig, g: &mut SampleGrid) -> Result<Vec<CheckReport>> {
    let pts = cfg.grid.points(cfg.rel_tol)?;
    let mut out = Vec::new();
    for i in 0..cfg.samples.l_operator {
        let p = grid_point(&pts, i);
        let pattern = LPattern::ALL[i % 5];
        let (dk, dup, dlo) = pattern_offsets(pattern, g.int(0, 1) == 1);
        let u0 = g.u_away_from_half(1.4);
        let k = g.height(p.r);
        let kp = k + dk;
        let sample = at(&p).with_u(&[u0]).with_heights(&[kp, kp + dup, k, k + dlo]);
        let res = lop_cross_route_residual(kp, kp + dup, k, k + dlo, u0, &p);
        out.push(indexed(
            report("check_lop_cross_route", sample, res, p.rel_tol).with_notes(format!("{pattern:?}")),
            i,
        ));
    }
    for i in 0..cfg.samples.residue {
        let p = grid_point(&pts, i);
        let k = g.height(p.r);
        let kp = k - 2.0 * g.int(1, 3) as f64;
        out.push(indexed(check_residue_degeneracy(kp, k, &p, cfg.tolerances.residue), i));
    }
    Ok(out)
}

fn fam_theta(cfg: &SuiteConfig, g: &mut SampleGrid) -> Result<Vec<CheckReport>> {
    let pts = cfg.grid.points(cfg.rel_tol)?;
    let mut out = Vec::new();
    for i in 0..cfg.samples.theta {
        let p = grid_point(&pts, i);
        let s = g.int(0, 4);
        let k = g.height(p.r);
        out.push(indexed(check_three_term_identity(s, k, &p), i));
    }
    for i in 0..cfg.samples.theta {
        let p = grid_point(&pts, i);
        let (u, u0, v1) = (g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0));
        let l = g.height(p.r);
        out.push(indexed(check_addition_theorem(u, u0, v1, l, &p), i));
    }
    for i in 0..cfg.samples.theta {
        let p = grid_point(&pts, i);
        let k = g.height(p.r);
        out.push(indexed(check_tail_coefficient_recursion(4, k, &p), i));
    }
    Ok(out)
}

fn fam_spectra(cfg: &SuiteConfig, _: &mut SampleGrid) -> Result<Vec<CheckReport>> {
    let p = cfg.params()?;
    let mut out = Vec::new();
    for i in 0..3u8 {
        let enumerated = spectra::vertex_partition_series(i, cfg.e_max)?;
        let product = spectra::character_product(i, cfg.e_max)?;
        let diff = (0..=cfg.e_max).filter(|&d| enumerated.coeff(d) != product.coeff(d)).count();
        out.push(indexed(
            CheckReport::new("check_characters", 0, at(&p).with_ints(&[i as i64, cfg.e_max as i64]), diff as f64, 0.5)
                .with_notes(format!("mismatched degrees: {diff}")),
            i as usize,
        ));
        let space = spectra::VertexPathSpace::new(i)?;
        let e = cfg.e_max.min(6);
        let bf = space.brute_force(e, 2 * e + 2);
        let dp = space.series(e);
        let diff = (0..=e).filter(|&d| bf.coeff(d) != dp.coeff(d)).count();
        out.push(indexed(
            CheckReport::new("check_dp_brute_force", 0, at(&p).with_ints(&[i as i64, e as i64]), diff as f64, 0.5),
            i as usize,
        ));
    }
    let mut idx = 0;
    for i in 0..3u8 {
        for dk in [-2i64, 0, 2] {
            let (l, k) = (3, 3 + i as i64 + dk);
            let rep = match spectra::compare_face_with_string(i, l, k, cfg.e_max.min(10)) {
                Ok(c) => CheckReport::new(
                    "check_face_string",
                    idx,
                    at(&p).with_ints(&[i as i64, l, k]),
                    if c.matches { 0.0 } else { 1.0 },
                    0.5,
                )
                .with_notes(format!(
                    "path offset {} string offset {} (j={})",
                    c.path_offset, c.string_offset, c.string_j
                )),
                Err(e) => CheckReport::failed("check_face_string", idx, at(&p), 0.5, &e),
            };
            out.push(rep);
            idx += 1;
        }
    }
    let pts = cfg.sum_rule_grid.points(cfg.rel_tol)?;
    for (j, q) in pts.iter().enumerate() {
        // l = 1 keeps [l]'' away from zero for every r
        let (i, l) = ((j % 3) as u8, 1);
        let rep = spectra::check_chi_sum_rule(i, l, cfg.k_max, q)
            .map(|mut r| {
                r.tolerance = cfg.tolerances.sum_rule;
                r.pass = r.residual < r.tolerance;
                r
            })
            .unwrap_or_else(|e| CheckReport::failed("check_chi_sum_rule", 0, at(q), cfg.tolerances.sum_rule, &e));
        out.push(indexed(rep, j));
    }
    for i in 0..3u8 {
        let (l, k) = (2, 2 + i as i64);
        let rep = spectra::boson_fermion_trace_check(i, l, k, cfg.n, &p)
            .unwrap_or_else(|e| CheckReport::failed("check_boson_fermion_trace", 0, at(&p), 0.5, &e));
        out.push(indexed(rep, i as usize));
    }
    Ok(out)
}

fn fam_ope(cfg: &SuiteConfig, g: &mut SampleGrid) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (j, pt) in cfg.ope_points.iter().enumerate() {
        let p = ModelParams::from_x(pt[0], pt[1])?.with_rel_tol(cfg.rel_tol);
        for pair in PairTag::ALL {
            let mut rep = ope_algebra::check_ope(pair, cfg.n, &p)?;
            rep.tolerance = cfg.tolerances.ope;
            rep.pass = rep.residual < rep.tolerance;
            out.push(indexed(rep, j));
        }
        let samples: Vec<(f64, f64)> =
            (0..cfg.samples.commutation).map(|_| (g.uniform(-0.9, 0.9), g.uniform(-0.9, 0.9))).collect();
        for rel in CommRel::ALL {
            for (i, rep) in ope_algebra::check_commutation_ratio(rel, &samples, &p).into_iter().enumerate() {
                out.push(indexed(rep, j * samples.len() + i));
            }
        }
        out.push(indexed(ope_algebra::check_f_sector(cfg.n, &p), j));
        out.push(indexed(ope_algebra::check_ramond_anticommutator(cfg.n as i64, &p), j));
        for rep in ope_algebra::check_ab_delta(cfg.n as i64, &p) {
            let i = rep.sample_index;
            out.push(indexed(rep, 2 * j + i));
        }
    }
    Ok(out)
}

fn fam_lowtemp(cfg: &SuiteConfig, _: &mut SampleGrid) -> Result<Vec<CheckReport>> {
    let lt = &cfg.lowtemp;
    Ok(vec![check_lowtemp_r21(lt.r, lt.x, lt.zeta, cfg.tolerances.lowtemp)])
}

fn fam_sensitivity(cfg: &SuiteConfig, _: &mut SampleGrid) -> Result<Vec<CheckReport>> {
    let p = cfg.params()?;
    Ok([FaceModel::Sos, FaceModel::W22]
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let res = perturbation_sensitivity(m, 1e-6, &p);
            indexed(report("check_perturbation_sensitivity", at(&p), res, 2.0).with_notes(format!("{m:?}")), i)
        })
        .collect())
}

const FAMILIES: &[Family] = &[
    Family { id: "check_ybe", run: fam_ybe },
    Family { id: "check_vertex_face", run: fam_vertex_face },
    Family { id: "check_inversion", run: fam_inversion },
    Family { id: "check_fusion_projector", run: fam_projector },
    Family { id: "check_lop", run: fam_lop },
    Family { id: "check_theta", run: fam_theta },
    Family { id: "check_spectra", run: fam_spectra },
    Family { id: "check_ope", run: fam_ope },
    Family { id: "check_lowtemp_r21", run: fam_lowtemp },
    Family { id: "check_perturbation_sensitivity", run: fam_sensitivity },
];

/// Check ids each family can emit, for filter pre-selection.
fn family_ids(id: &str) -> &'static [&'static str] {
    match id {
        "check_ybe" => &["check_ybe"],
        "check_vertex_face" => &[
            "check_vertex_face_halfspin",
            "check_vertex_face_fused",
            "check_dual_vertex_face",
            "check_s_dual_vertex_face",
        ],
        "check_inversion" => &["check_inversion", "check_lop_inversion"],
        "check_fusion_projector" => &["check_fusion_projector"],
        "check_lop" => &["check_lop_cross_route", "check_residue_degeneracy"],
        "check_theta" => &["check_three_term_identity", "check_addition_theorem", "check_tail_coefficient_recursion"],
        "check_spectra" => &[
            "check_characters",
            "check_dp_brute_force",
            "check_face_string",
            "check_chi_sum_rule",
            "check_boson_fermion_trace",
        ],
        "check_ope" => {
            &["check_ope", "check_commutation_ratio", "check_f_sector", "check_ramond_anticommutator", "check_ab_delta"]
        }
        "check_lowtemp_r21" => &["check_lowtemp_r21"],
        _ => &["check_perturbation_sensitivity"],
    }
}

fn family_selected(cfg: &SuiteConfig, fam: &Family) -> bool {
    let overlaps = |a: &str, b: &str| a.starts_with(b) || b.starts_with(a);
    let ids = family_ids(fam.id);
    let included = cfg.only.is_empty() || ids.iter().any(|id| cfg.only.iter().any(|o| overlaps(id, o)));
    let excluded = ids.iter().all(|id| cfg.exclude.iter().any(|e| id.starts_with(e.as_str())));
    included && !excluded
}

/// Run every selected check. Reports come back in canonical order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let mut checks = Vec::new();
    for fam in FAMILIES {
        if !family_selected(cfg, fam) {
            continue;
        }
        let mut g = SampleGrid::new(cfg.seed, fam.id);
        checks.extend((fam.run)(cfg, &mut g)?.into_iter().filter(|r| cfg.selects(&r.check_id)));
    }
    if checks.is_empty() && !cfg.only.is_empty() {
        return Err(Error::Config(format!("no check matches {:?}", cfg.only)));
    }
    Ok(SuiteReport::new(cfg.header(), checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> ModelParams {
        ModelParams::from_x(0.3, 4.5).unwrap()
    }

    #[test]
    fn halfspin_vertex_face() {
        let r = vertex_face_halfspin_residual(0.41, 0.13, 2.27, &p()).unwrap();
        assert!(r.value() < 1e-12, "{}", r.value());
        // u1 = u2 reduces to the permutation
        assert!(vertex_face_halfspin_residual(0.2, 0.2, 2.27, &p()).unwrap().value() < 1e-12);
    }

    #[test]
    fn scalar_identities() {
        let q = ModelParams::from_epsilon(1.0, 7.3).unwrap();
        assert!(three_term_residual(1, 6.0, &q).unwrap() < 1e-12);
        assert!(three_term_residual(3, 2.71, &p()).unwrap() < 1e-12);
        assert!(addition_theorem_residual(0.31, -0.22, 0.57, 2.3, &p()).unwrap() < 1e-12);
        assert!(tail_recursion_residual(4, 3.37, &p()).unwrap() < 1e-12);
        assert!((tail_coefficient(0, 3.37, &p()).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn inversions() {
        assert!(inversion_residual(0.27, 2.61, &p()).unwrap() < 1e-12);
        assert!(lop_inversion_residual(0.8, 2.61, &p()).unwrap() < 1e-12);
    }

    #[test]
    fn lop_patterns_cover_all() {
        for pat in LPattern::ALL {
            for flip in [false, true] {
                let (dk, du, dl) = pattern_offsets(pat, flip);
                let k = 2.3;
                assert_eq!(LPattern::classify(k + dk, k + dk + du, k, k + dl).unwrap(), pat);
                assert!(lop_cross_route_residual(k + dk, k + dk + du, k, k + dl, 0.33, &p()).unwrap() < 1e-11);
            }
        }
    }

    #[test]
    fn residue_limits_agree() {
        for kp in [-1.39, -3.39] {
            let (res, _) = residue_degeneracy_residual(kp, 2.61, &p()).unwrap();
            assert!(res < 1e-6, "{kp} {res}");
        }
        let (zero, _) = residue_degeneracy_residual(0.61, 2.61, &p()).unwrap();
        assert!(zero < 1e-6);
    }

    #[test]
    fn lowtemp_exponents_match_bond_energy() {
        let rep = check_lowtemp_r21(4.5, [1e-2, 1e-3], [0.5, 0.25], 0.05);
        assert!(rep.pass, "{} {}", rep.residual, rep.notes);
    }

    #[test]
    fn sensitivity() {
        for m in [FaceModel::Sos, FaceModel::W22] {
            let v = perturbation_sensitivity(m, 1e-6, &p()).unwrap();
            assert!(v < 2.0, "{m:?} {v}");
        }
    }

    #[test]
    fn sampling_is_seeded() {
        let mut a = SampleGrid::new(1, "x");
        let mut b = SampleGrid::new(1, "x");
        assert_eq!(a.u_triple(), b.u_triple());
        assert!(generic_height(a.height(4.0), 4.0));
        assert!(!generic_height(2.01, 4.0));
    }
}
