//! Free-field OPE prefactors from mode data, compared against the tabulated
//! product formulas; fermion contractions and the Ramond anticommutator.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::elliptic::{qpoch, sq, sq_pp};
use crate::error::{usage, Error, Result};
use crate::params::ModelParams;
use crate::report::{CheckReport, Sample};
use crate::series::{FloatSeries, SeriesVar};

// ---------------------------------------------------------------------------
// exact rational functions of r

fn trim(mut p: Vec<i64>) -> Vec<i64> {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
    if p.is_empty() {
        p.push(0);
    }
    p
}

fn pmul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut c = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    trim(c)
}

fn padd(a: &[i64], b: &[i64]) -> Vec<i64> {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| a.get(i).unwrap_or(&0) + b.get(i).unwrap_or(&0)).collect())
}

/// Ratio of integer polynomials in r, compared by cross-multiplication.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatR {
    pub num: Vec<i64>,
    pub den: Vec<i64>,
}

impl RatR {
    pub fn new(num: &[i64], den: &[i64]) -> Self {
        RatR { num: trim(num.to_vec()), den: trim(den.to_vec()) }
    }

    pub fn int(n: i64) -> Self {
        RatR::new(&[n], &[1])
    }

    pub fn poly(p: &[i64]) -> Self {
        RatR::new(p, &[1])
    }

    pub fn add(&self, o: &RatR) -> RatR {
        RatR::new(&padd(&pmul(&self.num, &o.den), &pmul(&o.num, &self.den)), &pmul(&self.den, &o.den))
    }

    pub fn scale(&self, k: i64) -> RatR {
        RatR::new(&self.num.iter().map(|c| c * k).collect::<Vec<_>>(), &self.den)
    }

    pub fn same(&self, o: &RatR) -> bool {
        pmul(&self.num, &o.den) == pmul(&o.num, &self.den)
    }

    pub fn eval(&self, r: f64) -> f64 {
        let ev = |p: &[i64]| p.iter().rev().fold(0.0, |acc, &c| acc * r + c as f64);
        ev(&self.num) / ev(&self.den)
    }
}

fn fmt_poly(p: &[i64]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in p.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let t = match i {
            0 => format!("{c}"),
            1 => format!("{c}r"),
            _ => format!("{c}r^{i}"),
        };
        terms.push(t);
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+").replace("+-", "-")
    }
}

impl fmt::Display for RatR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == vec![1] {
            write!(f, "{}", fmt_poly(&self.num))
        } else {
            write!(f, "({})/({})", fmt_poly(&self.num), fmt_poly(&self.den))
        }
    }
}

fn r_over(a: &[i64], b: &[i64]) -> RatR {
    RatR::new(a, b)
}

const R: [i64; 2] = [0, 1];
const R2: [i64; 2] = [-2, 1];

// ---------------------------------------------------------------------------
// mode data

/// `[a]_x = (x^a - x^{-a}) / (x - x^{-1})`.
pub fn xnum(a: f64, x: f64) -> f64 {
    (x.powf(a) - x.powf(-a)) / (x - 1.0 / x)
}

/// `[a m]_x / [b m]_x` in a form that stays finite for large m.
fn xratio(a: f64, b: f64, x: f64) -> f64 {
    x.powf(b - a) * (1.0 - x.powf(2.0 * a)) / (1.0 - x.powf(2.0 * b))
}

/// `[beta_m, beta_{-m}] = m [r'' m]_x / [r m]_x`.
pub fn boson_commutator(m: i64, p: &ModelParams) -> Result<f64> {
    if m == 0 {
        return Err(usage("boson modes are indexed by nonzero m"));
    }
    let mf = m as f64;
    Ok(mf * xnum(p.r2() * mf, p.x) / xnum(p.r * mf, p.x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpTag {
    Phi1,
    A,
    Ahat,
    Psi1,
    B,
    Bhat,
    Wop,
}

/// Shape of the boson coefficient `lambda(m)` up to sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LambdaKind {
    Unit,
    /// `[r m]_x / [r'' m]_x`
    RatioR,
    /// `[2 m]_x / [r'' m]_x`
    Ratio2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeProfile {
    pub tag: OpTag,
    pub lambda_sign: i32,
    pub lambda_kind: LambdaKind,
    /// power of the operator's own variable in front
    pub c0: RatR,
    /// zero-mode shift `e^{a alpha + b beta}`
    pub charge: (i32, i32),
    /// exponent `z^{p K + q L}`
    pub k_coeff: RatR,
    pub l_coeff: RatR,
    /// carries `(sqrt(-1))^{K-L}`
    pub phase: bool,
    pub fermion: bool,
}

impl ModeProfile {
    pub fn of(tag: OpTag) -> ModeProfile {
        let half = RatR::new(&[1], &[2]);
        let mhalf = RatR::new(&[-1], &[2]);
        let rpp_2r = r_over(&R2, &[0, 2]);
        let r_2rpp = r_over(&R, &[-4, 2]);
        let (sign, kind, c0, charge, kc, lc, phase, fermion) = match tag {
            OpTag::Phi1 => (-1, LambdaKind::Unit, rpp_2r.clone(), (1, 0), rpp_2r, mhalf, true, false),
            OpTag::A | OpTag::Ahat => {
                (1, LambdaKind::Unit, rpp_2r.clone(), (-1, 0), rpp_2r.scale(-1), half, false, tag == OpTag::A)
            }
            OpTag::Psi1 => (1, LambdaKind::RatioR, r_2rpp.clone(), (0, 1), mhalf, r_2rpp, true, false),
            OpTag::B | OpTag::Bhat => {
                (-1, LambdaKind::RatioR, r_2rpp.clone(), (0, -1), half, r_2rpp.scale(-1), false, tag == OpTag::B)
            }
            OpTag::Wop => (
                -1,
                LambdaKind::Ratio2,
                r_over(&[2], &pmul(&R, &R2)),
                (-1, -1),
                r_over(&[1], &R),
                r_over(&[-1], &R2),
                false,
                false,
            ),
        };
        ModeProfile { tag, lambda_sign: sign, lambda_kind: kind, c0, charge, k_coeff: kc, l_coeff: lc, phase, fermion }
    }

    /// `lambda(m)`, even in m.
    pub fn lambda(&self, m: i64, p: &ModelParams) -> f64 {
        let mf = (m as f64).abs();
        let v = match self.lambda_kind {
            LambdaKind::Unit => 1.0,
            LambdaKind::RatioR => xratio(p.r * mf, p.r2() * mf, p.x),
            LambdaKind::Ratio2 => xratio(2.0 * mf, p.r2() * mf, p.x),
        };
        self.lambda_sign as f64 * v
    }
}

// ---------------------------------------------------------------------------
// pairs and printed formulas

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairTag {
    Phi1Phi1,
    Phi1A,
    APhi1,
    AhatAhat,
    AA,
    Psi1Psi1,
    Psi1B,
    BPsi1,
    BhatBhat,
    BB,
    Phi1Psi1,
    Phi1B,
    Psi1A,
    AB,
    BA,
    WPhi1,
    WA,
    WPsi1,
    WB,
}

impl PairTag {
    pub const ALL: [PairTag; 19] = [
        PairTag::Phi1Phi1,
        PairTag::Phi1A,
        PairTag::APhi1,
        PairTag::AhatAhat,
        PairTag::AA,
        PairTag::Psi1Psi1,
        PairTag::Psi1B,
        PairTag::BPsi1,
        PairTag::BhatBhat,
        PairTag::BB,
        PairTag::Phi1Psi1,
        PairTag::Phi1B,
        PairTag::Psi1A,
        PairTag::AB,
        PairTag::BA,
        PairTag::WPhi1,
        PairTag::WA,
        PairTag::WPsi1,
        PairTag::WB,
    ];

    pub fn ops(&self) -> (OpTag, OpTag) {
        use OpTag::*;
        match self {
            PairTag::Phi1Phi1 => (Phi1, Phi1),
            PairTag::Phi1A => (Phi1, A),
            PairTag::APhi1 => (A, Phi1),
            PairTag::AhatAhat => (Ahat, Ahat),
            PairTag::AA => (A, A),
            PairTag::Psi1Psi1 => (Psi1, Psi1),
            PairTag::Psi1B => (Psi1, B),
            PairTag::BPsi1 => (B, Psi1),
            PairTag::BhatBhat => (Bhat, Bhat),
            PairTag::BB => (B, B),
            PairTag::Phi1Psi1 => (Phi1, Psi1),
            PairTag::Phi1B => (Phi1, B),
            PairTag::Psi1A => (Psi1, A),
            PairTag::AB => (A, B),
            PairTag::BA => (B, A),
            PairTag::WPhi1 => (Wop, Phi1),
            PairTag::WA => (Wop, A),
            PairTag::WPsi1 => (Wop, Psi1),
            PairTag::WB => (Wop, B),
        }
    }

    pub fn name(&self) -> String {
        format!("{self:?}")
    }
}

impl FromStr for PairTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PairTag::ALL
            .iter()
            .copied()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| usage(format!("unknown OPE pair '{s}'")))
    }
}

/// Base of a product factor: `x^{2r}`, `x^{2r''}` or 0 (a single factor).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Nome {
    R,
    R2,
    Zero,
}

impl Nome {
    fn value(&self, p: &ModelParams) -> f64 {
        match self {
            Nome::R => p.x.powf(2.0 * p.r),
            Nome::R2 => p.x.powf(2.0 * p.r2()),
            Nome::Zero => 0.0,
        }
    }
}

/// `prod (x^{e_i} y; q_i)^{s_i}` with exponents exact in r.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductForm {
    pub factors: Vec<(RatR, Nome, i32)>,
}

impl ProductForm {
    fn ratio(num: RatR, den: RatR, nome: Nome) -> Self {
        ProductForm { factors: vec![(num, nome, 1), (den, nome, -1)] }
    }

    fn single(power: i32) -> Self {
        ProductForm { factors: vec![(RatR::int(0), Nome::Zero, power)] }
    }

    /// Expansion in y through degree n.
    pub fn series(&self, n: usize, p: &ModelParams) -> Result<FloatSeries> {
        let mut s = FloatSeries::one(SeriesVar::Y, n);
        for (e, nome, pw) in &self.factors {
            let f = FloatSeries::qpoch_linear(SeriesVar::Y, p.x.powf(e.eval(p.r)), nome.value(p), n, p.product_cutoff);
            for _ in 0..pw.unsigned_abs() {
                s = if *pw > 0 { s.mul(&f) } else { s.div(&f)? };
            }
        }
        Ok(s)
    }

    /// Coefficients of `log` of the product, degrees 1..=n (index 0 unused).
    pub fn log_coeffs(&self, n: usize, p: &ModelParams) -> Vec<f64> {
        let mut out = vec![0.0; n + 1];
        for (e, nome, pw) in &self.factors {
            let a = p.x.powf(e.eval(p.r));
            let q = nome.value(p);
            for (m, o) in out.iter_mut().enumerate().skip(1) {
                *o -= *pw as f64 * a.powi(m as i32) / (m as f64 * (1.0 - q.powi(m as i32)));
            }
        }
        out
    }

    /// Value at a real y of any size.
    pub fn value(&self, y: f64, p: &ModelParams) -> f64 {
        self.factors
            .iter()
            .map(|(e, nome, pw)| {
                let a = p.x.powf(e.eval(p.r)) * y;
                let v = if *nome == Nome::Zero { 1.0 - a } else { qpoch(a, nome.value(p), p.product_cutoff) };
                v.powi(*pw)
            })
            .product()
    }
}

/// A printed OPE: `sign * (first variable)^exponent * product`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrintedOpe {
    pub sign: i32,
    pub exponent: RatR,
    pub product: ProductForm,
}

pub fn printed_ope(pair: PairTag) -> PrintedOpe {
    let rr = r_over(&R2, &R); // r''/r
    let rinv = r_over(&R, &R2); // r/r''
    let two_rp = RatR::poly(&[-2, 2]);
    let phi = ProductForm::ratio(RatR::int(2), two_rp.clone(), Nome::R);
    let phi_inv = ProductForm::ratio(two_rp.clone(), RatR::int(2), Nome::R);
    let psi = ProductForm::ratio(RatR::int(-2), two_rp.clone(), Nome::R2);
    let psi_inv = ProductForm::ratio(two_rp, RatR::int(-2), Nome::R2);
    let (sign, exponent, product) = match pair {
        PairTag::Phi1Phi1 | PairTag::AhatAhat | PairTag::AA => (1, rr, phi),
        PairTag::Phi1A => (-1, rr.scale(-1), phi_inv),
        PairTag::APhi1 => (1, rr.scale(-1), phi_inv),
        PairTag::Psi1Psi1 | PairTag::BhatBhat | PairTag::BB => (1, rinv, psi),
        PairTag::Psi1B => (-1, rinv.scale(-1), psi_inv),
        PairTag::BPsi1 => (1, rinv.scale(-1), psi_inv),
        PairTag::Phi1Psi1 => (-1, RatR::int(-1), ProductForm::single(-1)),
        PairTag::Phi1B => (1, RatR::int(1), ProductForm::single(1)),
        PairTag::Psi1A => (-1, RatR::int(1), ProductForm::single(1)),
        PairTag::AB | PairTag::BA => (1, RatR::int(-1), ProductForm::single(-1)),
        PairTag::WPhi1 => (1, r_over(&[2], &R), ProductForm::ratio(RatR::poly(&[-2, 1]), RatR::poly(&[2, 1]), Nome::R)),
        PairTag::WA => (1, r_over(&[-2], &R), ProductForm::ratio(RatR::poly(&[2, 1]), RatR::poly(&[-2, 1]), Nome::R)),
        PairTag::WPsi1 => (1, r_over(&[-2], &R2), ProductForm::ratio(RatR::poly(&R), RatR::poly(&[-4, 1]), Nome::R2)),
        PairTag::WB => (1, r_over(&[2], &R2), ProductForm::ratio(RatR::poly(&[-4, 1]), RatR::poly(&R), Nome::R2)),
    };
    PrintedOpe { sign, exponent, product }
}

// ---------------------------------------------------------------------------
// derived contractions

/// Prefactor of `a(z) b(w) = sign * z^exponent * exp(sum_m log[m] y^m) :a b:`
/// with `y = w/z`. `series` is the expanded exponential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionSeries {
    pub exponent: RatR,
    pub sign: i32,
    pub log: Vec<f64>,
    pub series: FloatSeries,
}

/// Zero-mode exponent `2 (p_a q_alpha(b) + q_a q_beta(b))` and the phase sign.
pub fn zero_mode(a: &ModeProfile, b: &ModeProfile) -> (RatR, i32) {
    let e = a.k_coeff.scale(2 * b.charge.0 as i64).add(&a.l_coeff.scale(2 * b.charge.1 as i64));
    let sign = if a.phase && (b.charge.0 - b.charge.1).rem_euclid(2) == 1 { -1 } else { 1 };
    (e, sign)
}

/// Bosonic contraction `exp(-sum_m lambda_a lambda_b C(m)/m^2 y^m)` by the mode sum.
pub fn contraction_series(a: &ModeProfile, b: &ModeProfile, n: usize, p: &ModelParams) -> Result<ContractionSeries> {
    if n == 0 {
        return Err(usage("series order must be >= 1"));
    }
    let mut g = vec![0.0; n + 1];
    for (m, gm) in g.iter_mut().enumerate().skip(1) {
        let mi = m as i64;
        let c = boson_commutator(mi, p)?;
        *gm = -a.lambda(mi, p) * b.lambda(mi, p) * c / (m * m) as f64;
    }
    let (exponent, sign) = zero_mode(a, b);
    Ok(ContractionSeries { exponent, sign, series: exp_series(&g, n), log: g })
}

/// `exp` of a series without constant term: `d f_d = sum_k k g_k f_{d-k}`.
/// Loses relative accuracy in high coefficients when the `g_k` grow.
pub fn exp_series(g: &[f64], n: usize) -> FloatSeries {
    let mut f = vec![0.0; n + 1];
    f[0] = 1.0;
    for d in 1..=n {
        f[d] = (1..=d).map(|k| k as f64 * g.get(k).copied().unwrap_or(0.0) * f[d - k]).sum::<f64>() / d as f64;
    }
    FloatSeries::from_coeffs(SeriesVar::Y, n, f)
}

/// Closed product form of the same contraction.
pub fn closed_form(a: &ModeProfile, b: &ModeProfile) -> Result<ProductForm> {
    use LambdaKind::*;
    let s = a.lambda_sign * b.lambda_sign;
    // lambda_a lambda_b [r'' m]/[r m] = s [alpha m]/[beta m] or s
    let (alpha, beta, nome) = match (a.lambda_kind, b.lambda_kind) {
        (Unit, Unit) => (RatR::poly(&R2), RatR::poly(&R), Nome::R),
        (Unit, RatioR) | (RatioR, Unit) => return Ok(ProductForm::single(s)),
        (Unit, Ratio2) | (Ratio2, Unit) => (RatR::int(2), RatR::poly(&R), Nome::R),
        (RatioR, RatioR) => (RatR::poly(&R), RatR::poly(&R2), Nome::R2),
        (RatioR, Ratio2) | (Ratio2, RatioR) => (RatR::int(2), RatR::poly(&R2), Nome::R2),
        (Ratio2, Ratio2) => return Err(usage("W W contraction has no single product form")),
    };
    let lo = beta.add(&alpha.scale(-1));
    let hi = beta.add(&alpha);
    let mut pf = ProductForm::ratio(lo, hi, nome);
    if s < 0 {
        pf.factors.iter_mut().for_each(|f| f.2 = -f.2);
    }
    Ok(pf)
}

/// Compare one pair against its printed formula through order n: exponents
/// exactly, logarithms of the prefactor coefficient-wise, and the expanded
/// closed form against the expanded printed product.
pub fn check_ope(pair: PairTag, n: usize, p: &ModelParams) -> Result<CheckReport> {
    let (ta, tb) = pair.ops();
    let (a, b) = (ModeProfile::of(ta), ModeProfile::of(tb));
    let derived = contraction_series(&a, &b, n, p)?;
    let printed = printed_ope(pair);
    let want_log = printed.product.log_coeffs(n, p);
    let log_resid = (1..=n)
        .map(|m| {
            let (d, w) = (derived.log[m], want_log[m]);
            (d - w).abs() / d.abs().max(w.abs()).max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);
    let want = printed.product.series(n, p)?;
    let closed = closed_form(&a, &b)?.series(n, p)?;
    let scale = want.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let ser_resid = (0..=n).map(|d| (closed.coeff(d) - want.coeff(d)).abs()).fold(0.0, f64::max) / scale;
    let exp_ok = derived.exponent.same(&printed.exponent);
    let resid = if exp_ok { log_resid.max(ser_resid) } else { f64::INFINITY };
    let notes = format!(
        "exponent derived {} printed {} ({}); sign derived {} printed {}{}",
        derived.exponent,
        printed.exponent,
        if exp_ok { "match" } else { "MISMATCH" },
        derived.sign,
        printed.sign,
        if derived.sign == printed.sign { "" } else { " (differs, informational)" }
    );
    Ok(CheckReport::new(&format!("check_ope_{}", pair.name()), 0, Sample::at(p).with_ints(&[n as i64]), resid, 1e-9)
        .with_notes(notes))
}

/// `(degree, derived log, printed log, closed-form series, printed series)`.
pub type OpeRow = (usize, f64, f64, f64, f64);

pub fn ope_table(pair: PairTag, n: usize, p: &ModelParams) -> Result<Vec<OpeRow>> {
    let (ta, tb) = pair.ops();
    let (a, b) = (ModeProfile::of(ta), ModeProfile::of(tb));
    let derived = contraction_series(&a, &b, n, p)?;
    let printed = printed_ope(pair).product;
    let pl = printed.log_coeffs(n, p);
    let ps = printed.series(n, p)?;
    let cs = closed_form(&a, &b)?.series(n, p)?;
    Ok((0..=n).map(|d| (d, derived.log[d], pl[d], cs.coeff(d), ps.coeff(d))).collect())
}

/// Printed commutation relations `a(u_a) b(u_b) = ratio * b(u_b) a(u_a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CommRel {
    Phi1Phi1,
    APhi1,
    AA,
    Psi1Psi1,
    BPsi1,
    BB,
    Phi1Psi1,
    Phi1B,
    Psi1A,
    WPhi1,
    WA,
    WPsi1,
    WB,
}

impl CommRel {
    pub const ALL: [CommRel; 13] = [
        CommRel::Phi1Phi1,
        CommRel::APhi1,
        CommRel::AA,
        CommRel::Psi1Psi1,
        CommRel::BPsi1,
        CommRel::BB,
        CommRel::Phi1Psi1,
        CommRel::Phi1B,
        CommRel::Psi1A,
        CommRel::WPhi1,
        CommRel::WA,
        CommRel::WPsi1,
        CommRel::WB,
    ];

    pub fn ops(&self) -> (OpTag, OpTag) {
        use OpTag::*;
        match self {
            CommRel::Phi1Phi1 => (Phi1, Phi1),
            CommRel::APhi1 => (A, Phi1),
            CommRel::AA => (A, A),
            CommRel::Psi1Psi1 => (Psi1, Psi1),
            CommRel::BPsi1 => (B, Psi1),
            CommRel::BB => (B, B),
            CommRel::Phi1Psi1 => (Phi1, Psi1),
            CommRel::Phi1B => (Phi1, B),
            CommRel::Psi1A => (Psi1, A),
            CommRel::WPhi1 => (Wop, Phi1),
            CommRel::WA => (Wop, A),
            CommRel::WPsi1 => (Wop, Psi1),
            CommRel::WB => (Wop, B),
        }
    }

    /// The printed ratio as a function of the two spectral parameters.
    pub fn expected(&self, ua: f64, ub: f64, p: &ModelParams) -> f64 {
        let b = |v: f64| sq(v, p);
        let bp = |v: f64| sq_pp(v, p);
        let d = ua - ub;
        let (h, h2) = (p.r2() / 2.0, p.r / 2.0);
        match self {
            CommRel::Phi1Phi1 => b(-d + 1.0) / b(d + 1.0),
            CommRel::APhi1 => b(d + 1.0) / b(d - 1.0),
            CommRel::AA => b(d - 1.0) / b(d + 1.0),
            CommRel::Psi1Psi1 => bp(-d - 1.0) / bp(d - 1.0),
            CommRel::BPsi1 => bp(d - 1.0) / bp(d + 1.0),
            CommRel::BB => bp(d + 1.0) / bp(d - 1.0),
            CommRel::Phi1Psi1 => -1.0,
            CommRel::Phi1B | CommRel::Psi1A => 1.0,
            CommRel::WPhi1 => b(-d + h) / b(d + h),
            CommRel::WA => b(d + h) / b(-d + h),
            CommRel::WPsi1 => bp(-d + h2) / bp(d + h2),
            CommRel::WB => bp(d + h2) / bp(-d + h2),
        }
    }
}

/// Ratio `P_ab(z_a, z_b) / P_ba(z_b, z_a)` times the exchange sign of the
/// normal-ordered products, from the derived closed forms.
pub fn derived_ratio(rel: CommRel, ua: f64, ub: f64, p: &ModelParams) -> Result<f64> {
    let (ta, tb) = rel.ops();
    let (a, b) = (ModeProfile::of(ta), ModeProfile::of(tb));
    let (za, zb) = (p.x.powf(2.0 * ua), p.x.powf(2.0 * ub));
    let (eab, sab) = zero_mode(&a, &b);
    let (eba, sba) = zero_mode(&b, &a);
    let pab = sab as f64 * za.powf(eab.eval(p.r)) * closed_form(&a, &b)?.value(zb / za, p);
    let pba = sba as f64 * zb.powf(eba.eval(p.r)) * closed_form(&b, &a)?.value(za / zb, p);
    let stat = if a.fermion && b.fermion { -1.0 } else { 1.0 };
    Ok(stat * pab / pba)
}

pub fn check_commutation_ratio(rel: CommRel, samples: &[(f64, f64)], p: &ModelParams) -> Vec<CheckReport> {
    samples
        .iter()
        .enumerate()
        .map(|(i, &(ua, ub))| {
            let id = format!("check_commutation_ratio_{rel:?}");
            let sample = Sample::at(p).with_u(&[ua, ub]);
            match derived_ratio(rel, ua, ub, p) {
                Ok(got) => {
                    let want = rel.expected(ua, ub, p);
                    let resid = (got - want).abs() / got.abs().max(want.abs());
                    CheckReport::new(&id, i, sample, resid, p.rel_tol)
                }
                Err(e) => CheckReport::failed(&id, i, sample, p.rel_tol, &e),
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// fermions

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    NS,
    Ramond,
}

/// `<phi(w1) phi(w2)>` as a series in `y = w2/w1` (Ramond) or `y^{1/2}` (NS).
pub fn fermion_contraction(sector: Sector, n: usize, p: &ModelParams) -> FloatSeries {
    let x = p.x;
    let c = |m: f64| (x.powf(2.0 * m) + x.powf(-2.0 * m)) / (x + 1.0 / x);
    match sector {
        Sector::Ramond => {
            let mut coeffs = vec![1.0 / (x + 1.0 / x)];
            coeffs.extend((1..=n).map(|m| c(m as f64)));
            FloatSeries::from_coeffs(SeriesVar::Y, n, coeffs)
        }
        Sector::NS => {
            let coeffs = (0..=n).map(|d| if d % 2 == 1 { c(d as f64 / 2.0) } else { 0.0 }).collect();
            FloatSeries::from_coeffs(SeriesVar::YHalf, n, coeffs)
        }
    }
}

/// Expansion of `f(z,w) = (x+1/x)^{-1} sum_{m>0} ((x^2 y)^m + (x^{-2} y)^m)`.
pub fn f_series(n: usize, p: &ModelParams) -> FloatSeries {
    let x = p.x;
    let mut c = vec![0.0];
    c.extend((1..=n).map(|m| (x.powi(2 * m as i32) + x.powi(-2 * m as i32)) / (x + 1.0 / x)));
    FloatSeries::from_coeffs(SeriesVar::Y, n, c)
}

/// Which sector's contraction, minus its constant, reproduces f(z,w).
pub fn check_f_sector(n: usize, p: &ModelParams) -> CheckReport {
    let f = f_series(n, p);
    let mut ram = fermion_contraction(Sector::Ramond, n, p);
    ram.set(0, 0.0);
    let scale = f.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let resid = (0..=n).map(|d| (ram.coeff(d) - f.coeff(d)).abs()).fold(0.0, f64::max) / scale;
    let ns = fermion_contraction(Sector::NS, 2 * n, p);
    let ns_int = (1..=n).map(|d| ns.coeff(2 * d)).fold(0.0f64, |m, c| m.max(c.abs()));
    CheckReport::new("check_f_sector", 0, Sample::at(p).with_ints(&[n as i64]), resid, p.rel_tol)
        .with_notes(format!("Ramond contraction minus 1/(x+1/x) matches f; NS has no integer powers (max {ns_int:e})"))
}

/// Laurent polynomial in x over the common denominator `x + 1/x`.
pub type Laurent = BTreeMap<i64, i64>;

fn laurent_add(a: &mut Laurent, e: i64, c: i64) {
    *a.entry(e).or_insert(0) += c;
    if a[&e] == 0 {
        a.remove(&e);
    }
}

/// Coefficient of `(w2/w1)^n` in `{phi(w1), phi(w2)}` from the Ramond modes.
pub fn anticommutator_mode_side(n: i64) -> Laurent {
    let mut l = Laurent::new();
    if n == 0 {
        // 2 phi_0^2
        laurent_add(&mut l, 0, 2);
    } else {
        laurent_add(&mut l, 2 * n, 1);
        laurent_add(&mut l, -2 * n, 1);
    }
    l
}

/// Coefficient of `(w2/w1)^n` in the two delta combs.
pub fn anticommutator_comb_side(n: i64) -> Laurent {
    let mut l = Laurent::new();
    laurent_add(&mut l, 2 * n, 1);
    laurent_add(&mut l, -2 * n, 1);
    l
}

pub fn check_ramond_anticommutator(n: i64, p: &ModelParams) -> CheckReport {
    let mut bad = 0;
    for k in -n..=n {
        let m = anticommutator_mode_side(k);
        if m != anticommutator_comb_side(k) || m != anticommutator_mode_side(-k) {
            bad += 1;
        }
    }
    CheckReport::new("check_ramond_anticommutator", 0, Sample::at(p).with_ints(&[n]), bad as f64, 0.5)
        .with_notes(format!("exact Laurent comparison for |n| <= {n}; mismatches: {bad}"))
}

/// Bilateral coefficients (in half-integer steps, key 2n) of `G(z,w) + G(w,z)`
/// where G is the full fermion contraction of the given sector.
pub fn ab_bilateral(sector: Sector, n: i64) -> BTreeMap<i64, Laurent> {
    let mut out: BTreeMap<i64, Laurent> = BTreeMap::new();
    let half_steps: Vec<i64> = match sector {
        Sector::Ramond => (0..=n).map(|m| 2 * m).collect(),
        Sector::NS => (0..n).map(|m| 2 * m + 1).collect(),
    };
    for hs in half_steps {
        for sgn in [1, -1] {
            let key = sgn * hs;
            let entry = out.entry(key).or_default();
            if hs == 0 {
                laurent_add(entry, 0, 1);
            } else {
                // x^{2m} + x^{-2m} with 2m = hs
                laurent_add(entry, hs, 1);
                laurent_add(entry, -hs, 1);
            }
        }
    }
    out
}

/// Informational: compare `G(z,w) + G(w,z)` with the delta-comb coefficients.
pub fn check_ab_delta(n: i64, p: &ModelParams) -> Vec<CheckReport> {
    [Sector::Ramond, Sector::NS]
        .iter()
        .enumerate()
        .map(|(i, &sector)| {
            let lhs = ab_bilateral(sector, n);
            let mut bad = 0;
            for k in -n..=n {
                let got = lhs.get(&(2 * k)).cloned().unwrap_or_default();
                if got != anticommutator_comb_side(k) {
                    bad += 1;
                }
            }
            let extra = lhs.keys().filter(|k| *k % 2 != 0).count();
            CheckReport::new("check_ab_delta", i, Sample::at(p).with_ints(&[n]), (bad + extra) as f64, 0.5)
                .with_notes(format!("{sector:?} sector: {bad} integer-power mismatches, {extra} half-integer powers"))
                .informational()
        })
        .collect()
}

/// `(x^{2r}; x^{2r})^2_inf`.
pub fn d_bracket_zero(p: &ModelParams) -> f64 {
    let q = p.x.powf(2.0 * p.r);
    qpoch(q, q, p.product_cutoff).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn commutator_values() {
        let pr = ModelParams::from_x(0.3, 4.0).unwrap();
        let v = boson_commutator(1, &pr).unwrap();
        assert!((v - xnum(2.0, 0.3) / xnum(4.0, 0.3)).abs() < 1e-15);
        assert_eq!(boson_commutator(-3, &pr).unwrap(), -boson_commutator(3, &pr).unwrap());
        assert!(boson_commutator(0, &pr).is_err());
    }

    #[test]
    fn exact_exponents() {
        let a = ModeProfile::of(OpTag::Phi1);
        let (e, _) = zero_mode(&a, &a);
        assert!(e.same(&RatR::new(&[-2, 1], &[0, 1])));
        assert_eq!(e.to_string(), "(4r-8)/(4r)");
    }

    #[test]
    fn all_printed_series_match() {
        for pair in PairTag::ALL {
            let rep = check_ope(pair, 12, &p()).unwrap();
            assert!(rep.pass, "{pair:?}: {} {}", rep.residual, rep.notes);
        }
    }

    #[test]
    fn commutation_ratios() {
        let pr = p();
        for rel in CommRel::ALL {
            for rep in check_commutation_ratio(rel, &[(0.7, 0.2), (0.13, 0.61)], &pr) {
                assert!(rep.pass, "{rel:?}: {}", rep.residual);
            }
        }
    }

    #[test]
    fn ramond() {
        let pr = p();
        assert!(check_ramond_anticommutator(12, &pr).pass);
        assert!(check_f_sector(12, &pr).pass);
        let ab = check_ab_delta(8, &pr);
        assert!(ab[0].pass && !ab[1].pass);
    }

    #[test]
    fn pair_names_parse() {
        assert_eq!("phi1phi1".parse::<PairTag>().unwrap(), PairTag::Phi1Phi1);
        assert!("nope".parse::<PairTag>().is_err());
    }
}
