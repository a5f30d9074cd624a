//! Eight-vertex R-matrix, its (1/2,1) and (1,1) fusions, and the shifted
//! S-matrix, stored as dense weight tensors keyed by spin labels.
//!
//! Index convention for vertex tensors: `(in1, in2, out1, out2)`, the
//! R-matrix sending `v_in1 (x) v_in2` to `sum entry * v_out1 (x) v_out2`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::elliptic::{hh, qpoch, qpoch2};
use crate::error::{domain, Result};
use crate::numerics::{guard, symmetric_limit, Residual};
use crate::params::ModelParams;
use crate::report::{CheckReport, Sample};

pub const HALF: [i32; 2] = [1, -1];
pub const ONE: [i32; 3] = [1, 0, -1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelTag {
    R8,
    R18,
    R21,
    S21,
    W,
    W22,
    W22pp,
}

impl ModelTag {
    pub fn name(&self) -> &'static str {
        match self {
            ModelTag::R8 => "R8",
            ModelTag::R18 => "R18",
            ModelTag::R21 => "R21",
            ModelTag::S21 => "S21",
            ModelTag::W => "W",
            ModelTag::W22 => "W22",
            ModelTag::W22pp => "W22pp",
        }
    }
}

/// Dense real array over a product of small label alphabets. Entries that were
/// never assigned are structural zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightTensor {
    pub model: ModelTag,
    pub u: f64,
    /// Reference height for face tensors, whose labels are offsets from it.
    pub base_height: Option<f64>,
    alphabets: Vec<Vec<i32>>,
    data: Vec<f64>,
    structural: Vec<bool>,
}

impl WeightTensor {
    pub fn new(model: ModelTag, u: f64, alphabets: Vec<Vec<i32>>) -> Self {
        let n = alphabets.iter().map(Vec::len).product();
        WeightTensor { model, u, base_height: None, alphabets, data: vec![0.0; n], structural: vec![false; n] }
    }

    pub fn arity(&self) -> usize {
        self.alphabets.len()
    }

    pub fn alphabet(&self, slot: usize) -> &[i32] {
        &self.alphabets[slot]
    }

    fn offset(&self, idx: &[i32]) -> Option<usize> {
        if idx.len() != self.alphabets.len() {
            return None;
        }
        let mut off = 0;
        for (l, alpha) in idx.iter().zip(&self.alphabets) {
            let pos = alpha.iter().position(|a| a == l)?;
            off = off * alpha.len() + pos;
        }
        Some(off)
    }

    /// Entry at a label tuple; labels outside the alphabets read as 0.
    pub fn get(&self, idx: &[i32]) -> f64 {
        self.offset(idx).map_or(0.0, |o| self.data[o])
    }

    /// Assign an entry and mark it structurally non-zero.
    pub fn set(&mut self, idx: &[i32], v: f64) {
        let o = self.offset(idx).unwrap_or_else(|| panic!("label tuple {idx:?} outside the tensor alphabets"));
        self.data[o] = v;
        self.structural[o] = true;
    }

    pub fn is_structural(&self, idx: &[i32]) -> bool {
        self.offset(idx).is_some_and(|o| self.structural[o])
    }

    pub fn structural_count(&self) -> usize {
        self.structural.iter().filter(|&&s| s).count()
    }

    /// All index tuples in row-major order.
    pub fn indices(&self) -> Vec<Vec<i32>> {
        let mut out: Vec<Vec<i32>> = vec![vec![]];
        for alpha in &self.alphabets {
            out = out
                .into_iter()
                .flat_map(|pre| {
                    alpha.iter().map(move |&l| {
                        let mut v = pre.clone();
                        v.push(l);
                        v
                    })
                })
                .collect();
        }
        out
    }

    pub fn entries(&self) -> Vec<(Vec<i32>, f64)> {
        self.indices().into_iter().zip(self.data.iter().copied()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut t = self.clone();
        t.data.iter_mut().for_each(|v| *v = f(*v));
        t
    }

    /// CSV with one row per structural entry: label columns then value.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let cols: Vec<String> = (0..self.arity()).map(|i| format!("i{i}")).collect();
        let _ = writeln!(s, "model,u,{},value", cols.join(","));
        for (o, (idx, v)) in self.entries().into_iter().enumerate() {
            if !self.structural[o] {
                continue;
            }
            let labels: Vec<String> = idx.iter().map(i32::to_string).collect();
            let _ = writeln!(s, "{},{},{},{:.17e}", self.model.name(), self.u, labels.join(","), v);
        }
        s
    }
}

/// Theta evaluator `theta_j(v/2r)` with pole detection on denominators.
pub(crate) struct Thetas<'a> {
    pub p: &'a ModelParams,
    scale: f64,
}

impl<'a> Thetas<'a> {
    pub fn new(p: &'a ModelParams) -> Self {
        let scale = hh(2, 0.0, p).abs().max(hh(3, 0.0, p).abs());
        Thetas { p, scale }
    }

    pub fn n(&self, j: u8, v: f64) -> f64 {
        hh(j, v, self.p)
    }

    pub fn d(&self, j: u8, v: f64) -> Result<f64> {
        guard(&format!("theta_{j}(({v})/2r)"), hh(j, v, self.p), self.scale)
    }
}

/// Normalization of the eight-vertex R-matrix.
pub fn kappa_bar(u: f64, p: &ModelParams) -> f64 {
    let x = p.x;
    let r = p.r;
    let (q1, q2) = (x.powi(4), x.powf(2.0 * r));
    let n = p.product_cutoff;
    let rho = |z: f64| {
        qpoch2(x * x * z, q1, q2, n) * qpoch2(x.powf(2.0 * r + 2.0) * z, q1, q2, n)
            / (qpoch2(x.powi(4) * z, q1, q2, n) * qpoch2(x.powf(2.0 * r) * z, q1, q2, n))
    };
    let z = x.powf(2.0 * u);
    let zeta = x.powf(u);
    zeta.powf(-(r - 1.0) / r) * rho(z) / rho(1.0 / z)
}

/// `1/kappa_{2,2}(u)`; vanishes at u = 1 where kappa_{2,2} has its pole.
pub fn inv_kappa22(u: f64, p: &ModelParams) -> f64 {
    let x = p.x;
    let r = p.r;
    let q = x.powf(2.0 * r);
    let n = p.product_cutoff;
    let z = x.powf(2.0 * u);
    z.powf((r - 2.0) / r) * qpoch(x * x / z, q, n) * qpoch(x.powf(2.0 * r - 2.0) * z, q, n)
        / (qpoch(x * x * z, q, n) * qpoch(x.powf(2.0 * r - 2.0) / z, q, n))
}

pub fn kappa22(u: f64, p: &ModelParams) -> Result<f64> {
    let inv = inv_kappa22(u, p);
    Ok(1.0 / guard("kappa22 pole", inv, 1.0)?)
}

/// `1/kappa_{1,2}(u)`.
pub fn inv_kappa12(u: f64, p: &ModelParams) -> Result<f64> {
    let x = p.x;
    let r = p.r;
    let q = x.powf(2.0 * r);
    let n = p.product_cutoff;
    let z = x.powf(2.0 * u);
    let den = qpoch(z, q, n) * qpoch(q / z, q, n);
    let den = guard("kappa12", den, 1.0)?;
    Ok((z / x).powf(p.r1() / r) * qpoch(x * x / z, q, n) * qpoch(x.powf(2.0 * r - 2.0) * z, q, n) / den)
}

fn vertex_tensor(model: ModelTag, u: f64, a: &[i32], b: &[i32]) -> WeightTensor {
    WeightTensor::new(model, u, vec![a.to_vec(), b.to_vec(), a.to_vec(), b.to_vec()])
}

/// Eight-vertex R-matrix.
pub fn r8v(u: f64, p: &ModelParams) -> Result<WeightTensor> {
    let th = Thetas::new(p);
    let t = |j, v| th.n(j, v);
    let k = kappa_bar(u, p);
    let h20 = th.d(2, 0.0)?;
    let a = t(2, 1.0) * t(2, u) / (h20 * th.d(2, 1.0 - u)?) / k;
    let b = -t(2, 1.0) * t(1, u) / (h20 * th.d(1, 1.0 - u)?) / k;
    let c = t(1, 1.0) * t(2, u) / (h20 * th.d(1, 1.0 - u)?) / k;
    let d = t(1, 1.0) * t(1, u) / (h20 * th.d(2, 1.0 - u)?) / k;
    let mut r = vertex_tensor(ModelTag::R8, u, &HALF, &HALF);
    for e in HALF {
        r.set(&[e, e, e, e], a);
        r.set(&[e, -e, e, -e], b);
        r.set(&[e, -e, -e, e], c);
        r.set(&[e, e, -e, -e], d);
    }
    Ok(r)
}

/// (1/2, 1) fused R-matrix, keyed `(eps_in, s_in, eps_out, s_out)`.
pub fn r18v(u: f64, p: &ModelParams) -> Result<WeightTensor> {
    let th = Thetas::new(p);
    let t = |j, v| th.n(j, v);
    let ik = inv_kappa12(u, p)?;
    let h20 = th.d(2, 0.0)?;
    let d2 = h20 * h20;
    let (a1, a2) = (t(1, 1.0), t(2, 1.0));
    let (d1m, d2m) = (th.d(1, 2.0 - u)?, th.d(2, 2.0 - u)?);
    let mixed = h20 * d1m * d2m;
    let mut r = vertex_tensor(ModelTag::R18, u, &HALF, &ONE);
    for pp in HALF {
        let m = -pp;
        r.set(&[pp, pp, pp, pp], ik * a2 * a2 * t(2, u) / (d2 * d2m));
        r.set(&[pp, m, pp, pp], ik * a1 * a1 * t(1, u) / (d2 * d1m));
        r.set(&[pp, 0, pp, 0], ik * t(2, 2.0) * t(1, 1.0 - u) * t(2, 1.0 - u) / mixed);
        r.set(&[pp, m, pp, m], -ik * a2 * a2 * t(1, u) / (d2 * d1m));
        r.set(&[pp, pp, pp, m], -ik * a1 * a1 * t(1, u) / (d2 * d1m));
        r.set(&[pp, 0, m, pp], ik * t(1, 2.0) * t(2, 1.0 - u).powi(2) / mixed);
        r.set(&[pp, 0, m, m], -ik * t(1, 2.0) * t(1, 1.0 - u).powi(2) / mixed);
        r.set(&[pp, m, m, 0], ik * a1 * a2 * t(2, u) / (d2 * d1m));
        r.set(&[pp, pp, m, 0], ik * a1 * a2 * t(1, u) / (d2 * d2m));
    }
    Ok(r)
}

/// Twenty-one-vertex R-matrix as tabulated.
pub fn r21v(u: f64, p: &ModelParams) -> Result<WeightTensor> {
    let th = Thetas::new(p);
    let t = |j, v| th.n(j, v);
    let ik = inv_kappa22(u, p);
    let h0 = th.d(2, 0.0)?;
    let (h0_2, h0_3, h0_4) = (h0.powi(2), h0.powi(3), h0.powi(4));
    let (a1, a2) = (t(1, 1.0), t(2, 1.0));
    let (b1, b2) = (t(1, 2.0), t(2, 2.0));
    let (d12, d22) = (th.d(1, 2.0 - u)?, th.d(2, 2.0 - u)?);
    let (d11, d21) = (th.d(1, 1.0 - u)?, th.d(2, 1.0 - u)?);
    let (n1, n2) = (t(1, u), t(2, u));
    let (n1p, n2p) = (t(1, 1.0 + u), t(2, 1.0 + u));
    let (m1, m2) = (t(1, 1.0 - u), t(2, 1.0 - u));
    let c3 = a1 * a2 * b1;

    let mut r = vertex_tensor(ModelTag::R21, u, &ONE, &ONE);
    for pp in [1, -1] {
        let m = -pp;
        let v = a2.powi(4) * n2 * n2p / (h0_4 * d22 * d21) - a1.powi(4) * n2 * n1p / (h0_4 * d22 * d11);
        r.set(&[pp, pp, pp, pp], ik * v);
        let v = ik * b1 * b2 * n2 * n2 / (h0_2 * d12 * d22);
        r.set(&[0, pp, pp, 0], v);
        r.set(&[pp, 0, 0, pp], v);
        let v = ik * b2 * b2 * n1 * n2 / (h0_2 * d12 * d22);
        r.set(&[pp, 0, pp, 0], v);
        r.set(&[0, pp, 0, pp], v);
        let v = a2.powi(4) * n1 * n1p / (h0_4 * d12 * d11) - a1.powi(4) * n1 * n2p / (h0_4 * d12 * d21);
        r.set(&[pp, m, pp, m], ik * v);
        r.set(&[pp, m, m, pp], ik * c3 * n2.powi(3) / (h0_3 * d12 * d11 * d21));
        let v = -ik * b1 * b2 * n1 * n2 * m2 / (h0_2 * d12 * d22 * d11);
        r.set(&[pp, m, 0, 0], v);
        r.set(&[0, 0, pp, m], v);
        r.set(&[pp, pp, m, m], -ik * c3 * n1.powi(3) / (h0_3 * d22 * d11 * d21));
    }
    let v = -b2 * b2 * n1 * n2 / (h0_2 * d12) + c3 * m2 * m2 * n2p / (h0_3 * d12 * d22 * d11)
        - c3 * m1 * m1 * n1p / (h0_3 * d12 * d22 * d21);
    r.set(&[0, 0, 0, 0], ik * v);
    Ok(r)
}

/// `S(u) = -R21(u)` with r replaced by r - 2.
pub fn s21v(u: f64, p: &ModelParams) -> Result<WeightTensor> {
    let ps = p.shifted_bracket()?;
    let mut s = r21v(u, &ps)?.map(|v| -v);
    s.model = ModelTag::S21;
    Ok(s)
}

/// Spin-flip image of an index tuple.
pub fn flip(idx: &[i32]) -> Vec<i32> {
    idx.iter().map(|l| -l).collect()
}

/// Charge of a label; spin-1/2 labels count once, spin-1 labels twice.
fn charge(l: i32, spin_one: bool) -> i32 {
    if spin_one {
        2 * l
    } else {
        l
    }
}

/// True when every structurally non-zero entry conserves charge mod 4.
pub fn charge_conserved(t: &WeightTensor) -> bool {
    let spin_one: Vec<bool> = (0..t.arity()).map(|s| t.alphabet(s).contains(&0)).collect();
    t.indices().iter().all(|idx| {
        if !t.is_structural(idx) {
            return true;
        }
        let c = |i: usize| charge(idx[i], spin_one[i]);
        (c(0) + c(1) - c(2) - c(3)).rem_euclid(4) == 0
    })
}

/// `R(1)` as the symmetric limit; u = 1 is a removable 0/0 point of the table.
pub fn r21_at_one(p: &ModelParams) -> Result<WeightTensor> {
    let base = r21v(0.9, p)?;
    let mut out = base.clone();
    out.u = 1.0;
    for idx in base.indices() {
        if !base.is_structural(&idx) {
            continue;
        }
        let v = symmetric_limit(|u| Ok(r21v(u, p)?.get(&idx)), 1.0, 2e-3, 1e-3)?;
        out.set(&idx, v);
    }
    Ok(out)
}

/// Residual of `P R(1) + R(1)` over all 81 entries, where `(P R)` swaps the
/// outgoing pair.
pub fn check_fusion_projector(p: &ModelParams) -> Result<CheckReport> {
    let r1 = r21_at_one(p)?;
    let mut res = Residual::default();
    for idx in r1.indices() {
        let pr = r1.get(&[idx[0], idx[1], idx[3], idx[2]]);
        let v = r1.get(&idx);
        res.push(pr, -v);
        res.push_scale(v);
    }
    // report the sign that does hold for context
    let mut plus = Residual::default();
    for idx in r1.indices() {
        plus.push(r1.get(&[idx[0], idx[1], idx[3], idx[2]]), r1.get(&idx));
    }
    let scale = r1.max_abs();
    let value = res.diff / scale;
    Ok(CheckReport::new("check_fusion_projector", 0, Sample::at(p), value, p.rel_tol)
        .with_notes(format!("|PR(1) - R(1)| / max|R(1)| = {:.3e}", plus.diff / scale)))
}

/// Vertex YBE `R12 R13 R23 = R23 R13 R12` with spectral arguments
/// `u1-u2, u1-u3, u2-u3`. Works for any three tensors sharing the right
/// alphabets (mixed YBE included).
pub fn ybe_residual(a: &WeightTensor, b: &WeightTensor, c: &WeightTensor) -> Residual {
    let s1 = a.alphabet(0).to_vec();
    let s2 = a.alphabet(1).to_vec();
    let s3 = b.alphabet(1).to_vec();
    let mut res = Residual::default();
    for &i1 in &s1 {
        for &i2 in &s2 {
            for &i3 in &s3 {
                for &o1 in &s1 {
                    for &o2 in &s2 {
                        for &o3 in &s3 {
                            let mut l = 0.0;
                            let mut r = 0.0;
                            for &x1 in &s1 {
                                for &x2 in &s2 {
                                    for &x3 in &s3 {
                                        l += c.get(&[i2, i3, x2, x3])
                                            * b.get(&[i1, x3, x1, o3])
                                            * a.get(&[x1, x2, o1, o2]);
                                        r += a.get(&[i1, i2, x1, x2])
                                            * b.get(&[x1, i3, o1, x3])
                                            * c.get(&[x2, x3, o2, o3]);
                                    }
                                }
                            }
                            res.push(l, r);
                        }
                    }
                }
            }
        }
    }
    res
}

/// Check the weight tensor against the model's alphabet before use elsewhere.
pub fn require_model(t: &WeightTensor, model: ModelTag) -> Result<()> {
    if t.model != model {
        return Err(domain(format!("expected {:?} tensor, got {:?}", model, t.model)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> ModelParams {
        ModelParams::from_epsilon(1.0, 4.5).unwrap()
    }

    #[test]
    fn r8_is_permutation_at_zero() {
        let r = r8v(0.0, &p()).unwrap();
        for idx in r.indices() {
            let want = if idx[0] == idx[3] && idx[1] == idx[2] { 1.0 } else { 0.0 };
            assert!((r.get(&idx) - want).abs() < 1e-14, "{idx:?}");
        }
    }

    #[test]
    fn r8_spin_flip() {
        let r = r8v(0.37, &p()).unwrap();
        for idx in r.indices() {
            assert_eq!(r.get(&idx), r.get(&flip(&idx)));
        }
        assert_eq!(r.structural_count(), 8);
    }

    #[test]
    fn kappa_inverts() {
        let pr = p();
        assert!((kappa_bar(0.0, &pr) - 1.0).abs() < 1e-15);
        let v = kappa_bar(0.3, &pr) * kappa_bar(-0.3, &pr);
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn r21_shape() {
        let r = r21v(0.4, &p()).unwrap();
        assert_eq!(r.structural_count(), 21);
        assert!(charge_conserved(&r));
        assert!(charge_conserved(&r18v(0.3, &p()).unwrap()));
    }

    #[test]
    fn r21_is_permutation_at_zero() {
        let pr = ModelParams::from_epsilon(1.0, 4.0).unwrap();
        let r = r21v(0.0, &pr).unwrap();
        for idx in r.indices() {
            let want = if idx[0] == idx[3] && idx[1] == idx[2] { 1.0 } else { 0.0 };
            assert!((r.get(&idx) - want).abs() < 1e-12, "{idx:?} {}", r.get(&idx));
        }
    }

    #[test]
    fn s21_is_minus_shifted_r21() {
        let pr = ModelParams::from_epsilon(1.0, 6.5).unwrap();
        let s = s21v(0.3, &pr).unwrap();
        let r = r21v(0.3, &pr.shifted().unwrap()).unwrap();
        for idx in s.indices() {
            assert_eq!(s.get(&idx) + r.get(&idx), 0.0);
        }
    }

    #[test]
    fn r8_ybe() {
        let pr = p();
        let (u1, u2, u3) = (0.7, 0.3, 0.1);
        let a = r8v(u1 - u2, &pr).unwrap();
        let b = r8v(u1 - u3, &pr).unwrap();
        let c = r8v(u2 - u3, &pr).unwrap();
        assert!(ybe_residual(&a, &b, &c).value() < 1e-13);
    }

    #[test]
    fn csv_lists_structural_entries() {
        let csv = r8v(0.2, &p()).unwrap().to_csv();
        assert_eq!(csv.lines().count(), 9);
        assert!(csv.starts_with("model,u,i0,i1,i2,i3,value"));
    }
}
