//! Corner transfer matrix path spaces, their exact q-series, string
//! functions and the character identities built on them.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::elliptic::{qpoch, sq, sq_pp};
use crate::error::{domain, usage, Result};
use crate::params::ModelParams;
use crate::report::{CheckReport, Sample};
use crate::series::{IntSeries, SeriesVar};

/// Bond energy `H(s, s') = |s + s'|`.
pub fn h_bond(s: i32, s_prime: i32) -> Result<i64> {
    if !(-1..=1).contains(&s) || !(-1..=1).contains(&s_prime) {
        return Err(usage(format!("spin labels must lie in {{-1,0,1}}, got ({s},{s_prime})")));
    }
    Ok((s + s_prime).abs() as i64)
}

fn check_sector(i: u8) -> Result<()> {
    if i > 2 {
        return Err(usage(format!("sector must be 0, 1 or 2, got {i}")));
    }
    Ok(())
}

/// Half-infinite spin-1 paths `s_1, s_2, ...` with `s_j = 1-i` (j even) and
/// `i-1` (j odd) far out, weighted by `H = sum_j j |s_j + s_{j+1}|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexPathSpace {
    pub sector: u8,
}

impl VertexPathSpace {
    pub fn new(sector: u8) -> Result<Self> {
        check_sector(sector)?;
        Ok(VertexPathSpace { sector })
    }

    pub fn ground(&self, j: usize) -> i32 {
        let i = self.sector as i32;
        if j.is_multiple_of(2) {
            1 - i
        } else {
            i - 1
        }
    }

    /// Energy of a path given by its first sites `s_1..s_n`, ground beyond.
    pub fn energy(&self, head: &[i32]) -> i64 {
        let site = |j: usize| if j <= head.len() { head[j - 1] } else { self.ground(j) };
        (1..=head.len() + 1).map(|j| j as i64 * (site(j) + site(j + 1)).abs() as i64).sum()
    }

    /// Exact `sum_paths q^H` with `q = x^2` through degree `e_max`.
    ///
    /// A site differing from the ground pattern at position j costs at least
    /// j, so sites past `2 e_max + 2` are frozen.
    pub fn series(&self, e_max: usize) -> IntSeries {
        let j_max = 2 * e_max + 2;
        // f[s] = counts by energy for sites j+1.. given s_{j+1} = s
        let mut f: HashMap<i32, Vec<i64>> = HashMap::new();
        let mut init = vec![0i64; e_max + 1];
        init[0] = 1;
        f.insert(self.ground(j_max), init);
        for j in (1..j_max).rev() {
            let mut g: HashMap<i32, Vec<i64>> = HashMap::new();
            for (&next, counts) in &f {
                for s in [-1, 0, 1] {
                    let cost = j * (s + next).unsigned_abs() as usize;
                    if cost > e_max {
                        continue;
                    }
                    let row = g.entry(s).or_insert_with(|| vec![0; e_max + 1]);
                    for e in 0..=e_max - cost {
                        row[e + cost] += counts[e];
                    }
                }
            }
            f = g;
        }
        let mut total = vec![0i64; e_max + 1];
        for counts in f.values() {
            for (t, c) in total.iter_mut().zip(counts) {
                *t += c;
            }
        }
        IntSeries::from_coeffs(SeriesVar::X2, e_max, total)
    }

    /// Brute-force count over paths that deviate only in the first `sites` sites.
    pub fn brute_force(&self, e_max: usize, sites: usize) -> IntSeries {
        let mut out = vec![0i64; e_max + 1];
        let mut head = vec![-1i32; sites];
        loop {
            let e = self.energy(&head);
            if e >= 0 && (e as usize) <= e_max {
                out[e as usize] += 1;
            }
            // odometer over {-1,0,1}^sites
            let mut pos = 0;
            loop {
                if pos == sites {
                    return IntSeries::from_coeffs(SeriesVar::X2, e_max, out);
                }
                if head[pos] < 1 {
                    head[pos] += 1;
                    break;
                }
                head[pos] = -1;
                pos += 1;
            }
        }
    }
}

/// Exact expansion of the principally specialized character in `q = x^2`:
/// `(-q;q)(-q^2;q^2)` for i = 0, 2 and `(-q;q)(-q;q^2)` for i = 1.
pub fn character_product(i: u8, e_max: usize) -> Result<IntSeries> {
    check_sector(i)?;
    let a = IntSeries::pochhammer(SeriesVar::X2, 1, 1, 1, e_max);
    let b = if i == 1 {
        IntSeries::pochhammer(SeriesVar::X2, 1, 2, 1, e_max)
    } else {
        IntSeries::pochhammer(SeriesVar::X2, 2, 2, 1, e_max)
    };
    Ok(a.mul(&b))
}

pub fn vertex_partition_series(i: u8, e_max: usize) -> Result<IntSeries> {
    Ok(VertexPathSpace::new(i)?.series(e_max))
}

/// Height paths `k_0 = k, k_1, ...` with steps in {-2,0,2}, tail alternating
/// `l+i` (even j) and `l+2-i` (odd j), weighted by
/// `H = 1/2 sum_{j>=1} j |k_{j+1} - k_{j-1}|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacePathSpace {
    pub sector: u8,
    pub l: i64,
    pub k: i64,
}

impl FacePathSpace {
    pub fn new(sector: u8, l: i64, k: i64) -> Result<Self> {
        check_sector(sector)?;
        if (k - l - sector as i64).rem_euclid(2) != 0 {
            return Err(domain(format!("k = {k} has the wrong parity for l = {l}, i = {sector}")));
        }
        Ok(FacePathSpace { sector, l, k })
    }

    pub fn ground(&self, j: usize) -> i64 {
        let i = self.sector as i64;
        if j.is_multiple_of(2) {
            self.l + i
        } else {
            self.l + 2 - i
        }
    }

    pub fn series(&self, e_max: usize) -> IntSeries {
        let j_max = 2 * e_max + 4;
        // state (k_j, k_{j+1}) -> counts by energy of terms with index > j
        let mut f: HashMap<(i64, i64), Vec<i64>> = HashMap::new();
        let mut init = vec![0i64; e_max + 1];
        init[0] = 1;
        f.insert((self.ground(j_max), self.ground(j_max + 1)), init);
        for j in (0..j_max).rev() {
            let mut g: HashMap<(i64, i64), Vec<i64>> = HashMap::new();
            for (&(a, b), counts) in &f {
                for s in [-2, 0, 2] {
                    let c = a + s;
                    let cost = (j + 1) * (b - c).unsigned_abs() as usize / 2;
                    if cost > e_max {
                        continue;
                    }
                    let row = g.entry((c, a)).or_insert_with(|| vec![0; e_max + 1]);
                    for e in 0..=e_max - cost {
                        row[e + cost] += counts[e];
                    }
                }
            }
            f = g;
        }
        let mut total = vec![0i64; e_max + 1];
        for (&(c, _), counts) in &f {
            if c == self.k {
                for (t, v) in total.iter_mut().zip(counts) {
                    *t += v;
                }
            }
        }
        IntSeries::from_coeffs(SeriesVar::X2, e_max, total)
    }

    pub fn energy(&self, heights: &[i64]) -> i64 {
        // heights[j] = k_j for j < heights.len(), ground beyond
        let n = heights.len();
        let at = |j: usize| if j < n { heights[j] } else { self.ground(j) };
        (1..=n + 1).map(|j| j as i64 * (at(j + 1) - at(j - 1)).abs()).sum::<i64>() / 2
    }

    /// Brute force over paths whose first `sites` heights after `k_0` are free.
    pub fn brute_force(&self, e_max: usize, sites: usize) -> IntSeries {
        let mut out = vec![0i64; e_max + 1];
        let mut steps = vec![-2i64; sites];
        loop {
            let mut hs = vec![self.k];
            for s in &steps {
                hs.push(hs.last().unwrap() + s);
            }
            let last_ok = (self.ground(sites + 1) - hs[sites]).abs() <= 2;
            if last_ok {
                let e = self.energy(&hs);
                if (e as usize) <= e_max {
                    out[e as usize] += 1;
                }
            }
            let mut pos = 0;
            loop {
                if pos == sites {
                    return IntSeries::from_coeffs(SeriesVar::X2, e_max, out);
                }
                if steps[pos] < 2 {
                    steps[pos] += 2;
                    break;
                }
                steps[pos] = -2;
                pos += 1;
            }
        }
    }
}

pub fn face_partition_series(i: u8, l: i64, k: i64, e_max: usize) -> Result<IntSeries> {
    Ok(FacePathSpace::new(i, l, k)?.series(e_max))
}

/// A level-2 string function: `x^{x_offset}` times an integer series in x^2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StringFunction {
    pub i: u8,
    pub j: i64,
    pub x_offset: f64,
    pub series: IntSeries,
}

/// Expansion of `c^{lambda_i}_{lambda_j}` in powers of x^2 through degree `n`.
pub fn string_function_series(i: u8, j: i64, n: usize) -> Result<StringFunction> {
    check_sector(i)?;
    let zero = |off| StringFunction { i, j, x_offset: off, series: IntSeries::zero(SeriesVar::X2, n) };
    if (j - i as i64).rem_euclid(2) != 0 {
        return Ok(zero(0.0));
    }
    let inv = IntSeries::inv_pochhammer(SeriesVar::X2, 2, 2, n);
    if i == 1 {
        let s = IntSeries::pochhammer(SeriesVar::X2, 2, 2, 1, n).mul(&inv);
        return Ok(StringFunction { i, j, x_offset: 0.5, series: s });
    }
    let plus = IntSeries::pochhammer(SeriesVar::X2, 1, 2, 1, n).mul(&inv);
    let minus = IntSeries::pochhammer(SeriesVar::X2, 1, 2, -1, n).mul(&inv);
    // c^2_j = c^0_{2-j}; c^i_j = c^i_{j+4}
    let jj = if i == 2 { (2 - j).rem_euclid(4) } else { j.rem_euclid(4) };
    let coeffs: Vec<i64> = plus
        .coeffs()
        .iter()
        .zip(minus.coeffs())
        .map(|(p, m)| if jj == 0 { (p + m) / 2 } else { (p - m) / 2 })
        .collect();
    Ok(StringFunction { i, j, x_offset: 0.0, series: IntSeries::from_coeffs(SeriesVar::X2, n, coeffs) })
}

/// Numeric value of a string function at x.
pub fn string_function_value(i: u8, j: i64, x: f64, cutoff: usize) -> f64 {
    if (j - i as i64).rem_euclid(2) != 0 {
        return 0.0;
    }
    let q4 = x.powi(4);
    let den = qpoch(q4, q4, cutoff);
    if i == 1 {
        return x.sqrt() * qpoch(-q4, q4, cutoff) / den;
    }
    let jj = if i == 2 { (2 - j).rem_euclid(4) } else { j.rem_euclid(4) };
    let p = qpoch(-x * x, q4, cutoff) / den;
    let m = qpoch(x * x, q4, cutoff) / den;
    if jj == 0 {
        0.5 * (p + m)
    } else {
        0.5 * (p - m)
    }
}

/// Outcome of comparing one face path series with its string function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceComparison {
    pub i: u8,
    pub l: i64,
    pub k: i64,
    /// Lowest energy in the path space (the measured monomial offset, in x^2).
    pub path_offset: usize,
    /// Leading degree of the matching string function, in x^2.
    pub string_offset: usize,
    pub string_j: i64,
    /// Degrees compared after normalization.
    pub degrees: usize,
    pub matches: bool,
}

/// Compare the face series at (i, l, k) with `c^i_{i + k - l - i}` after
/// shifting both to start at degree 0.
pub fn compare_face_with_string(i: u8, l: i64, k: i64, e_max: usize) -> Result<FaceComparison> {
    let face = face_partition_series(i, l, k, e_max)?;
    let j = i as i64 + (k - l - i as i64);
    let sf = string_function_series(i, j, e_max)?;
    let fv = face.valuation().ok_or_else(|| domain("empty face path space"))?;
    let sv = sf.series.valuation().ok_or_else(|| domain("vanishing string function"))?;
    let degrees = (e_max - fv).min(e_max - sv);
    let matches = (0..=degrees).all(|d| face.coeff(d + fv) == sf.series.coeff(d + sv));
    Ok(FaceComparison { i, l, k, path_offset: fv, string_offset: sv, string_j: j, degrees, matches })
}

/// Both sides of the branching sum rule at fixed x, summing |k - l| <= k_max.
pub fn chi_sum_rule_sides(i: u8, l: i64, k_max: i64, p: &ModelParams) -> Result<(f64, f64)> {
    check_sector(i)?;
    let (x, r, r2) = (p.x, p.r, p.r2());
    let lf = l as f64;
    let mut lhs = 0.0;
    let mut n = -(k_max + 2) / 2 - 1;
    loop {
        let k = l + i as i64 + 2 * n;
        if k - l > k_max {
            break;
        }
        if (k - l).abs() <= k_max {
            let kf = k as f64;
            let c = string_function_value(i, i as i64 + 2 * n.rem_euclid(2), x, p.product_cutoff);
            let expo = r / (2.0 * r2) * lf * lf - lf * kf + r2 / (2.0 * r) * kf * kf;
            lhs += sq(kf, p) * c * x.powf(expo);
        }
        n += 1;
    }
    let cut = p.product_cutoff;
    let chi = qpoch(-x * x, x * x, cut)
        * if i == 1 { qpoch(-x * x, x.powi(4), cut) } else { qpoch(-x.powi(4), x.powi(4), cut) };
    Ok((lhs, sq_pp(lf, p) * chi))
}

/// Relative residual of the sum rule, with the effect of doubling `k_max` in the notes.
pub fn check_chi_sum_rule(i: u8, l: i64, k_max: i64, p: &ModelParams) -> Result<CheckReport> {
    let (lhs, rhs) = chi_sum_rule_sides(i, l, k_max, p)?;
    let (lhs2, _) = chi_sum_rule_sides(i, l, 2 * k_max, p)?;
    let resid = (lhs - rhs).abs() / rhs.abs();
    let tail = (lhs2 - lhs).abs() / rhs.abs();
    Ok(CheckReport::new("check_chi_sum_rule", 0, Sample::at(p).with_ints(&[i as i64, l, k_max]), resid, 1e-8)
        .with_notes(format!("tail change on doubling K_max: {tail:.3e}")))
}

/// Graded free-field trace without the zero-mode factor, assembled mode by
/// mode: bosons `beta_{-m}` of degree 2m (in x^2), fermions of degree 2m for
/// m in Z+1/2 (NS, i = 0, 2) or m in Z>0 (Ramond, i = 1, times x^{1/2}).
pub fn free_field_trace(i: u8, n: usize) -> Result<(f64, IntSeries)> {
    check_sector(i)?;
    let mut s = IntSeries::one(SeriesVar::X2, n);
    for m in 1..=n {
        if 2 * m <= n {
            s.div_one_minus(2 * m);
        }
    }
    let ramond = i == 1;
    let mut twice_m = if ramond { 2 } else { 1 };
    while twice_m <= n {
        s.mul_binomial(twice_m, 1);
        twice_m += 2;
    }
    let offset = (i as f64) * (2.0 - i as f64) / 2.0;
    Ok((offset, s))
}

/// Compare the mode-tower trace with `c^i_i + c^i_{i+2}` (NS) or `c^1_1` (Ramond).
pub fn boson_fermion_trace_check(i: u8, l: i64, k: i64, n: usize, p: &ModelParams) -> Result<CheckReport> {
    let (off, trace) = free_field_trace(i, n)?;
    let (soff, strings) = if i == 1 {
        let c = string_function_series(1, 1, n)?;
        (c.x_offset, c.series)
    } else {
        let a = string_function_series(i, i as i64, n)?;
        let b = string_function_series(i, i as i64 + 2, n)?;
        (a.x_offset, a.series.add(&b.series))
    };
    let diff = (0..=n).map(|d| (trace.coeff(d) - strings.coeff(d)).abs()).max().unwrap_or(0);
    let resid = if off == soff { diff as f64 } else { f64::INFINITY };
    let (r, r2) = (p.r, p.r2());
    let (lf, kf) = (l as f64, k as f64);
    let quad = r / (2.0 * r2) * lf * lf - kf * lf + r2 / (2.0 * r) * kf * kf;
    Ok(CheckReport::new(
        "check_boson_fermion_trace",
        i as usize,
        Sample::at(p).with_ints(&[i as i64, l, k, n as i64]),
        resid,
        0.5,
    )
    .with_notes(format!("zero-mode exponent {quad:.6}; x offset {off}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bonds() {
        assert_eq!(h_bond(1, -1).unwrap(), 0);
        assert_eq!(h_bond(0, 1).unwrap(), 1);
        assert_eq!(h_bond(1, 1).unwrap(), 2);
        assert!(h_bond(2, 0).is_err());
    }

    #[test]
    fn vertex_characters() {
        for i in 0..3 {
            let s = vertex_partition_series(i, 12).unwrap();
            assert_eq!(s, character_product(i, 12).unwrap(), "sector {i}");
            assert_eq!(s.coeff(0), 1);
        }
    }

    #[test]
    fn vertex_dp_vs_brute() {
        for i in 0..3 {
            let sp = VertexPathSpace::new(i).unwrap();
            assert_eq!(sp.series(6), sp.brute_force(6, 8));
        }
    }

    #[test]
    fn face_dp_vs_brute() {
        let sp = FacePathSpace::new(0, 3, 3).unwrap();
        assert_eq!(sp.series(4), sp.brute_force(4, 8));
        let sp = FacePathSpace::new(1, 3, 6).unwrap();
        assert_eq!(sp.series(4), sp.brute_force(4, 8));
    }

    #[test]
    fn string_function_values() {
        let c00 = string_function_series(0, 0, 12).unwrap();
        assert_eq!(c00.series.coeffs(), &[1, 0, 1, 0, 3, 0, 5, 0, 10, 0, 16, 0, 28]);
        let c02 = string_function_series(0, 2, 12).unwrap();
        assert_eq!(c02.series.coeffs(), &[0, 1, 0, 2, 0, 4, 0, 7, 0, 13, 0, 21, 0]);
        let c11 = string_function_series(1, 1, 12).unwrap();
        assert_eq!(c11.x_offset, 0.5);
        assert_eq!(c11.series.coeffs(), &[1, 0, 2, 0, 4, 0, 8, 0, 14, 0, 24, 0, 40]);
        assert_eq!(string_function_series(2, 2, 12).unwrap().series, c00.series);
        assert!(string_function_series(0, 1, 12).unwrap().series.valuation().is_none());
    }

    #[test]
    fn face_series_is_string_function() {
        for i in 0..3u8 {
            for dk in [-4i64, -2, 0, 2, 4] {
                let c = compare_face_with_string(i, 3, 3 + i as i64 + dk, 12).unwrap();
                assert!(c.matches, "{c:?}");
            }
        }
    }

    #[test]
    fn sum_rule_point() {
        let p = ModelParams::from_epsilon(1.0, 5.0).unwrap();
        let rep = check_chi_sum_rule(0, 2, 20, &p).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn traces() {
        let p = ModelParams::default();
        for i in 0..3 {
            assert!(boson_fermion_trace_check(i, 2, 2 + i as i64, 12, &p).unwrap().pass);
        }
    }
}
