//! wasm-bindgen surface for the static demo page in `www/`.
//!
//! Each export wraps a plain Rust function so the logic is testable on the
//! host without a JS runtime.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use wasm_bindgen::prelude::*;

use fusion21::elliptic::{bracket, BracketKind, BracketShape};
use fusion21::spectra::{character_product, vertex_partition_series};
use fusion21::vertex_weights::{r21v, r8v};
use fusion21::ModelParams;

fn params(x: f64, r: f64) -> Result<ModelParams, String> {
    ModelParams::from_x(x, r).map_err(|e| e.to_string())
}

fn grid(u_min: f64, u_max: f64, n: usize) -> Result<Vec<f64>, String> {
    if n < 2 || !(u_max > u_min) {
        return Err("need n >= 2 and u_max > u_min".into());
    }
    Ok((0..n).map(|i| u_min + (u_max - u_min) * i as f64 / (n - 1) as f64).collect())
}

/// Interleaved `[u0, v0, u1, v1, ...]` samples of a bracket.
pub fn bracket_curve_impl(
    shape: &str,
    shift: u8,
    x: f64,
    r: f64,
    u_min: f64,
    u_max: f64,
    n: usize,
) -> Result<Vec<f64>, String> {
    let p = params(x, r)?;
    let shape = match shape {
        "square" => BracketShape::Square,
        "curly" => BracketShape::Curly,
        "dsquare" => BracketShape::DSquare,
        "dcurly" => BracketShape::DCurly,
        other => return Err(format!("unknown bracket shape '{other}'")),
    };
    let kind = BracketKind::new(shape, shift).map_err(|e| e.to_string())?;
    Ok(grid(u_min, u_max, n)?.into_iter().flat_map(|u| [u, bracket(u, kind, &p)]).collect())
}

/// Interleaved samples of one R-matrix entry `(in1, in2, out1, out2)`;
/// `spin` is 1 for the spin-1/2 matrix and 2 for the fused one. Points on a
/// pole are skipped.
pub fn r_entry_curve_impl(
    spin: u8,
    idx: [i32; 4],
    x: f64,
    r: f64,
    u_min: f64,
    u_max: f64,
    n: usize,
) -> Result<Vec<f64>, String> {
    let p = params(x, r)?;
    let eval = |u: f64| match spin {
        1 => r8v(u, &p).map(|t| t.get(&idx)),
        _ => r21v(u, &p).map(|t| t.get(&idx)),
    };
    if spin != 1 && spin != 2 {
        return Err(format!("spin must be 1 or 2, got {spin}"));
    }
    Ok(grid(u_min, u_max, n)?
        .into_iter()
        .filter_map(|u| eval(u).ok().filter(|v| v.is_finite()).map(|v| [u, v]))
        .flatten()
        .collect())
}

/// CSV `degree,paths,product,match` for sector i.
pub fn characters_csv_impl(i: u8, e_max: usize) -> Result<String, String> {
    if e_max > 40 {
        return Err("e_max above 40 is too slow for the page".into());
    }
    let e = vertex_partition_series(i, e_max).map_err(|e| e.to_string())?;
    let p = character_product(i, e_max).map_err(|e| e.to_string())?;
    let mut s = String::from("degree,paths,product,match\n");
    for d in 0..=e_max {
        s.push_str(&format!("{d},{},{},{}\n", e.coeff(d), p.coeff(d), e.coeff(d) == p.coeff(d)));
    }
    Ok(s)
}

#[wasm_bindgen]
pub fn bracket_curve(
    shape: &str,
    shift: u8,
    x: f64,
    r: f64,
    u_min: f64,
    u_max: f64,
    n: usize,
) -> Result<Vec<f64>, JsValue> {
    bracket_curve_impl(shape, shift, x, r, u_min, u_max, n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn r_entry_curve(
    spin: u8,
    in1: i32,
    in2: i32,
    out1: i32,
    out2: i32,
    x: f64,
    r: f64,
    u_min: f64,
    u_max: f64,
    n: usize,
) -> Result<Vec<f64>, JsValue> {
    r_entry_curve_impl(spin, [in1, in2, out1, out2], x, r, u_min, u_max, n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn characters_csv(i: u8, e_max: usize) -> Result<String, JsValue> {
    characters_csv_impl(i, e_max).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_vanishes_at_origin() {
        let c = bracket_curve_impl("square", 0, 0.3, 4.5, -1.0, 1.0, 3).unwrap();
        assert_eq!(c.len(), 6);
        assert!(c[3].abs() < 1e-15);
        assert!(bracket_curve_impl("round", 0, 0.3, 4.5, 0.0, 1.0, 3).is_err());
    }

    #[test]
    fn r_entry_at_zero_is_permutation() {
        let c = r_entry_curve_impl(2, [1, 0, 0, 1], 0.3, 4.5, 0.0, 0.5, 2).unwrap();
        assert!((c[1] - 1.0).abs() < 1e-12);
        assert!(r_entry_curve_impl(3, [1, 0, 0, 1], 0.3, 4.5, 0.0, 0.5, 2).is_err());
    }

    #[test]
    fn characters_match() {
        let s = characters_csv_impl(0, 8).unwrap();
        assert_eq!(s.lines().count(), 10);
        assert!(s.lines().skip(1).all(|l| l.ends_with("true")));
    }
}
