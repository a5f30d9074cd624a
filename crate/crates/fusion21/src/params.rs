//! The global parameter point: nome `x = e^{-ε}`, modulus `r`, tolerances
//! and truncation orders.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub const DEFAULT_X: f64 = 0.3;
pub const DEFAULT_R: f64 = 4.5;
pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_PRODUCT_CUTOFF: usize = 60;
pub const DEFAULT_SERIES_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub epsilon: f64,
    pub x: f64,
    pub r: f64,
    pub rel_tol: f64,
    pub product_cutoff: usize,
    pub series_order: usize,
}

impl ModelParams {
    pub fn from_epsilon(epsilon: f64, r: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(domain(format!("epsilon must be positive, got {epsilon}")));
        }
        Self::build(epsilon, (-epsilon).exp(), r)
    }

    pub fn from_x(x: f64, r: f64) -> Result<Self> {
        if !(x > 0.0 && x < 1.0) {
            return Err(domain(format!("x must lie in (0,1), got {x}")));
        }
        Self::build(-x.ln(), x, r)
    }

    fn build(epsilon: f64, x: f64, r: f64) -> Result<Self> {
        if !(r > 2.0) || !r.is_finite() {
            return Err(domain(format!("r must exceed 2 (principal regime), got {r}")));
        }
        let p = ModelParams {
            epsilon,
            x,
            r,
            rel_tol: DEFAULT_REL_TOL,
            product_cutoff: DEFAULT_PRODUCT_CUTOFF,
            series_order: DEFAULT_SERIES_ORDER,
        };
        p.check_cutoff()?;
        Ok(p)
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_product_cutoff(mut self, cutoff: usize) -> Result<Self> {
        self.product_cutoff = cutoff;
        self.check_cutoff()?;
        Ok(self)
    }

    pub fn with_series_order(mut self, n: usize) -> Self {
        self.series_order = n;
        self
    }

    /// r' = r - 1
    pub fn r1(&self) -> f64 {
        self.r - 1.0
    }

    /// r'' = r - 2
    pub fn r2(&self) -> f64 {
        self.r - 2.0
    }

    /// The same point with r replaced by r - 2. Fails unless r - 2 > 2.
    pub fn shifted(&self) -> Result<Self> {
        let mut p = *self;
        p.r = self.r - 2.0;
        if !(p.r > 2.0) {
            return Err(domain(format!("shifted modulus r-2 = {} must exceed 2", p.r)));
        }
        p.check_cutoff()?;
        Ok(p)
    }

    /// Like `shifted` but only requires r - 2 > 0, enough for `[u]''` brackets.
    pub(crate) fn shifted_bracket(&self) -> Result<Self> {
        let mut p = *self;
        p.r = self.r - 2.0;
        if !(p.r > 0.0) {
            return Err(domain("r - 2 must be positive"));
        }
        Ok(p)
    }

    /// Smallest product base used anywhere is min(x^4, x^{2r''}); the dropped
    /// factor after `product_cutoff` terms must be below rel_tol/100.
    fn check_cutoff(&self) -> Result<()> {
        let e = 4.0f64.min(2.0 * self.r2());
        let tail = (self.product_cutoff as f64 * e) * self.x.ln();
        if tail > (self.rel_tol / 100.0).ln() {
            return Err(domain(format!(
                "product_cutoff {} too small for x={}, r={}",
                self.product_cutoff, self.x, self.r
            )));
        }
        Ok(())
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams::from_x(DEFAULT_X, DEFAULT_R).expect("default parameters are valid")
    }
}
