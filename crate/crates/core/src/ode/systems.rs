//! Right-hand sides of the three limiting systems.
//!
//! Each system comes in two forms. The `rhs_*` functions take the natural
//! coordinates and are used for checks against the strategies' expected
//! one-round changes. The [`OdeSystem`] structs integrate in complement
//! coordinates (`w = 1 - x`) so that the approach to `x = 1` keeps full
//! relative precision.

use super::integrator::OdeSystem;
use crate::error::{Error, Result};
use crate::strategies::pow_diff;

fn clip(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// `1 - (1 - a)^k` for `a` in [0, 1], accurate for small `a`.
fn one_minus_pow_complement(a: f64, k: u32) -> f64 {
    let a = clip(a);
    if a >= 1.0 {
        return 1.0;
    }
    -(k as f64 * (-a).ln_1p()).exp_m1()
}

/// Drift of `(y_q, ..., y_{l-1})` during phase `q` of the minimum-degree
/// system.
pub fn rhs_min_degree(q: u32, k: u32, l: u32, y: &[f64]) -> Result<Vec<f64>> {
    if q >= l || y.len() != (l - q) as usize {
        return Err(Error::InvalidConfig(format!("phase {q} of l = {l} needs {} coordinates, got {}", l.saturating_sub(q), y.len())));
    }
    let mut out = vec![0.0; y.len()];
    min_degree_drift(k, y, &mut out);
    Ok(out)
}

fn min_degree_drift(k: u32, y: &[f64], out: &mut [f64]) {
    let ki = k as i32;
    // pw[j] = (1 - sum_{a < j} y_a)^k with clipped bases
    let mut partial = 0.0;
    let mut prev_pow = 1.0;
    let mut prev_term = 0.0;
    for (j, &yj) in y.iter().enumerate() {
        partial += yj;
        let pow = clip(1.0 - partial).powi(ki);
        let term = prev_pow - pow;
        let mut d = -term;
        if j == 0 {
            d -= 1.0;
        } else {
            d += prev_term;
        }
        if j == 1 {
            d += 1.0;
        }
        out[j] = d;
        prev_pow = pow;
        prev_term = term;
    }
}

/// `(x', r')` of the matching system.
pub fn rhs_pm(k: u32, x: f64, r: f64) -> Result<(f64, f64)> {
    if !(x < 1.0) || !x.is_finite() || !r.is_finite() {
        return Err(Error::InvalidCounts(format!("matching system needs x < 1, got x = {x}")));
    }
    let ki = k as i32;
    let xr = clip(x - r);
    let g = 1.0 - xr.powi(ki);
    let dx = 2.0 * g;
    let dr = -2.0 * g * r / (1.0 - x) - clip(x).powi(ki) + 2.0 * xr.powi(ki) - clip(r).powi(ki);
    Ok((dx, dr))
}

/// `(x', y', r')` of the Hamilton-path system.
pub fn rhs_ham(k: u32, x: f64, y: f64, r: f64) -> Result<(f64, f64, f64)> {
    if !(x < 1.0) || !x.is_finite() || !y.is_finite() || !r.is_finite() {
        return Err(Error::InvalidCounts(format!("Hamilton system needs x < 1, got x = {x}")));
    }
    let ki = k as i32;
    let p = |v: f64| clip(v).powi(ki);
    let a = p(x + y) - p(x);
    let b = p(x) - p(x - 2.0 * r);
    let c = p(x - 2.0 * r) - p(3.0 * r);
    let w = 1.0 - x;
    let dx = 2.0 * a + (1.0 + y / w) * b;
    let dy = 2.0 * (1.0 - p(x + y)) - 2.0 * a - 2.0 * b * y / w;
    let dr = -2.0 * r / w * a - ((w + y) * r / (w * w) + 1.0) * b + c;
    Ok((dx, dy, dr))
}

/// Minimum-degree system in phase `q`; the state is `(y_q, ..., y_{l-1})`.
#[derive(Debug, Clone, Copy)]
pub struct MinDegreeSystem {
    pub q: u32,
    pub k: u32,
    pub l: u32,
}

impl OdeSystem for MinDegreeSystem {
    fn dim(&self) -> usize {
        (self.l - self.q) as usize
    }

    fn rhs(&self, _s: f64, y: &[f64], dy: &mut [f64]) {
        min_degree_drift(self.k, y, dy);
    }
}

/// Matching system in `(w, r)` with `w = 1 - x`.
#[derive(Debug, Clone, Copy)]
pub struct PmSystem {
    pub k: u32,
}

impl OdeSystem for PmSystem {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, _s: f64, v: &[f64], dv: &mut [f64]) {
        let (w, r) = (v[0], v[1]);
        if !(w > 0.0) {
            dv.fill(f64::NAN);
            return;
        }
        let k = self.k;
        let x = 1.0 - w;
        // g = 1 - (x - r)^k, with x - r = 1 - (w + r)
        let g = one_minus_pow_complement(w + r, k);
        let xr = clip(x - r);
        // x^k - (x - r)^k and (x - r)^k - r^k
        let pb = pow_diff(clip(x), xr, k);
        let pc = (1.0 - g) - clip(r).powi(k as i32);
        dv[0] = -2.0 * g;
        dv[1] = -2.0 * g * r / w - pb + pc;
    }
}

/// Hamilton-path system in `(w, y, r)` with `w = 1 - x`.
#[derive(Debug, Clone, Copy)]
pub struct HamSystem {
    pub k: u32,
}

impl OdeSystem for HamSystem {
    fn dim(&self) -> usize {
        3
    }

    fn rhs(&self, _s: f64, v: &[f64], dv: &mut [f64]) {
        let (w, y, r) = (v[0], v[1], v[2]);
        if !(w > 0.0) {
            dv.fill(f64::NAN);
            return;
        }
        let k = self.k;
        let ki = k as i32;
        let x = 1.0 - w;
        // 1 - (x + y)^k with x + y = 1 - (w - y)
        let not_a = one_minus_pow_complement(w - y, k);
        let a = pow_diff(clip(x + y), clip(x), k);
        let b = pow_diff(clip(x), clip(x - 2.0 * r), k);
        let c = clip(x - 2.0 * r).powi(ki) - clip(3.0 * r).powi(ki);
        let dx = 2.0 * a + (1.0 + y / w) * b;
        dv[0] = -dx;
        dv[1] = 2.0 * not_a - 2.0 * a - 2.0 * b * y / w;
        dv[2] = -2.0 * r / w * a - ((w + y) * r / (w * w) + 1.0) * b + c;
    }
}
