//! Smoothed slack and multiplier kernels.
//!
//! Per constraint, with parameters `mu > 0`, `rho > 0`, the smoothed slack
//! `z` and smoothed multiplier `y` are the two roots
//!
//! ```text
//! z = ( sqrt((s - rho c)^2 + 4 rho mu) - (s - rho c) ) / (2 rho)
//! y = ( sqrt((s - rho c)^2 + 4 rho mu) + (s - rho c) ) / (2 rho)
//! ```
//!
//! satisfying `rho z y = mu` and `rho (c - z) = s - rho y`. Everything here
//! is evaluated in the rho-scaled variable `t = s/rho - c` so that nothing
//! is squared at the raw penalty scale: the outer loop drives `rho` past
//! 1e17 on some problems and `(s - rho c)^2` would overflow long before the
//! quantities of interest do. The smaller of the two roots is always
//! recovered from the product identity instead of the difference of two
//! nearly equal numbers, which keeps full relative accuracy when
//! `rho mu` is tiny against `t^2`.

use crate::error::{Error, Result};
use crate::linalg::inf_norm;

/// Largest |s/rho - c| the kernel will square.
const T_OVERFLOW: f64 = 1e150;

/// Smoothing / penalty parameter pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingParams {
    pub mu: f64,
    pub rho: f64,
}

impl SmoothingParams {
    pub fn new(mu: f64, rho: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "mu must be positive and finite, got {mu}"
            )));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "rho must be positive and finite, got {rho}"
            )));
        }
        Ok(Self { mu, rho })
    }
}

/// Per-constraint smoothed slacks, multipliers and the derivative factors
/// of both.
#[derive(Debug, Clone)]
pub struct SmoothedSlacks {
    /// Smoothed slacks, strictly positive.
    pub z: Vec<f64>,
    /// Smoothed multipliers, strictly positive; `rho * y` estimates the
    /// Lagrange multiplier.
    pub y: Vec<f64>,
    /// `z + y` per component.
    pub sum_zy: Vec<f64>,
    /// `z / (z + y)` per component, in (0, 1); rounds to the closed ends
    /// once the ratio of the roots passes 1/epsilon.
    pub frac_z: Vec<f64>,
    /// `y / (z + y)` per component, complement of `frac_z`.
    pub frac_y: Vec<f64>,
}

impl SmoothedSlacks {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }
}

/// Scalar kernel. Returns `Err(t)` when `t = s/rho - c` is too large to
/// square.
pub(crate) fn zy_scalar(c: f64, s: f64, mu: f64, rho: f64) -> std::result::Result<(f64, f64), f64> {
    debug_assert!(mu >= 0.0 && rho > 0.0);
    let t = s / rho - c;
    if !t.is_finite() || t.abs() > T_OVERFLOW {
        return Err(t);
    }
    let q = 4.0 * mu / rho;
    let r = (t * t + q).sqrt();
    // The root on the same side as t is well conditioned; the opposite one
    // is recovered from z*y = q/4.
    let (z, y) = if t >= 0.0 {
        let y = (r + t) / 2.0;
        ((q / 2.0) / (r + t), y)
    } else {
        let z = (r - t) / 2.0;
        (z, (q / 2.0) / (r - t))
    };
    Ok((z, y))
}

/// Evaluates z, y and their derivative factors for all constraints at the
/// constraint values `c_val` and multiplier estimates `s`.
pub fn eval_zy(c_val: &[f64], s: &[f64], params: &SmoothingParams) -> Result<SmoothedSlacks> {
    assert_eq!(c_val.len(), s.len(), "c and s length mismatch");
    let m = c_val.len();
    let mut z = Vec::with_capacity(m);
    let mut y = Vec::with_capacity(m);
    let mut sum_zy = Vec::with_capacity(m);
    let mut frac_z = Vec::with_capacity(m);
    let mut frac_y = Vec::with_capacity(m);
    for i in 0..m {
        let (zi, yi) = zy_scalar(c_val[i], s[i], params.mu, params.rho)
            .map_err(|t| Error::SmoothingOverflow { t, index: i })?;
        let sum = zi + yi;
        z.push(zi);
        y.push(yi);
        sum_zy.push(sum);
        frac_z.push(zi / sum);
        frac_y.push(yi / sum);
    }
    Ok(SmoothedSlacks {
        z,
        y,
        sum_zy,
        frac_z,
        frac_y,
    })
}

/// Per-constraint penalty term `h_i = -mu ln z_i + (rho/2) y_i^2 -
/// s_i^2 / (2 rho)`, unscaled. Overflows at extreme `rho`; the solver path
/// uses the rho-scaled form from [`crate::auglag`] instead.
pub fn eval_h(c_val: &[f64], s: &[f64], params: &SmoothingParams) -> Result<Vec<f64>> {
    assert!(params.mu > 0.0, "eval_h requires mu > 0");
    let slacks = eval_zy(c_val, s, params)?;
    let mut h = Vec::with_capacity(slacks.len());
    for i in 0..slacks.len() {
        let hi = -params.mu * slacks.z[i].ln() + 0.5 * params.rho * slacks.y[i] * slacks.y[i]
            - s[i] * s[i] / (2.0 * params.rho);
        if !hi.is_finite() {
            return Err(Error::PenaltyOverflow { index: i });
        }
        h.push(hi);
    }
    Ok(h)
}

/// The scalar factors `z/(z+y)` and `y/(z+y)` that turn constraint
/// gradients into gradients of z and y:
///
/// ```text
/// grad_x z_i =  frac_z_i * grad c_i      grad_s z_i = -frac_z_i / rho * e_i
/// grad_x y_i = -frac_y_i * grad c_i      grad_s y_i =  frac_y_i / rho * e_i
/// ```
pub fn zy_derivative_factors(slacks: &SmoothedSlacks) -> (&[f64], &[f64]) {
    (&slacks.frac_z, &slacks.frac_y)
}

/// Infinity norm of `z(c, s) - c`, the multiplier-consistency measure the
/// outer loop gates its parameter updates on.
pub fn zc_gap_inf(c_val: &[f64], slacks: &SmoothedSlacks) -> f64 {
    let gap: Vec<f64> = slacks.z.iter().zip(c_val).map(|(z, c)| z - c).collect();
    inf_norm(&gap)
}
