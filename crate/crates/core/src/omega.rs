//! The iterated time-integral operator.
//!
//! For integrands `l1, ..., ln` on `[0, T]` the operator nests each layer over
//! the remaining horizon:
//!
//! ```text
//! omega(l1)_t^T        = int_t^T l1(u) du
//! omega(l1, .., ln)_t^T = int_t^T l1(r) omega(l2, .., ln)_r^T dr
//! ```
//!
//! Constant integrands collapse to `(prod l_i) * T^n / n!`; that closed form
//! ([`omega_const`]) is what the expansion weights use. The quadrature path
//! ([`omega_quad`]) handles time-dependent integrands and doubles as the
//! independent cross-check of the closed form.

use crate::error::{QuantoError, Result};
use crate::quad::GaussLegendre;

/// Deepest supported nesting; the four-layer weights are the deepest used.
pub const MAX_ARITY: usize = 4;

/// Minimum accepted quadrature resolution.
pub const MIN_NODES_PER_LEVEL: usize = 8;

/// Default quadrature resolution; the integrands here are smooth, so the
/// composite rule converges well before this.
pub const DEFAULT_NODES_PER_LEVEL: usize = 32;

/// A nested-integral specification: 1 to 4 time functions and a horizon.
pub struct OmegaSpec<'a> {
    integrands: Vec<&'a (dyn Fn(f64) -> f64 + Sync)>,
    horizon: f64,
}

impl<'a> OmegaSpec<'a> {
    pub fn new(integrands: Vec<&'a (dyn Fn(f64) -> f64 + Sync)>, horizon: f64) -> Result<Self> {
        if integrands.is_empty() || integrands.len() > MAX_ARITY {
            return Err(QuantoError::OmegaArity(integrands.len()));
        }
        if !(horizon > 0.0) {
            return Err(QuantoError::param(
                "horizon",
                format!("must be > 0, got {horizon}"),
            ));
        }
        Ok(Self {
            integrands,
            horizon,
        })
    }

    pub fn arity(&self) -> usize {
        self.integrands.len()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }
}

/// Closed form for constant integrands: `(prod coeffs) * T^n / n!`.
pub fn omega_const(coeffs: &[f64], horizon: f64) -> Result<f64> {
    if coeffs.is_empty() || coeffs.len() > MAX_ARITY {
        return Err(QuantoError::OmegaArity(coeffs.len()));
    }
    let n = coeffs.len() as u32;
    let factorial: f64 = (1..=n).map(f64::from).product();
    let product: f64 = coeffs.iter().product();
    Ok(product * horizon.powi(n as i32) / factorial)
}

/// Piecewise-cubic Hermite interpolant on a uniform grid.
///
/// The recursion below knows the antiderivative's exact slope at every grid
/// point (`F' = -l * F_next`), so no slope estimation is involved and the
/// interpolant reproduces the polynomial antiderivatives of constant
/// integrands exactly.
struct HermiteTable {
    t0: f64,
    dt: f64,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl HermiteTable {
    fn eval(&self, t: f64) -> f64 {
        let n = self.values.len() - 1;
        let pos = ((t - self.t0) / self.dt).clamp(0.0, n as f64);
        let j = (pos.floor() as usize).min(n - 1);
        let s = pos - j as f64;
        let (v0, v1) = (self.values[j], self.values[j + 1]);
        let (d0, d1) = (self.derivs[j] * self.dt, self.derivs[j + 1] * self.dt);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * v0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * v1
            + (s3 - s2) * d1
    }
}

/// Nested quadrature evaluation of `omega(l1, ..., ln)_0^T`.
///
/// Inner antiderivatives `F_k(r) = omega(l_k, .., l_n)_r^T` are tabulated on a
/// uniform grid of `nodes_per_level` segments (each segment integrated with an
/// 8-point Gauss-Legendre rule) and interpolated with cubic Hermite pieces
/// between levels; the outermost layer is integrated with the same composite
/// rule.
pub fn omega_quad(spec: &OmegaSpec<'_>, nodes_per_level: usize) -> Result<f64> {
    if nodes_per_level < MIN_NODES_PER_LEVEL {
        return Err(QuantoError::QuadratureConfig(format!(
            "nodes_per_level must be >= {MIN_NODES_PER_LEVEL}, got {nodes_per_level}"
        )));
    }
    let t_end = spec.horizon;
    let m = nodes_per_level;
    let dt = t_end / m as f64;
    let rule = GaussLegendre::new(8);

    // Innermost pseudo-level: F_{n+1} identically one.
    let mut inner: Option<HermiteTable> = None;

    for (level, integrand) in spec.integrands.iter().enumerate().rev() {
        let weighted = |s: f64| -> f64 {
            let f_next = inner.as_ref().map_or(1.0, |tab| tab.eval(s));
            integrand(s) * f_next
        };

        if level == 0 {
            let mut total = 0.0;
            for j in 0..m {
                total += rule.integrate(j as f64 * dt, (j + 1) as f64 * dt, weighted);
            }
            return Ok(total);
        }

        // Segment integrals, accumulated from the right so that
        // values[j] = int_{t_j}^{T} l * F_next.
        let mut seg = vec![0.0; m];
        for (j, slot) in seg.iter_mut().enumerate() {
            *slot = rule.integrate(j as f64 * dt, (j + 1) as f64 * dt, weighted);
        }
        let mut values = vec![0.0; m + 1];
        for j in (0..m).rev() {
            values[j] = values[j + 1] + seg[j];
        }
        let derivs: Vec<f64> = (0..=m).map(|j| -weighted(j as f64 * dt)).collect();
        inner = Some(HermiteTable {
            t0: 0.0,
            dt,
            values,
            derivs,
        });
    }
    unreachable!("OmegaSpec guarantees at least one integrand");
}
