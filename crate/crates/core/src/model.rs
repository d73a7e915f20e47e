//! Contracts and the local-volatility model.
//!
//! The model drives a foreign forward LIBOR rate `L` and an FX forward rate
//! `X` with their own one-dimensional Brownian motions, correlated with
//! coefficient `rho`. In log variables `y = ln L`, `z = ln X` the system reads
//!
//! ```text
//! dY = alpha(Y, Z) dt + lambda(Y) dW_L      alpha(y, z) = -(lambda(y)^2 / 2 + rho lambda(y) sigma(z))
//! dZ = beta(Z) dt + sigma(Z) dW_X           beta(z)     = -sigma(z)^2 / 2
//! d<W_L, W_X> = rho dt
//! ```
//!
//! The cross term `rho lambda sigma` in `alpha` is the quanto drift
//! adjustment; it vanishes at `rho = 0`.
//!
//! Volatility functions are time-homogeneous functions of the current level
//! with two derivatives. The shipped specialization is the hyperbolic family
//!
//! ```text
//! lambda(y) = nu [ (1 - beta + beta^2)/beta
//!                  + (beta - 1)/beta * (sqrt(y^2 + beta^2 (1-y)^2) - beta) / y ]
//! ```
//!
//! with level `y > 0`, which is constant (log-normal) at `beta = 1`, produces
//! a downward skew for `beta < 1`, and keeps zero unattainable.

use crate::error::{QuantoError, Result};

/// A European quanto caplet: call on the foreign LIBOR rate fixed at
/// `expiry`, paid in domestic currency at the end of the accrual period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantoInstrument {
    /// Option expiry in years (the rate fixing date).
    pub expiry: f64,
    /// Year fraction of the accrual period paid at the payment date.
    pub accrual: f64,
    /// Strike rate.
    pub strike: f64,
    /// Domestic discount factor to the payment date.
    pub discount: f64,
}

impl QuantoInstrument {
    pub fn new(expiry: f64, accrual: f64, strike: f64, discount: f64) -> Result<Self> {
        if !(expiry > 0.0) {
            return Err(QuantoError::param("expiry", format!("must be > 0, got {expiry}")));
        }
        if !(accrual > 0.0) {
            return Err(QuantoError::param("accrual", format!("must be > 0, got {accrual}")));
        }
        if !(strike > 0.0) {
            return Err(QuantoError::param("strike", format!("must be > 0, got {strike}")));
        }
        if !(discount > 0.0 && discount <= 1.5) {
            return Err(QuantoError::param(
                "discount",
                format!("must be in (0, 1.5], got {discount}"),
            ));
        }
        Ok(Self {
            expiry,
            accrual,
            strike,
            discount,
        })
    }

    /// Undiscounted payoffs are scaled by `accrual * discount`.
    pub fn payout_scale(&self) -> f64 {
        self.accrual * self.discount
    }

    /// Log-strike `ln K`.
    pub fn log_strike(&self) -> f64 {
        self.strike.ln()
    }
}

/// Parameters of the hyperbolic local-volatility function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicVolParams {
    /// Volatility level; the function equals `nu` at level 1 and for `beta = 1`.
    pub nu: f64,
    /// Skew parameter in (0, 1]; `beta = 1` is the log-normal limit.
    pub beta: f64,
}

impl HyperbolicVolParams {
    pub fn new(nu: f64, beta: f64) -> Result<Self> {
        if !(nu > 0.0) {
            return Err(QuantoError::param("nu", format!("must be > 0, got {nu}")));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(QuantoError::param("beta", format!("must be in (0, 1], got {beta}")));
        }
        Ok(Self { nu, beta })
    }

    /// Volatility at a positive level.
    pub fn vol(&self, level: f64) -> Result<f64> {
        hyperbolic_vol(level, self)
    }

    /// Volatility and its first two level-space derivatives.
    ///
    /// With `R(L) = sqrt((1 + b^2) L^2 - 2 b^2 L + b^2)` the bracket term is
    /// `f(L) = (R - b) / L` and
    ///
    /// ```text
    /// f'  = R'/L - (R - b)/L^2            R'  = ((1 + b^2) L - b^2) / R
    /// f'' = b^2/(R^3 L) - 2 R'/L^2 + 2 (R - b)/L^3
    /// ```
    ///
    /// where `R'' = b^2 / R^3` follows from expanding the discriminant.
    pub fn vol_with_level_derivs(&self, level: f64) -> Result<(f64, f64, f64)> {
        if !(level > 0.0) {
            return Err(QuantoError::NonPositiveLevel(level));
        }
        let b = self.beta;
        if b == 1.0 {
            // Log-normal limit: constant vol, derivatives exactly zero.
            return Ok((self.nu, 0.0, 0.0));
        }
        let c0 = (1.0 - b + b * b) / b;
        let c1 = (b - 1.0) / b;
        let r = ((1.0 + b * b) * level * level - 2.0 * b * b * level + b * b).sqrt();
        let rp = ((1.0 + b * b) * level - b * b) / r;
        let f = (r - b) / level;
        let fp = rp / level - f / level;
        let fpp = b * b / (r * r * r * level) - 2.0 * rp / (level * level)
            + 2.0 * f / (level * level);
        Ok((
            self.nu * (c0 + c1 * f),
            self.nu * c1 * fp,
            self.nu * c1 * fpp,
        ))
    }
}

/// Hyperbolic local volatility at a positive level.
pub fn hyperbolic_vol(level: f64, params: &HyperbolicVolParams) -> Result<f64> {
    if !(level > 0.0) {
        return Err(QuantoError::NonPositiveLevel(level));
    }
    let b = params.beta;
    if b == 1.0 {
        return Ok(params.nu);
    }
    let c0 = (1.0 - b + b * b) / b;
    let c1 = (b - 1.0) / b;
    let r = ((1.0 + b * b) * level * level - 2.0 * b * b * level + b * b).sqrt();
    Ok(params.nu * (c0 + c1 * (r - b) / level))
}

/// Volatility and its first two derivatives in log space.
///
/// With `L = e^y` the chain rule gives `d_y = L d_L` and
/// `d_yy = L^2 d_LL + L d_L`. At `beta = 1` the derivatives are exactly zero.
pub fn log_vol_derivs(log_level: f64, params: &HyperbolicVolParams) -> Result<(f64, f64, f64)> {
    if !log_level.is_finite() {
        return Err(QuantoError::param(
            "log_level",
            format!("must be finite, got {log_level}"),
        ));
    }
    if params.beta == 1.0 {
        return Ok((params.nu, 0.0, 0.0));
    }
    let level = log_level.exp();
    let (v, dv, d2v) = params.vol_with_level_derivs(level)?;
    Ok((v, dv * level, d2v * level * level + dv * level))
}

/// Market state: initial levels, correlation and the two vol functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantoMarket {
    /// Initial forward LIBOR rate.
    pub l0: f64,
    /// Initial FX forward rate.
    pub x0: f64,
    /// Correlation between the LIBOR and FX drivers, in [-1, 1].
    pub rho: f64,
    /// LIBOR local-vol parameters (the `lambda` function).
    pub libor_vol: HyperbolicVolParams,
    /// FX local-vol parameters (the `sigma` function).
    pub fx_vol: HyperbolicVolParams,
}

impl QuantoMarket {
    pub fn new(
        l0: f64,
        x0: f64,
        rho: f64,
        libor_vol: HyperbolicVolParams,
        fx_vol: HyperbolicVolParams,
    ) -> Result<Self> {
        if !(l0 > 0.0 && l0.ln().is_finite()) {
            return Err(QuantoError::param("l0", format!("must be > 0 and finite, got {l0}")));
        }
        if !(x0 > 0.0 && x0.ln().is_finite()) {
            return Err(QuantoError::param("x0", format!("must be > 0 and finite, got {x0}")));
        }
        if !(-1.0..=1.0).contains(&rho) {
            return Err(QuantoError::param("rho", format!("must be in [-1, 1], got {rho}")));
        }
        Ok(Self {
            l0,
            x0,
            rho,
            libor_vol,
            fx_vol,
        })
    }

    /// Initial log-rate `y0 = ln L0`.
    pub fn y0(&self) -> f64 {
        self.l0.ln()
    }

    /// Initial log-FX `z0 = ln X0`.
    pub fn z0(&self) -> f64 {
        self.x0.ln()
    }

    /// Same market with the correlation replaced.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.l0, self.x0, rho, self.libor_vol, self.fx_vol)
    }

    /// Market for a plain vanilla on the FX forward under its own measure:
    /// the FX vol takes the driving role and the correlation drops out.
    pub fn fx_as_underlying(&self) -> Result<Self> {
        Self::new(self.x0, 1.0, 0.0, self.fx_vol, self.libor_vol)
    }
}

/// Vols and their log-space derivatives frozen at the initial point
/// `(y0, z0)`; every expansion weight is a product of these six numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogCoeffBundle {
    pub lam: f64,
    pub lam_y: f64,
    pub lam_yy: f64,
    pub sig: f64,
    pub sig_z: f64,
    pub sig_zz: f64,
}

impl LogCoeffBundle {
    /// Evaluate both vol functions at the market's initial log-levels.
    pub fn at_initial(market: &QuantoMarket) -> Result<Self> {
        let (lam, lam_y, lam_yy) = log_vol_derivs(market.y0(), &market.libor_vol)?;
        let (sig, sig_z, sig_zz) = log_vol_derivs(market.z0(), &market.fx_vol)?;
        Ok(Self {
            lam,
            lam_y,
            lam_yy,
            sig,
            sig_z,
            sig_zz,
        })
    }
}

/// Log-LIBOR drift `alpha(y, z) = -(lambda(y)^2/2 + rho lambda(y) sigma(z))`.
pub fn quanto_drift(market: &QuantoMarket, y: f64, z: f64) -> Result<f64> {
    let lam = market.libor_vol.vol(y.exp())?;
    let sig = market.fx_vol.vol(z.exp())?;
    Ok(-(0.5 * lam * lam + market.rho * lam * sig))
}

/// Log-FX drift `beta(z) = -sigma(z)^2/2`, the companion of [`quanto_drift`].
pub fn fx_log_drift(market: &QuantoMarket, z: f64) -> Result<f64> {
    let sig = market.fx_vol.vol(z.exp())?;
    Ok(-0.5 * sig * sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn base_libor() -> HyperbolicVolParams {
        HyperbolicVolParams::new(0.08, 0.3).unwrap()
    }

    fn base_fx() -> HyperbolicVolParams {
        HyperbolicVolParams::new(0.15, 0.5).unwrap()
    }

    pub(crate) fn base_market(rho: f64) -> QuantoMarket {
        QuantoMarket::new(0.06, 1.0, rho, base_libor(), base_fx()).unwrap()
    }

    #[test]
    fn vol_is_constant_at_beta_one() {
        let p = HyperbolicVolParams::new(0.08, 1.0).unwrap();
        assert_eq!(hyperbolic_vol(0.06, &p).unwrap(), 0.08);
        assert_eq!(hyperbolic_vol(3.0, &p).unwrap(), 0.08);
    }

    #[test]
    fn vol_at_base_level() {
        // Frozen from a direct high-precision evaluation of the vol formula.
        let v = hyperbolic_vol(0.06, &base_libor()).unwrap();
        assert_relative_eq!(v, 0.24702830467053074, max_relative = 1e-14);
    }

    #[test]
    fn vol_at_unit_level_cancels_to_nu() {
        let v = hyperbolic_vol(1.0, &HyperbolicVolParams::new(0.15, 0.5).unwrap()).unwrap();
        assert_relative_eq!(v, 0.15, max_relative = 1e-15);
    }

    #[test]
    fn non_positive_level_rejected() {
        assert!(matches!(
            hyperbolic_vol(0.0, &base_libor()),
            Err(QuantoError::NonPositiveLevel(_))
        ));
        assert!(hyperbolic_vol(-1.0, &base_libor()).is_err());
    }

    #[test]
    fn bad_params_rejected() {
        assert!(HyperbolicVolParams::new(0.0, 0.5).is_err());
        assert!(HyperbolicVolParams::new(0.1, 0.0).is_err());
        assert!(HyperbolicVolParams::new(0.1, 1.2).is_err());
    }

    #[test]
    fn log_derivs_zero_at_beta_one() {
        let p = HyperbolicVolParams::new(0.08, 1.0).unwrap();
        let (v, d1, d2) = log_vol_derivs(0.06f64.ln(), &p).unwrap();
        assert_eq!(v, 0.08);
        // Bitwise zero: the analytic branch short-circuits.
        assert_eq!(d1.to_bits(), 0.0f64.to_bits());
        assert_eq!(d2.to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn log_derivs_at_base_point() {
        // Frozen from a high-precision finite-difference oracle of the vol
        // formula composed with exp.
        let (v, d1, d2) = log_vol_derivs(0.06f64.ln(), &base_libor()).unwrap();
        assert_relative_eq!(v, 0.24702830467053074, max_relative = 1e-13);
        assert_relative_eq!(d1, -0.02043446628082023, max_relative = 1e-12);
        assert_relative_eq!(d2, -0.02162568995576156, max_relative = 1e-12);

        let (s, s1, s2) = log_vol_derivs(0.0, &base_fx()).unwrap();
        assert_relative_eq!(s, 0.15, max_relative = 1e-14);
        assert_relative_eq!(s1, -0.075, max_relative = 1e-12);
        assert_relative_eq!(s2, 0.0375, max_relative = 1e-12);
    }

    /// 5-point central finite differences of the vol in log space.
    fn fd_log_derivs(y: f64, p: &HyperbolicVolParams, h: f64) -> (f64, f64) {
        let f = |y: f64| hyperbolic_vol(y.exp(), p).unwrap();
        let d1 = (-f(y + 2.0 * h) + 8.0 * f(y + h) - 8.0 * f(y - h) + f(y - 2.0 * h)) / (12.0 * h);
        let d2 = (-f(y + 2.0 * h) + 16.0 * f(y + h) - 30.0 * f(y) + 16.0 * f(y - h)
            - f(y - 2.0 * h))
            / (12.0 * h * h);
        (d1, d2)
    }

    #[test]
    fn chain_rule_matches_finite_differences_on_grid() {
        for p in [base_libor(), base_fx(), HyperbolicVolParams::new(0.2, 0.85).unwrap()] {
            for i in 0..50 {
                // 50 log-levels spanning level 1e-2 .. 10.
                let y = -4.6 + 6.9 * (i as f64) / 49.0;
                let (_, d1, d2) = log_vol_derivs(y, &p).unwrap();
                let (fd1, fd2) = fd_log_derivs(y, &p, 1e-5);
                assert_relative_eq!(d1, fd1, max_relative = 1e-6);
                assert_relative_eq!(d2, fd2, max_relative = 1e-6, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn nu_is_a_multiplicative_prefactor() {
        let y = 0.06f64.ln();
        let unit = HyperbolicVolParams::new(1.0, 0.3).unwrap();
        let (_, d1_unit, _) = log_vol_derivs(y, &unit).unwrap();
        let (_, d1, _) = log_vol_derivs(y, &base_libor()).unwrap();
        assert_relative_eq!(d1, 0.08 * d1_unit, max_relative = 1e-15);
    }

    #[test]
    fn quanto_drift_values() {
        // rho = 0: the quanto adjustment vanishes, only -lambda^2/2 remains.
        let m = QuantoMarket::new(
            1.0,
            1.0,
            0.0,
            HyperbolicVolParams::new(0.2, 1.0).unwrap(),
            HyperbolicVolParams::new(0.15, 1.0).unwrap(),
        )
        .unwrap();
        assert_relative_eq!(quanto_drift(&m, 0.0, 0.0).unwrap(), -0.02, max_relative = 1e-15);

        // rho = 1 adds the full cross term.
        let m = m.with_rho(1.0).unwrap();
        assert_relative_eq!(quanto_drift(&m, 0.0, 0.0).unwrap(), -0.05, max_relative = 1e-15);

        // Base parameters, frozen from the independent oracle composition.
        let m = base_market(-0.5);
        let a = quanto_drift(&m, m.y0(), m.z0()).unwrap();
        assert_relative_eq!(a, -0.011984368803908475, max_relative = 1e-13);
        assert_relative_eq!(
            fx_log_drift(&m, m.z0()).unwrap(),
            -0.01125,
            max_relative = 1e-14
        );
    }

    #[test]
    fn instrument_validation() {
        assert!(QuantoInstrument::new(1.0, 1.0, 0.06, 1.0).is_ok());
        assert!(QuantoInstrument::new(0.0, 1.0, 0.06, 1.0).is_err());
        assert!(QuantoInstrument::new(1.0, -0.5, 0.06, 1.0).is_err());
        assert!(QuantoInstrument::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(QuantoInstrument::new(1.0, 1.0, 0.06, 1.6).is_err());
    }

    #[test]
    fn market_validation() {
        assert!(QuantoMarket::new(0.06, 1.0, -1.5, base_libor(), base_fx()).is_err());
        assert!(QuantoMarket::new(0.0, 1.0, 0.0, base_libor(), base_fx()).is_err());
        assert!(QuantoMarket::new(0.06, 0.0, 0.0, base_libor(), base_fx()).is_err());
    }

    proptest! {
        // Positivity on (0, 10]: zero is not an attainable boundary for this family.
        #[test]
        fn vol_positive_on_grid(
            level in 1e-6f64..10.0,
            nu in 0.01f64..1.0,
            beta in 0.05f64..1.0,
        ) {
            let p = HyperbolicVolParams::new(nu, beta).unwrap();
            prop_assert!(hyperbolic_vol(level, &p).unwrap() > 0.0);
        }

        #[test]
        fn chain_rule_consistency(
            y in -4.6f64..2.3,
            beta in 0.1f64..0.999,
        ) {
            let p = HyperbolicVolParams::new(0.2, beta).unwrap();
            let (_, d1, d2) = log_vol_derivs(y, &p).unwrap();
            let (fd1, fd2) = fd_log_derivs(y, &p, 1e-5);
            prop_assert!((d1 - fd1).abs() <= 1e-6 * d1.abs().max(1e-6));
            prop_assert!((d2 - fd2).abs() <= 1e-6 * d2.abs().max(1e-3));
        }
    }
}
