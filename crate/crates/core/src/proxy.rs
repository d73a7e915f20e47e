//! Gaussian proxy: closed-form price and the Greek sequence.
//!
//! Freezing both vol functions at the initial point makes the terminal
//! log-rate Gaussian,
//!
//! ```text
//! Y_T ~ N(m0, V0),   m0 = y0 - Lambda/2 - Sigma,   V0 = Lambda,
//! Lambda = int_0^T lambda(t, y0)^2 dt,   Sigma = rho int_0^T lambda sigma dt,
//! ```
//!
//! so the caplet has the Black-type value
//!
//! ```text
//! C(y0) = e^(y0 - Sigma) Phi(d1) - K Phi(d2)
//! d1 = (y0 - k - Sigma + Lambda/2) / sqrt(Lambda),   d2 = d1 - sqrt(Lambda).
//! ```
//!
//! The expansions consume the shift Greeks
//! `g_n = d^n/d eps^n E[h(Y_T + eps)] | eps=0` with the moments held frozen;
//! for the call payoff they have the closed form
//!
//! ```text
//! g_n = e^(y0 - Sigma) [ Phi(d1)
//!       + 1_{n>=2} phi(d1) sum_{j=1}^{n-1} C(n-1, j) (-1)^(j-1) H_{j-1}(d1) / Lambda^(j/2) ]
//! ```
//!
//! where `H_j` are the probabilists' Hermite polynomials.

use crate::error::{QuantoError, Result};
use crate::math::norm_cdf;
use crate::model::{QuantoInstrument, QuantoMarket};
use crate::types::{PriceResult, PricingMethod};

/// Greeks above this order are not exposed; the third-order expansion needs
/// orders up to 6, two more are kept for diagnostics.
pub const MAX_GREEK_ORDER: usize = 8;

/// Moments of the Gaussian proxy over a given horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxyMoments {
    /// Total variance `Lambda = int lambda^2`.
    pub lambda_t: f64,
    /// Quanto covariance `Sigma = rho int lambda sigma`.
    pub sigma_t: f64,
    /// Proxy mean `m0 = y0 - Lambda/2 - Sigma`.
    pub m0: f64,
    /// Proxy variance; equals `Lambda` in this model.
    pub v0: f64,
}

impl ProxyMoments {
    /// Moments for a time-homogeneous market: `Lambda = lambda^2 T`,
    /// `Sigma = rho lambda sigma T`.
    pub fn time_homogeneous(market: &QuantoMarket, horizon: f64) -> Result<Self> {
        let lam = market.libor_vol.vol(market.l0)?;
        let sig = market.fx_vol.vol(market.x0)?;
        let lambda_t = lam * lam * horizon;
        let sigma_t = market.rho * lam * sig * horizon;
        Ok(Self::from_integrals(market.y0(), lambda_t, sigma_t))
    }

    /// Moments from already-integrated quantities, for time-dependent vols
    /// fed through the quadrature path.
    pub fn from_integrals(y0: f64, lambda_t: f64, sigma_t: f64) -> Self {
        Self {
            lambda_t,
            sigma_t,
            m0: y0 - 0.5 * lambda_t - sigma_t,
            v0: lambda_t,
        }
    }
}

/// Probabilists' Hermite polynomial `H_j(x)` via the recurrence
/// `H_{j+1} = x H_j - j H_{j-1}`.
pub fn hermite(j: usize, x: f64) -> f64 {
    match j {
        0 => 1.0,
        1 => x,
        _ => {
            let mut prev = 1.0;
            let mut cur = x;
            for m in 1..j {
                let next = x * cur - m as f64 * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Proxy expectation `E[(e^{Y_T} - K)^+]` (undiscounted, unit accrual).
pub fn proxy_expectation(y0: f64, log_strike: f64, moments: &ProxyMoments) -> f64 {
    let lam = moments.lambda_t;
    let forward = (y0 - moments.sigma_t).exp();
    let strike = log_strike.exp();
    if lam <= 0.0 {
        // Degenerate variance: intrinsic value keeps strike/rho sweeps total.
        return (forward - strike).max(0.0);
    }
    let sqrt_lam = lam.sqrt();
    let d1 = (y0 - log_strike - moments.sigma_t + 0.5 * lam) / sqrt_lam;
    let d2 = d1 - sqrt_lam;
    forward * norm_cdf(d1) - strike * norm_cdf(d2)
}

/// Closed-form proxy price of the quanto caplet.
pub fn proxy_price(instrument: &QuantoInstrument, market: &QuantoMarket) -> Result<PriceResult> {
    let moments = ProxyMoments::time_homogeneous(market, instrument.expiry)?;
    let expectation = proxy_expectation(market.y0(), instrument.log_strike(), &moments);
    Ok(PriceResult {
        price: instrument.payout_scale() * expectation,
        method: PricingMethod::Proxy,
        error_scale: None,
        ci_halfwidth: None,
    })
}

/// Shift Greek `g_n` of the call payoff, moments frozen. `g_0` is the proxy
/// expectation itself. The `(lambda_bar sqrt T)^j` denominator is computed as
/// `Lambda^(j/2)`, which also covers time-dependent vols.
pub fn greek_with_moments(
    n: usize,
    y0: f64,
    log_strike: f64,
    moments: &ProxyMoments,
) -> Result<f64> {
    if n > MAX_GREEK_ORDER {
        return Err(QuantoError::UnsupportedGreekOrder(n));
    }
    if n == 0 {
        return Ok(proxy_expectation(y0, log_strike, moments));
    }
    let lam = moments.lambda_t;
    if lam <= 0.0 {
        return Err(QuantoError::DegenerateVariance);
    }
    let sqrt_lam = lam.sqrt();
    let d1 = (y0 - log_strike - moments.sigma_t + 0.5 * lam) / sqrt_lam;
    let forward = (y0 - moments.sigma_t).exp();
    let mut bracket = norm_cdf(d1);
    if n >= 2 {
        let pdf = crate::math::norm_pdf(d1);
        let mut binom = 1.0; // C(n-1, j) built up iteratively
        let mut sum = 0.0;
        for j in 1..n {
            binom *= (n - j) as f64 / j as f64;
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            sum += binom * sign * hermite(j - 1, d1) / sqrt_lam.powi(j as i32);
        }
        bracket += pdf * sum;
    }
    Ok(forward * bracket)
}

/// Shift Greek `g_n` for an instrument/market pair.
pub fn greek_g(n: usize, instrument: &QuantoInstrument, market: &QuantoMarket) -> Result<f64> {
    let moments = ProxyMoments::time_homogeneous(market, instrument.expiry)?;
    greek_with_moments(n, market.y0(), instrument.log_strike(), &moments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HyperbolicVolParams;
    use crate::quad::GaussHermite;
    use approx::assert_relative_eq;

    fn base_market(rho: f64) -> QuantoMarket {
        QuantoMarket::new(
            0.06,
            1.0,
            rho,
            HyperbolicVolParams::new(0.08, 0.3).unwrap(),
            HyperbolicVolParams::new(0.15, 0.5).unwrap(),
        )
        .unwrap()
    }

    fn lognormal_market(rho: f64) -> QuantoMarket {
        QuantoMarket::new(
            0.06,
            1.0,
            rho,
            HyperbolicVolParams::new(0.08, 1.0).unwrap(),
            HyperbolicVolParams::new(0.15, 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn hermite_low_orders() {
        assert_eq!(hermite(0, 3.3), 1.0);
        assert_eq!(hermite(1, 3.3), 3.3);
        // H2(0) = -1, H3(2) = 8 - 6 = 2, H4(1) = 1 - 6 + 3 = -2
        assert_eq!(hermite(2, 0.0), -1.0);
        assert_eq!(hermite(3, 2.0), 2.0);
        assert_eq!(hermite(4, 1.0), -2.0);
    }

    #[test]
    fn hermite_matches_expanded_polynomials() {
        for &x in &[-2.5, -0.3, 0.0, 0.7, 1.9] {
            assert_relative_eq!(hermite(5, x), x.powi(5) - 10.0 * x.powi(3) + 15.0 * x);
            assert_relative_eq!(
                hermite(6, x),
                x.powi(6) - 15.0 * x.powi(4) + 45.0 * x * x - 15.0
            );
        }
    }

    #[test]
    fn atm_lognormal_proxy_matches_black() {
        // beta = 1, rho = 0, L0 = K = 6%, nu_L = 8%, T = 1: the undiscounted
        // Black ATM value 0.06 (Phi(0.04) - Phi(-0.04)), frozen from an
        // independent Black-formula oracle.
        let instr = QuantoInstrument::new(1.0, 1.0, 0.06, 1.0).unwrap();
        let price = proxy_price(&instr, &lognormal_market(0.0)).unwrap().price;
        assert_relative_eq!(price, 0.0019144124223396914, max_relative = 1e-13);
    }

    #[test]
    fn tiny_strike_tends_to_quanto_forward() {
        let instr = QuantoInstrument::new(2.0, 1.0, 1e-10, 1.0).unwrap();
        let market = base_market(0.4);
        let moments = ProxyMoments::time_homogeneous(&market, 2.0).unwrap();
        let price = proxy_price(&instr, &market).unwrap().price;
        assert_relative_eq!(
            price,
            (market.y0() - moments.sigma_t).exp(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn price_decreasing_in_rho() {
        let instr = QuantoInstrument::new(1.0, 1.0, 0.06, 1.0).unwrap();
        let p0 = proxy_price(&instr, &base_market(0.0)).unwrap().price;
        let p5 = proxy_price(&instr, &base_market(0.5)).unwrap().price;
        assert!(p5 < p0);
    }

    #[test]
    fn zero_variance_returns_intrinsic() {
        let moments = ProxyMoments::from_integrals(0.06f64.ln(), 0.0, 0.01);
        let itm = proxy_expectation(0.06f64.ln(), 0.03f64.ln(), &moments);
        assert_relative_eq!(itm, 0.06 * (-0.01f64).exp() - 0.03, max_relative = 1e-14);
        let otm = proxy_expectation(0.06f64.ln(), 0.09f64.ln(), &moments);
        assert_eq!(otm, 0.0);
    }

    #[test]
    fn greek_deep_itm_saturates_to_forward() {
        let market = base_market(0.2);
        let instr = QuantoInstrument::new(1.0, 1.0, 0.06 / 100.0, 1.0).unwrap();
        let g1 = greek_g(1, &instr, &market).unwrap();
        let moments = ProxyMoments::time_homogeneous(&market, 1.0).unwrap();
        assert_relative_eq!(
            g1,
            (market.y0() - moments.sigma_t).exp(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn greek_bounds() {
        let market = base_market(-0.5);
        let moments = ProxyMoments::time_homogeneous(&market, 6.0).unwrap();
        for k in [0.02, 0.06, 0.12] {
            let instr = QuantoInstrument::new(6.0, 1.0, k, 1.0).unwrap();
            let g1 = greek_g(1, &instr, &market).unwrap();
            assert!(g1 >= 0.0);
            assert!(g1 <= (market.y0() - moments.sigma_t).exp());
        }
    }

    #[test]
    fn greek_order_cap() {
        let market = base_market(0.0);
        let instr = QuantoInstrument::new(1.0, 1.0, 0.06, 1.0).unwrap();
        assert!(greek_g(8, &instr, &market).is_ok());
        assert!(matches!(
            greek_g(9, &instr, &market),
            Err(QuantoError::UnsupportedGreekOrder(9))
        ));
    }

    #[test]
    fn greeks_frozen_against_high_precision_oracle() {
        // Frozen from an independent oracle: adaptive quadrature of
        // E[(e^{Y+eps} - K)^+] against the proxy density, differentiated at
        // 40-digit precision. Base parameters, T = 1, ATM, rho = -0.5.
        let market = base_market(-0.5);
        let instr = QuantoInstrument::new(1.0, 1.0, 0.06, 1.0).unwrap();
        let expected = [
            0.0065307919854654469, // g0
            0.035369986559174555,
            0.13215397506860873,
            0.15116148584120482,
            -1.4311307957786174,
            -2.3648412228114758,
            75.240130838497678,
        ];
        for (n, want) in expected.iter().enumerate() {
            let got = greek_with_moments(
                n,
                market.y0(),
                instr.log_strike(),
                &ProxyMoments::time_homogeneous(&market, 1.0).unwrap(),
            )
            .unwrap();
            assert_relative_eq!(got, *want, max_relative = 1e-11);
        }
    }

    /// Finite-difference derivative of the Gauss-Hermite expectation, step
    /// chosen for the (low) orders exercised here.
    fn gh_fd_greek(n: usize, y0: f64, k: f64, moments: &ProxyMoments) -> f64 {
        let gh = GaussHermite::new(200);
        let strike = k.exp();
        let payoff_mean = |eps: f64| {
            gh.gaussian_expectation(moments.m0 + eps, moments.v0, |y| (y.exp() - strike).max(0.0))
        };
        let h = 1e-4 * moments.v0.sqrt().max(0.1);
        match n {
            2 => (payoff_mean(h) - 2.0 * payoff_mean(0.0) + payoff_mean(-h)) / (h * h),
            3 => {
                (payoff_mean(2.0 * h) - 2.0 * payoff_mean(h) + 2.0 * payoff_mean(-h)
                    - payoff_mean(-2.0 * h))
                    / (2.0 * h * h * h)
            }
            _ => unimplemented!(),
        }
    }

    #[test]
    fn low_order_greeks_match_quadrature_differences() {
        let market = base_market(-0.5);
        let instr = QuantoInstrument::new(1.0, 1.0, 0.06, 1.0).unwrap();
        let moments = ProxyMoments::time_homogeneous(&market, 1.0).unwrap();
        let g2 = greek_with_moments(2, market.y0(), instr.log_strike(), &moments).unwrap();
        let g3 = greek_with_moments(3, market.y0(), instr.log_strike(), &moments).unwrap();
        assert_relative_eq!(
            g2,
            gh_fd_greek(2, market.y0(), instr.log_strike(), &moments),
            max_relative = 1e-5
        );
        // Sign and value of the third shift derivative against the quadrature
        // oracle; the kink limits plain central differences to ~1e-3 here.
        assert_relative_eq!(
            g3,
            gh_fd_greek(3, market.y0(), instr.log_strike(), &moments),
            max_relative = 1e-3
        );
        assert_eq!(
            g3.signum(),
            gh_fd_greek(3, market.y0(), instr.log_strike(), &moments).signum()
        );
    }
}
