//! Second- and third-order price expansions around the Gaussian proxy.
//!
//! Both expansions write the price as the proxy expectation plus corrections
//! that are linear in the shift Greeks `g_1..g_6`, with weights given by
//! iterated time integrals of the frozen coefficients and an explicit
//! polynomial dependence on the correlation (quadratic at second order,
//! quartic at third order):
//!
//! ```text
//! order 2:  E[h(Y)] ~ E[h(Y0)]
//!           + w(l2, ly*l) (g1/2 - 3 g2/2 + g3)
//!           + rho   [ g1 (w(ls, ly*l) + (w(l2, ly*s) + w(s2, l*sz)) / 2)
//!                     - g2 (w(ls, ly*l) + w(l2, ly*s)) ]
//!           + rho^2 [ g1 w(ls, ly*s) - g2 w(ls, l*sz) ]
//!
//! order 3:  E[h(Y)] ~ E[h(Y0)] + sum_j gamma0_j g_j + sum_i rho^i sum_j gamma_ij g_j
//! ```
//!
//! The third-order `gamma` coefficients are linear combinations of the
//! two/three/four-layer weights tabulated in [`tables`]. All coefficients are
//! frozen at the initial point, so for the time-homogeneous model every
//! weight reduces to a product times `T^n / n!`.
//!
//! Each expansion also reports an error scale: the theoretical bound shape
//! with its generic constant set to one,
//!
//! ```text
//! order 2:  ||h'|| M0^3 M1 T^(3/2) / (lambda_inf (1 - rho^2))
//! order 3:  ||h'|| M0^5 M1 T^2     / (lambda_inf (1 - rho^2))^2
//! ```
//!
//! a scaling diagnostic rather than a certified bound.

pub mod tables;

use crate::error::{QuantoError, Result};
use crate::model::{log_vol_derivs, LogCoeffBundle, QuantoInstrument, QuantoMarket};
use crate::omega::omega_const;
use crate::proxy::{greek_with_moments, proxy_expectation, ProxyMoments};
use crate::quad::GaussHermite;
use crate::types::{PriceResult, PricingMethod};
use tables::{WeightRow, A_ROWS, B_ROWS, C_ROWS};

/// Expansion order selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionOrder {
    Second,
    Third,
}

/// Magnitude of the expansion's theoretical error bound with the generic
/// constant set to 1, plus the ingredients it was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorScale {
    /// 2 or 3.
    pub order: u8,
    pub scale: f64,
    pub m0: f64,
    pub m1: f64,
    pub lambda_inf: f64,
    pub rho: f64,
    pub horizon: f64,
}

/// All table weights over a horizon, with the assembled `gamma` vectors.
#[derive(Debug, Clone)]
pub struct ExpansionCoefficients {
    a: [f64; 11],
    b: [f64; 42],
    /// 1-based storage; slot 13 stays NaN because the source table has no
    /// row 13 (any accidental use would poison the result loudly).
    c: [f64; 88],
    /// Correlation-free Greek weights `gamma0_1..gamma0_6`.
    pub gamma0: [f64; 6],
    /// Greek weights of the `rho^i` terms, `i = 1..4`; entries absent from
    /// the assemblies are zero.
    pub gamma_rho: [[f64; 6]; 4],
    pub horizon: f64,
}

fn eval_row(row: &WeightRow, bundle: &LogCoeffBundle, horizon: f64) -> f64 {
    let factors: Vec<f64> = row.factors.iter().map(|f| f.eval(bundle)).collect();
    omega_const(&factors, horizon).expect("table rows have arity 2..=4")
}

impl ExpansionCoefficients {
    /// Two-layer weight `A_i`, 1-based.
    pub fn a(&self, i: usize) -> f64 {
        self.a[i - 1]
    }

    /// Three-layer weight `B_i`, 1-based.
    pub fn b(&self, i: usize) -> f64 {
        self.b[i - 1]
    }

    /// Four-layer weight `C_i`, 1-based; index 13 does not exist.
    pub fn c(&self, i: usize) -> f64 {
        assert!(i != 13, "C13 has no table row");
        self.c[i]
    }
}

/// Evaluate every table weight at the frozen coefficients and assemble the
/// third-order `gamma` vectors.
pub fn build_coefficients(bundle: &LogCoeffBundle, horizon: f64) -> ExpansionCoefficients {
    let mut a = [0.0; 11];
    for row in &A_ROWS {
        a[row.index - 1] = eval_row(row, bundle, horizon);
    }
    let mut b = [0.0; 42];
    for row in &B_ROWS {
        b[row.index - 1] = eval_row(row, bundle, horizon);
    }
    let mut c = [f64::NAN; 88];
    for row in &C_ROWS {
        c[row.index] = eval_row(row, bundle, horizon);
    }

    let mut coeffs = ExpansionCoefficients {
        a,
        b,
        c,
        gamma0: [0.0; 6],
        gamma_rho: [[0.0; 6]; 4],
        horizon,
    };
    coeffs.gamma0 = assemble_gamma0(&coeffs);
    coeffs.gamma_rho = [
        assemble_gamma1(&coeffs),
        assemble_gamma2(&coeffs),
        assemble_gamma3(&coeffs),
        assemble_gamma4(&coeffs),
    ];
    coeffs
}

fn assemble_gamma0(w: &ExpansionCoefficients) -> [f64; 6] {
    let (a, b, c) = (|i| w.a(i), |i| w.b(i), |i| w.c(i));
    [
        0.5 * (a(1) - a(2) - a(3)) - 0.5 * b(1) - 0.25 * (b(2) + b(3)),
        -1.5 * a(1) + 0.5 * (a(2) + a(3)) + 3.5 * b(1) + 1.25 * (b(3) + b(2)) + 0.5 * c(33)
            + 0.25 * c(32),
        a(1) - 6.0 * b(1) - 2.0 * (b(3) + b(2)) - 1.5 * c(32) - 3.0 * c(33),
        3.0 * b(1) + b(2) + b(3) + 3.25 * c(32) + 6.5 * c(33),
        -3.0 * c(32) - 6.0 * c(33),
        c(32) + 2.0 * c(33),
    ]
}

fn assemble_gamma1(w: &ExpansionCoefficients) -> [f64; 6] {
    let (a, b, c) = (|i| w.a(i), |i| w.b(i), |i| w.c(i));
    let g1 = a(7) + 0.5 * (a(8) + a(9) - a(10) - a(11))
        - b(28)
        - 0.5 * (b(26) + b(27) + b(32) + b(36) + b(35) + b(31) + b(42))
        - 0.25 * (b(33) + b(34) + b(29) + b(37));
    let g2 = -a(7) - a(8)
        + b(29)
        + 2.5 * b(27)
        + 3.0 * (b(28) + b(26))
        + 0.5 * (b(32) + b(33) + b(34))
        + 1.5 * (b(31) + b(30) + b(42) + b(35))
        + c(56)
        + c(55)
        + 0.5 * (c(50) + c(52) + c(54) + c(78))
        + 0.25 * (c(5) + c(6) + c(7) + c(51) + c(53) + c(57) + c(58) + c(77));
    let g3 = -3.0 * b(26)
        - 2.0 * (b(27) + b(28))
        - (b(29) + b(30) + b(31) + b(35) + b(42))
        - 0.75 * (c(5) + c(6) + c(7) + c(53) + c(57) + c(58))
        - 4.0 * (c(55) + c(56))
        - 2.0 * (c(50) + c(52))
        - 2.5 * (c(54) + c(78))
        - 1.25 * (c(51) + c(77));
    let g4 = 0.5 * (c(5) + c(6) + c(7) + c(57) + c(58) + c(53))
        + 2.0 * (c(51) + c(77))
        + 4.0 * (c(54) + c(78))
        + 5.0 * (c(55) + c(56))
        + 2.5 * (c(50) + c(52));
    let g5 = -c(50) - c(51) - c(52) - c(77) - 2.0 * (c(54) + c(55) + c(56) + c(78));
    [g1, g2, g3, g4, g5, 0.0]
}

fn assemble_gamma2(w: &ExpansionCoefficients) -> [f64; 6] {
    let (a, b, c) = (|i| w.a(i), |i| w.b(i), |i| w.c(i));
    let g1 = a(4) - a(5)
        - 0.5 * (b(10) + b(13) + b(14) + b(15) + b(16) + b(17))
        - b(11)
        - b(12)
        - b(18)
        - b(19);
    let g2 = -a(6)
        + 2.0 * (b(10) + b(20) + b(11))
        + b(12)
        + b(41)
        + b(16)
        + b(17)
        + b(18)
        + b(19)
        + b(38)
        + 1.5 * b(21)
        + 0.5 * (b(22) + b(23) + b(24) + b(25) + b(39))
        + c(39)
        + c(42)
        + c(43)
        + c(84)
        + c(85)
        + 2.0 * c(44)
        + 0.25 * (c(8) + c(10) + c(12) + c(14) + c(80) + c(82) + c(86) + c(87))
        + 0.5
            * (c(9)
                + c(11)
                + c(15)
                + c(16)
                + c(38)
                + c(40)
                + c(41)
                + c(45)
                + c(46)
                + c(79)
                + c(81)
                + c(83));
    let g3 = -(b(23) + b(22) + b(38) + b(39))
        - 2.0 * b(20)
        - c(80)
        - 2.0 * (c(83) + c(39))
        - 3.0 * (c(42) + c(43) + c(84) + c(85))
        - 4.0 * c(44)
        - 0.5 * (c(8) + c(9) + c(17) + c(15) + c(16) + c(12) + c(14) + c(18) + c(19))
        - 1.5 * (c(38) + c(40) + c(79) + c(81))
        - 0.5 * (c(41) + c(45) + c(46) + c(47) + c(48) + c(49) + c(86) + c(87) + c(82));
    let g4 = c(38) + c(39) + c(40) + c(79) + c(80) + c(81)
        + 2.0 * (c(44) + c(42) + c(43) + c(85) + c(83) + c(84))
        + 1.5 * (c(17) + c(19) + c(18) + c(47) + c(48) + c(49));
    let g5 = -(c(17) + c(19) + c(18) + c(49) + c(48) + c(47));
    [g1, g2, g3, g4, g5, 0.0]
}

fn assemble_gamma3(w: &ExpansionCoefficients) -> [f64; 6] {
    let (b, c) = (|i| w.b(i), |i| w.c(i));
    let g1 = -b(4) - b(8);
    let g2 = 2.0 * (b(5) + b(7) + b(40))
        + c(64)
        + c(67)
        + c(68)
        + c(34)
        + 2.0 * (c(69) + c(35))
        + 0.5 * (c(20) + c(21) + c(22) + c(63) + c(65) + c(66) + c(70) + c(71));
    let g3 = -b(6) - b(9)
        - (c(31) + c(24) + c(25) + c(34) + c(63) + c(64) + c(65) + c(36))
        - 2.0 * (c(27) + c(35) + c(69) + c(67) + c(68) + c(37))
        - 0.5 * (c(26) + c(23) + c(28) + c(29) + c(30) + c(73) + c(74) + c(75));
    let g4 = c(28) + c(26) + c(30) + c(31) + c(75) + c(74) + c(73) + c(36)
        + 2.0 * (c(27) + c(37));
    [g1, g2, g3, g4, 0.0, 0.0]
}

fn assemble_gamma4(w: &ExpansionCoefficients) -> [f64; 6] {
    let c = |i| w.c(i);
    let g2 = c(59) + 2.0 * c(60);
    let g3 = -c(4) - c(61) - 2.0 * (c(62) + c(3));
    let g4 = 2.0 * c(1) + c(2);
    [0.0, g2, g3, g4, 0.0, 0.0]
}

/// Common inputs of both expansions at a given instrument/market.
struct ExpansionContext {
    moments: ProxyMoments,
    bundle: LogCoeffBundle,
    greeks: [f64; 7], // g_0..g_6, g_0 being the proxy expectation
}

impl ExpansionContext {
    fn prepare(instrument: &QuantoInstrument, market: &QuantoMarket) -> Result<Self> {
        let moments = ProxyMoments::time_homogeneous(market, instrument.expiry)?;
        if moments.lambda_t <= 0.0 {
            return Err(QuantoError::DegenerateVariance);
        }
        let bundle = LogCoeffBundle::at_initial(market)?;
        let mut greeks = [0.0; 7];
        for (n, slot) in greeks.iter_mut().enumerate() {
            *slot = greek_with_moments(n, market.y0(), instrument.log_strike(), &moments)?;
        }
        Ok(Self {
            moments,
            bundle,
            greeks,
        })
    }
}

/// Coefficients of the expansion's explicit correlation polynomial:
/// `price / (accrual * discount) = p[0] + p[1] rho + ... + p[order] rho^order`,
/// with the proxy law (hence the Greeks) evaluated at the market's own
/// correlation and held fixed. Evaluating at `market.rho` reproduces the
/// expansion price; the polynomial view isolates the correction structure.
pub fn rho_polynomial(
    order: ExpansionOrder,
    instrument: &QuantoInstrument,
    market: &QuantoMarket,
) -> Result<Vec<f64>> {
    let ctx = ExpansionContext::prepare(instrument, market)?;
    let g = &ctx.greeks;
    match order {
        ExpansionOrder::Second => {
            let b = &ctx.bundle;
            let t = instrument.expiry;
            let w = |f1: f64, f2: f64| omega_const(&[f1, f2], t).expect("arity 2");
            let lam2 = b.lam * b.lam;
            let lamsig = b.lam * b.sig;
            let sig2 = b.sig * b.sig;
            let w_l2_lyl = w(lam2, b.lam_y * b.lam);
            let w_ls_lyl = w(lamsig, b.lam_y * b.lam);
            let w_l2_lys = w(lam2, b.lam_y * b.sig);
            let w_s2_lsz = w(sig2, b.lam * b.sig_z);
            let w_ls_lys = w(lamsig, b.lam_y * b.sig);
            let w_ls_lsz = w(lamsig, b.lam * b.sig_z);
            let p0 = g[0] + w_l2_lyl * (0.5 * g[1] - 1.5 * g[2] + g[3]);
            let p1 = g[1] * (w_ls_lyl + 0.5 * (w_l2_lys + w_s2_lsz)) - g[2] * (w_ls_lyl + w_l2_lys);
            let p2 = g[1] * w_ls_lys - g[2] * w_ls_lsz;
            Ok(vec![p0, p1, p2])
        }
        ExpansionOrder::Third => {
            let coeffs = build_coefficients(&ctx.bundle, instrument.expiry);
            let mut p0 = g[0];
            for (j, gamma) in coeffs.gamma0.iter().enumerate() {
                p0 += gamma * g[j + 1];
            }
            let mut poly = vec![p0];
            for gamma_i in &coeffs.gamma_rho {
                let mut pi = 0.0;
                for (j, gamma) in gamma_i.iter().enumerate() {
                    pi += gamma * g[j + 1];
                }
                poly.push(pi);
            }
            Ok(poly)
        }
    }
    .map(|poly| {
        debug_assert!((ctx.moments.v0 - ctx.moments.lambda_t).abs() == 0.0);
        poly
    })
}

fn eval_poly(poly: &[f64], x: f64) -> f64 {
    poly.iter().rev().fold(0.0, |acc, p| acc * x + p)
}

/// Second-order expansion price.
pub fn price_order2(instrument: &QuantoInstrument, market: &QuantoMarket) -> Result<PriceResult> {
    let poly = rho_polynomial(ExpansionOrder::Second, instrument, market)?;
    let expectation = eval_poly(&poly, market.rho);
    let scale = error_scale_for_call(ExpansionOrder::Second, instrument, market).ok();
    Ok(PriceResult {
        price: instrument.payout_scale() * expectation,
        method: PricingMethod::Order2,
        error_scale: scale,
        ci_halfwidth: None,
    })
}

/// Third-order expansion price.
pub fn price_order3(instrument: &QuantoInstrument, market: &QuantoMarket) -> Result<PriceResult> {
    let poly = rho_polynomial(ExpansionOrder::Third, instrument, market)?;
    let expectation = eval_poly(&poly, market.rho);
    let scale = error_scale_for_call(ExpansionOrder::Third, instrument, market).ok();
    Ok(PriceResult {
        price: instrument.payout_scale() * expectation,
        method: PricingMethod::Order3,
        error_scale: scale,
        ci_halfwidth: None,
    })
}

/// Sup-norm style constants estimated on a finite level grid
/// `[level0 / 10, 10 level0]` for each asset (the hyperbolic family is
/// bounded there; the grid stands in for the global sup).
struct VolBounds {
    m0: f64,
    m1: f64,
    lambda_inf: f64,
}

fn vol_bounds(market: &QuantoMarket) -> Result<VolBounds> {
    const GRID: usize = 200;
    let mut max_vol = 0.0f64;
    let mut max_deriv = 0.0f64;
    let mut lambda_inf = f64::INFINITY;
    for (params, level0, track_inf) in [
        (&market.libor_vol, market.l0, true),
        (&market.fx_vol, market.x0, false),
    ] {
        let lo = (level0 / 10.0).ln();
        let hi = (level0 * 10.0).ln();
        for i in 0..=GRID {
            let y = lo + (hi - lo) * i as f64 / GRID as f64;
            let (v, d1, d2) = log_vol_derivs(y, params)?;
            max_vol = max_vol.max(v.abs());
            max_deriv = max_deriv.max(d1.abs()).max(d2.abs());
            if track_inf {
                lambda_inf = lambda_inf.min(v.abs());
            }
        }
    }
    Ok(VolBounds {
        m0: max_vol.max(max_deriv),
        m1: max_deriv,
        lambda_inf,
    })
}

/// Error scale of the stated order for a given payoff-gradient norm.
pub fn error_scale(
    order: ExpansionOrder,
    market: &QuantoMarket,
    horizon: f64,
    payoff_norm: f64,
) -> Result<ErrorScale> {
    if market.rho.abs() >= 1.0 {
        return Err(QuantoError::DegenerateCorrelation(market.rho));
    }
    let bounds = vol_bounds(market)?;
    let rho_factor = bounds.lambda_inf * (1.0 - market.rho * market.rho);
    let (order_tag, scale) = match order {
        ExpansionOrder::Second => (
            2,
            payoff_norm * bounds.m0.powi(3) * bounds.m1 * horizon.powf(1.5) / rho_factor,
        ),
        ExpansionOrder::Third => (
            3,
            payoff_norm * bounds.m0.powi(5) * bounds.m1 * horizon * horizon
                / (rho_factor * rho_factor),
        ),
    };
    Ok(ErrorScale {
        order: order_tag,
        scale,
        m0: bounds.m0,
        m1: bounds.m1,
        lambda_inf: bounds.lambda_inf,
        rho: market.rho,
        horizon,
    })
}

/// `||h'(Y0)||_2` for the call payoff, by Gauss-Hermite quadrature over the
/// proxy Gaussian.
pub fn call_payoff_grad_norm(instrument: &QuantoInstrument, market: &QuantoMarket) -> Result<f64> {
    let moments = ProxyMoments::time_homogeneous(market, instrument.expiry)?;
    if moments.v0 <= 0.0 {
        return Err(QuantoError::DegenerateVariance);
    }
    let gh = GaussHermite::new(200);
    let k = instrument.log_strike();
    let second_moment = gh.gaussian_expectation(moments.m0, moments.v0, |y| {
        if y > k {
            (2.0 * y).exp()
        } else {
            0.0
        }
    });
    Ok(second_moment.sqrt())
}

fn error_scale_for_call(
    order: ExpansionOrder,
    instrument: &QuantoInstrument,
    market: &QuantoMarket,
) -> Result<ErrorScale> {
    let norm = call_payoff_grad_norm(instrument, market)?;
    error_scale(order, market, instrument.expiry, norm)
}
