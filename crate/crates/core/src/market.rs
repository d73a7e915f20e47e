//! Practitioner market formula and its implied-volatility inputs.
//!
//! The market quotes a quanto caplet with a Black-type formula plus a drift
//! correction built from ATM implied vols:
//!
//! ```text
//! C = accrual * discount * (e^(y0 - q T) Phi(d1) - K Phi(d2))
//! q  = rho * lam_imp(T, ATM) * sig_imp(T, ATM)
//! d1 = (y0 - k - q T + lam_imp(T, k)^2 T / 2) / (lam_imp(T, k) sqrt(T))
//! d2 = d1 - lam_imp(T, k) sqrt(T)
//! ```
//!
//! The model-implied vols come from pricing the correlation-free vanilla on
//! each asset with the third-order expansion and inverting Black; a Monte
//! Carlo source is available for cross-validation. The formula is exact by
//! construction at `rho = 0`.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::error::{QuantoError, Result};
use crate::expansion::price_order3;
use crate::math::{norm_cdf, norm_pdf};
use crate::mc::{simulate_quanto, McConfig};
use crate::model::{QuantoInstrument, QuantoMarket};
use crate::types::{PriceResult, PricingMethod};

/// Absolute price tolerance of the implied-vol inversion.
pub const IMPLIED_VOL_PRICE_TOL: f64 = 1e-12;

/// Vol search bracket.
const VOL_MIN: f64 = 1e-6;
const VOL_MAX: f64 = 5.0;
const MAX_ITERATIONS: usize = 200;

/// Undiscounted Black call value.
pub fn black_call(forward: f64, strike: f64, vol: f64, expiry: f64) -> f64 {
    let stddev = vol * expiry.sqrt();
    if stddev <= 0.0 {
        return (forward - strike).max(0.0);
    }
    let d1 = ((forward / strike).ln() + 0.5 * stddev * stddev) / stddev;
    let d2 = d1 - stddev;
    forward * norm_cdf(d1) - strike * norm_cdf(d2)
}

/// Undiscounted Black vega.
pub fn black_vega(forward: f64, strike: f64, vol: f64, expiry: f64) -> f64 {
    let stddev = vol * expiry.sqrt();
    if stddev <= 0.0 {
        return 0.0;
    }
    let d1 = ((forward / strike).ln() + 0.5 * stddev * stddev) / stddev;
    forward * norm_pdf(d1) * expiry.sqrt()
}

/// Invert the Black formula for the volatility, safeguarded Newton with
/// bisection fallback on `[1e-6, 5]`.
///
/// `disc_accrual` divides the quoted price down to the undiscounted
/// expectation before inversion.
pub fn black_implied_vol(
    price: f64,
    forward: f64,
    strike: f64,
    expiry: f64,
    disc_accrual: f64,
) -> Result<f64> {
    if !(price > 0.0) || !(forward > 0.0) || !(strike > 0.0) || !(expiry > 0.0) || !(disc_accrual > 0.0)
    {
        return Err(QuantoError::param(
            "black_implied_vol",
            format!(
                "inputs must be positive (price {price}, forward {forward}, strike {strike}, \
                 expiry {expiry}, disc_accrual {disc_accrual})"
            ),
        ));
    }
    let target = price / disc_accrual;
    let intrinsic = (forward - strike).max(0.0);
    if target <= intrinsic || target >= forward {
        return Err(QuantoError::NoImpliedVol {
            price: target,
            intrinsic,
            upper: forward,
        });
    }

    let mut lo = VOL_MIN;
    let mut hi = VOL_MAX;
    // Moneyness-free starting guess; clamped into the bracket.
    let mut vol =
        ((2.0 * std::f64::consts::PI / expiry).sqrt() * target / forward).clamp(lo, hi);
    for _ in 0..MAX_ITERATIONS {
        let diff = black_call(forward, strike, vol, expiry) - target;
        if diff.abs() <= IMPLIED_VOL_PRICE_TOL {
            return Ok(vol);
        }
        if diff > 0.0 {
            hi = vol;
        } else {
            lo = vol;
        }
        let vega = black_vega(forward, strike, vol, expiry);
        let newton = vol - diff / vega;
        vol = if vega > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < f64::EPSILON * vol.max(1.0) {
            return Ok(vol);
        }
    }
    Err(QuantoError::ImpliedVolNoConvergence(MAX_ITERATIONS))
}

/// Which asset's vanilla backs an implied vol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VolAsset {
    Libor,
    Fx,
}

impl VolAsset {
    pub fn name(&self) -> &'static str {
        match self {
            VolAsset::Libor => "libor",
            VolAsset::Fx => "fx",
        }
    }
}

/// How the source price behind an implied vol was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VolSource {
    /// Third-order expansion at `rho = 0` (the default: fast and smooth).
    ExpansionRho0,
    /// Monte Carlo benchmark, for cross-validation.
    MonteCarlo,
}

impl VolSource {
    pub fn name(&self) -> &'static str {
        match self {
            VolSource::ExpansionRho0 => "expansion_rho0",
            VolSource::MonteCarlo => "monte_carlo",
        }
    }
}

/// Strike selector: an explicit strike or the ATM convention
/// (strike = current forward).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrikeSpec {
    Atm,
    Strike(f64),
}

/// One point of the model-implied vol surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpliedVolPoint {
    pub expiry: f64,
    pub strike: f64,
    pub vol: f64,
    pub source: VolSource,
}

fn vanilla_market(asset: VolAsset, market: &QuantoMarket) -> Result<QuantoMarket> {
    match asset {
        VolAsset::Libor => market.with_rho(0.0),
        VolAsset::Fx => market.fx_as_underlying(),
    }
}

fn resolve_strike(asset: VolAsset, market: &QuantoMarket, strike: StrikeSpec) -> f64 {
    match strike {
        StrikeSpec::Strike(k) => k,
        StrikeSpec::Atm => match asset {
            VolAsset::Libor => market.l0,
            VolAsset::Fx => market.x0,
        },
    }
}

/// Implied vol of the correlation-free vanilla on the chosen asset, priced
/// with the third-order expansion and inverted through Black.
pub fn model_implied_vol(
    asset: VolAsset,
    expiry: f64,
    strike: StrikeSpec,
    market: &QuantoMarket,
) -> Result<ImpliedVolPoint> {
    let vanilla = vanilla_market(asset, market)?;
    let k = resolve_strike(asset, market, strike);
    let instrument = QuantoInstrument::new(expiry, 1.0, k, 1.0)?;
    let price = price_order3(&instrument, &vanilla)?.price;
    let vol = black_implied_vol(price, vanilla.l0, k, expiry, 1.0)?;
    Ok(ImpliedVolPoint {
        expiry,
        strike: k,
        vol,
        source: VolSource::ExpansionRho0,
    })
}

/// Monte Carlo variant of [`model_implied_vol`], for auditing the expansion
/// source.
pub fn model_implied_vol_mc(
    asset: VolAsset,
    expiry: f64,
    strike: StrikeSpec,
    market: &QuantoMarket,
    config: &McConfig,
) -> Result<ImpliedVolPoint> {
    let vanilla = vanilla_market(asset, market)?;
    let k = resolve_strike(asset, market, strike);
    let instrument = QuantoInstrument::new(expiry, 1.0, k, 1.0)?;
    let price = simulate_quanto(&instrument, &vanilla, config)?.price;
    let vol = black_implied_vol(price, vanilla.l0, k, expiry, 1.0)?;
    Ok(ImpliedVolPoint {
        expiry,
        strike: k,
        vol,
        source: VolSource::MonteCarlo,
    })
}

/// Read-mostly cache of implied-vol points keyed by asset, expiry and strike
/// bits; grid sweeps fill it once and then share it across threads.
#[derive(Default)]
pub struct ImpliedVolCache {
    points: RwLock<HashMap<(VolAsset, u64, u64), f64>>,
}

impl ImpliedVolCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn vol(
        &self,
        asset: VolAsset,
        expiry: f64,
        strike: StrikeSpec,
        market: &QuantoMarket,
    ) -> Result<f64> {
        let k = resolve_strike(asset, market, strike);
        let key = (asset, expiry.to_bits(), k.to_bits());
        if let Some(v) = self.points.read().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let vol = model_implied_vol(asset, expiry, StrikeSpec::Strike(k), market)?.vol;
        self.points.write().expect("cache lock").insert(key, vol);
        Ok(vol)
    }
}

/// Market (practitioner) price of the quanto caplet.
pub fn market_price(instrument: &QuantoInstrument, market: &QuantoMarket) -> Result<PriceResult> {
    market_price_cached(instrument, market, &ImpliedVolCache::new())
}

/// [`market_price`] reusing a shared implied-vol cache across grid points.
pub fn market_price_cached(
    instrument: &QuantoInstrument,
    market: &QuantoMarket,
    cache: &ImpliedVolCache,
) -> Result<PriceResult> {
    let t = instrument.expiry;
    let lam_atm = cache.vol(VolAsset::Libor, t, StrikeSpec::Atm, market)?;
    let sig_atm = cache.vol(VolAsset::Fx, t, StrikeSpec::Atm, market)?;
    let lam_k = cache.vol(
        VolAsset::Libor,
        t,
        StrikeSpec::Strike(instrument.strike),
        market,
    )?;

    let q = market.rho * lam_atm * sig_atm;
    let y0 = market.y0();
    let k = instrument.log_strike();
    let stddev = lam_k * t.sqrt();
    let d1 = (y0 - k - q * t + 0.5 * lam_k * lam_k * t) / stddev;
    let d2 = d1 - stddev;
    let price = instrument.payout_scale()
        * ((y0 - q * t).exp() * norm_cdf(d1) - instrument.strike * norm_cdf(d2));
    Ok(PriceResult {
        price,
        method: PricingMethod::Market,
        error_scale: None,
        ci_halfwidth: None,
    })
}
