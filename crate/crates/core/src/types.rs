//! Shared result types.

use crate::expansion::ErrorScale;

/// Which pricer produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PricingMethod {
    Proxy,
    Order2,
    Order3,
    Market,
    MonteCarlo,
}

impl PricingMethod {
    pub fn name(&self) -> &'static str {
        match self {
            PricingMethod::Proxy => "proxy",
            PricingMethod::Order2 => "order2",
            PricingMethod::Order3 => "order3",
            PricingMethod::Market => "market",
            PricingMethod::MonteCarlo => "mc",
        }
    }
}

impl std::str::FromStr for PricingMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "proxy" => Ok(PricingMethod::Proxy),
            "order2" => Ok(PricingMethod::Order2),
            "order3" => Ok(PricingMethod::Order3),
            "market" => Ok(PricingMethod::Market),
            "mc" => Ok(PricingMethod::MonteCarlo),
            other => Err(format!(
                "unknown method `{other}` (expected proxy, order2, order3, market or mc)"
            )),
        }
    }
}

/// A price plus per-method diagnostics: expansions attach the theoretical
/// error scale, Monte Carlo attaches its confidence half-width.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceResult {
    pub price: f64,
    pub method: PricingMethod,
    pub error_scale: Option<ErrorScale>,
    pub ci_halfwidth: Option<f64>,
}
