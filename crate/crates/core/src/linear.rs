//! Linear dependence: lead-lag Pearson correlations, the single-factor
//! regression, Amihud illiquidity and the three-group firm classification.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::series::{AlignedPair, PriceSeries, ReturnSeries};
use crate::special::student_t_two_sided;
use crate::stats::{quantile_sorted, sorted_copy};
use crate::MIN_PAIR_LEN;

/// Significance marker on a correlation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Star {
    None,
    /// `0.05 < p < 0.1`
    Single,
    /// `p <= 0.05`
    Double,
}

impl Star {
    pub fn from_p(p: f64) -> Star {
        if p <= 0.05 {
            Star::Double
        } else if p < 0.1 {
            Star::Single
        } else {
            Star::None
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Star::None => "",
            Star::Single => "*",
            Star::Double => "**",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorrResult {
    pub rho: f64,
    pub p_value: f64,
    pub star: Star,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LaggedCorrelations {
    /// `rho(X_t, Y_t)`
    pub same_day: CorrResult,
    /// `rho(X_{t-1}, Y_t)`
    pub driver_leads: CorrResult,
    /// `rho(X_t, Y_{t-1})`
    pub target_leads: CorrResult,
}

/// Single-factor fit `y = alpha + beta * x + e`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SfmFit {
    pub alpha: f64,
    pub beta: f64,
    pub r_squared: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AmihudResult {
    /// Mean of `|r_t| / dollar_volume_t` over days with positive volume.
    pub delta: f64,
    /// `|ln delta|`; larger means more liquid.
    pub liquidity_score: f64,
    pub days_used: usize,
    /// Days skipped for zero or missing volume.
    pub days_skipped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Group {
    HighBeta,
    LowBetaLiquid,
    LowBetaIlliquid,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::HighBeta => "HighBeta",
            Group::LowBetaLiquid => "LowBetaLiquid",
            Group::LowBetaIlliquid => "LowBetaIlliquid",
        }
    }
}

/// Exposure, intensity and liquidity of one firm against the driver.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FirmProfile {
    pub ticker: String,
    pub btc_holdings: f64,
    pub market_cap: f64,
    /// Holdings value over market cap.
    pub gamma: f64,
    pub beta: f64,
    pub rho_same_day: f64,
    pub amihud_delta: f64,
    pub liquidity_score: f64,
}

/// Quartiles and range of a holdings column.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HoldingsSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Product-moment correlation with a two-sided t-test on `n - 2` degrees of freedom.
pub fn pearson(pair: &AlignedPair) -> Result<CorrResult> {
    pearson_slices(pair.driver().values(), pair.target().values())
}

pub fn pearson_slices(x: &[f64], y: &[f64]) -> Result<CorrResult> {
    if x.len() != y.len() {
        return Err(Error::Domain(format!(
            "pearson: lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::length("pearson", 3, n));
    }
    let (sxx, syy, sxy) = centered_sums(x, y);
    if is_constant(x) || is_constant(y) || sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate(String::from(
            "pearson: a series has zero variance",
        )));
    }
    let rho = (sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0);
    let p_value = correlation_p_value(rho, n);
    Ok(CorrResult {
        rho,
        p_value,
        star: Star::from_p(p_value),
        n,
    })
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&a| a == v[0])
}

fn correlation_p_value(rho: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    let denom = 1.0 - rho * rho;
    if denom <= 0.0 {
        return 0.0;
    }
    let t = rho * libm::sqrt(df / denom);
    student_t_two_sided(t, df)
}

fn centered_sums(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    (sxx, syy, sxy)
}

/// Same-day and one-day lead-lag correlations. Each lagged pair drops exactly
/// one observation.
pub fn lagged_pearson(pair: &AlignedPair) -> Result<LaggedCorrelations> {
    let n = pair.len();
    if n < MIN_PAIR_LEN + 1 {
        return Err(Error::length("lagged_pearson", MIN_PAIR_LEN + 1, n));
    }
    let (x, y) = (pair.driver().values(), pair.target().values());
    Ok(LaggedCorrelations {
        same_day: pearson_slices(x, y)?,
        driver_leads: pearson_slices(&x[..n - 1], &y[1..])?,
        target_leads: pearson_slices(&x[1..], &y[..n - 1])?,
    })
}

/// Ordinary least squares of target on driver with intercept.
pub fn sfm_fit(pair: &AlignedPair) -> Result<SfmFit> {
    let (x, y) = (pair.driver().values(), pair.target().values());
    let n = x.len();
    if n < MIN_PAIR_LEN {
        return Err(Error::length("sfm_fit", MIN_PAIR_LEN, n));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (sxx, syy, sxy) = centered_sums(x, y);
    if is_constant(x) || sxx == 0.0 {
        return Err(Error::Degenerate(String::from(
            "sfm_fit: driver has zero variance",
        )));
    }
    let beta = sxy / sxx;
    let alpha = my - beta * mx;
    let r_squared = if syy == 0.0 {
        0.0
    } else {
        let sse: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| {
                let e = b - alpha - beta * a;
                e * e
            })
            .sum();
        (1.0 - sse / syy).clamp(0.0, 1.0)
    };
    Ok(SfmFit {
        alpha,
        beta,
        r_squared,
        n,
    })
}

/// Amihud illiquidity over the return dates, using each day's own dollar volume.
///
/// Days with zero or missing volume are skipped and counted.
pub fn amihud(prices: &PriceSeries, returns: &ReturnSeries) -> Result<AmihudResult> {
    let obs = prices.observations();
    let mut sum = 0.0;
    let (mut used, mut skipped) = (0usize, 0usize);
    for (date, r) in returns.dates().iter().zip(returns.values()) {
        let idx = obs
            .binary_search_by(|o| o.date.cmp(date))
            .map_err(|_| {
                Error::Domain(format!(
                    "amihud: return date {date} has no price observation for {}",
                    prices.ticker()
                ))
            })?;
        match obs[idx].dollar_volume {
            Some(v) if v > 0.0 => {
                sum += r.abs() / v;
                used += 1;
            }
            _ => skipped += 1,
        }
    }
    if used == 0 {
        return Err(Error::Degenerate(format!(
            "amihud: no day with positive dollar volume for {}",
            prices.ticker()
        )));
    }
    let delta = sum / used as f64;
    Ok(AmihudResult {
        delta,
        liquidity_score: libm::log(delta).abs(),
        days_used: used,
        days_skipped: skipped,
    })
}

/// BTC intensity: holdings valued at `btc_price` over market capitalisation.
pub fn gamma(btc_holdings: f64, btc_price: f64, market_cap: f64) -> Result<f64> {
    if !(btc_holdings >= 0.0 && btc_holdings.is_finite()) {
        return Err(Error::Domain(format!("gamma: holdings {btc_holdings}")));
    }
    if !(btc_price > 0.0 && btc_price.is_finite()) {
        return Err(Error::Domain(format!("gamma: btc price {btc_price}")));
    }
    if !(market_cap > 0.0 && market_cap.is_finite()) {
        return Err(Error::Domain(format!("gamma: market cap {market_cap}")));
    }
    Ok(btc_holdings * btc_price / market_cap)
}

/// Driver price used to value holdings: the last close on or before the
/// firm's latest acquisition date.
pub fn gamma_at(
    btc_holdings: f64,
    driver_prices: &PriceSeries,
    latest_acquisition: NaiveDate,
    market_cap: f64,
) -> Result<f64> {
    let price = driver_prices
        .close_on_or_before(latest_acquisition)
        .ok_or_else(|| {
            Error::Domain(format!(
                "gamma: no driver price on or before {latest_acquisition}"
            ))
        })?;
    gamma(btc_holdings, price, market_cap)
}

/// `beta > 1` is high exposure; otherwise the liquidity cut splits the rest.
///
/// `gamma_threshold` does not enter the decision. It is accepted so callers
/// can carry the intensity split alongside the groups it is reported with.
pub fn classify(profile: &FirmProfile, _gamma_threshold: f64, liquidity_threshold: f64) -> Group {
    if profile.beta > 1.0 {
        Group::HighBeta
    } else if profile.liquidity_score >= liquidity_threshold {
        Group::LowBetaLiquid
    } else {
        Group::LowBetaIlliquid
    }
}

/// Cross-sectional median, the default cut for the gamma and liquidity splits.
pub fn median_threshold(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    Some(quantile_sorted(&sorted_copy(values), 0.5))
}

pub fn holdings_summary(holdings: &[f64]) -> Result<HoldingsSummary> {
    if holdings.is_empty() {
        return Err(Error::length("holdings_summary", 1, 0));
    }
    let s: Vec<f64> = sorted_copy(holdings);
    Ok(HoldingsSummary {
        min: s[0],
        q1: quantile_sorted(&s, 0.25),
        median: quantile_sorted(&s, 0.5),
        q3: quantile_sorted(&s, 0.75),
        max: s[s.len() - 1],
    })
}
