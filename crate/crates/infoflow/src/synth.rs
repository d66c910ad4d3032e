//! Price files for generated return pairs.

use std::path::{Path, PathBuf};

use chrono::Days;
use infoflow_core::{AlignedPair, PriceObservation, PriceSeries, ReturnSeries};

use crate::error::Result;
use crate::ingest::write_prices;

const START_PRICE: f64 = 100.0;
const DOLLAR_VOLUME: f64 = 1.0e6;

/// Closes whose log returns are `returns`, starting at 100 one day before
/// the first return date, with a constant dollar volume.
pub fn prices_from_returns(returns: &ReturnSeries) -> Result<PriceSeries> {
    let first = returns.dates()[0]
        .checked_sub_days(Days::new(1))
        .expect("date in range");
    let mut close = START_PRICE;
    let mut obs = vec![PriceObservation {
        date: first,
        close,
        dollar_volume: Some(DOLLAR_VOLUME),
    }];
    for (&date, &r) in returns.dates().iter().zip(returns.values()) {
        close *= r.exp();
        obs.push(PriceObservation {
            date,
            close,
            dollar_volume: Some(DOLLAR_VOLUME),
        });
    }
    Ok(PriceSeries::new(returns.ticker(), obs)?)
}

/// Writes `x.csv` and `y.csv` into `dir` and returns their paths.
pub fn write_pair(pair: &AlignedPair, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir).map_err(|e| crate::Error::io(dir, e))?;
    let x = dir.join("x.csv");
    let y = dir.join("y.csv");
    write_prices(&x, &prices_from_returns(pair.driver())?)?;
    write_prices(&y, &prices_from_returns(pair.target())?)?;
    Ok((x, y))
}
