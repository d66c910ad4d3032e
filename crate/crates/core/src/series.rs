//! Price and return series, and calendar alignment of a driver/target pair.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::MIN_PAIR_LEN;

/// One daily observation of a traded instrument.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PriceObservation {
    pub date: NaiveDate,
    pub close: f64,
    /// Traded value in quote currency. `None` when the source did not report it.
    pub dollar_volume: Option<f64>,
}

/// Dated closes and dollar volumes for one ticker, strictly increasing in date.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PriceSeries {
    ticker: String,
    observations: Vec<PriceObservation>,
}

impl PriceSeries {
    pub fn new(ticker: impl Into<String>, observations: Vec<PriceObservation>) -> Result<Self> {
        let ticker = ticker.into();
        for w in observations.windows(2) {
            if w[1].date <= w[0].date {
                return Err(Error::Domain(format!(
                    "{ticker}: dates not strictly increasing at {}",
                    w[1].date
                )));
            }
        }
        for obs in &observations {
            if !(obs.close.is_finite() && obs.close > 0.0) {
                return Err(Error::Domain(format!(
                    "{ticker}: close {} on {} is not a positive finite price",
                    obs.close, obs.date
                )));
            }
            if let Some(v) = obs.dollar_volume {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::Domain(format!(
                        "{ticker}: dollar volume {v} on {} is negative or not finite",
                        obs.date
                    )));
                }
            }
        }
        Ok(Self {
            ticker,
            observations,
        })
    }

    pub fn ticker(&self) -> &str {
        &self.ticker
    }

    pub fn observations(&self) -> &[PriceObservation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Restricts the series to `start..=end`.
    pub fn between(&self, start: NaiveDate, end: NaiveDate) -> PriceSeries {
        PriceSeries {
            ticker: self.ticker.clone(),
            observations: self
                .observations
                .iter()
                .filter(|o| o.date >= start && o.date <= end)
                .copied()
                .collect(),
        }
    }

    /// Last close dated on or before `date`.
    pub fn close_on_or_before(&self, date: NaiveDate) -> Option<f64> {
        let idx = self.observations.partition_point(|o| o.date <= date);
        idx.checked_sub(1).map(|i| self.observations[i].close)
    }

    /// Whether any observation lacks a dollar volume.
    pub fn has_missing_volume(&self) -> bool {
        self.observations.iter().any(|o| o.dollar_volume.is_none())
    }
}

/// Dated log returns for one ticker.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReturnSeries {
    ticker: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(ticker: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        let ticker = ticker.into();
        if dates.len() != values.len() {
            return Err(Error::Domain(format!(
                "{ticker}: {} dates but {} returns",
                dates.len(),
                values.len()
            )));
        }
        if let Some(w) = dates.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Domain(format!(
                "{ticker}: dates not strictly increasing at {}",
                w[1]
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "{ticker}: return on {} is not finite",
                dates[i]
            )));
        }
        Ok(Self {
            ticker,
            dates,
            values,
        })
    }

    pub fn ticker(&self) -> &str {
        &self.ticker
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn restricted(&self, keep: &[usize]) -> ReturnSeries {
        ReturnSeries {
            ticker: self.ticker.clone(),
            dates: keep.iter().map(|&i| self.dates[i]).collect(),
            values: keep.iter().map(|&i| self.values[i]).collect(),
        }
    }
}

/// Driver (`X`) and target (`Y`) returns on one shared date grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlignedPair {
    driver: ReturnSeries,
    target: ReturnSeries,
}

impl AlignedPair {
    /// Pairs two series that already share a date grid.
    pub fn new(driver: ReturnSeries, target: ReturnSeries) -> Result<Self> {
        if driver.dates != target.dates {
            return Err(Error::Domain(format!(
                "{} and {} are not on the same date grid",
                driver.ticker, target.ticker
            )));
        }
        if driver.len() < MIN_PAIR_LEN {
            return Err(Error::length("aligned pair", MIN_PAIR_LEN, driver.len()));
        }
        Ok(Self { driver, target })
    }

    pub fn driver(&self) -> &ReturnSeries {
        &self.driver
    }

    pub fn target(&self) -> &ReturnSeries {
        &self.target
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.driver.dates
    }

    pub fn len(&self) -> usize {
        self.driver.len()
    }

    pub fn is_empty(&self) -> bool {
        self.driver.is_empty()
    }

    /// The same pair with driver and target exchanged.
    pub fn swapped(&self) -> AlignedPair {
        AlignedPair {
            driver: self.target.clone(),
            target: self.driver.clone(),
        }
    }
}

/// Daily log returns `ln(close_t / close_{t-1})`, dated at `t`.
pub fn log_returns(prices: &PriceSeries) -> Result<ReturnSeries> {
    let obs = prices.observations();
    if obs.len() < 2 {
        return Err(Error::length("log_returns", 2, obs.len()));
    }
    if let Some(bad) = obs.iter().find(|o| o.close.is_nan() || o.close <= 0.0) {
        return Err(Error::Domain(format!(
            "{}: non-positive close on {}",
            prices.ticker(),
            bad.date
        )));
    }
    let dates = obs[1..].iter().map(|o| o.date).collect();
    let values = obs
        .windows(2)
        .map(|w| libm::log(w[1].close / w[0].close))
        .collect();
    ReturnSeries::new(prices.ticker(), dates, values)
}

/// Restricts both series to their common dates.
///
/// Returns on dates present in only one series are dropped, never compounded
/// into the next shared date.
pub fn align(x: &ReturnSeries, y: &ReturnSeries) -> Result<AlignedPair> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::InsufficientOverlap {
            overlap: 0,
            required: MIN_PAIR_LEN,
        });
    }
    let (mut i, mut j) = (0, 0);
    let (mut keep_x, mut keep_y) = (Vec::new(), Vec::new());
    while i < x.len() && j < y.len() {
        match x.dates[i].cmp(&y.dates[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                keep_x.push(i);
                keep_y.push(j);
                i += 1;
                j += 1;
            }
        }
    }
    if keep_x.len() < MIN_PAIR_LEN {
        return Err(Error::InsufficientOverlap {
            overlap: keep_x.len(),
            required: MIN_PAIR_LEN,
        });
    }
    Ok(AlignedPair {
        driver: x.restricted(&keep_x),
        target: y.restricted(&keep_y),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn day(n: i64) -> NaiveDate {
        NaiveDate::from_ymd_opt(2024, 1, 1).unwrap() + chrono::Duration::days(n)
    }

    fn prices(closes: &[f64]) -> PriceSeries {
        let obs = closes
            .iter()
            .enumerate()
            .map(|(i, &c)| PriceObservation {
                date: day(i as i64),
                close: c,
                dollar_volume: Some(1e6),
            })
            .collect();
        PriceSeries::new("T", obs).unwrap()
    }

    fn returns(ticker: &str, days: &[i64]) -> ReturnSeries {
        ReturnSeries::new(
            ticker,
            days.iter().map(|&d| day(d)).collect(),
            days.iter().map(|&d| d as f64 * 1e-3).collect(),
        )
        .unwrap()
    }

    #[test]
    fn constant_price_gives_zero_returns() {
        let r = log_returns(&prices(&[100.0, 100.0, 100.0])).unwrap();
        assert_eq!(r.values(), &[0.0, 0.0]);
        assert_eq!(r.dates(), &[day(1), day(2)]);
    }

    #[test]
    fn doubling_is_ln_two() {
        let r = log_returns(&prices(&[50.0, 100.0])).unwrap();
        assert!((r.values()[0] - core::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn direct_formula() {
        let r = log_returns(&prices(&[100.0, 90.0, 99.0])).unwrap();
        assert!((r.values()[0] - (-0.105_360_515_657_826_3)).abs() < 1e-12);
        assert!((r.values()[1] - 0.095_310_179_804_324_87).abs() < 1e-12);
    }

    #[test]
    fn too_short_for_returns() {
        let err = log_returns(&prices(&[100.0])).unwrap_err();
        assert!(matches!(err, Error::Length { required: 2, actual: 1, .. }));
    }

    #[test]
    fn non_positive_close_rejected() {
        let obs = vec![PriceObservation {
            date: day(0),
            close: 0.0,
            dollar_volume: None,
        }];
        assert!(matches!(PriceSeries::new("T", obs), Err(Error::Domain(_))));
    }

    #[test]
    fn duplicate_dates_rejected() {
        let o = PriceObservation {
            date: day(0),
            close: 1.0,
            dollar_volume: None,
        };
        assert!(PriceSeries::new("T", vec![o, o]).is_err());
        assert!(ReturnSeries::new("T", vec![day(0), day(0)], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn weekend_driver_days_dropped() {
        // Ten weeks: driver trades every day, target Monday..Friday only.
        let all: Vec<i64> = (0..70).collect();
        let weekdays: Vec<i64> = all.iter().copied().filter(|d| d % 7 < 5).collect();
        let pair = align(&returns("X", &all), &returns("Y", &weekdays)).unwrap();
        assert_eq!(pair.len(), 50);
        assert_eq!(pair.dates(), returns("Y", &weekdays).dates());
        // Surviving driver returns are the original values, not compounded.
        assert_eq!(pair.driver().values(), returns("X", &weekdays).values());
    }

    #[test]
    fn identical_grids_keep_everything() {
        let d: Vec<i64> = (0..40).collect();
        assert_eq!(align(&returns("X", &d), &returns("Y", &d)).unwrap().len(), 40);
    }

    #[test]
    fn disjoint_grids_fail() {
        let a: Vec<i64> = (0..40).collect();
        let b: Vec<i64> = (100..140).collect();
        let err = align(&returns("X", &a), &returns("Y", &b)).unwrap_err();
        assert_eq!(
            err,
            Error::InsufficientOverlap {
                overlap: 0,
                required: 30
            }
        );
    }

    proptest! {
        #[test]
        fn cumulative_returns_recover_log_price_ratio(
            closes in prop::collection::vec(1.0f64..1000.0, 2..200)
        ) {
            let p = prices(&closes);
            let r = log_returns(&p).unwrap();
            prop_assert_eq!(r.len(), closes.len() - 1);
            let mut acc = 0.0;
            for (t, v) in r.values().iter().enumerate() {
                acc += v;
                let expected = libm::log(closes[t + 1] / closes[0]);
                prop_assert!((acc - expected).abs() < 1e-12);
            }
        }

        #[test]
        fn align_dates_commute(
            a in prop::collection::btree_set(0i64..120, 30..100),
            b in prop::collection::btree_set(0i64..120, 30..100),
        ) {
            let a: Vec<i64> = a.into_iter().collect();
            let b: Vec<i64> = b.into_iter().collect();
            let (x, y) = (returns("X", &a), returns("Y", &b));
            match (align(&x, &y), align(&y, &x)) {
                (Ok(p), Ok(q)) => prop_assert_eq!(p.dates(), q.dates()),
                (Err(e), Err(f)) => prop_assert_eq!(e, f),
                _ => prop_assert!(false, "align is not symmetric"),
            }
        }
    }
}
