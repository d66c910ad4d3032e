//! Driver-shuffle significance test for transfer entropy.
//!
//! The null distribution comes from recomputing the estimate after permuting
//! the driver's time indices, which keeps its marginal distribution and
//! destroys any temporal relation to the target. Shuffle `i` draws its
//! permutation from a stream seeded by `(seed, i)`, so the samples can be
//! produced in any order, on any number of threads, and still come out
//! bit-identical.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed;
use crate::symbolic::SymbolicSeries;
use crate::te::{Lags, TeEstimator};

pub const MIN_SHUFFLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Direction {
    XtoY,
    YtoX,
}

impl Direction {
    pub fn index(self) -> u64 {
        match self {
            Direction::XtoY => 0,
            Direction::YtoX => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::XtoY => "x_to_y",
            Direction::YtoX => "y_to_x",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TeResult {
    pub direction: Direction,
    pub lags: Lags,
    /// Plug-in estimate in bits.
    pub te_observed: f64,
    /// Share of shuffles with `T_shuffle >= te_observed`.
    pub p_value: f64,
    pub null_mean: f64,
    /// Sample standard deviation of the shuffled estimates.
    pub null_std: f64,
    /// `te_observed - null_mean`; may be negative.
    pub effective_te: f64,
    pub n_shuffles: usize,
}

/// A prepared test: the observed estimate plus everything needed to draw
/// any single null sample independently.
#[derive(Debug, Clone)]
pub struct ShuffleTest {
    driver: Vec<u8>,
    estimator: TeEstimator,
    observed: f64,
    direction: Direction,
    n_shuffles: usize,
    seed: u64,
}

impl ShuffleTest {
    /// Test of information flow from `driver` into `target`.
    pub fn new(
        driver: &SymbolicSeries,
        target: &SymbolicSeries,
        lags: Lags,
        n_shuffles: usize,
        seed: u64,
        direction: Direction,
    ) -> Result<Self> {
        if driver.len() != target.len() {
            return Err(Error::Domain(alloc::format!(
                "series lengths differ ({} vs {})",
                driver.len(),
                target.len()
            )));
        }
        if n_shuffles < MIN_SHUFFLES {
            return Err(Error::Domain(alloc::format!(
                "at least {MIN_SHUFFLES} shuffles required, got {n_shuffles}"
            )));
        }
        let estimator = TeEstimator::new(target, driver.alphabet_size(), lags)?;
        let observed = estimator.estimate_unchecked(driver.symbols());
        Ok(Self {
            driver: driver.symbols().to_vec(),
            estimator,
            observed,
            direction,
            n_shuffles,
            seed,
        })
    }

    pub fn observed(&self) -> f64 {
        self.observed
    }

    pub fn n_shuffles(&self) -> usize {
        self.n_shuffles
    }

    /// Estimate under the `index`-th driver permutation.
    pub fn null_sample(&self, index: usize) -> f64 {
        let mut permuted = self.driver.clone();
        let mut rng = seed::stream(self.seed, &[index as u64]);
        permuted.shuffle(&mut rng);
        self.estimator.estimate_unchecked(&permuted)
    }

    /// Assembles the result from the null samples in shuffle-index order.
    pub fn finish(&self, null: &[f64]) -> TeResult {
        assert_eq!(null.len(), self.n_shuffles, "one null sample per shuffle");
        let n = null.len() as f64;
        let exceed = null.iter().filter(|&&t| t >= self.observed).count();
        let null_mean = null.iter().sum::<f64>() / n;
        let var = null
            .iter()
            .map(|t| (t - null_mean) * (t - null_mean))
            .sum::<f64>()
            / (n - 1.0);
        TeResult {
            direction: self.direction,
            lags: self.estimator.lags(),
            te_observed: self.observed,
            p_value: exceed as f64 / n,
            null_mean,
            null_std: libm::sqrt(var),
            effective_te: self.observed - null_mean,
            n_shuffles: self.n_shuffles,
        }
    }

    /// Runs every shuffle on the calling thread.
    pub fn run_serial(&self) -> TeResult {
        let null: Vec<f64> = (0..self.n_shuffles).map(|i| self.null_sample(i)).collect();
        self.finish(&null)
    }
}

/// Shuffle test of `x` driving `y`.
pub fn shuffle_test(
    x: &SymbolicSeries,
    y: &SymbolicSeries,
    lags: Lags,
    n_shuffles: usize,
    seed: u64,
) -> Result<TeResult> {
    Ok(ShuffleTest::new(x, y, lags, n_shuffles, seed, Direction::XtoY)?.run_serial())
}

/// Shuffle test in the given direction over the pair `(x, y)`.
pub fn shuffle_test_directed(
    x: &SymbolicSeries,
    y: &SymbolicSeries,
    direction: Direction,
    lags: Lags,
    n_shuffles: usize,
    seed: u64,
) -> Result<TeResult> {
    let test = match direction {
        Direction::XtoY => ShuffleTest::new(x, y, lags, n_shuffles, seed, direction)?,
        Direction::YtoX => ShuffleTest::new(y, x, lags, n_shuffles, seed, direction)?,
    };
    Ok(test.run_serial())
}
