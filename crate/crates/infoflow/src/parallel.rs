//! Rayon fan-out over the independent work items exposed by the core crate.
//!
//! Every item draws from its own seeded stream and results are collected in
//! index order, so output does not depend on the pool size.

use infoflow_core::rolling::RollingPlan;
use infoflow_core::{
    seed, AlignedPair, Binning, Direction, Lags, RollingConfig, RollingTeTrack, ShuffleTest,
    SymbolicSeries, TeResult,
};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub fn shuffle_test_par(
    driver: &SymbolicSeries,
    target: &SymbolicSeries,
    lags: Lags,
    n_shuffles: usize,
    seed: u64,
    direction: Direction,
) -> Result<TeResult> {
    let test = ShuffleTest::new(driver, target, lags, n_shuffles, seed, direction)?;
    let null: Vec<f64> = (0..n_shuffles)
        .into_par_iter()
        .map(|i| test.null_sample(i))
        .collect();
    Ok(test.finish(&null))
}

/// Both directions over the full pair, each side cut with `binning`.
pub fn te_both_par(
    pair: &AlignedPair,
    binning: Binning,
    lags: Lags,
    n_shuffles: usize,
    seed: u64,
) -> Result<(TeResult, TeResult)> {
    let x = binning.discretize(pair.driver().values())?;
    let y = binning.discretize(pair.target().values())?;
    let run = |d: Direction| {
        let s = seed::derive(seed, &[d.index()]);
        match d {
            Direction::XtoY => shuffle_test_par(&x, &y, lags, n_shuffles, s, d),
            Direction::YtoX => shuffle_test_par(&y, &x, lags, n_shuffles, s, d),
        }
    };
    let (xy, yx) = rayon::join(|| run(Direction::XtoY), || run(Direction::YtoX));
    Ok((xy?, yx?))
}

pub fn rolling_te_par(
    pair: &AlignedPair,
    config: RollingConfig,
) -> Result<(RollingTeTrack, RollingTeTrack)> {
    let plan = RollingPlan::new(pair, config)?;
    let points = plan
        .starts()
        .into_par_iter()
        .map(|s| plan.evaluate(s))
        .collect::<infoflow_core::Result<Vec<_>>>()?;
    Ok(plan.assemble(points))
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool when `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::Config("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}
