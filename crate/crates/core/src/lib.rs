//! Directional information-flow estimators for paired return series.
//!
//! The crate is `no_std` and only needs `alloc`. It covers the whole numeric
//! pipeline: price and return series with calendar alignment, descriptive
//! moments, lead-lag Pearson correlations, single-factor regressions, the
//! Amihud illiquidity ratio, quantile symbolization, plug-in transfer
//! entropy, driver-shuffle significance tests and rolling-window tracks.
//!
//! Everything here is a pure function of its inputs. Randomized procedures
//! take an explicit `u64` seed and derive one independent stream per work
//! item (shuffle, window, direction), so callers are free to fan the work out
//! across threads and still get bit-identical results. The `infoflow` crate
//! does exactly that with rayon.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod entropy;
pub mod error;
pub mod linear;
pub mod oracle;
pub mod rolling;
pub mod seed;
pub mod series;
pub mod shuffle;
mod special;
pub mod stats;
pub mod symbolic;
pub mod synth;
pub mod te;

pub use chrono::NaiveDate;

pub use entropy::shannon_entropy;
pub use error::{Error, Result};
pub use linear::{
    amihud, classify, gamma, holdings_summary, lagged_pearson, pearson, sfm_fit, AmihudResult,
    CorrResult, FirmProfile, Group, HoldingsSummary, LaggedCorrelations, SfmFit, Star,
};
pub use oracle::brute_force_te;
pub use rolling::{
    rolling_te, summarize, tier, window_count, EdgeMode, RollingConfig, RollingPlan, RollingTeTrack,
    SignificanceTier, TrackSummary, WindowPoint,
};
pub use series::{align, log_returns, AlignedPair, PriceObservation, PriceSeries, ReturnSeries};
pub use shuffle::{shuffle_test, shuffle_test_directed, Direction, ShuffleTest, TeResult};
pub use stats::{describe, DescriptiveStats};
pub use symbolic::{discretize, Binning, SymbolicSeries};
pub use synth::{generate, ProcessKind, ProcessSpec};
pub use te::{transfer_entropy, Lags, TeEstimator};

/// Minimum number of aligned observations any estimator in this crate accepts.
pub const MIN_PAIR_LEN: usize = 30;
