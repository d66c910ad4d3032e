//! Rolling-window transfer entropy in both directions.
//!
//! Windows are `window` consecutive aligned observations, advanced by
//! `stride`, and are identified by their start offset. The window starting at
//! offset `s` is discretized on its own data (unless global edges are
//! requested), then shuffle-tested in each direction with a stream seeded by
//! `(seed, s, direction)`. Because the seed depends on the offset rather than
//! on the window's ordinal, a stride-`s` track is exactly every `s`-th window
//! of the stride-1 track.

use alloc::format;
use alloc::vec::Vec;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::seed;
use crate::series::AlignedPair;
use crate::shuffle::{Direction, ShuffleTest, TeResult};
use crate::stats::{mean, sample_std};
use crate::symbolic::{Binning, SymbolicSeries};
use crate::te::Lags;

pub const MIN_WINDOW: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SignificanceTier {
    /// `p <= 0.01`
    T1,
    /// `0.01 < p <= 0.05`
    T2,
    /// `0.05 < p <= 0.1`
    T3,
    /// `p > 0.1`
    NS,
}

impl SignificanceTier {
    pub fn is_significant(self) -> bool {
        self != SignificanceTier::NS
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SignificanceTier::T1 => "T1",
            SignificanceTier::T2 => "T2",
            SignificanceTier::T3 => "T3",
            SignificanceTier::NS => "NS",
        }
    }
}

pub fn tier(p: f64) -> Result<SignificanceTier> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p-value {p} outside [0, 1]")));
    }
    Ok(if p <= 0.01 {
        SignificanceTier::T1
    } else if p <= 0.05 {
        SignificanceTier::T2
    } else if p <= 0.1 {
        SignificanceTier::T3
    } else {
        SignificanceTier::NS
    })
}

/// Where bin edges come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EdgeMode {
    /// Refit on each window's data.
    #[default]
    PerWindow,
    /// Fit once on the whole pair.
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RollingConfig {
    pub window: usize,
    pub stride: usize,
    pub binning: Binning,
    pub lags: Lags,
    pub n_shuffles: usize,
    pub seed: u64,
    pub edges: EdgeMode,
}

impl Default for RollingConfig {
    fn default() -> Self {
        Self {
            window: 252,
            stride: 1,
            binning: Binning::default(),
            lags: Lags::default(),
            n_shuffles: 1000,
            seed: 0,
            edges: EdgeMode::PerWindow,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WindowPoint {
    /// Offset of the first observation in the window.
    pub start: usize,
    pub end_date: NaiveDate,
    pub te: f64,
    pub p_value: f64,
    pub tier: SignificanceTier,
    pub effective_te: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RollingTeTrack {
    pub direction: Direction,
    pub window_length: usize,
    pub stride: usize,
    pub n_shuffles: usize,
    pub seed: u64,
    pub windows: Vec<WindowPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrackSummary {
    pub mean_te: f64,
    pub std_te: f64,
    pub n_windows: usize,
    pub n_significant_10pct: usize,
    pub fraction_significant: f64,
}

/// `floor((len - window) / stride) + 1`, or zero when the pair is shorter than one window.
pub fn window_count(len: usize, window: usize, stride: usize) -> usize {
    if len < window || stride == 0 {
        0
    } else {
        (len - window) / stride + 1
    }
}

/// Validated rolling run over one pair. Windows can be evaluated in any order.
#[derive(Debug, Clone)]
pub struct RollingPlan<'a> {
    pair: &'a AlignedPair,
    config: RollingConfig,
    global: Option<(SymbolicSeries, SymbolicSeries)>,
}

impl<'a> RollingPlan<'a> {
    pub fn new(pair: &'a AlignedPair, config: RollingConfig) -> Result<Self> {
        if config.window < MIN_WINDOW {
            return Err(Error::Domain(format!(
                "window {} below minimum {MIN_WINDOW}",
                config.window
            )));
        }
        if config.stride == 0 {
            return Err(Error::Domain("stride must be positive".into()));
        }
        if pair.len() < config.window {
            return Err(Error::length("rolling_te", config.window, pair.len()));
        }
        config.lags.check_length(config.window)?;
        let global = match config.edges {
            EdgeMode::PerWindow => None,
            EdgeMode::Global => Some((
                config.binning.discretize(pair.driver().values())?,
                config.binning.discretize(pair.target().values())?,
            )),
        };
        Ok(Self {
            pair,
            config,
            global,
        })
    }

    pub fn config(&self) -> &RollingConfig {
        &self.config
    }

    pub fn starts(&self) -> Vec<usize> {
        let n = window_count(self.pair.len(), self.config.window, self.config.stride);
        (0..n).map(|i| i * self.config.stride).collect()
    }

    fn symbols(&self, start: usize) -> Result<(SymbolicSeries, SymbolicSeries)> {
        let range = start..start + self.config.window;
        match &self.global {
            Some((x, y)) => Ok((x.slice(range.clone()), y.slice(range))),
            None => {
                let b = self.config.binning;
                let x = b.discretize(&self.pair.driver().values()[range.clone()]);
                let y = b.discretize(&self.pair.target().values()[range]);
                match (x, y) {
                    (Ok(x), Ok(y)) => Ok((x, y)),
                    (Err(e), _) | (_, Err(e)) => Err(Error::Degenerate(format!(
                        "window starting at {}: {e}",
                        self.pair.dates()[start]
                    ))),
                }
            }
        }
    }

    /// Shuffle tests for the window at `start`, driver-to-target then target-to-driver.
    pub fn evaluate(&self, start: usize) -> Result<(WindowPoint, WindowPoint)> {
        let (x, y) = self.symbols(start)?;
        let c = &self.config;
        let end_date = self.pair.dates()[start + c.window - 1];
        let point = |r: TeResult| -> Result<WindowPoint> {
            Ok(WindowPoint {
                start,
                end_date,
                te: r.te_observed,
                p_value: r.p_value,
                tier: tier(r.p_value)?,
                effective_te: r.effective_te,
            })
        };
        let seed_for = |d: Direction| seed::derive(c.seed, &[start as u64, d.index()]);
        let xy = ShuffleTest::new(&x, &y, c.lags, c.n_shuffles, seed_for(Direction::XtoY), Direction::XtoY)?
            .run_serial();
        let yx = ShuffleTest::new(&y, &x, c.lags, c.n_shuffles, seed_for(Direction::YtoX), Direction::YtoX)?
            .run_serial();
        Ok((point(xy)?, point(yx)?))
    }

    /// Builds both tracks from per-window results given in start order.
    pub fn assemble(&self, points: Vec<(WindowPoint, WindowPoint)>) -> (RollingTeTrack, RollingTeTrack) {
        let c = &self.config;
        let track = |direction, windows| RollingTeTrack {
            direction,
            window_length: c.window,
            stride: c.stride,
            n_shuffles: c.n_shuffles,
            seed: c.seed,
            windows,
        };
        let (xy, yx): (Vec<_>, Vec<_>) = points.into_iter().unzip();
        (track(Direction::XtoY, xy), track(Direction::YtoX, yx))
    }
}

/// Serial rolling run. Returns the driver-to-target and target-to-driver tracks.
pub fn rolling_te(pair: &AlignedPair, config: RollingConfig) -> Result<(RollingTeTrack, RollingTeTrack)> {
    let plan = RollingPlan::new(pair, config)?;
    let points = plan
        .starts()
        .into_iter()
        .map(|s| plan.evaluate(s))
        .collect::<Result<Vec<_>>>()?;
    Ok(plan.assemble(points))
}

pub fn summarize(track: &RollingTeTrack) -> Result<TrackSummary> {
    let n = track.windows.len();
    if n == 0 {
        return Err(Error::length("summarize", 1, 0));
    }
    let te: Vec<f64> = track.windows.iter().map(|w| w.te).collect();
    let significant = track
        .windows
        .iter()
        .filter(|w| w.tier.is_significant())
        .count();
    Ok(TrackSummary {
        mean_te: mean(&te),
        std_te: sample_std(&te),
        n_windows: n,
        n_significant_10pct: significant,
        fraction_significant: significant as f64 / n as f64,
    })
}
