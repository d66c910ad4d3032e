//! Per-firm analysis over a universe and the cross-sectional summary.

use chrono::NaiveDate;
use infoflow_core::linear::{gamma_at, median_threshold};
use infoflow_core::rolling::summarize;
use infoflow_core::stats::{describe_values, mean, quantile_sorted, sample_std};
use infoflow_core::{
    align, amihud, classify, describe, lagged_pearson, log_returns, seed, sfm_fit, AmihudResult,
    DescriptiveStats, FirmProfile, Group, LaggedCorrelations, PriceSeries, ReturnSeries,
    RollingConfig, RollingTeTrack, SfmFit, TeResult, TrackSummary,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{FirmEntry, UniverseConfig};
use crate::error::{Error, Result};
use crate::ingest::load_prices_as;
use crate::parallel::{rolling_te_par, te_both_par};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirmRow {
    pub ticker: String,
    pub btc_holdings: f64,
    pub market_cap: f64,
    pub stats: DescriptiveStats,
    pub correlations: LaggedCorrelations,
    pub sfm: SfmFit,
    pub amihud: Option<AmihudResult>,
    pub gamma: Option<f64>,
    pub group: Option<Group>,
    pub te_xy: Option<TeResult>,
    pub te_yx: Option<TeResult>,
    /// Reasons a measure is missing from this row.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub ticker: String,
    pub reason: String,
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WARN {} {}", self.ticker, self.reason.replace('\n', " "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub measure: String,
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub std: Option<f64>,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppliedThresholds {
    pub beta: f64,
    pub gamma: Option<f64>,
    pub liquidity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollingRecord {
    pub ticker: String,
    pub xy: RollingTeTrack,
    pub yx: RollingTeTrack,
    pub summary_xy: TrackSummary,
    pub summary_yx: TrackSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub driver_ticker: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub seed: u64,
    pub driver: DescriptiveStats,
    pub firms: Vec<FirmRow>,
    pub warnings: Vec<Warning>,
    pub thresholds: AppliedThresholds,
    pub summary: Vec<ColumnSummary>,
    pub rolling: Vec<RollingRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    pub transfer_entropy: bool,
    pub rolling: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            transfer_entropy: true,
            rolling: true,
        }
    }
}

struct Analyzed {
    row: FirmRow,
    rolling: Option<RollingRecord>,
    warnings: Vec<Warning>,
}

pub fn run_pipeline(config: &UniverseConfig) -> Result<ReportBundle> {
    run_pipeline_with(config, PipelineOptions::default())
}

pub fn run_pipeline_with(config: &UniverseConfig, options: PipelineOptions) -> Result<ReportBundle> {
    let driver_prices = load_prices_as(&config.driver_file, &config.driver_ticker)?
        .between(config.start, config.end);
    let driver_returns = log_returns(&driver_prices)?;
    let driver = describe(&driver_returns)?;

    let outcomes: Vec<std::result::Result<Analyzed, Warning>> = config
        .firms
        .par_iter()
        .map(|firm| analyze_firm(config, options, firm, &driver_prices, &driver_returns))
        .collect();

    let mut firms = Vec::new();
    let mut rolling = Vec::new();
    let mut warnings = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(a) => {
                firms.push(a.row);
                rolling.extend(a.rolling);
                warnings.extend(a.warnings);
            }
            Err(w) => warnings.push(w),
        }
    }
    if firms.is_empty() {
        return Err(Error::Config("no firm in the universe could be analysed".into()));
    }

    let thresholds = AppliedThresholds {
        beta: 1.0,
        gamma: config
            .thresholds
            .gamma
            .or_else(|| median_threshold(&firms.iter().filter_map(|f| f.gamma).collect::<Vec<_>>())),
        liquidity: config.thresholds.liquidity.or_else(|| {
            median_threshold(
                &firms
                    .iter()
                    .filter_map(|f| f.amihud.map(|a| a.liquidity_score))
                    .collect::<Vec<_>>(),
            )
        }),
    };
    for row in &mut firms {
        row.group = group_of(row, thresholds);
    }
    let summary = summarize_columns(&firms);

    Ok(ReportBundle {
        driver_ticker: config.driver_ticker.clone(),
        start: config.start,
        end: config.end,
        seed: config.analysis.seed,
        driver,
        firms,
        warnings,
        thresholds,
        summary,
        rolling,
    })
}

fn group_of(row: &FirmRow, t: AppliedThresholds) -> Option<Group> {
    if row.sfm.beta > t.beta {
        return Some(Group::HighBeta);
    }
    let (a, liquidity) = (row.amihud?, t.liquidity?);
    let profile = FirmProfile {
        ticker: row.ticker.clone(),
        btc_holdings: row.btc_holdings,
        market_cap: row.market_cap,
        gamma: row.gamma.unwrap_or(f64::NAN),
        beta: row.sfm.beta,
        rho_same_day: row.correlations.same_day.rho,
        amihud_delta: a.delta,
        liquidity_score: a.liquidity_score,
    };
    Some(classify(&profile, t.gamma.unwrap_or(f64::NAN), liquidity))
}

/// Seed for everything random about one firm.
pub fn firm_seed(seed: u64, ticker: &str) -> u64 {
    seed::derive(seed, &[seed::fnv1a(ticker.as_bytes())])
}

fn analyze_firm(
    config: &UniverseConfig,
    options: PipelineOptions,
    firm: &FirmEntry,
    driver_prices: &PriceSeries,
    driver_returns: &ReturnSeries,
) -> std::result::Result<Analyzed, Warning> {
    let warn = |reason: String| Warning {
        ticker: firm.ticker.clone(),
        reason,
    };
    let a = &config.analysis;
    let prices = load_prices_as(&firm.price_file, &firm.ticker)
        .map_err(|e| warn(e.to_string()))?
        .between(config.start, config.end);
    let returns = log_returns(&prices).map_err(|e| warn(e.to_string()))?;
    let pair = align(driver_returns, &returns).map_err(|e| warn(e.to_string()))?;
    let stats = describe(pair.target()).map_err(|e| warn(e.to_string()))?;
    let correlations = lagged_pearson(&pair).map_err(|e| warn(e.to_string()))?;
    let sfm = sfm_fit(&pair).map_err(|e| warn(e.to_string()))?;

    let mut notes = Vec::new();
    let mut warnings = Vec::new();
    let amihud = if prices.has_missing_volume() {
        notes.push("amihud skipped: dollar volume missing".to_string());
        None
    } else {
        amihud(&prices, pair.target())
            .map_err(|e| notes.push(format!("amihud: {e}")))
            .ok()
    };
    let gamma = gamma_at(firm.btc_holdings, driver_prices, firm.latest_acquisition_date, firm.market_cap)
        .map_err(|e| notes.push(e.to_string()))
        .ok();

    let seed = firm_seed(a.seed, &firm.ticker);
    let (te_xy, te_yx) = if options.transfer_entropy {
        match te_both_par(&pair, a.binning, a.lags, a.n_shuffles, seed) {
            Ok((xy, yx)) => (Some(xy), Some(yx)),
            Err(e) => {
                warnings.push(warn(format!("transfer entropy: {e}")));
                (None, None)
            }
        }
    } else {
        (None, None)
    };

    let mut rolling = None;
    if options.rolling && a.rolling.contains(&firm.ticker) {
        let rc = RollingConfig {
            window: a.window,
            stride: a.stride,
            binning: a.binning,
            lags: a.lags,
            n_shuffles: a.n_shuffles,
            seed,
            edges: a.edges,
        };
        match rolling_te_par(&pair, rc).and_then(|(xy, yx)| {
            Ok(RollingRecord {
                ticker: firm.ticker.clone(),
                summary_xy: summarize(&xy)?,
                summary_yx: summarize(&yx)?,
                xy,
                yx,
            })
        }) {
            Ok(r) => rolling = Some(r),
            Err(e) => warnings.push(warn(format!("rolling: {e}"))),
        }
    }

    Ok(Analyzed {
        row: FirmRow {
            ticker: firm.ticker.clone(),
            btc_holdings: firm.btc_holdings,
            market_cap: firm.market_cap,
            stats,
            correlations,
            sfm,
            amihud,
            gamma,
            group: None,
            te_xy,
            te_yx,
            notes,
        },
        rolling,
        warnings,
    })
}

type Column = (&'static str, fn(&FirmRow) -> Option<f64>);

const COLUMNS: [Column; 13] = [
    ("rho_same_day", |f| Some(f.correlations.same_day.rho)),
    ("rho_driver_leads", |f| Some(f.correlations.driver_leads.rho)),
    ("rho_target_leads", |f| Some(f.correlations.target_leads.rho)),
    ("alpha", |f| Some(f.sfm.alpha)),
    ("beta", |f| Some(f.sfm.beta)),
    ("r_squared", |f| Some(f.sfm.r_squared)),
    ("amihud_delta", |f| f.amihud.map(|a| a.delta)),
    ("liquidity_score", |f| f.amihud.map(|a| a.liquidity_score)),
    ("gamma", |f| f.gamma),
    ("te_xy", |f| f.te_xy.map(|t| t.te_observed)),
    ("te_yx", |f| f.te_yx.map(|t| t.te_observed)),
    ("effective_te_xy", |f| f.te_xy.map(|t| t.effective_te)),
    ("effective_te_yx", |f| f.te_yx.map(|t| t.effective_te)),
];

/// Mean, median, spread and shape of each measure across firms.
pub fn summarize_columns(firms: &[FirmRow]) -> Vec<ColumnSummary> {
    COLUMNS
        .iter()
        .filter_map(|(name, get)| {
            let values: Vec<f64> = firms.iter().filter_map(get).filter(|v| v.is_finite()).collect();
            column_summary(name, &values)
        })
        .collect()
}

fn column_summary(name: &str, values: &[f64]) -> Option<ColumnSummary> {
    if values.is_empty() {
        return None;
    }
    if let Ok(d) = describe_values(values) {
        return Some(ColumnSummary {
            measure: name.into(),
            n: d.n,
            mean: d.mean,
            median: d.median,
            std: Some(d.std),
            skewness: d.skewness,
            excess_kurtosis: d.excess_kurtosis,
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(ColumnSummary {
        measure: name.into(),
        n: values.len(),
        mean: mean(values),
        median: quantile_sorted(&sorted, 0.5),
        std: (values.len() > 1).then(|| sample_std(values)),
        skewness: None,
        excess_kurtosis: None,
    })
}
