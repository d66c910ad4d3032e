//! Universe configuration: a TOML file pointing at a driver price file and a
//! flat universe table of firms.
//!
//! ```toml
//! driver_ticker = "BTC-USD"
//! driver_file = "prices/BTC-USD.csv"
//! universe_file = "universe.csv"
//! start = "2023-04-01"
//! end = "2025-04-30"
//!
//! [analysis]
//! binning = { kind = "tail_quantile", lower_pct = 5.0, upper_pct = 95.0 }
//! lags = { driver = 1, target = 1, horizon = 1 }
//! window = 252
//! n_shuffles = 1000
//! rolling = ["MSTR"]
//! ```
//!
//! The universe table has the columns
//! `ticker,price_file,btc_holdings,market_cap,latest_acquisition_date`.
//! Relative paths resolve against the directory of the file that names them.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use infoflow_core::rolling::MIN_WINDOW;
use infoflow_core::shuffle::MIN_SHUFFLES;
use infoflow_core::{Binning, EdgeMode, Lags};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirmEntry {
    pub ticker: String,
    pub price_file: PathBuf,
    pub btc_holdings: f64,
    /// As given in the universe file; no currency normalisation.
    pub market_cap: f64,
    pub latest_acquisition_date: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Analysis {
    pub binning: Binning,
    pub lags: Lags,
    pub window: usize,
    pub stride: usize,
    pub n_shuffles: usize,
    pub seed: u64,
    pub edges: EdgeMode,
    /// Tickers that also get a rolling-window run.
    pub rolling: Vec<String>,
}

impl Default for Analysis {
    fn default() -> Self {
        Self {
            binning: Binning::default(),
            lags: Lags::default(),
            window: 252,
            stride: 1,
            n_shuffles: 1000,
            seed: 0,
            edges: EdgeMode::PerWindow,
            rolling: Vec::new(),
        }
    }
}

/// Overrides for the group cuts. Unset cuts default to cross-sectional medians.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub gamma: Option<f64>,
    pub liquidity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniverseConfig {
    #[serde(default = "default_driver")]
    pub driver_ticker: String,
    pub driver_file: PathBuf,
    pub universe_file: PathBuf,
    pub start: NaiveDate,
    pub end: NaiveDate,
    #[serde(default)]
    pub analysis: Analysis,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(skip)]
    pub firms: Vec<FirmEntry>,
}

fn default_driver() -> String {
    "BTC-USD".into()
}

impl UniverseConfig {
    /// Reads the TOML file and the universe table it names, resolving every path.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut config: UniverseConfig = toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.driver_file = base.join(&config.driver_file);
        config.universe_file = base.join(&config.universe_file);
        config.firms = load_universe(&config.universe_file)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.start > self.end {
            return bad(format!("empty date range {} to {}", self.start, self.end));
        }
        let a = &self.analysis;
        if a.window < MIN_WINDOW {
            return bad(format!("window {} below {MIN_WINDOW}", a.window));
        }
        if a.stride == 0 {
            return bad("stride must be at least 1".into());
        }
        if a.n_shuffles < MIN_SHUFFLES {
            return bad(format!("n_shuffles {} below {MIN_SHUFFLES}", a.n_shuffles));
        }
        if a.lags.driver == 0 || a.lags.target == 0 || a.lags.horizon == 0 {
            return bad(format!("lags must be at least 1: {:?}", a.lags));
        }
        if self.firms.is_empty() {
            return bad("universe has no firms".into());
        }
        let mut seen = std::collections::BTreeSet::new();
        for f in &self.firms {
            if !seen.insert(f.ticker.as_str()) {
                return bad(format!("ticker {} listed twice", f.ticker));
            }
        }
        for t in &a.rolling {
            if !seen.contains(t.as_str()) {
                return bad(format!("rolling ticker {t} is not in the universe"));
            }
        }
        let files = std::iter::once(&self.driver_file).chain(self.firms.iter().map(|f| &f.price_file));
        for file in files {
            if !file.is_file() {
                return bad(format!("missing file {}", file.display()));
            }
        }
        Ok(())
    }
}

pub fn load_universe(path: &Path) -> Result<Vec<FirmEntry>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut firms = Vec::new();
    for row in reader.deserialize::<FirmEntry>() {
        let mut firm = row.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        firm.price_file = base.join(&firm.price_file);
        firms.push(firm);
    }
    Ok(firms)
}
