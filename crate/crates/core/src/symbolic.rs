//! Quantile symbolization of continuous returns.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::series::ReturnSeries;
use crate::stats::{quantile_sorted_midpoint, sorted_copy};
use crate::MIN_PAIR_LEN;

/// How a series is cut into symbols. Edges are empirical quantiles of the
/// series being cut, interpolated linearly at plotting positions `n p - 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Binning {
    /// `q` near-equal-count bins with edges at the `k/q` quantiles.
    Quantile { q: usize },
    /// Three bins split at two percentiles, e.g. 5 and 95: lower tail, body, upper tail.
    TailQuantile { lower_pct: f64, upper_pct: f64 },
}

impl Default for Binning {
    fn default() -> Self {
        Binning::TailQuantile {
            lower_pct: 5.0,
            upper_pct: 95.0,
        }
    }
}

impl Binning {
    pub fn alphabet_size(&self) -> usize {
        match *self {
            Binning::Quantile { q } => q,
            Binning::TailQuantile { .. } => 3,
        }
    }

    fn probabilities(&self) -> Result<Vec<f64>> {
        match *self {
            Binning::Quantile { q } => {
                if !(2..=u8::MAX as usize + 1).contains(&q) {
                    return Err(Error::Domain(format!(
                        "quantile binning needs 2..=256 bins, got {q}"
                    )));
                }
                Ok((1..q).map(|k| k as f64 / q as f64).collect())
            }
            Binning::TailQuantile {
                lower_pct,
                upper_pct,
            } => {
                if !(0.0 < lower_pct && lower_pct < upper_pct && upper_pct < 100.0) {
                    return Err(Error::Domain(format!(
                        "tail percentiles must satisfy 0 < lower < upper < 100, got {lower_pct}, {upper_pct}"
                    )));
                }
                Ok(alloc::vec![lower_pct / 100.0, upper_pct / 100.0])
            }
        }
    }

    /// Cuts `values`. A value equal to an edge goes to the upper bin.
    pub fn discretize(&self, values: &[f64]) -> Result<SymbolicSeries> {
        if values.len() < MIN_PAIR_LEN {
            return Err(Error::length("discretize", MIN_PAIR_LEN, values.len()));
        }
        let sorted = sorted_copy(values);
        let edges: Vec<f64> = self
            .probabilities()?
            .into_iter()
            .map(|p| quantile_sorted_midpoint(&sorted, p))
            .collect();
        if let Some(i) = edges.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Degenerate(format!(
                "bin edge {} ({}) does not exceed edge {} ({}); ties collapse a bin",
                i + 1,
                edges[i + 1],
                i,
                edges[i]
            )));
        }
        let symbols = values
            .iter()
            .map(|&v| edges.partition_point(|&e| e <= v) as u8)
            .collect();
        Ok(SymbolicSeries {
            symbols,
            q: edges.len() + 1,
            bin_edges: edges,
        })
    }
}

/// Discretized series over the alphabet `0..q`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SymbolicSeries {
    symbols: Vec<u8>,
    q: usize,
    bin_edges: Vec<f64>,
}

impl SymbolicSeries {
    /// Wraps raw symbols as the cut of the integers themselves, with edges at
    /// `k - 0.5`.
    pub fn from_symbols(symbols: Vec<u8>, q: usize) -> Result<Self> {
        if !(2..=256).contains(&q) {
            return Err(Error::Domain(format!("alphabet size {q} outside 2..=256")));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s as usize >= q) {
            return Err(Error::Domain(format!("symbol {s} outside alphabet of size {q}")));
        }
        Ok(Self {
            symbols,
            q,
            bin_edges: (1..q).map(|k| k as f64 - 0.5).collect(),
        })
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn alphabet_size(&self) -> usize {
        self.q
    }

    pub fn bin_edges(&self) -> &[f64] {
        &self.bin_edges
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Sub-range sharing the same alphabet and edges.
    pub fn slice(&self, range: core::ops::Range<usize>) -> SymbolicSeries {
        SymbolicSeries {
            symbols: self.symbols[range].to_vec(),
            q: self.q,
            bin_edges: self.bin_edges.clone(),
        }
    }
}

pub fn discretize(r: &ReturnSeries, binning: Binning) -> Result<SymbolicSeries> {
    binning.discretize(r.values())
}
