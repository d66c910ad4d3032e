//! Sample moments and order statistics.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::series::ReturnSeries;

/// Location, scale and shape of a sample.
///
/// `skewness` is the adjusted Fisher-Pearson coefficient and
/// `excess_kurtosis` the small-sample adjusted excess kurtosis (zero for a
/// normal population). Both are `None` when the sample has zero variance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DescriptiveStats {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
    pub min: f64,
    pub max: f64,
}

pub fn describe(r: &ReturnSeries) -> Result<DescriptiveStats> {
    describe_values(r.values())
}

pub fn describe_values(values: &[f64]) -> Result<DescriptiveStats> {
    let n = values.len();
    if n < 4 {
        return Err(Error::length("describe", 4, n));
    }
    let nf = n as f64;
    let mean = mean(values);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;

    let std = libm::sqrt(m2 * nf / (nf - 1.0));
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        let g1 = m3 / libm::pow(m2, 1.5);
        let g2 = m4 / (m2 * m2) - 3.0;
        let skew = g1 * libm::sqrt(nf * (nf - 1.0)) / (nf - 2.0);
        let kurt = ((nf + 1.0) * g2 + 6.0) * (nf - 1.0) / ((nf - 2.0) * (nf - 3.0));
        (Some(skew), Some(kurt))
    } else {
        (None, None)
    };

    let sorted = sorted_copy(values);
    Ok(DescriptiveStats {
        n,
        mean,
        median: quantile_sorted(&sorted, 0.5),
        std,
        skewness,
        excess_kurtosis,
        min: sorted[0],
        max: sorted[n - 1],
    })
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (`n - 1` denominator). Zero for fewer than two values.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    libm::sqrt(ss / (values.len() - 1) as f64)
}

pub(crate) fn sorted_copy(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Quantile of an ascending sample by linear interpolation between order
/// statistics at position `p * (n - 1)`. Even-length medians are therefore the
/// mean of the two central values.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    let pos = p.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = libm::floor(pos) as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = pos - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Quantile at plotting position `n p - 1/2` (Hazen), clamped to the sample
/// range. Symmetric tail cuts at `p` and `1 - p` then leave `round(n p)`
/// observations in each tail.
pub fn quantile_sorted_midpoint(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    let pos = (n as f64 * p.clamp(0.0, 1.0) - 0.5).clamp(0.0, (n - 1) as f64);
    let lo = libm::floor(pos) as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = pos - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}
