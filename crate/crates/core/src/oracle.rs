//! Literal evaluation of transfer entropy as an expectation of log
//! conditional-probability ratios over the joint distribution of embedded
//! tuples. Shares no code with [`crate::te`]: tuples are kept as explicit
//! keys in ordered maps rather than packed integer codes, and the sum runs
//! over conditional probabilities rather than count entropies.
//!
//! Slow by construction. Intended as a reference for the production estimator.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::symbolic::SymbolicSeries;
use crate::te::Lags;

/// Upper length accepted by the oracle.
pub const MAX_ORACLE_LEN: usize = 10_000;

type Past = Vec<u8>;

pub fn brute_force_te(x: &SymbolicSeries, y: &SymbolicSeries, lags: Lags) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Domain(format!(
            "series lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.len() > MAX_ORACLE_LEN {
        return Err(Error::Domain(format!(
            "oracle accepts at most {MAX_ORACLE_LEN} observations, got {}",
            x.len()
        )));
    }
    if lags.driver == 0 || lags.target == 0 || lags.horizon == 0 {
        return Err(Error::Domain(format!("lags must be at least 1: {lags:?}")));
    }
    lags.check_length(x.len())?;
    Ok(brute_force_te_unchecked(x.symbols(), y.symbols(), lags))
}

pub(crate) fn brute_force_te_unchecked(x: &[u8], y: &[u8], lags: Lags) -> f64 {
    let (j, k, h) = (lags.driver, lags.target, lags.horizon);
    let start = j.max(k) - 1;
    let mut full: BTreeMap<(u8, Past, Past), u64> = BTreeMap::new();
    let mut past_pair: BTreeMap<(Past, Past), u64> = BTreeMap::new();
    let mut future_target: BTreeMap<(u8, Past), u64> = BTreeMap::new();
    let mut target_only: BTreeMap<Past, u64> = BTreeMap::new();

    let mut total = 0u64;
    let mut t = start;
    while t + h < y.len() {
        let yp: Past = (0..k).map(|i| y[t - i]).collect();
        let xp: Past = (0..j).map(|i| x[t - i]).collect();
        let yf = y[t + h];
        *full.entry((yf, yp.clone(), xp.clone())).or_default() += 1;
        *past_pair.entry((yp.clone(), xp)).or_default() += 1;
        *future_target.entry((yf, yp.clone())).or_default() += 1;
        *target_only.entry(yp).or_default() += 1;
        total += 1;
        t += 1;
    }

    let n = total as f64;
    let mut te = 0.0;
    for ((yf, yp, xp), &c) in &full {
        let p_joint = c as f64 / n;
        // P(yf | yp, xp)
        let cond_full = c as f64 / past_pair[&(yp.clone(), xp.clone())] as f64;
        // P(yf | yp)
        let cond_target = future_target[&(*yf, yp.clone())] as f64 / target_only[yp] as f64;
        te += p_joint * libm::log2(cond_full / cond_target);
    }
    te
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constant_driver_is_zero() {
        let y: Vec<u8> = (0..60).map(|i| ((i * 7 + i / 3) % 3) as u8).collect();
        let x = SymbolicSeries::from_symbols(vec![2; 60], 3).unwrap();
        let y = SymbolicSeries::from_symbols(y, 3).unwrap();
        assert_eq!(brute_force_te(&x, &y, Lags::default()).unwrap(), 0.0);
    }

    #[test]
    fn hand_table() {
        // X = 0 1 1 0 1 0 0 1 ..., Y[t+1] = X[t]: the driver fully determines
        // the next target value, which is uniform over {0,1} and independent
        // of Y[t] when X is a de Bruijn-like cycle of period 4 (00,01,11,10).
        let cycle = [0u8, 0, 1, 1];
        let x: Vec<u8> = (0..41).map(|i| cycle[i % 4]).collect();
        let mut y = vec![1u8; 41];
        y[1..].copy_from_slice(&x[..40]);
        let te = brute_force_te_unchecked(&x, &y, Lags::default());
        // Samples t = 0..39; (Y[t], X[t]) cycles through all four pairs and
        // Y[t+1] = X[t]: H(Yf|Yp) = 1 bit, H(Yf|Yp,Xp) = 0.
        assert!((te - 1.0).abs() < 1e-12, "te = {te}");
    }

    #[test]
    fn rejects_oversized_input() {
        let x = SymbolicSeries::from_symbols(vec![0; MAX_ORACLE_LEN + 1], 2).unwrap();
        assert!(brute_force_te(&x, &x, Lags::default()).is_err());
    }
}
