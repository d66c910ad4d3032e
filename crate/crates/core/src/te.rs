//! Plug-in transfer entropy between symbol sequences.
//!
//! For a driver `X` and target `Y` the estimator embeds, at every admissible
//! time `t`, the future target value `Y[t+h]`, the target past
//! `(Y[t], .., Y[t-k+1])` and the driver past `(X[t], .., X[t-j+1])`, then
//! evaluates
//!
//! ```text
//! T = H(Yf | Yp) - H(Yf | Xp, Yp)
//!   = ( S(Yf,Yp,Xp) - S(Yp,Xp) - S(Yf,Yp) + S(Yp) ) / N
//! ```
//!
//! where `S(.) = sum c log2 c` over the cells of the empirical joint count
//! table and `N` is the number of embedded samples. The target-only terms do
//! not change when the driver is permuted, so [`TeEstimator`] computes them
//! once and re-evaluates only the driver-dependent tables per call.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::entropy::c_log2_c;
use crate::error::{Error, Result};
use crate::symbolic::SymbolicSeries;

/// Minimum number of embedded samples the estimator accepts.
pub const MIN_EFFECTIVE_SAMPLES: usize = 20;

/// Cell count up to which tables are dense arrays; larger tables are counted
/// by sorting codes. Both walk cells in ascending code order.
const DENSE_CELLS: u64 = 1 << 16;

/// Embedding of the estimator: `driver` past values of `X`, `target` past
/// values of `Y`, and the forecast `horizon`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Lags {
    pub driver: usize,
    pub target: usize,
    pub horizon: usize,
}

impl Default for Lags {
    fn default() -> Self {
        Lags {
            driver: 1,
            target: 1,
            horizon: 1,
        }
    }
}

impl Lags {
    pub fn new(driver: usize, target: usize, horizon: usize) -> Self {
        Lags {
            driver,
            target,
            horizon,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.driver == 0 || self.target == 0 || self.horizon == 0 {
            return Err(Error::Domain(format!(
                "lags must be at least 1, got driver {} target {} horizon {}",
                self.driver, self.target, self.horizon
            )));
        }
        Ok(())
    }

    /// Number of embedded samples for a series of length `len`.
    pub fn effective_samples(&self, len: usize) -> usize {
        let m = self.driver.max(self.target);
        (len + 1).saturating_sub(m + self.horizon)
    }

    /// Checks `len - max(j, k) - h >= 20`.
    pub fn check_length(&self, len: usize) -> Result<()> {
        let m = self.driver.max(self.target);
        let spare = len.saturating_sub(m + self.horizon);
        if len < m + self.horizon || spare < MIN_EFFECTIVE_SAMPLES {
            return Err(Error::length(
                "transfer entropy",
                m + self.horizon + MIN_EFFECTIVE_SAMPLES,
                len,
            ));
        }
        Ok(())
    }
}

fn checked_pow(base: usize, exp: usize) -> Option<u64> {
    (base as u64).checked_pow(exp as u32)
}

/// Transfer entropy into a fixed target, reusable across driver permutations.
#[derive(Debug, Clone)]
pub struct TeEstimator {
    lags: Lags,
    len: usize,
    /// First embedded time index.
    first: usize,
    driver_q: u64,
    /// `q_y^k`
    target_past_cells: u64,
    /// `q_y^(k+1)`
    target_cells: u64,
    /// Target-past code per sample.
    past_codes: Vec<u64>,
    /// Target-past-and-future code per sample.
    past_future_codes: Vec<u64>,
    /// `S(Yf,Yp) - S(Yp)`.
    target_term: f64,
    /// `c log2 c` for `c` in `0..=N`.
    clogc: Vec<f64>,
}

impl TeEstimator {
    pub fn new(target: &SymbolicSeries, driver_alphabet: usize, lags: Lags) -> Result<Self> {
        lags.check_length(target.len())?;
        Self::build(target, driver_alphabet, lags)
    }

    /// Construction without the minimum-sample guard.
    pub(crate) fn build(target: &SymbolicSeries, driver_alphabet: usize, lags: Lags) -> Result<Self> {
        lags.validate()?;
        if lags.effective_samples(target.len()) == 0 {
            return Err(Error::length("transfer entropy", lags.driver.max(lags.target) + lags.horizon, target.len()));
        }
        if !(2..=256).contains(&driver_alphabet) {
            return Err(Error::Domain(format!(
                "driver alphabet size {driver_alphabet} outside 2..=256"
            )));
        }
        let qy = target.alphabet_size();
        let overflow = || Error::Domain(String::from("embedding table too large"));
        let target_past_cells = checked_pow(qy, lags.target).ok_or_else(overflow)?;
        let target_cells = target_past_cells
            .checked_mul(qy as u64)
            .ok_or_else(overflow)?;
        let driver_cells = checked_pow(driver_alphabet, lags.driver).ok_or_else(overflow)?;
        target_cells
            .checked_mul(driver_cells)
            .ok_or_else(overflow)?;

        let y = target.symbols();
        let m = lags.driver.max(lags.target);
        let first = m - 1;
        let n = lags.effective_samples(y.len());
        let mut past_codes = Vec::with_capacity(n);
        let mut past_future_codes = Vec::with_capacity(n);
        for t in first..first + n {
            let mut code = 0u64;
            let mut scale = 1u64;
            for i in 0..lags.target {
                code += y[t - i] as u64 * scale;
                scale *= qy as u64;
            }
            past_codes.push(code);
            past_future_codes.push(code + target_past_cells * y[t + lags.horizon] as u64);
        }

        let clogc: Vec<f64> = (0..=n as u32).map(c_log2_c).collect();
        let mut scratch = Vec::new();
        let s_past = table_sum(&past_codes, target_past_cells, &clogc, &mut scratch);
        let s_past_future =
            table_sum(&past_future_codes, target_cells, &clogc, &mut scratch);

        Ok(Self {
            lags,
            len: y.len(),
            first,
            driver_q: driver_alphabet as u64,
            target_past_cells,
            target_cells,
            past_codes,
            past_future_codes,
            target_term: s_past_future - s_past,
            clogc,
        })
    }

    pub fn lags(&self) -> Lags {
        self.lags
    }

    pub fn effective_samples(&self) -> usize {
        self.past_codes.len()
    }

    /// Transfer entropy in bits from `driver` into the fixed target.
    pub fn estimate(&self, driver: &[u8]) -> Result<f64> {
        if driver.len() != self.len {
            return Err(Error::Domain(format!(
                "driver length {} differs from target length {}",
                driver.len(),
                self.len
            )));
        }
        if let Some(&s) = driver.iter().find(|&&s| s as u64 >= self.driver_q) {
            return Err(Error::Domain(format!(
                "driver symbol {s} outside alphabet of size {}",
                self.driver_q
            )));
        }
        Ok(self.estimate_unchecked(driver))
    }

    pub(crate) fn estimate_unchecked(&self, driver: &[u8]) -> f64 {
        let n = self.past_codes.len();
        let driver_cells = self.driver_q.pow(self.lags.driver as u32);
        let mut joint = Vec::with_capacity(n);
        let mut full = Vec::with_capacity(n);
        for s in 0..n {
            let t = self.first + s;
            let mut xp = 0u64;
            let mut scale = 1u64;
            for i in 0..self.lags.driver {
                xp += driver[t - i] as u64 * scale;
                scale *= self.driver_q;
            }
            joint.push(self.past_codes[s] + self.target_past_cells * xp);
            full.push(self.past_future_codes[s] + self.target_cells * xp);
        }
        let mut scratch = Vec::new();
        let s_joint = table_sum(
            &joint,
            self.target_past_cells * driver_cells,
            &self.clogc,
            &mut scratch,
        );
        let s_full = table_sum(
            &full,
            self.target_cells * driver_cells,
            &self.clogc,
            &mut scratch,
        );
        let te = ((s_full - s_joint) - self.target_term) / n as f64;
        debug_assert!(te >= -1e-12, "plug-in transfer entropy {te} < 0");
        te.max(0.0)
    }
}

/// `sum c log2 c` over the count table of `codes` (all `< cells`), walking
/// cells in ascending code order.
fn table_sum(codes: &[u64], cells: u64, clogc: &[f64], scratch: &mut Vec<u64>) -> f64 {
    if cells <= DENSE_CELLS {
        let mut counts = vec![0u32; cells as usize];
        for &c in codes {
            counts[c as usize] += 1;
        }
        counts.iter().map(|&c| clogc[c as usize]).sum()
    } else {
        scratch.clear();
        scratch.extend_from_slice(codes);
        scratch.sort_unstable();
        let mut total = 0.0;
        let mut i = 0;
        while i < scratch.len() {
            let mut j = i + 1;
            while j < scratch.len() && scratch[j] == scratch[i] {
                j += 1;
            }
            total += clogc[j - i];
            i = j;
        }
        total
    }
}

/// Transfer entropy from `x` to `y` in bits.
pub fn transfer_entropy(x: &SymbolicSeries, y: &SymbolicSeries, lags: Lags) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Domain(format!(
            "series lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    TeEstimator::new(y, x.alphabet_size(), lags)?.estimate(x.symbols())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force_te;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sym(v: &[u8], q: usize) -> SymbolicSeries {
        SymbolicSeries::from_symbols(v.to_vec(), q).unwrap()
    }

    fn uniform(seed: u64, n: usize, q: u8) -> Vec<u8> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(0..q)).collect()
    }

    #[test]
    fn alternating_pair_matches_tabulation() {
        let x: Vec<u8> = (0..12).map(|i| (i % 2) as u8).collect();
        let y: Vec<u8> = (0..12).map(|i| ((i + 1) % 2) as u8).collect();
        let lags = Lags::default();
        // 12 symbols, j=k=h=1: 11 embedded samples, below the 20 minimum.
        assert!(transfer_entropy(&sym(&x, 2), &sym(&y, 2), lags).is_err());
        let te = TeEstimator::build(&sym(&y, 2), 2, lags)
            .unwrap()
            .estimate_unchecked(&x);
        let oracle = crate::oracle::brute_force_te_unchecked(&x, &y, lags);
        assert!((te - oracle).abs() < 1e-12);
        // Y is a deterministic function of its own past: nothing left to explain.
        assert_eq!(te, 0.0);
    }

    #[test]
    fn independent_binary_is_near_zero() {
        let x = sym(&uniform(11, 10_000, 2), 2);
        let y = sym(&uniform(12, 10_000, 2), 2);
        assert!(transfer_entropy(&x, &y, Lags::default()).unwrap() < 0.005);
    }

    #[test]
    fn copy_of_three_symbols_hits_log2_3() {
        let x = uniform(13, 10_000, 3);
        let mut y = vec![0u8; 10_000];
        y[1..].copy_from_slice(&x[..9_999]);
        let te = transfer_entropy(&sym(&x, 3), &sym(&y, 3), Lags::default()).unwrap();
        assert!((te - libm::log2(3.0)).abs() < 0.02, "te = {te}");
    }

    #[test]
    fn constant_driver_carries_nothing() {
        let y = sym(&uniform(14, 200, 3), 3);
        let x = sym(&[1u8; 200], 3);
        assert_eq!(transfer_entropy(&x, &y, Lags::new(2, 1, 1)).unwrap(), 0.0);
    }

    #[test]
    fn length_and_lag_errors() {
        let a = sym(&uniform(1, 23, 2), 2);
        assert!(matches!(
            transfer_entropy(&a, &a, Lags::new(2, 2, 2)),
            Err(Error::Length { .. })
        ));
        assert!(transfer_entropy(&a, &a, Lags::new(0, 1, 1)).is_err());
        let b = sym(&uniform(1, 30, 2), 2);
        assert!(transfer_entropy(&a, &b, Lags::default()).is_err());
    }

    #[test]
    fn sparse_tables_agree_with_dense() {
        // 4^8 * 4 > DENSE_CELLS forces the sorting path.
        let x = sym(&uniform(21, 300, 4), 4);
        let y = sym(&uniform(22, 300, 4), 4);
        let lags = Lags::new(4, 4, 1);
        let te = transfer_entropy(&x, &y, lags).unwrap();
        let oracle = brute_force_te(&x, &y, lags).unwrap();
        assert!((te - oracle).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn relabeling_invariance(seed in any::<u64>(), n in 40usize..200) {
            let x = uniform(seed, n, 3);
            let y: Vec<u8> = uniform(seed ^ 1, n, 3).iter().zip(&x).map(|(a, b)| (a + b) % 3).collect();
            let lags = Lags::default();
            let te = transfer_entropy(&sym(&x, 3), &sym(&y, 3), lags).unwrap();
            let px = [2u8, 0, 1];
            let py = [1u8, 2, 0];
            let xr: Vec<u8> = x.iter().map(|&s| px[s as usize]).collect();
            let yr: Vec<u8> = y.iter().map(|&s| py[s as usize]).collect();
            let te_r = transfer_entropy(&sym(&xr, 3), &sym(&yr, 3), lags).unwrap();
            prop_assert!((te - te_r).abs() < 1e-12);
        }

        #[test]
        fn non_negative(seed in any::<u64>(), n in 30usize..150, q in 2u8..5) {
            let x = sym(&uniform(seed, n, q), q as usize);
            let y = sym(&uniform(seed.wrapping_mul(3), n, q), q as usize);
            let te = transfer_entropy(&x, &y, Lags::new(2, 1, 1)).unwrap();
            prop_assert!(te >= 0.0);
        }
    }
}
