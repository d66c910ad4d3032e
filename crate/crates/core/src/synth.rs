//! Seeded generators of return pairs with known directional coupling.
//!
//! Normal draws use the Box-Muller cosine branch on a ChaCha8 uniform stream,
//! with `libm` for the transcendental functions, so a given process description produces the
//! same bits on every platform. Series carry a daily date grid starting on
//! 2020-01-01.

use alloc::format;
use alloc::vec::Vec;

use chrono::{Days, NaiveDate};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::seed;
use crate::series::{AlignedPair, ReturnSeries};

pub const MIN_SYNTH_LEN: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ProcessKind {
    /// Two independent standard-normal series.
    Independent,
    /// `Y_t = X_{t-lag}`.
    Copy { lag: usize },
    /// `Y_t = a X_{t-1} + e_t`, `e_t ~ N(0, sigma_eps^2)`.
    LinearCoupled { a: f64, sigma_eps: f64 },
    /// `Y_t = sign(X_{t-lag})`, flipped with probability `flip_prob`. Values are `+1` or `-1`.
    ThresholdCoupled { lag: usize, flip_prob: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    pub length: usize,
    pub seed: u64,
}

impl ProcessSpec {
    pub fn new(kind: ProcessKind, length: usize, seed: u64) -> Self {
        Self { kind, length, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.length < MIN_SYNTH_LEN {
            return Err(Error::Domain(format!(
                "length {} below minimum {MIN_SYNTH_LEN}",
                self.length
            )));
        }
        match self.kind {
            ProcessKind::LinearCoupled { a, sigma_eps } => {
                if !a.is_finite() {
                    return Err(Error::Domain(format!("coupling {a} is not finite")));
                }
                if !(sigma_eps > 0.0 && sigma_eps.is_finite()) {
                    return Err(Error::Domain(format!("sigma_eps must be positive, got {sigma_eps}")));
                }
            }
            ProcessKind::ThresholdCoupled { flip_prob, .. } => {
                if !(0.0..=0.5).contains(&flip_prob) {
                    return Err(Error::Domain(format!("flip_prob {flip_prob} outside [0, 0.5]")));
                }
            }
            ProcessKind::Independent | ProcessKind::Copy { .. } => {}
        }
        Ok(())
    }

    fn history(&self) -> usize {
        match self.kind {
            ProcessKind::Independent => 0,
            ProcessKind::Copy { lag } | ProcessKind::ThresholdCoupled { lag, .. } => lag,
            ProcessKind::LinearCoupled { .. } => 1,
        }
    }
}

struct Normal(ChaCha8Rng);

impl Normal {
    fn next(&mut self) -> f64 {
        // 1 - u lies in (0, 1], keeping the logarithm finite.
        let u1 = 1.0 - self.0.random::<f64>();
        let u2 = self.0.random::<f64>();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(core::f64::consts::TAU * u2)
    }

    fn take(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next()).collect()
    }
}

/// Date grid used by generated pairs: consecutive days from 2020-01-01.
pub fn date_grid(n: usize) -> Vec<NaiveDate> {
    let start = NaiveDate::from_ymd_opt(2020, 1, 1).expect("valid date");
    (0..n as u64)
        .map(|d| start.checked_add_days(Days::new(d)).expect("date in range"))
        .collect()
}

pub fn generate(spec: &ProcessSpec) -> Result<AlignedPair> {
    spec.validate()?;
    let n = spec.length;
    let pre = spec.history();
    // Driver with `pre` observations of history ahead of the sample.
    let full_x = Normal(seed::stream(spec.seed, &[0])).take(n + pre);
    let x = full_x[pre..].to_vec();
    let y: Vec<f64> = match spec.kind {
        ProcessKind::Independent => Normal(seed::stream(spec.seed, &[1])).take(n),
        ProcessKind::Copy { lag } => full_x[pre - lag..pre - lag + n].to_vec(),
        ProcessKind::LinearCoupled { a, sigma_eps } => {
            let mut eps = Normal(seed::stream(spec.seed, &[1]));
            full_x[..n].iter().map(|&xl| a * xl + sigma_eps * eps.next()).collect()
        }
        ProcessKind::ThresholdCoupled { lag, flip_prob } => {
            let mut flips = seed::stream(spec.seed, &[2]);
            full_x[pre - lag..pre - lag + n]
                .iter()
                .map(|&xl| {
                    let s = if xl >= 0.0 { 1.0 } else { -1.0 };
                    if flips.random::<f64>() < flip_prob {
                        -s
                    } else {
                        s
                    }
                })
                .collect()
        }
    };
    let dates = date_grid(n);
    AlignedPair::new(
        ReturnSeries::new("X", dates.clone(), x)?,
        ReturnSeries::new("Y", dates, y)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_force_te_unchecked;
    use crate::symbolic::{Binning, SymbolicSeries};
    use crate::te::{transfer_entropy, Lags, TeEstimator};
    use rand::SeedableRng;

    fn te(pair: &AlignedPair, q: usize, reverse: bool) -> f64 {
        let b = Binning::Quantile { q };
        let x = b.discretize(pair.driver().values()).unwrap();
        let y = b.discretize(pair.target().values()).unwrap();
        if reverse {
            transfer_entropy(&y, &x, Lags::default()).unwrap()
        } else {
            transfer_entropy(&x, &y, Lags::default()).unwrap()
        }
    }

    #[test]
    fn deterministic_for_fixed_spec() {
        let spec = ProcessSpec::new(ProcessKind::LinearCoupled { a: 0.5, sigma_eps: 2.0 }, 300, 11);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a, b);
        let c = generate(&ProcessSpec { seed: 12, ..spec }).unwrap();
        assert_ne!(a.driver().values(), c.driver().values());
    }

    #[test]
    fn structural_relations() {
        let copy = generate(&ProcessSpec::new(ProcessKind::Copy { lag: 3 }, 200, 5)).unwrap();
        let (x, y) = (copy.driver().values(), copy.target().values());
        assert_eq!(&y[3..], &x[..197]);

        let lin = generate(&ProcessSpec::new(ProcessKind::LinearCoupled { a: 2.0, sigma_eps: 1.0 }, 500, 6)).unwrap();
        let (x, y) = (lin.driver().values(), lin.target().values());
        let resid: Vec<f64> = (1..500).map(|t| y[t] - 2.0 * x[t - 1]).collect();
        let m = crate::stats::mean(&resid);
        let s = crate::stats::sample_std(&resid);
        assert!(m.abs() < 0.2 && (s - 1.0).abs() < 0.15, "mean {m} std {s}");

        let th = generate(&ProcessSpec::new(
            ProcessKind::ThresholdCoupled { lag: 2, flip_prob: 0.0 },
            200,
            7,
        ))
        .unwrap();
        let (x, y) = (th.driver().values(), th.target().values());
        for t in 2..200 {
            assert_eq!(y[t], if x[t - 2] >= 0.0 { 1.0 } else { -1.0 });
        }
    }

    #[test]
    fn normal_moments() {
        let v = Normal(seed::stream(3, &[0])).take(100_000);
        assert!(crate::stats::mean(&v).abs() < 0.02);
        assert!((crate::stats::sample_std(&v) - 1.0).abs() < 0.02);
    }

    #[test]
    fn invalid_specs() {
        let bad = [
            ProcessSpec::new(ProcessKind::Independent, 99, 0),
            ProcessSpec::new(ProcessKind::LinearCoupled { a: 1.0, sigma_eps: 0.0 }, 200, 0),
            ProcessSpec::new(ProcessKind::ThresholdCoupled { lag: 1, flip_prob: 0.6 }, 200, 0),
            ProcessSpec::new(ProcessKind::ThresholdCoupled { lag: 1, flip_prob: -0.1 }, 200, 0),
        ];
        for spec in bad {
            assert!(matches!(generate(&spec), Err(Error::Domain(_))), "{spec:?}");
        }
    }

    #[test]
    fn copy_reaches_alphabet_entropy() {
        let p = generate(&ProcessSpec::new(ProcessKind::Copy { lag: 1 }, 10_000, 1)).unwrap();
        assert!((te(&p, 3, false) - libm::log2(3.0)).abs() < 0.02);
        assert!(te(&p, 3, true) < 0.01);
    }

    #[test]
    fn independent_pair_near_zero() {
        let p = generate(&ProcessSpec::new(ProcessKind::Independent, 10_000, 2)).unwrap();
        assert!(te(&p, 2, false) < 0.005);
        assert!(te(&p, 2, true) < 0.005);
    }

    #[test]
    fn coupling_outside_embedding_is_invisible() {
        let mut v: Vec<f64> = (0..50)
            .map(|s| {
                let p = generate(&ProcessSpec::new(ProcessKind::Copy { lag: 3 }, 2000, s)).unwrap();
                te(&p, 3, false)
            })
            .collect();
        v.sort_by(f64::total_cmp);
        assert!(v[25] < 0.01, "median {}", v[25]);
    }

    #[test]
    fn linear_coupling_is_directional() {
        let wins = (0..20)
            .filter(|&s| {
                let spec = ProcessSpec::new(ProcessKind::LinearCoupled { a: 1.0, sigma_eps: 1.0 }, 5000, s);
                let p = generate(&spec).unwrap();
                te(&p, 2, false) > te(&p, 2, true)
            })
            .count();
        assert_eq!(wins, 20);
    }

    #[test]
    fn estimator_matches_oracle_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..300 {
            let lags = Lags::new(rng.random_range(1..=2), rng.random_range(1..=2), rng.random_range(1..=2));
            let q = rng.random_range(2..=3usize);
            let n = rng.random_range(lags.driver.max(lags.target) + lags.horizon + 1..=200);
            let x: Vec<u8> = (0..n).map(|_| rng.random_range(0..q as u8)).collect();
            let y: Vec<u8> = (0..n).map(|_| rng.random_range(0..q as u8)).collect();
            let ys = SymbolicSeries::from_symbols(y.clone(), q).unwrap();
            let est = TeEstimator::build(&ys, q, lags).unwrap().estimate_unchecked(&x);
            let oracle = brute_force_te_unchecked(&x, &y, lags);
            assert!((est - oracle).abs() <= 1e-12, "{est} vs {oracle} at {lags:?}, n={n}");
        }
    }
}
