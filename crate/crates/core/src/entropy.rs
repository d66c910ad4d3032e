//! Shannon entropy of frequency tables, in bits.

use crate::error::{Error, Result};

/// `H = -sum p log2 p` over the non-empty cells of `counts`.
pub fn shannon_entropy(counts: &[u64]) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::length("shannon_entropy", 1, 0));
    }
    let n = total as f64;
    let h = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * libm::log2(p)
        })
        .sum::<f64>();
    Ok(h.max(0.0))
}

/// `sum c log2 c` over the cells, the count-domain kernel of plug-in entropies:
/// `H = log2 N - S / N`.
#[inline]
pub(crate) fn c_log2_c(c: u32) -> f64 {
    if c <= 1 {
        0.0
    } else {
        let c = c as f64;
        c * libm::log2(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_four_is_two_bits() {
        assert!((shannon_entropy(&[5, 5, 5, 5]).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn point_mass_is_zero() {
        assert_eq!(shannon_entropy(&[0, 9, 0]).unwrap(), 0.0);
    }

    #[test]
    fn three_to_one() {
        // -(0.75 log2 0.75 + 0.25 log2 0.25)
        let want = -(0.75 * libm::log2(0.75) + 0.25 * libm::log2(0.25));
        let got = shannon_entropy(&[3, 1]).unwrap();
        assert!((got - want).abs() < 1e-15);
        assert!((got - 0.811_278_124_459_132_9).abs() < 1e-12);
    }

    #[test]
    fn empty_table() {
        assert!(shannon_entropy(&[]).is_err());
        assert!(shannon_entropy(&[0, 0]).is_err());
    }
}
