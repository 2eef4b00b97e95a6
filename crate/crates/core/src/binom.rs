//! The Binomial(n, 1/2) law of the sign count.
//!
//! Up to [`EXACT_MAX_N`] trials the coefficients are exact `u128` integers and
//! every pmf/cdf value is an exactly scaled dyadic rational; above that the
//! pmf is evaluated in log space.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::special::ln_choose;

/// Largest `n` whose binomial coefficients (and their total `2^n`) fit in `u128`.
pub const EXACT_MAX_N: usize = 125;

/// Largest `n` accepted anywhere in the crate.
pub const MAX_N: usize = 1000;

/// Row `C(n, 0..=n)` by Pascal's rule, so no intermediate exceeds the result.
pub fn binomial_row(n: usize) -> Option<Vec<u128>> {
    if n > EXACT_MAX_N {
        return None;
    }
    let mut row = Vec::with_capacity(n + 1);
    row.push(1u128);
    for i in 1..=n {
        row.push(1);
        for j in (1..i).rev() {
            row[j] += row[j - 1];
        }
    }
    Some(row)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinomialHalf {
    n: usize,
    counts: Option<Vec<u128>>,
    pmf: Vec<f64>,
    cdf: Vec<f64>,
}

impl BinomialHalf {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return Err(Error::domain(alloc::format!(
                "binomial size must lie in 1..={MAX_N}, got {n}"
            )));
        }
        let counts = binomial_row(n);
        let (pmf, cdf) = match &counts {
            Some(row) => {
                let scale = |c: u128| libm::ldexp(c as f64, -(n as i32));
                let pmf = row.iter().map(|&c| scale(c)).collect();
                let mut acc = 0u128;
                let cdf = row
                    .iter()
                    .map(|&c| {
                        acc += c;
                        scale(acc)
                    })
                    .collect();
                (pmf, cdf)
            }
            None => {
                let ln2n = n as f64 * core::f64::consts::LN_2;
                let pmf: Vec<f64> = (0..=n)
                    .map(|k| libm::exp(ln_choose(n as u64, k as u64) - ln2n))
                    .collect();
                let mut acc = 0.0;
                let mut cdf: Vec<f64> = pmf
                    .iter()
                    .map(|&p| {
                        acc += p;
                        acc.min(1.0)
                    })
                    .collect();
                cdf[n] = 1.0;
                (pmf, cdf)
            }
        };
        Ok(Self { n, counts, pmf, cdf })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Exact coefficients `C(n, k)` when `n <= EXACT_MAX_N`.
    pub fn counts(&self) -> Option<&[u128]> {
        self.counts.as_deref()
    }

    pub fn pmf(&self, k: usize) -> Result<f64> {
        self.pmf.get(k).copied().ok_or_else(|| self.out_of_range(k))
    }

    pub fn cdf(&self, k: usize) -> Result<f64> {
        self.cdf.get(k).copied().ok_or_else(|| self.out_of_range(k))
    }

    pub fn pmf_values(&self) -> &[f64] {
        &self.pmf
    }

    pub fn cdf_values(&self) -> &[f64] {
        &self.cdf
    }

    /// Smallest `k` with `cdf(k) >= p`.
    pub fn quantile(&self, p: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(alloc::format!(
                "binomial quantile needs p in [0, 1], got {p}"
            )));
        }
        Ok(self.cdf.partition_point(|&c| c < p).min(self.n))
    }

    /// `P{B in set}`; indices beyond `n` contribute nothing.
    pub fn mass_of(&self, set: &[usize]) -> f64 {
        set.iter().filter_map(|&k| self.pmf.get(k)).sum()
    }

    fn out_of_range(&self, k: usize) -> Error {
        Error::domain(alloc::format!("k = {k} outside 0..={}", self.n))
    }
}

pub fn binom_pmf(k: usize, n: usize) -> Result<f64> {
    BinomialHalf::new(n)?.pmf(k)
}

pub fn binom_cdf(k: usize, n: usize) -> Result<f64> {
    BinomialHalf::new(n)?.cdf(k)
}

pub fn binom_quantile(p: f64, n: usize) -> Result<usize> {
    BinomialHalf::new(n)?.quantile(p)
}
