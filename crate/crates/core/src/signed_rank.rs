//! Exact null distribution of the Wilcoxon signed-rank statistic `W+`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub const MAX_N: usize = 200;

/// Null law of `W+` for a fixed `n`, held as a CDF over `0..=n(n+1)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedRankNull {
    n: usize,
    cdf: Vec<f64>,
}

impl SignedRankNull {
    /// Convolves the Bernoulli(1/2) contributions of ranks `1..=n` in
    /// probability space.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("signed-rank null needs n >= 1"));
        }
        if n > MAX_N {
            return Err(Error::Capability {
                what: "signed-rank null distribution",
                limit: MAX_N,
            });
        }
        let max = n * (n + 1) / 2;
        let mut pmf = vec![0.0f64; max + 1];
        pmf[0] = 1.0;
        let mut reach = 0;
        for rank in 1..=n {
            reach += rank;
            for w in (0..=reach).rev() {
                let with = if w >= rank { pmf[w - rank] } else { 0.0 };
                pmf[w] = 0.5 * (pmf[w] + with);
            }
        }
        let mut acc = 0.0;
        let cdf = pmf
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        Ok(Self { n, cdf })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_statistic(&self) -> usize {
        self.cdf.len() - 1
    }

    pub fn cdf(&self, w: usize) -> Result<f64> {
        self.cdf.get(w).copied().ok_or_else(|| {
            Error::domain(alloc::format!(
                "w = {w} outside 0..={}",
                self.max_statistic()
            ))
        })
    }

    pub fn cdf_values(&self) -> &[f64] {
        &self.cdf
    }
}

pub fn signed_rank_null_cdf(w: usize, n: usize) -> Result<f64> {
    SignedRankNull::new(n)?.cdf(w)
}
