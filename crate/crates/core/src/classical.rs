//! Standard confidence intervals for the median or center: t, Wilcoxon
//! signed-rank, sign test, asymptotic median with a kernel density estimate,
//! and five bootstrap intervals built from resampled medians.

use alloc::vec::Vec;

use crate::binom::BinomialHalf;
use crate::error::{check_alpha, Error, Result};
use crate::region::{median_of_sorted, region_from_gamma0, Interval, Region, SortedSample};
use crate::rng::RngStream;
use crate::signed_rank::SignedRankNull;
use crate::special::{norm_cdf, norm_pdf, norm_quantile, t_quantile};

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, libm::sqrt(ss / (n - 1.0)))
}

fn need(sample: &SortedSample, min: usize, what: &str) -> Result<()> {
    if sample.len() >= min {
        Ok(())
    } else {
        Err(Error::domain(alloc::format!("{what} needs n >= {min}, got {}", sample.len())))
    }
}

/// `X̄ ± t_{n-1; α/2} S / √n`, closed. Constant data gives the point `[x, x]`.
pub fn cr_t(sample: &SortedSample, alpha: f64) -> Result<Region> {
    check_alpha(alpha)?;
    need(sample, 2, "the t interval")?;
    let n = sample.len();
    let (mean, sd) = mean_sd(sample.values());
    let half = t_quantile(1.0 - alpha / 2.0, (n - 1) as u32)? * sd / libm::sqrt(n as f64);
    Ok(Region::single(Interval::closed(mean - half, mean + half)))
}

/// All `n(n+1)/2` pairwise means `(X_i + X_j)/2`, `i <= j`, ascending.
pub fn walsh_averages(sample: &SortedSample) -> Vec<f64> {
    let x = sample.values();
    let mut w = Vec::with_capacity(x.len() * (x.len() + 1) / 2);
    for i in 0..x.len() {
        for j in i..x.len() {
            w.push(0.5 * (x[i] + x[j]));
        }
    }
    w.sort_by(f64::total_cmp);
    w
}

/// `[W(k₁+1), W(k₂+1))` from the ordered Walsh averages, with `k₁` the largest
/// `w` with `P{W⁺ <= w} <= α/2` and `k₂` the smallest with `P{W⁺ <= w} >= 1 - α/2`.
pub fn cr_wilcoxon(sample: &SortedSample, alpha: f64) -> Result<Region> {
    check_alpha(alpha)?;
    need(sample, 2, "the Wilcoxon interval")?;
    let null = SignedRankNull::new(sample.len())?;
    let cdf = null.cdf_values();
    let Some(k1) = cdf.iter().rposition(|&c| c <= alpha / 2.0) else {
        return Err(Error::Infeasible {
            requested: 1.0 - alpha,
            max_attainable: 1.0 - 2.0 * cdf[0],
        });
    };
    let k2 = cdf.partition_point(|&c| c < 1.0 - alpha / 2.0);
    let w = walsh_averages(sample);
    let at = |i: usize| w.get(i).copied().unwrap_or(f64::INFINITY);
    Ok(Region::single(Interval::half_open(at(k1), at(k2))))
}

/// Sign-test interval `[X(k₁+1), X(k₂+1))`; `k₁ = -1` gives `-inf` as the lower end.
pub fn cr_sign(sample: &SortedSample, alpha: f64) -> Result<Region> {
    check_alpha(alpha)?;
    let n = sample.len();
    let binom = BinomialHalf::new(n)?;
    let cdf = binom.cdf_values();
    // Lowest index in the set, k₁ + 1.
    let first = cdf.partition_point(|&c| c <= alpha / 2.0);
    let k2 = cdf.partition_point(|&c| c < 1.0 - alpha / 2.0);
    let set: Vec<usize> = (first..=k2).collect();
    region_from_gamma0(sample, &set)
}

/// Type-7 sample quantile of sorted data.
fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Gaussian-kernel density estimate at the sample median with bandwidth
/// `0.9 min(sd, IQR/1.34) n^(-1/5)`.
pub fn kde_at_median(sample: &SortedSample) -> Result<f64> {
    need(sample, 2, "the density estimate")?;
    let x = sample.values();
    let n = x.len() as f64;
    let (_, sd) = mean_sd(x);
    let iqr = quantile_type7(x, 0.75) - quantile_type7(x, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let h = 0.9 * spread * libm::pow(n, -0.2);
    if !(h > 0.0) {
        return Err(Error::degenerate("zero kernel bandwidth: the sample has no spread"));
    }
    let m = sample.median();
    let density = x.iter().map(|&xi| norm_pdf((m - xi) / h)).sum::<f64>() / (n * h);
    Ok(density)
}

/// `M ± z_{α/2} / (2 √n f̂(M))`, closed.
pub fn cr_asymp_median(sample: &SortedSample, alpha: f64) -> Result<Region> {
    check_alpha(alpha)?;
    let f_hat = kde_at_median(sample)?;
    asymp_median_interval(sample.median(), sample.len(), f_hat, alpha)
}

pub(crate) fn asymp_median_interval(median: f64, n: usize, f_hat: f64, alpha: f64) -> Result<Region> {
    let z = norm_quantile(1.0 - alpha / 2.0)?;
    let half = z / (libm::sqrt(n as f64) * 2.0 * f_hat);
    Ok(Region::single(Interval::closed(median - half, median + half)))
}

/// Medians of `B` resamples, sorted, with the point median and their spread.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapDistribution {
    medians: Vec<f64>,
    point_median: f64,
    sd: f64,
}

impl BootstrapDistribution {
    /// Builds the distribution from already computed resample medians.
    pub fn from_medians(mut medians: Vec<f64>, point_median: f64) -> Result<Self> {
        if medians.len() < 2 {
            return Err(Error::domain("the bootstrap needs at least 2 replications"));
        }
        if medians.iter().any(|m| !m.is_finite()) {
            return Err(Error::domain("bootstrap medians must be finite"));
        }
        medians.sort_by(f64::total_cmp);
        let (_, sd) = mean_sd(&medians);
        Ok(Self { medians, point_median, sd })
    }

    pub fn breps(&self) -> usize {
        self.medians.len()
    }

    /// Resampled medians in ascending order.
    pub fn medians(&self) -> &[f64] {
        &self.medians
    }

    pub fn point_median(&self) -> f64 {
        self.point_median
    }

    /// Standard deviation of the resampled medians (denominator `B - 1`).
    pub fn sd(&self) -> f64 {
        self.sd
    }

    /// `#{M*_k <= t} / B`.
    pub fn ecdf(&self, t: f64) -> f64 {
        self.medians.partition_point(|&m| m <= t) as f64 / self.breps() as f64
    }

    /// The `⌈pB⌉`-th smallest median (the smallest for `p = 0`).
    pub fn quantile(&self, p: f64) -> f64 {
        let b = self.breps();
        let rank = libm::ceil(p.clamp(0.0, 1.0) * b as f64) as usize;
        self.medians[rank.clamp(1, b) - 1]
    }
}

/// Draws `breps` resamples of size `n` with replacement and records their medians.
pub fn bootstrap_medians(sample: &SortedSample, breps: usize, rng: &mut RngStream) -> Result<BootstrapDistribution> {
    if breps < 2 {
        return Err(Error::domain("the bootstrap needs at least 2 replications"));
    }
    let x = sample.values();
    let n = x.len();
    let mut buf = alloc::vec![0.0; n];
    let mut medians = Vec::with_capacity(breps);
    for _ in 0..breps {
        for slot in buf.iter_mut() {
            *slot = x[rng.below(n)];
        }
        medians.push(unsorted_median(&mut buf));
    }
    BootstrapDistribution::from_medians(medians, sample.median())
}

fn unsorted_median(buf: &mut [f64]) -> f64 {
    let n = buf.len();
    let (lower, upper, _) = buf.select_nth_unstable_by(n / 2, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let below = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (below + upper)
    }
}

/// Which jackknife acceleration formula the BCa interval uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AccelerationFormula {
    /// `Σ d³ / (6 (Σ d²)^{3/2})` with `d_i = mean - M₍ᵢ₎`.
    #[default]
    Standard,
    /// `Σ d² / (6 (Σ d²)^{3/2})`, kept for comparison with published tables.
    AsPrinted,
}

/// Leave-one-out medians `M₍ᵢ₎`, `i = 1..n`, in order-statistic order.
pub fn jackknife_medians(sample: &SortedSample) -> Vec<f64> {
    let x = sample.values();
    let n = x.len();
    let m = n - 1;
    let at = |skip: usize, j: usize| if j < skip { x[j] } else { x[j + 1] };
    (0..n)
        .map(|i| {
            if m == 0 {
                f64::NAN
            } else if m % 2 == 1 {
                at(i, m / 2)
            } else {
                0.5 * (at(i, m / 2 - 1) + at(i, m / 2))
            }
        })
        .collect()
}

/// Jackknife estimate of the acceleration `â`; 0 when the leave-one-out medians all agree.
pub fn jackknife_acceleration(sample: &SortedSample, formula: AccelerationFormula) -> Result<f64> {
    need(sample, 2, "the jackknife")?;
    let loo = jackknife_medians(sample);
    let mean = loo.iter().sum::<f64>() / loo.len() as f64;
    let d: Vec<f64> = loo.iter().map(|m| mean - m).collect();
    let sum_sq: f64 = d.iter().map(|v| v * v).sum();
    if sum_sq == 0.0 {
        return Ok(0.0);
    }
    let numerator = match formula {
        AccelerationFormula::Standard => d.iter().map(|v| v * v * v).sum::<f64>(),
        AccelerationFormula::AsPrinted => sum_sq,
    };
    Ok(numerator / (6.0 * libm::pow(sum_sq, 1.5)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BootstrapVariant {
    Basic,
    StandardError,
    Percentile,
    BiasCorrected,
    BiasCorrectedAccelerated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapInterval {
    pub region: Region,
    /// Set when `B*(M)` was 0 or 1 and had to be pulled inside `(0, 1)`.
    pub p0_clamped: bool,
}

/// Bootstrap intervals from a resampling distribution; all are closed.
///
/// `acceleration` is only read by the BCa variant.
pub fn cr_bootstrap(
    sample: &SortedSample,
    alpha: f64,
    boot: &BootstrapDistribution,
    variant: BootstrapVariant,
    acceleration: AccelerationFormula,
) -> Result<BootstrapInterval> {
    check_alpha(alpha)?;
    need(sample, 2, "the bootstrap intervals")?;
    let m = sample.median();
    let lower_p = alpha / 2.0;
    let upper_p = 1.0 - alpha / 2.0;
    let closed = |lo: f64, hi: f64| Region::single(Interval::closed(lo, hi));
    let plain = |region| Ok(BootstrapInterval { region, p0_clamped: false });
    match variant {
        BootstrapVariant::Basic => {
            // Quantiles of M* - M are quantiles of M* shifted by M.
            plain(closed(2.0 * m - boot.quantile(upper_p), 2.0 * m - boot.quantile(lower_p)))
        }
        BootstrapVariant::StandardError => {
            let half = t_quantile(upper_p, (sample.len() - 1) as u32)? * boot.sd();
            plain(closed(m - half, m + half))
        }
        BootstrapVariant::Percentile => plain(closed(boot.quantile(lower_p), boot.quantile(upper_p))),
        BootstrapVariant::BiasCorrected | BootstrapVariant::BiasCorrectedAccelerated => {
            let b = boot.breps() as f64;
            let raw = boot.ecdf(m);
            let p0 = raw.clamp(0.5 / b, 1.0 - 0.5 / b);
            let z0 = if p0 == 0.5 { 0.0 } else { norm_quantile(p0)? };
            let a = if variant == BootstrapVariant::BiasCorrectedAccelerated {
                jackknife_acceleration(sample, acceleration)?
            } else {
                0.0
            };
            let adjust = |p: f64| -> Result<f64> {
                if z0 == 0.0 && a == 0.0 {
                    return Ok(p);
                }
                let z = z0 + norm_quantile(p)?;
                Ok(norm_cdf(z0 + z / (1.0 - a * z)))
            };
            Ok(BootstrapInterval {
                region: closed(boot.quantile(adjust(lower_p)?), boot.quantile(adjust(upper_p)?)),
                p0_clamped: p0 != raw,
            })
        }
    }
}

/// Sample median of arbitrary-order data.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    median_of_sorted(&v)
}
