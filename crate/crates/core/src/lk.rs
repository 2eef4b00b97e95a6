//! Expected spacings `l(k) = E X(k+1) - E X(k)`, `k = 0..=n`, and the ratios
//! `r(k) = b(k; n, 1/2) / l(k)` that order indices for inclusion in a region.
//!
//! Profiles come from closed forms (uniform and exponential focus), from the
//! data (method-of-moments spacings or the EDF plug-in), or from numerical
//! integration of `C(n,k) * integral of F^k (1-F)^(n-k)` over the support.

use alloc::vec::Vec;

use crate::binom::{binomial_row, BinomialHalf};
use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::region::SortedSample;
use crate::special::ln_choose;

/// Ratios `r(k)`, either as exact integers up to a common positive scale or
/// as floating-point values.
#[derive(Debug, Clone, PartialEq)]
pub enum Ratios {
    Exact(Vec<u128>),
    Floating(Vec<f64>),
}

impl Ratios {
    pub fn len(&self) -> usize {
        match self {
            Ratios::Exact(v) => v.len(),
            Ratios::Floating(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, k: usize) -> f64 {
        match self {
            Ratios::Exact(v) => v[k] as f64,
            Ratios::Floating(v) => v[k],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LkProfile {
    n: usize,
    l: Vec<f64>,
    ratios: Ratios,
}

impl LkProfile {
    /// Floating profile from arbitrary spacings; `l = +inf` gives ratio 0 and
    /// `l = 0` gives an infinite ratio.
    pub fn from_spacings(l: Vec<f64>) -> Result<Self> {
        if l.len() < 2 {
            return Err(Error::domain("a spacing profile needs n >= 1"));
        }
        if let Some(bad) = l.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::domain(alloc::format!("spacing {bad} is negative or NaN")));
        }
        let n = l.len() - 1;
        let binom = BinomialHalf::new(n)?;
        let ratios = l
            .iter()
            .zip(binom.pmf_values())
            .map(|(&lk, &b)| if lk.is_infinite() { 0.0 } else { b / lk })
            .collect();
        Ok(Self { n, l, ratios: Ratios::Floating(ratios) })
    }

    fn with_exact(l: Vec<f64>, exact: Option<Vec<u128>>) -> Result<Self> {
        match exact {
            Some(r) => Ok(Self { n: l.len() - 1, l, ratios: Ratios::Exact(r) }),
            None => Self::from_spacings(l),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> &[f64] {
        &self.l
    }

    pub fn ratios(&self) -> &Ratios {
        &self.ratios
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.ratios, Ratios::Exact(_))
    }
}

/// Uniform on `[-a, a]`: every expected spacing is `2a / (n + 1)`, so `r(k) ∝ C(n, k)`.
pub fn lk_uniform(n: usize, half_width: f64) -> Result<LkProfile> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::domain("half-width must be positive and finite"));
    }
    let l = alloc::vec![2.0 * half_width / (n as f64 + 1.0); n + 1];
    LkProfile::with_exact(l, binomial_row(n))
}

/// Exponential with rate `λ`: `l(k) = 1 / (λ (n - k))` and `l(n) = +inf`, so
/// `r(k) ∝ C(n - 1, k)` with `r(n) = 0`.
pub fn lk_exponential(n: usize, rate: f64) -> Result<LkProfile> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::domain(alloc::format!("rate must be positive, got {rate}")));
    }
    let l = (0..=n)
        .map(|k| if k == n { f64::INFINITY } else { 1.0 / (rate * (n - k) as f64) })
        .collect();
    let exact = binomial_row(n - 1).map(|mut row| {
        row.push(0);
        row
    });
    LkProfile::with_exact(l, exact)
}

/// Method-of-moments profile: the observed spacings, with `l(0) = l(n) = +inf`.
pub fn lk_mom(sample: &SortedSample) -> Result<LkProfile> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::domain("the spacing estimator needs n >= 2"));
    }
    let mut l = Vec::with_capacity(n + 1);
    l.push(f64::INFINITY);
    for (k, d) in sample.spacings().enumerate() {
        if !(d > 0.0) {
            return Err(Error::degenerate(alloc::format!(
                "zero spacing between order statistics {} and {}; jitter tied values first",
                k + 1,
                k + 2
            )));
        }
        l.push(d);
    }
    l.push(f64::INFINITY);
    LkProfile::from_spacings(l)
}

/// EDF plug-in: `l(k) = C(n,k) Σ_{i=2..n} (1 - (i-1)/n)^(n-k) ((i-1)/n)^k (X(i) - X(i-1))`.
pub fn lk_edf(sample: &SortedSample) -> Result<LkProfile> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::domain("the EDF estimator needs n >= 2"));
    }
    let spacings: Vec<f64> = sample.spacings().collect();
    let nf = n as f64;
    let l = (0..=n)
        .map(|k| {
            let lc = ln_choose(n as u64, k as u64);
            spacings
                .iter()
                .enumerate()
                .map(|(j, &d)| {
                    let p = (j + 1) as f64 / nf;
                    let w = libm::exp(lc + k as f64 * libm::log(p) + (n - k) as f64 * libm::log1p(-p));
                    w * d
                })
                .sum()
        })
        .collect();
    LkProfile::from_spacings(l)
}

/// Result of integrating one expected spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacingIntegral {
    /// `+inf` when `divergent` is set.
    pub value: f64,
    pub divergent: bool,
}

enum Tail {
    Converged(f64),
    Divergent,
}

/// Integrates over `[start, start ± ∞)` in geometrically growing pieces.
///
/// Divergence is declared once successive pieces stop shrinking.
fn integrate_tail(g: &impl Fn(f64) -> f64, start: f64, direction: f64, scale: f64) -> Tail {
    let mut total = 0.0;
    let mut prev = f64::INFINITY;
    let mut stalled = 0;
    for j in 0..1100 {
        let a = start + direction * scale * (libm::exp2(j as f64) - 1.0);
        let b = start + direction * scale * (libm::exp2(j as f64 + 1.0) - 1.0);
        if !b.is_finite() {
            return Tail::Divergent;
        }
        let (piece, _) = integrate(g, a.min(b), a.max(b), 0.0, 1e-12);
        total += piece;
        if j >= 2 && (piece == 0.0 || piece <= 1e-15 * total) {
            return Tail::Converged(total);
        }
        if j >= 20 && piece > 0.9 * prev {
            stalled += 1;
            if stalled >= 20 {
                return Tail::Divergent;
            }
        } else {
            stalled = 0;
        }
        prev = piece;
    }
    Tail::Divergent
}

/// `l(k; F)` by numerical integration over the support of `dist`.
pub fn lk_numeric(dist: &DistributionSpec, n: usize, k: usize) -> Result<SpacingIntegral> {
    dist.validate()?;
    if n == 0 || k > n {
        return Err(Error::domain(alloc::format!("need 0 <= k <= n and n >= 1, got k = {k}, n = {n}")));
    }
    let coef = match binomial_row(n) {
        Some(row) => row[k] as f64,
        None => libm::exp(ln_choose(n as u64, k as u64)),
    };
    let g = |x: f64| {
        let f = dist.cdf(x);
        let s = dist.sf(x);
        coef * libm::pow(f, k as f64) * libm::pow(s, (n - k) as f64)
    };
    let (lo, hi) = dist.support();
    let center = dist.true_median();
    let scale = dist.quantile(0.75)? - dist.quantile(0.25)?;
    let mut total = 0.0;
    for (edge, direction) in [(lo, -1.0), (hi, 1.0)] {
        if edge.is_finite() {
            let (a, b) = if direction < 0.0 { (edge, center) } else { (center, edge) };
            total += integrate(g, a, b, 0.0, 1e-12).0;
        } else {
            match integrate_tail(&g, center, direction, scale) {
                Tail::Converged(v) => total += v,
                Tail::Divergent => {
                    return Ok(SpacingIntegral { value: f64::INFINITY, divergent: true })
                }
            }
        }
    }
    Ok(SpacingIntegral { value: total, divergent: false })
}

/// The full numerical profile `k = 0..=n`; divergent spacings become `+inf`.
pub fn lk_numeric_profile(dist: &DistributionSpec, n: usize) -> Result<LkProfile> {
    let l = (0..=n)
        .map(|k| lk_numeric(dist, n, k).map(|s| s.value))
        .collect::<Result<Vec<f64>>>()?;
    LkProfile::from_spacings(l)
}
