//! The error distributions of the simulation study, with their medians and
//! reproducible samplers.

use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};
use core::fmt;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::special::{self, cauchy_lower, gamma_p, gamma_q, norm_cdf, norm_pdf, norm_sf};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    Normal { mean: f64, sd: f64 },
    Cauchy { location: f64, scale: f64 },
    Uniform { lo: f64, hi: f64 },
    Logistic { location: f64, scale: f64 },
    Gamma { shape: f64, rate: f64 },
    Weibull { shape: f64, scale: f64 },
    /// `weight * N(mean1, sd1) + (1 - weight) * N(mean2, sd2)`.
    NormalMixture {
        weight: f64,
        mean1: f64,
        sd1: f64,
        mean2: f64,
        sd2: f64,
    },
    Exponential { rate: f64 },
}

impl DistributionSpec {
    pub const STANDARD_NORMAL: Self = Self::Normal { mean: 0.0, sd: 1.0 };
    pub const STANDARD_CAUCHY: Self = Self::Cauchy { location: 0.0, scale: 1.0 };
    pub const UNIFORM_PM1: Self = Self::Uniform { lo: -1.0, hi: 1.0 };
    pub const STANDARD_LOGISTIC: Self = Self::Logistic { location: 0.0, scale: 1.0 };
    pub const GAMMA_2_1: Self = Self::Gamma { shape: 2.0, rate: 1.0 };
    pub const WEIBULL_HALF_1: Self = Self::Weibull { shape: 0.5, scale: 1.0 };
    /// `.6 N(-5, 3) + .4 N(5, 2)` with standard deviations 3 and 2.
    pub const BIMODAL_MIXTURE: Self = Self::NormalMixture {
        weight: 0.6,
        mean1: -5.0,
        sd1: 3.0,
        mean2: 5.0,
        sd2: 2.0,
    };

    /// The seven families of the simulation study, in their standard parameterizations.
    pub const STUDY_FAMILIES: [Self; 7] = [
        Self::STANDARD_NORMAL,
        Self::STANDARD_CAUCHY,
        Self::UNIFORM_PM1,
        Self::STANDARD_LOGISTIC,
        Self::GAMMA_2_1,
        Self::WEIBULL_HALF_1,
        Self::BIMODAL_MIXTURE,
    ];

    pub fn family(&self) -> &'static str {
        match self {
            Self::Normal { .. } => "normal",
            Self::Cauchy { .. } => "cauchy",
            Self::Uniform { .. } => "uniform",
            Self::Logistic { .. } => "logistic",
            Self::Gamma { .. } => "gamma",
            Self::Weibull { .. } => "weibull",
            Self::NormalMixture { .. } => "mixture",
            Self::Exponential { .. } => "exponential",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Self::Normal { mean, sd } => [mean, sd].into(),
            Self::Cauchy { location, scale } | Self::Logistic { location, scale } => {
                [location, scale].into()
            }
            Self::Uniform { lo, hi } => [lo, hi].into(),
            Self::Gamma { shape, rate } => [shape, rate].into(),
            Self::Weibull { shape, scale } => [shape, scale].into(),
            Self::NormalMixture {
                weight,
                mean1,
                sd1,
                mean2,
                sd2,
            } => [weight, mean1, sd1, mean2, sd2].into(),
            Self::Exponential { rate } => [rate].into(),
        }
    }

    /// Builds a family from its name and parameter list, in [`params`](Self::params) order.
    pub fn from_parts(family: &str, params: &[f64]) -> Result<Self> {
        let want = |k: usize| -> Result<()> {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::domain(alloc::format!(
                    "{family} takes {k} parameters, got {}",
                    params.len()
                )))
            }
        };
        let spec = match family {
            "normal" => {
                want(2)?;
                Self::Normal { mean: params[0], sd: params[1] }
            }
            "cauchy" => {
                want(2)?;
                Self::Cauchy { location: params[0], scale: params[1] }
            }
            "uniform" => {
                want(2)?;
                Self::Uniform { lo: params[0], hi: params[1] }
            }
            "logistic" => {
                want(2)?;
                Self::Logistic { location: params[0], scale: params[1] }
            }
            "gamma" => {
                want(2)?;
                Self::Gamma { shape: params[0], rate: params[1] }
            }
            "weibull" => {
                want(2)?;
                Self::Weibull { shape: params[0], scale: params[1] }
            }
            "mixture" => {
                want(5)?;
                Self::NormalMixture {
                    weight: params[0],
                    mean1: params[1],
                    sd1: params[2],
                    mean2: params[3],
                    sd2: params[4],
                }
            }
            "exponential" => {
                want(1)?;
                Self::Exponential { rate: params[0] }
            }
            other => return Err(Error::domain(alloc::format!("unknown distribution family {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The study parameterization of a family (`exponential` defaults to rate 1).
    pub fn default_for(family: &str) -> Result<Self> {
        Self::STUDY_FAMILIES
            .iter()
            .copied()
            .chain(core::iter::once(Self::Exponential { rate: 1.0 }))
            .find(|d| d.family() == family)
            .ok_or_else(|| Error::domain(alloc::format!("unknown distribution family {family:?}")))
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.params().iter().all(|p| p.is_finite())
            && match *self {
                Self::Normal { sd, .. } => sd > 0.0,
                Self::Cauchy { scale, .. } | Self::Logistic { scale, .. } => scale > 0.0,
                Self::Uniform { lo, hi } => lo < hi,
                Self::Gamma { shape, rate } => shape > 0.0 && rate > 0.0,
                Self::Weibull { shape, scale } => shape > 0.0 && scale > 0.0,
                Self::NormalMixture { weight, sd1, sd2, .. } => {
                    weight > 0.0 && weight < 1.0 && sd1 > 0.0 && sd2 > 0.0
                }
                Self::Exponential { rate } => rate > 0.0,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(alloc::format!("invalid parameters for {self}")))
        }
    }

    /// Closure of the support as `(inf, sup)`, possibly infinite.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Uniform { lo, hi } => (lo, hi),
            Self::Gamma { .. } | Self::Weibull { .. } | Self::Exponential { .. } => {
                (0.0, f64::INFINITY)
            }
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Normal { mean, sd } => norm_cdf((x - mean) / sd),
            Self::Cauchy { location, scale } => cauchy_lower((x - location) / scale),
            Self::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Self::Logistic { location, scale } => {
                1.0 / (1.0 + libm::exp(-(x - location) / scale))
            }
            Self::Gamma { shape, rate } => gamma_p(shape, rate * x),
            Self::Weibull { shape, scale } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -libm::expm1(-libm::pow(x / scale, shape))
                }
            }
            Self::NormalMixture {
                weight,
                mean1,
                sd1,
                mean2,
                sd2,
            } => weight * norm_cdf((x - mean1) / sd1) + (1.0 - weight) * norm_cdf((x - mean2) / sd2),
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -libm::expm1(-rate * x)
                }
            }
        }
    }

    /// Survival function `1 - cdf(x)`, computed without cancellation in the right tail.
    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            Self::Normal { mean, sd } => norm_sf((x - mean) / sd),
            Self::Cauchy { location, scale } => cauchy_lower(-(x - location) / scale),
            Self::Uniform { lo, hi } => ((hi - x) / (hi - lo)).clamp(0.0, 1.0),
            Self::Logistic { location, scale } => 1.0 / (1.0 + libm::exp((x - location) / scale)),
            Self::Gamma { shape, rate } => gamma_q(shape, rate * x),
            Self::Weibull { shape, scale } => {
                if x <= 0.0 {
                    1.0
                } else {
                    libm::exp(-libm::pow(x / scale, shape))
                }
            }
            Self::NormalMixture {
                weight,
                mean1,
                sd1,
                mean2,
                sd2,
            } => weight * norm_sf((x - mean1) / sd1) + (1.0 - weight) * norm_sf((x - mean2) / sd2),
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    libm::exp(-rate * x)
                }
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Self::Normal { mean, sd } => norm_pdf((x - mean) / sd) / sd,
            Self::Cauchy { location, scale } => {
                let z = (x - location) / scale;
                1.0 / (PI * scale * (1.0 + z * z))
            }
            Self::Uniform { lo, hi } => {
                if (lo..=hi).contains(&x) {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            Self::Logistic { location, scale } => {
                let e = libm::exp(-libm::fabs((x - location) / scale));
                e / (scale * (1.0 + e) * (1.0 + e))
            }
            Self::Gamma { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    let y = rate * x;
                    rate * libm::exp((shape - 1.0) * libm::log(y) - y - special::ln_gamma(shape))
                }
            }
            Self::Weibull { shape, scale } => {
                if x <= 0.0 {
                    0.0
                } else {
                    let z = x / scale;
                    shape / scale * libm::pow(z, shape - 1.0) * libm::exp(-libm::pow(z, shape))
                }
            }
            Self::NormalMixture {
                weight,
                mean1,
                sd1,
                mean2,
                sd2,
            } => {
                weight * norm_pdf((x - mean1) / sd1) / sd1
                    + (1.0 - weight) * norm_pdf((x - mean2) / sd2) / sd2
            }
            Self::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * libm::exp(-rate * x)
                }
            }
        }
    }

    /// Inverse distribution function for `p` in (0, 1).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(alloc::format!("quantile needs p in (0, 1), got {p}")));
        }
        Ok(self.quantile_open(p))
    }

    fn quantile_open(&self, p: f64) -> f64 {
        match *self {
            Self::Normal { mean, sd } => mean + sd * special::norm_quantile_open(p),
            Self::Cauchy { location, scale } => location + scale * libm::tan(PI * (p - 0.5)),
            Self::Uniform { lo, hi } => lo + p * (hi - lo),
            Self::Logistic { location, scale } => location + scale * libm::log(p / (1.0 - p)),
            Self::Weibull { shape, scale } => scale * libm::pow(-libm::log1p(-p), 1.0 / shape),
            Self::Exponential { rate } => -libm::log1p(-p) / rate,
            Self::Gamma { .. } | Self::NormalMixture { .. } => self.invert_cdf(p),
        }
    }

    fn invert_cdf(&self, p: f64) -> f64 {
        let (lo_support, hi_support) = self.support();
        let mut lo = if lo_support.is_finite() { lo_support } else { -1.0 };
        let mut hi = 1.0;
        while self.cdf(lo) > p {
            lo = 2.0 * lo - 1.0;
        }
        while self.cdf(hi) < p && hi < hi_support {
            hi = 2.0 * hi + 1.0;
        }
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// The median `inf{x : F(x) >= 1/2}`.
    pub fn true_median(&self) -> f64 {
        match *self {
            Self::Normal { mean, .. } => mean,
            Self::Cauchy { location, .. } | Self::Logistic { location, .. } => location,
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
            Self::Weibull { shape, scale } => scale * libm::pow(LN_2, 1.0 / shape),
            Self::Exponential { rate } => LN_2 / rate,
            Self::Gamma { .. } | Self::NormalMixture { .. } => self.invert_cdf(0.5),
        }
    }

    /// One variate. Inverse-transform families consume one uniform; the
    /// mixture consumes exactly two (component coin, then the draw); the gamma
    /// sampler consumes two per Marsaglia-Tsang attempt, plus one extra for
    /// shape below 1.
    pub fn sample_one(&self, rng: &mut RngStream) -> f64 {
        match *self {
            Self::Gamma { shape, rate } => sample_gamma(shape, rng) / rate,
            Self::NormalMixture {
                weight,
                mean1,
                sd1,
                mean2,
                sd2,
            } => {
                let coin = rng.uniform();
                let z = special::norm_quantile_open(rng.uniform());
                if coin < weight {
                    mean1 + sd1 * z
                } else {
                    mean2 + sd2 * z
                }
            }
            _ => self.quantile_open(rng.uniform()),
        }
    }

    pub fn sample(&self, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::domain("sample size must be positive"));
        }
        self.validate()?;
        Ok((0..n).map(|_| self.sample_one(rng)).collect())
    }
}

fn sample_gamma(shape: f64, rng: &mut RngStream) -> f64 {
    if shape < 1.0 {
        let boost = libm::pow(rng.uniform(), 1.0 / shape);
        return sample_gamma(shape + 1.0, rng) * boost;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / libm::sqrt(9.0 * d);
    loop {
        let x = special::norm_quantile_open(rng.uniform());
        let u = rng.uniform();
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || libm::log(u) < 0.5 * x2 + d * (1.0 - v + libm::log(v)) {
            return d * v;
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.family())?;
        for (i, p) in self.params().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}
