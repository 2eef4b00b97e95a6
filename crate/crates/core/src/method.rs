//! The thirteen procedures behind one entry point.

use alloc::vec::Vec;
use core::fmt;

use crate::classical::{
    cr_asymp_median, cr_bootstrap, cr_sign, cr_t, cr_wilcoxon, AccelerationFormula, BootstrapDistribution,
    BootstrapVariant,
};
use crate::error::{Error, Result};
use crate::lk::{lk_edf, lk_exponential, lk_mom, lk_uniform, LkProfile};
use crate::optimal::{assemble_region, conservative_region, select_gamma0, Gamma0Selection};
use crate::region::{region_from_gamma0, RandomizerDraw, Region, SortedSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    T = 1,
    Wilcoxon = 2,
    Sign = 3,
    AsymptoticMedian = 4,
    BootstrapBasic = 5,
    BootstrapSe = 6,
    BootstrapPercentile = 7,
    BootstrapBc = 8,
    BootstrapBca = 9,
    SymmetricFocused = 10,
    ExponentialFocused = 11,
    AdaptiveMom = 12,
    AdaptiveEdf = 13,
}

impl Method {
    pub const ALL: [Method; 13] = [
        Method::T,
        Method::Wilcoxon,
        Method::Sign,
        Method::AsymptoticMedian,
        Method::BootstrapBasic,
        Method::BootstrapSe,
        Method::BootstrapPercentile,
        Method::BootstrapBc,
        Method::BootstrapBca,
        Method::SymmetricFocused,
        Method::ExponentialFocused,
        Method::AdaptiveMom,
        Method::AdaptiveEdf,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Result<Self> {
        Self::ALL
            .get((id as usize).wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::domain(alloc::format!("method ids run from 1 to 13, got {id}")))
    }

    /// Needs a randomizer draw `u`.
    pub fn is_randomized(self) -> bool {
        self.id() >= 10
    }

    /// Needs a bootstrap distribution.
    pub fn is_bootstrap(self) -> bool {
        (5..=9).contains(&self.id())
    }

    /// Produces a closed interval rather than a union of half-open spacings.
    pub fn is_closed(self) -> bool {
        matches!(self.id(), 1 | 4..=9)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::T => "t",
            Method::Wilcoxon => "wilcoxon",
            Method::Sign => "sign",
            Method::AsymptoticMedian => "asymptotic-median",
            Method::BootstrapBasic => "bootstrap-basic",
            Method::BootstrapSe => "bootstrap-se",
            Method::BootstrapPercentile => "bootstrap-percentile",
            Method::BootstrapBc => "bootstrap-bc",
            Method::BootstrapBca => "bootstrap-bca",
            Method::SymmetricFocused => "symmetric-focused",
            Method::ExponentialFocused => "exponential-focused",
            Method::AdaptiveMom => "adaptive-spacings",
            Method::AdaptiveEdf => "adaptive-edf",
        }
    }

    fn bootstrap_variant(self) -> Option<BootstrapVariant> {
        Some(match self {
            Method::BootstrapBasic => BootstrapVariant::Basic,
            Method::BootstrapSe => BootstrapVariant::StandardError,
            Method::BootstrapPercentile => BootstrapVariant::Percentile,
            Method::BootstrapBc => BootstrapVariant::BiasCorrected,
            Method::BootstrapBca => BootstrapVariant::BiasCorrectedAccelerated,
            _ => return None,
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-call inputs that some methods need.
#[derive(Debug, Clone, Copy, Default)]
pub struct MethodInputs<'a> {
    pub boot: Option<&'a BootstrapDistribution>,
    pub u: Option<RandomizerDraw>,
    pub acceleration: AccelerationFormula,
}

/// Both possible regions of a randomized method.
#[derive(Debug, Clone, PartialEq)]
pub struct Branches {
    pub selection: Gamma0Selection,
    /// Region from the included indices alone (`u > γ`).
    pub without_tie: Region,
    /// Region with the tie set added (`u <= γ`).
    pub with_tie: Region,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutput {
    pub method: Method,
    pub region: Region,
    /// The randomizer used, for randomized methods.
    pub u: Option<f64>,
    pub flags: Vec<&'static str>,
    pub branches: Option<Branches>,
}

fn profile_for(method: Method, sample: &SortedSample) -> Result<LkProfile> {
    let n = sample.len();
    let min = if matches!(method, Method::AdaptiveMom | Method::AdaptiveEdf) { 3 } else { 2 };
    if n < min {
        return Err(Error::domain(alloc::format!("{method} needs n >= {min}, got {n}")));
    }
    match method {
        Method::SymmetricFocused => lk_uniform(n, 1.0),
        Method::ExponentialFocused => lk_exponential(n, 1.0),
        Method::AdaptiveMom => lk_mom(sample),
        _ => lk_edf(sample),
    }
}

/// Computes one method's region on a sample.
pub fn evaluate(method: Method, sample: &SortedSample, alpha: f64, inputs: &MethodInputs<'_>) -> Result<MethodOutput> {
    let mut flags = Vec::new();
    let mut u_used = None;
    let mut branches = None;
    let region = match method {
        Method::T => cr_t(sample, alpha)?,
        Method::Wilcoxon => cr_wilcoxon(sample, alpha)?,
        Method::Sign => cr_sign(sample, alpha)?,
        Method::AsymptoticMedian => cr_asymp_median(sample, alpha)?,
        m if m.is_bootstrap() => {
            let boot = inputs
                .boot
                .ok_or_else(|| Error::domain(alloc::format!("{m} needs a bootstrap distribution")))?;
            let variant = m.bootstrap_variant().expect("bootstrap method");
            let out = cr_bootstrap(sample, alpha, boot, variant, inputs.acceleration)?;
            if out.p0_clamped {
                flags.push("p0_clamped");
            }
            out.region
        }
        m => {
            let u = inputs
                .u
                .ok_or_else(|| Error::domain(alloc::format!("{m} needs a randomizer draw")))?;
            let selection = select_gamma0(&profile_for(m, sample)?, alpha)?;
            let region = assemble_region(sample, &selection, u)?;
            if u.value() <= selection.gamma && !selection.tie_set.is_empty() {
                flags.push("tie_included");
            }
            u_used = Some(u.value());
            branches = Some(Branches {
                without_tie: region_from_gamma0(sample, &selection.included)?,
                with_tie: conservative_region(sample, &selection)?,
                selection,
            });
            region
        }
    };
    if region.content().is_infinite() {
        flags.push("unbounded");
    }
    Ok(MethodOutput { method, region, u: u_used, flags, branches })
}
