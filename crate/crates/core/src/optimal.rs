//! Optimal randomized index sets and the regions built from them.
//!
//! An index `k` costs `l(k)` in expected content and buys `b(k; n, 1/2)` in
//! coverage. Indices are taken greedily in decreasing `r(k) = b(k)/l(k)`,
//! whole groups of equal ratio at a time, until the next group would push the
//! coverage past `1 - α`. That group is the tie set and enters the region
//! with probability `γ`, which makes the coverage exactly `1 - α`.

use alloc::vec::Vec;

use crate::binom::BinomialHalf;
use crate::error::{check_alpha, Error, Result};
use crate::lk::{lk_edf, lk_exponential, lk_mom, lk_uniform, LkProfile, Ratios};
use crate::region::{region_from_gamma0, RandomizerDraw, Region, SortedSample};

/// Relative tolerance used to group floating-point ratios.
pub const FLOAT_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Gamma0Selection {
    pub n: usize,
    /// Indices always in the region, ascending.
    pub included: Vec<usize>,
    /// Indices added when `u <= gamma`, ascending.
    pub tie_set: Vec<usize>,
    /// The ratio `c` separating included indices from the rest.
    pub threshold: f64,
    pub gamma: f64,
    pub alpha: f64,
    /// `P{B in included}`.
    pub included_mass: f64,
    /// `P{B in tie_set}`.
    pub tie_mass: f64,
}

impl Gamma0Selection {
    /// `P{B in included} + γ P{B in tie_set}`.
    pub fn expected_coverage(&self) -> f64 {
        self.included_mass + self.gamma * self.tie_mass
    }

    /// Expected content `Σ_included l(k) + γ Σ_tie l(k)` under a spacing profile.
    pub fn expected_content(&self, l: &[f64]) -> f64 {
        let sum = |set: &[usize]| set.iter().map(|&k| l[k]).sum::<f64>();
        let tie = if self.gamma > 0.0 { self.gamma * sum(&self.tie_set) } else { 0.0 };
        sum(&self.included) + tie
    }

    /// `included ∪ tie_set`, ascending.
    pub fn conservative_set(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.included.iter().chain(&self.tie_set).copied().collect();
        all.sort_unstable();
        all
    }
}

fn group_by_ratio(ratios: &Ratios) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..ratios.len()).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    match ratios {
        Ratios::Exact(r) => {
            order.sort_by(|&a, &b| r[b].cmp(&r[a]).then(a.cmp(&b)));
            for k in order {
                match groups.last_mut() {
                    Some(g) if r[g[0]] == r[k] => g.push(k),
                    _ => groups.push(alloc::vec![k]),
                }
            }
        }
        Ratios::Floating(r) => {
            order.sort_by(|&a, &b| r[b].total_cmp(&r[a]).then(a.cmp(&b)));
            for k in order {
                match groups.last_mut() {
                    Some(g) if r[g[0]] == r[k] || r[g[0]] - r[k] <= FLOAT_TIE_TOLERANCE * r[g[0]] => {
                        g.push(k)
                    }
                    _ => groups.push(alloc::vec![k]),
                }
            }
        }
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups
}

/// Greedy selection of `Γ₀*`, the threshold `c` and the probability `γ`.
///
/// Indices with ratio 0 (infinite spacing) are never selected. Fails with
/// [`Error::Infeasible`] when they hold more than `α` of the binomial mass.
pub fn select_gamma0(profile: &LkProfile, alpha: f64) -> Result<Gamma0Selection> {
    check_alpha(alpha)?;
    let n = profile.n();
    let binom = BinomialHalf::new(n)?;
    let pmf = binom.pmf_values();
    let target = 1.0 - alpha;
    let ratios = profile.ratios();

    let groups: Vec<Vec<usize>> = group_by_ratio(ratios)
        .into_iter()
        .filter(|g| ratios.get(g[0]) > 0.0)
        .collect();
    let mass = |g: &[usize]| g.iter().map(|&k| pmf[k]).sum::<f64>();
    let attainable: f64 = groups.iter().map(|g| mass(g)).sum();
    if attainable < target {
        return Err(Error::Infeasible { requested: target, max_attainable: attainable });
    }

    let mut included = Vec::new();
    let mut included_mass = 0.0;
    for group in &groups {
        let group_mass = mass(group);
        if included_mass + group_mass <= target {
            included.extend_from_slice(group);
            included_mass += group_mass;
            continue;
        }
        included.sort_unstable();
        let gap = target - included_mass;
        // Cumulative mass already sits exactly at the target: a natural level.
        let (tie_set, tie_mass, gamma) = if gap == 0.0 {
            (Vec::new(), 0.0, 0.0)
        } else {
            (group.clone(), group_mass, (gap / group_mass).clamp(0.0, 1.0))
        };
        return Ok(Gamma0Selection {
            n,
            included,
            tie_set,
            threshold: ratios.get(group[0]),
            gamma,
            alpha,
            included_mass,
            tie_mass,
        });
    }
    // Every positive-ratio index fits: the whole positive set is a natural level.
    included.sort_unstable();
    Ok(Gamma0Selection {
        n,
        included,
        tie_set: Vec::new(),
        threshold: 0.0,
        gamma: 0.0,
        alpha,
        included_mass,
        tie_mass: 0.0,
    })
}

fn check_sizes(sample: &SortedSample, sel: &Gamma0Selection) -> Result<()> {
    if sample.len() == sel.n {
        Ok(())
    } else {
        Err(Error::domain(alloc::format!(
            "selection built for n = {} applied to a sample of size {}",
            sel.n,
            sample.len()
        )))
    }
}

/// The region for one randomizer draw: `included ∪ tie_set` when `u <= γ`,
/// otherwise `included`.
pub fn assemble_region(sample: &SortedSample, sel: &Gamma0Selection, u: RandomizerDraw) -> Result<Region> {
    check_sizes(sample, sel)?;
    if u.value() <= sel.gamma && !sel.tie_set.is_empty() {
        region_from_gamma0(sample, &sel.conservative_set())
    } else {
        region_from_gamma0(sample, &sel.included)
    }
}

/// The non-randomized region from `included ∪ tie_set`, with coverage at least `1 - α`.
pub fn conservative_region(sample: &SortedSample, sel: &Gamma0Selection) -> Result<Region> {
    check_sizes(sample, sel)?;
    region_from_gamma0(sample, &sel.conservative_set())
}

/// The uniform-focused selection written through sign-test quantiles:
/// `k₂ = binom_quantile(1 - α/2)`, `k₁ = n - k₂`, included `k₁ < k < k₂`,
/// tie set `{k₁, k₂}`.
pub fn symmetric_quantile_selection(n: usize, alpha: f64) -> Result<Gamma0Selection> {
    check_alpha(alpha)?;
    let binom = BinomialHalf::new(n)?;
    let k2 = binom.quantile(1.0 - alpha / 2.0)?;
    let k1 = n - k2;
    let included: Vec<usize> = (k1 + 1..k2).collect();
    let tie_set: Vec<usize> = if k1 == k2 { alloc::vec![k1] } else { alloc::vec![k1, k2] };
    let included_mass = binom.mass_of(&included);
    let tie_mass = binom.mass_of(&tie_set);
    let gamma = ((1.0 - alpha - included_mass) / tie_mass).clamp(0.0, 1.0);
    Ok(Gamma0Selection {
        n,
        included,
        tie_set,
        threshold: binom.pmf(k2)?,
        gamma,
        alpha,
        included_mass,
        tie_mass,
    })
}

fn with_profile(
    sample: &SortedSample,
    profile: Result<LkProfile>,
    alpha: f64,
    u: RandomizerDraw,
) -> Result<Region> {
    let sel = select_gamma0(&profile?, alpha)?;
    assemble_region(sample, &sel, u)
}

/// Optimal region for symmetric (uniform-focused) error distributions.
pub fn cr_symmetric_focused(sample: &SortedSample, alpha: f64, u: RandomizerDraw) -> Result<Region> {
    if sample.len() < 2 {
        return Err(Error::domain("the symmetric-focused region needs n >= 2"));
    }
    with_profile(sample, lk_uniform(sample.len(), 1.0), alpha, u)
}

/// Optimal region for exponential error distributions. The rate cancels in the selection.
pub fn cr_exponential_focused(sample: &SortedSample, alpha: f64, u: RandomizerDraw) -> Result<Region> {
    if sample.len() < 2 {
        return Err(Error::domain("the exponential-focused region needs n >= 2"));
    }
    with_profile(sample, lk_exponential(sample.len(), 1.0), alpha, u)
}

/// Adaptive region ordering indices by `C(n,k) / (X(k+1) - X(k))`.
pub fn cr_adaptive_mom(sample: &SortedSample, alpha: f64, u: RandomizerDraw) -> Result<Region> {
    if sample.len() < 3 {
        return Err(Error::domain("the adaptive regions need n >= 3"));
    }
    with_profile(sample, lk_mom(sample), alpha, u)
}

/// Adaptive region ordering indices by the EDF plug-in spacing estimate.
pub fn cr_adaptive_edf(sample: &SortedSample, alpha: f64, u: RandomizerDraw) -> Result<Region> {
    if sample.len() < 3 {
        return Err(Error::domain("the adaptive regions need n >= 3"));
    }
    with_profile(sample, lk_edf(sample), alpha, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::Interval;
    use crate::rng::{RngStream, StreamKey};
    use proptest::prelude::*;
    use std::vec;
    use std::vec::Vec;

    fn draw(u: f64) -> RandomizerDraw {
        RandomizerDraw::new(u).unwrap()
    }

    fn sample(xs: &[f64]) -> SortedSample {
        SortedSample::new(xs).unwrap()
    }

    fn ten() -> SortedSample {
        sample(&[0.3, 1.1, 1.7, 2.0, 2.6, 3.9, 4.4, 5.0, 6.2, 8.8])
    }

    #[test]
    fn exponential_n10() {
        let sel = select_gamma0(&lk_exponential(10, 1.0).unwrap(), 0.05).unwrap();
        assert_eq!(sel.included, vec![2, 3, 4, 5, 6, 7]);
        assert_eq!(sel.tie_set, vec![1, 8]);
        assert_eq!(sel.included_mass, 957.0 / 1024.0);
        assert_eq!(sel.tie_mass, 55.0 / 1024.0);
        assert!((sel.gamma - 15.8 / 55.0).abs() < 1e-12);
        assert!((sel.gamma - 0.2867).abs() < 1e-3);
        assert_eq!(sel.threshold, 9.0);
    }

    #[test]
    fn exponential_n11() {
        let sel = select_gamma0(&lk_exponential(11, 1.0).unwrap(), 0.05).unwrap();
        assert_eq!(sel.included, vec![3, 4, 5, 6, 7]);
        assert_eq!(sel.tie_set, vec![2, 8]);
        let expected = (0.95 - 1749.0 / 2048.0) / (220.0 / 2048.0);
        assert!((sel.gamma - expected).abs() < 1e-12);
    }

    #[test]
    fn uniform_n10() {
        let sel = select_gamma0(&lk_uniform(10, 1.0).unwrap(), 0.05).unwrap();
        assert_eq!(sel.included, vec![3, 4, 5, 6, 7]);
        assert_eq!(sel.tie_set, vec![2, 8]);
        assert_eq!(sel.included_mass, 912.0 / 1024.0);
        assert!((sel.gamma - 0.675_556).abs() < 1e-6);

        let wide = select_gamma0(&lk_uniform(10, 1.0).unwrap(), 0.80).unwrap();
        assert!(wide.included.is_empty());
        assert_eq!(wide.tie_set, vec![5]);
        assert!((wide.gamma - 0.2 / (252.0 / 1024.0)).abs() < 1e-12);
    }

    #[test]
    fn natural_level_leaves_no_tie() {
        // P{2 <= B <= 8} = 1002/1024 for n = 10.
        let alpha = 22.0 / 1024.0;
        let sel = select_gamma0(&lk_uniform(10, 1.0).unwrap(), alpha).unwrap();
        assert_eq!(sel.included, (2..=8).collect::<Vec<_>>());
        assert!(sel.tie_set.is_empty());
        assert_eq!(sel.gamma, 0.0);
        assert_eq!(sel.expected_coverage(), 1.0 - alpha);
    }

    #[test]
    fn infeasible_levels_report_the_attainable_bound() {
        let profile = lk_mom(&sample(&[1.0, 2.0, 4.0, 8.0])).unwrap();
        match select_gamma0(&profile, 0.05) {
            Err(Error::Infeasible { max_attainable, .. }) => assert_eq!(max_attainable, 14.0 / 16.0),
            other => panic!("{other:?}"),
        }
        assert!(select_gamma0(&profile, 0.2).is_ok());
        assert!(select_gamma0(&profile, 0.0).is_err());
        assert!(select_gamma0(&profile, 1.0).is_err());
    }

    #[test]
    fn regions_for_the_worked_examples() {
        let x = ten();
        let sel = select_gamma0(&lk_exponential(10, 1.0).unwrap(), 0.05).unwrap();
        let x_ = |k| x.order_stat(k);
        assert_eq!(
            assemble_region(&x, &sel, draw(0.5)).unwrap(),
            Region::single(Interval::half_open(x_(2), x_(8)))
        );
        assert_eq!(
            assemble_region(&x, &sel, draw(0.1)).unwrap(),
            Region::single(Interval::half_open(x_(1), x_(9)))
        );
        assert_eq!(
            conservative_region(&x, &sel).unwrap(),
            Region::single(Interval::half_open(x_(1), x_(9)))
        );
        let uni = select_gamma0(&lk_uniform(10, 1.0).unwrap(), 0.05).unwrap();
        assert_eq!(
            conservative_region(&x, &uni).unwrap(),
            Region::single(Interval::half_open(x_(2), x_(9)))
        );
        assert_eq!(
            cr_symmetric_focused(&x, 0.05, draw(0.9)).unwrap(),
            Region::single(Interval::half_open(x_(3), x_(8)))
        );
        assert_eq!(
            cr_symmetric_focused(&x, 0.05, draw(0.6)).unwrap(),
            Region::single(Interval::half_open(x_(2), x_(9)))
        );
        assert_eq!(
            cr_exponential_focused(&x, 0.05, draw(0.2)).unwrap(),
            Region::single(Interval::half_open(x_(1), x_(9)))
        );
        let empty = Gamma0Selection {
            n: 10,
            included: vec![],
            tie_set: vec![],
            threshold: 0.0,
            gamma: 0.0,
            alpha: 0.5,
            included_mass: 0.0,
            tie_mass: 0.0,
        };
        assert!(assemble_region(&x, &empty, draw(0.0)).unwrap().is_empty());
        assert!(conservative_region(&x, &empty).unwrap().is_empty());
        assert!(assemble_region(&sample(&[1.0, 2.0]), &sel, draw(0.5)).is_err());
    }

    #[test]
    fn quantile_form_agrees_with_greedy_form() {
        for n in 2..=60 {
            for alpha in [0.01, 0.05, 0.1, 0.2, 0.5, 0.8] {
                let greedy = select_gamma0(&lk_uniform(n, 1.0).unwrap(), alpha).unwrap();
                let closed = symmetric_quantile_selection(n, alpha).unwrap();
                assert!((greedy.expected_coverage() - closed.expected_coverage()).abs() < 1e-12);
                let x = sample(&(0..n).map(|i| i as f64).collect::<Vec<_>>());
                for u in [0.0, 0.25, 0.5, 0.75, 1.0] {
                    let a = assemble_region(&x, &greedy, draw(u)).unwrap();
                    let b = assemble_region(&x, &closed, draw(u)).unwrap();
                    assert_eq!(a, b, "n = {n}, alpha = {alpha}, u = {u}");
                }
            }
        }
    }

    #[test]
    fn mom_on_equal_spacings_matches_uniform_ordering() {
        for n in 3..=15 {
            let x = sample(&(1..=n).map(|i| i as f64).collect::<Vec<_>>());
            let uni = select_gamma0(&lk_uniform(n, 1.0).unwrap(), 0.2).unwrap();
            if !uni.conservative_set().contains(&0) {
                let mom = select_gamma0(&lk_mom(&x).unwrap(), 0.2).unwrap();
                assert_eq!(mom.included, uni.included, "n = {n}");
                assert_eq!(mom.tie_set, uni.tie_set, "n = {n}");
            }
        }
    }

    #[test]
    fn coverage_is_exact_for_focused_profiles() {
        for n in 1..=125 {
            for alpha in [0.01, 0.05, 0.1, 0.25, 0.5, 0.9] {
                for profile in [lk_uniform(n, 1.0), lk_exponential(n, 1.0)] {
                    match select_gamma0(&profile.unwrap(), alpha) {
                        Ok(sel) => {
                            assert!((sel.expected_coverage() - (1.0 - alpha)).abs() <= 1e-12);
                            assert!(sel.included_mass <= 1.0 - alpha);
                            assert!((0.0..=1.0).contains(&sel.gamma));
                        }
                        Err(Error::Infeasible { max_attainable, .. }) => {
                            assert!(max_attainable < 1.0 - alpha)
                        }
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }

    /// Every deterministic index set with enough coverage costs at least as much
    /// as the randomized optimum.
    #[test]
    fn greedy_beats_random_feasible_sets() {
        let mut rng = RngStream::new(2024, StreamKey::new(0, 0, 0));
        let mut violations = 0;
        for n in 2..=12 {
            let binom = BinomialHalf::new(n).unwrap();
            for alpha in [0.05, 0.1, 0.3] {
                for profile in [lk_uniform(n, 1.0).unwrap(), lk_exponential(n, 1.0).unwrap()] {
                    let Ok(sel) = select_gamma0(&profile, alpha) else { continue };
                    let best = sel.expected_content(profile.l());
                    let mut tried = 0;
                    while tried < 1000 {
                        let mask = rng.next_u64() & ((1u64 << (n + 1)) - 1);
                        let set: Vec<usize> = (0..=n).filter(|k| mask >> k & 1 == 1).collect();
                        if binom.mass_of(&set) < 1.0 - alpha {
                            continue;
                        }
                        tried += 1;
                        let cost: f64 = set.iter().map(|&k| profile.l()[k]).sum();
                        if cost < best - 1e-12 {
                            violations += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(violations, 0);
    }

    proptest! {
        #[test]
        fn focused_regions_are_monotone_equivariant(
            xs in prop::collection::vec(-5.0f64..5.0, 10..30),
            u in 0.0f64..=1.0,
            alpha in 0.01f64..0.5,
        ) {
            let x = sample(&xs);
            let m = |v: f64| v * v * v + 2.0 * v;
            let mx = x.map(m).unwrap();
            for f in [cr_symmetric_focused, cr_exponential_focused] {
                let r = f(&x, alpha, draw(u)).unwrap();
                let rm = f(&mx, alpha, draw(u)).unwrap();
                let mapped: Vec<(f64, f64)> = r.intervals().iter().map(|i| (m(i.lo), m(i.hi))).collect();
                let got: Vec<(f64, f64)> = rm.intervals().iter().map(|i| (i.lo, i.hi)).collect();
                prop_assert_eq!(mapped, got);
            }
        }

        #[test]
        fn adaptive_regions_are_shift_equivariant(
            xs in prop::collection::vec(-400i32..400, 8..25),
            u in 0.0f64..=1.0,
            c in -40i32..40,
        ) {
            // Dyadic data and integer shifts leave every spacing bit-identical.
            let x = sample(&xs.iter().map(|&v| v as f64 / 64.0).collect::<Vec<_>>());
            let c = c as f64;
            let shifted = x.map(|v| v + c).unwrap();
            if let Ok(r) = cr_adaptive_edf(&x, 0.1, draw(u)) {
                let rs = cr_adaptive_edf(&shifted, 0.1, draw(u)).unwrap();
                prop_assert_eq!(r.intervals().len(), rs.intervals().len());
                for (a, b) in r.intervals().iter().zip(rs.intervals()) {
                    prop_assert!((a.lo + c - b.lo).abs() < 1e-9 && (a.hi + c - b.hi).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn data_selections_have_exact_coverage(xs in prop::collection::vec(-5.0f64..5.0, 3..40), alpha in 0.05f64..0.9) {
            let x = sample(&xs);
            for profile in [lk_edf(&x), lk_mom(&x)] {
                let Ok(profile) = profile else { continue };
                if let Ok(sel) = select_gamma0(&profile, alpha) {
                    prop_assert!((sel.expected_coverage() - (1.0 - alpha)).abs() <= 1e-12);
                    prop_assert!(!sel.included.contains(&0) || profile.ratios().get(0) > 0.0);
                }
            }
        }
    }
}
