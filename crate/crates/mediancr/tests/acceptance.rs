//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use mediancr::core::binom::BinomialHalf;
use mediancr::core::classical::{cr_sign, AccelerationFormula};
use mediancr::core::dist::DistributionSpec;
use mediancr::core::lk::{lk_exponential, lk_numeric, lk_numeric_profile, lk_uniform, LkProfile};
use mediancr::core::method::{evaluate, Method, MethodInputs};
use mediancr::core::optimal::{cr_exponential_focused, select_gamma0, Gamma0Selection};
use mediancr::core::rng::{RngStream, StreamKey};
use mediancr::core::{RandomizerDraw, Region, SortedSample};
use mediancr::sim::{run_simulation, write_csv, SimConfig, SimResult};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn within_budget(start: Instant, budget: Duration) -> (bool, String) {
    let elapsed = start.elapsed();
    (elapsed <= budget, format!("{:.1}s of {}s", elapsed.as_secs_f64(), budget.as_secs()))
}

fn sim_config(dists: &[DistributionSpec], sizes: &[usize], alpha: f64, reps: usize, breps: usize, methods: &[Method]) -> SimConfig {
    SimConfig {
        distributions: dists.to_vec(),
        sample_sizes: sizes.to_vec(),
        alpha,
        reps,
        breps,
        methods: methods.to_vec(),
        master_seed: 20_240_917,
        workers: 0,
        acceleration: AccelerationFormula::Standard,
    }
}

fn row<'a>(rows: &'a [SimResult], method: Method, dist: &DistributionSpec, n: usize) -> &'a SimResult {
    let label = mediancr::sim::dist_label(dist);
    rows.iter()
        .find(|r| r.method == method && r.dist == label && r.n == n)
        .expect("row present")
}

fn normal_sample(n: usize, seed: u64, index: u64) -> SortedSample {
    let mut rng = RngStream::new(seed, StreamKey::new(1, n as u64, index));
    SortedSample::new(&DistributionSpec::STANDARD_NORMAL.sample(n, &mut rng).unwrap()).unwrap()
}

/// Reference table rows for n = 10 under the exponential focus.
fn table_reproduction() -> Outcome {
    const R: [&str; 11] = ["1", "9", "36", "84", "126", "126", "84", "36", "9", "1", "0"];
    const P: [&str; 11] = [
        "0.0009765625",
        "0.0097656250",
        "0.0439453125",
        "0.1171875000",
        "0.2050781250",
        "0.2460937500",
        "0.2050781250",
        "0.1171875000",
        "0.0439453125",
        "0.0097656250",
        "0.0009765625",
    ];
    let out = Command::new(env!("CARGO_BIN_EXE_mediancr"))
        .args(["table", "--n", "10", "--focus", "exponential"])
        .output()
        .expect("binary runs");
    if !out.status.success() {
        return Outcome::new(false, format!("exit {:?}", out.status.code()));
    }
    let text = String::from_utf8_lossy(&out.stdout);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).take(11).map(|l| l.split_whitespace().collect()).collect();
    let mut mismatches = Vec::new();
    for (k, cols) in rows.iter().enumerate() {
        if cols.len() != 3 || cols[0] != k.to_string() || cols[1] != R[k] || cols[2] != P[k] {
            mismatches.push(format!("k={k}: {cols:?}"));
        }
    }
    if rows.len() != 11 {
        mismatches.push(format!("{} rows", rows.len()));
    }
    Outcome::new(mismatches.is_empty(), if mismatches.is_empty() { "11/11 rows".into() } else { mismatches.join("; ") })
}

/// Index set, mass and randomization probability at n = 10, then the two
/// branches of the exponential-focused region on random samples.
fn worked_example() -> Outcome {
    let sel = select_gamma0(&lk_exponential(10, 1.0).unwrap(), 0.05).unwrap();
    let mut ok = sel.included == [2, 3, 4, 5, 6, 7] && sel.tie_set == [1, 8];
    ok &= (sel.included_mass - 0.9346).abs() <= 5e-5;
    ok &= (sel.gamma - 0.2867).abs() <= 1e-3;
    let mut branch_errors = 0;
    for i in 0..500 {
        let x = normal_sample(10, 3, i);
        for u in [0.0, 0.1, sel.gamma, 0.2868, 0.29, 0.5, 1.0] {
            let region = cr_exponential_focused(&x, 0.05, RandomizerDraw::new(u).unwrap()).unwrap();
            let (lo, hi) = if u <= sel.gamma { (1, 9) } else { (2, 8) };
            let expect = Region::single(mediancr::core::Interval::half_open(x.order_stat(lo), x.order_stat(hi)));
            branch_errors += (region != expect) as usize;
        }
    }
    ok &= branch_errors == 0;
    Outcome::new(
        ok,
        format!(
            "included {:?}, tie {:?}, mass {:.6}, gamma {:.6}, branch mismatches {branch_errors}/3500",
            sel.included, sel.tie_set, sel.included_mass, sel.gamma
        ),
    )
}

fn closed_forms() -> Outcome {
    let mut exact_errors = 0;
    let mut worst: f64 = 0.0;
    for n in 1..=12 {
        for (a, rate) in [(1.0, 1.0), (2.5, 0.5), (0.3, 4.0)] {
            let u = lk_uniform(n, a).unwrap();
            let e = lk_exponential(n, rate).unwrap();
            for k in 0..=n {
                exact_errors += (u.l()[k] != 2.0 * a / (n as f64 + 1.0)) as usize;
                exact_errors += (e.l()[k] != 1.0 / (rate * (n - k) as f64)) as usize;
            }
            for k in 1..n {
                let nu = lk_numeric(&DistributionSpec::Uniform { lo: -a, hi: a }, n, k).unwrap();
                let ne = lk_numeric(&DistributionSpec::Exponential { rate }, n, k).unwrap();
                worst = worst.max((nu.value - u.l()[k]).abs()).max((ne.value - e.l()[k]).abs());
            }
        }
    }
    Outcome::new(
        exact_errors == 0 && worst <= 1e-6,
        format!("closed-form mismatches {exact_errors}, worst numeric error {worst:.2e}"),
    )
}

fn spacing_monte_carlo() -> Outcome {
    let start = Instant::now();
    const SAMPLES: usize = 1_000_000;
    let n = 5;
    let mut worst_z: f64 = 0.0;
    let mut ok = true;
    for (i, dist) in [DistributionSpec::STANDARD_NORMAL, DistributionSpec::Exponential { rate: 1.0 }].iter().enumerate() {
        let mut rng = RngStream::new(4, StreamKey::new(1, i as u64, 0));
        let mut sum = [0.0f64; 6];
        let mut sum_sq = [0.0f64; 6];
        for _ in 0..SAMPLES {
            let mut x = dist.sample(n, &mut rng).unwrap();
            x.sort_by(f64::total_cmp);
            for k in 1..n {
                let d = x[k] - x[k - 1];
                sum[k] += d;
                sum_sq[k] += d * d;
            }
        }
        for k in 1..n {
            let mean = sum[k] / SAMPLES as f64;
            let var = (sum_sq[k] / SAMPLES as f64 - mean * mean) * SAMPLES as f64 / (SAMPLES - 1) as f64;
            let se = (var / SAMPLES as f64).sqrt();
            let z = (lk_numeric(dist, n, k).unwrap().value - mean).abs() / se;
            worst_z = worst_z.max(z);
            ok &= z <= 3.0;
        }
    }
    let (in_time, time) = within_budget(start, Duration::from_secs(120));
    Outcome::new(ok && in_time, format!("worst |z| {worst_z:.2}, {time}"))
}

fn symmetric_unimodal(profile: &LkProfile) -> Result<(), String> {
    let n = profile.n();
    let r: Vec<f64> = (0..=n).map(|k| profile.ratios().get(k)).collect();
    for k in 0..=n {
        if (r[k] - r[n - k]).abs() > 1e-6 {
            return Err(format!("n={n}: r({k})={:.8} vs r({})={:.8}", r[k], n - k, r[n - k]));
        }
    }
    // Quadrature noise of order 1e-12 separates the equal central ratios.
    for k in n / 2..n {
        if r[k + 1] > r[k] * (1.0 + 1e-9) {
            return Err(format!("n={n}: r rises from k={k} to {}", k + 1));
        }
    }
    if n % 2 == 1 && (r[n / 2] - r[n / 2 + 1]).abs() > 1e-6 {
        return Err(format!("n={n}: central ratios differ"));
    }
    Ok(())
}

fn ratio_symmetry() -> Outcome {
    let families = [
        DistributionSpec::STANDARD_NORMAL,
        DistributionSpec::UNIFORM_PM1,
        DistributionSpec::STANDARD_LOGISTIC,
        DistributionSpec::BIMODAL_MIXTURE,
    ];
    let mut failures = Vec::new();
    for dist in &families {
        for n in 6..=12 {
            let profile = lk_numeric_profile(dist, n).unwrap();
            if let Err(e) = symmetric_unimodal(&profile) {
                failures.push(format!("{dist} {e}"));
                break;
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        if failures.is_empty() { "4 families, n 6..12".into() } else { failures.join("; ") },
    )
}

fn randomized_coverage() -> Outcome {
    let start = Instant::now();
    let mut worst_identity: f64 = 0.0;
    let methods = [Method::SymmetricFocused, Method::ExponentialFocused];
    for n in [10, 20] {
        let binom = BinomialHalf::new(n).unwrap();
        let x = normal_sample(n, 6, 0);
        for alpha in [0.05, 0.10] {
            for method in methods {
                let inputs = MethodInputs { u: Some(RandomizerDraw::new(0.5).unwrap()), ..Default::default() };
                let out = evaluate(method, &x, alpha, &inputs).unwrap();
                let sel: &Gamma0Selection = &out.branches.as_ref().unwrap().selection;
                let level = binom.mass_of(&sel.included) + sel.gamma * binom.mass_of(&sel.tie_set);
                worst_identity = worst_identity.max((level - (1.0 - alpha)).abs());
            }
        }
    }
    let config = sim_config(&DistributionSpec::STUDY_FAMILIES, &[10, 20], 0.05, 20_000, 2, &methods);
    let rows = run_simulation(&config).unwrap();
    let worst_cov = rows.iter().map(|r| (r.coverage - 0.95).abs()).fold(0.0, f64::max);
    let failures: usize = rows.iter().map(|r| r.failures).sum();
    let (in_time, time) = within_budget(start, Duration::from_secs(300));
    Outcome::new(
        worst_identity <= 1e-12 && worst_cov <= 0.006 && failures == 0 && in_time,
        format!(
            "identity error {worst_identity:.1e}, worst |coverage - 0.95| {worst_cov:.4} over {} cells, {time}",
            rows.len()
        ),
    )
}

/// Index set `{a, .., b - 1}` behind a sign region `[x(a), x(b))` on the sample 1..n.
fn sign_index_set(n: usize, alpha: f64) -> Vec<usize> {
    let x = SortedSample::new(&(1..=n).map(|v| v as f64).collect::<Vec<_>>()).unwrap();
    let piece = cr_sign(&x, alpha).unwrap().intervals()[0];
    let a = if piece.lo.is_finite() { piece.lo as usize } else { 0 };
    let b = if piece.hi.is_finite() { piece.hi as usize } else { n + 1 };
    (a..b).collect()
}

fn sign_coverage() -> Outcome {
    let exact_n10 = BinomialHalf::new(10).unwrap().mass_of(&sign_index_set(10, 0.05));
    let mut ok = exact_n10 == 1002.0 / 1024.0;
    let mut worst_exact = f64::INFINITY;
    for n in 1..=60 {
        let binom = BinomialHalf::new(n).unwrap();
        for alpha in [0.01, 0.05, 0.10] {
            let margin = binom.mass_of(&sign_index_set(n, alpha)) - (1.0 - alpha);
            worst_exact = worst_exact.min(margin);
        }
    }
    ok &= worst_exact >= 0.0;

    let uniform = [DistributionSpec::UNIFORM_PM1];
    let mut sims = Vec::new();
    for (sizes, alpha) in [(&[10, 20, 30][..], 0.05), (&[10, 20][..], 0.10)] {
        for r in run_simulation(&sim_config(&uniform, sizes, alpha, 20_000, 2, &[Method::Sign])).unwrap() {
            sims.push(r);
        }
    }
    let n10 = sims[0].coverage;
    ok &= (n10 - 0.978515625).abs() <= 0.004;
    let below: Vec<String> = sims
        .iter()
        .filter(|r| r.coverage < 1.0 - r.alpha)
        .map(|r| format!("n={} alpha={} coverage {:.4}", r.n, r.alpha, r.coverage))
        .collect();
    ok &= below.is_empty();
    Outcome::new(
        ok,
        format!(
            "simulated n=10 coverage {n10:.4} (exact {exact_n10}), worst exact margin {worst_exact:.4}, {} simulated cells below level{}",
            below.len(),
            if below.is_empty() { String::new() } else { format!(": {}", below.join("; ")) }
        ),
    )
}

fn lp_oracle() -> Outcome {
    let mut rng = RngStream::new(8, StreamKey::new(9, 0, 0));
    let mut checked = 0usize;
    let mut violations = 0usize;
    for n in 1..=12 {
        let binom = BinomialHalf::new(n).unwrap();
        for profile in [lk_uniform(n, 1.0).unwrap(), lk_exponential(n, 1.0).unwrap()] {
            let l = profile.l();
            let finite: Vec<usize> = (0..=n).filter(|&k| l[k].is_finite()).collect();
            for alpha in [0.05, 0.10, 0.25] {
                let Ok(sel) = select_gamma0(&profile, alpha) else { continue };
                let bound = sel.expected_content(l);
                let content = |set: &[usize]| set.iter().map(|&k| l[k]).sum::<f64>();
                let feasible = |set: &[usize]| binom.mass_of(set) >= 1.0 - alpha - 1e-12;
                let mut sets: Vec<Vec<usize>> = Vec::new();
                for mask in 0u32..1 << finite.len() {
                    let set: Vec<usize> = finite.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &k)| k).collect();
                    if feasible(&set) {
                        sets.push(set);
                    }
                }
                let mut drawn = 0;
                while drawn < 1000 {
                    let set: Vec<usize> = finite.iter().copied().filter(|_| rng.below(2) == 1).collect();
                    if feasible(&set) {
                        sets.push(set);
                        drawn += 1;
                    }
                }
                for set in &sets {
                    checked += 1;
                    violations += (content(set) < bound * (1.0 - 1e-12)) as usize;
                }
            }
        }
    }
    Outcome::new(violations == 0, format!("{checked} feasible sets, {violations} violations"))
}

fn qualitative_study() -> (Outcome, SimConfig, Vec<u8>) {
    let start = Instant::now();
    let dists = DistributionSpec::STUDY_FAMILIES;
    let sizes = [10, 20, 30];
    let config = sim_config(&dists, &sizes, 0.05, 2000, 500, &Method::ALL);
    let rows = run_simulation(&config).unwrap();
    let (in_time, time) = within_budget(start, Duration::from_secs(600));
    let mut csv = Vec::new();
    write_csv(&rows, &mut csv).unwrap();

    let under = |r: &SimResult| 0.95 - r.coverage > 3.0 * r.mc_se;
    let gamma = DistributionSpec::GAMMA_2_1;
    let a = [20, 30].iter().all(|&n| under(row(&rows, Method::T, &gamma, n)) && under(row(&rows, Method::Wilcoxon, &gamma, n)));
    let a_n10 = format!(
        "n=10 t {:.4} wilcoxon {:.4}",
        row(&rows, Method::T, &gamma, 10).coverage,
        row(&rows, Method::Wilcoxon, &gamma, 10).coverage
    );
    let cauchy = DistributionSpec::STANDARD_CAUCHY;
    let b_ratios: Vec<f64> = sizes
        .iter()
        .map(|&n| row(&rows, Method::T, &cauchy, n).std_content / row(&rows, Method::SymmetricFocused, &cauchy, n).std_content)
        .collect();
    let b = b_ratios.iter().all(|&q| q > 2.0);
    let symmetric = [
        DistributionSpec::STANDARD_NORMAL,
        DistributionSpec::STANDARD_CAUCHY,
        DistributionSpec::UNIFORM_PM1,
        DistributionSpec::STANDARD_LOGISTIC,
    ];
    let skewed = [DistributionSpec::GAMMA_2_1, DistributionSpec::WEIBULL_HALF_1];
    let mom_under = |ds: &[DistributionSpec]| {
        ds.iter().any(|d| sizes.iter().any(|&n| under(row(&rows, Method::AdaptiveMom, d, n))))
    };
    let c = mom_under(&symmetric) && mom_under(&skewed);
    let mut d_fail = Vec::new();
    for dist in &dists {
        for &n in &sizes {
            let (s3, s10) = (row(&rows, Method::Sign, dist, n).std_content, row(&rows, Method::SymmetricFocused, dist, n).std_content);
            if s3 < s10 {
                d_fail.push(format!("{} n={n}", mediancr::sim::dist_label(dist)));
            }
        }
    }
    let mut e_fail = Vec::new();
    for method in [Method::BootstrapPercentile, Method::BootstrapBca, Method::AdaptiveEdf] {
        for dist in &dists {
            for &n in &sizes {
                let r = row(&rows, method, dist, n);
                if !(0.90..=0.95).contains(&r.coverage) {
                    e_fail.push(format!("{} {} n={n} {:.4}", method.id(), r.dist, r.coverage));
                }
            }
        }
    }
    let pass = in_time && a && b && c && d_fail.is_empty() && e_fail.is_empty();
    let detail = format!(
        "(a) {} [{a_n10}]; (b) {} ratios {:?}; (c) {}; (d) {}; (e) {}; {time}",
        if a { "ok" } else { "FAIL" },
        if b { "ok" } else { "FAIL" },
        b_ratios.iter().map(|q| format!("{q:.2}")).collect::<Vec<_>>(),
        if c { "ok" } else { "FAIL" },
        if d_fail.is_empty() { "ok".to_string() } else { format!("FAIL {}", d_fail.join(", ")) },
        if e_fail.is_empty() { "ok".to_string() } else { format!("FAIL {} cells: {}", e_fail.len(), e_fail.join(", ")) },
    );
    (Outcome::new(pass, detail), config, csv)
}

fn determinism(mut config: SimConfig, first: Vec<u8>) -> Outcome {
    config.workers = 1;
    let mut again = Vec::new();
    write_csv(&run_simulation(&config).unwrap(), &mut again).unwrap();
    let library = again == first;

    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, workers) in ["1", "4", "4"].iter().enumerate() {
        let path = dir.path().join(format!("run{i}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_mediancr"))
            .args([
                "simulate", "--dists", "all", "--sizes", "10,25", "--reps", "300", "--breps", "100", "--seed", "17",
                "--workers", workers, "--out",
            ])
            .arg(&path)
            .output()
            .expect("binary runs")
            .status;
        assert!(status.success());
        files.push(std::fs::read(&path).unwrap());
    }
    let cli = files.windows(2).all(|w| w[0] == w[1]);
    Outcome::new(
        library && cli,
        format!("library rerun identical: {library}; CLI runs with workers 1/4/4 identical: {cli}"),
    )
}

fn main() -> ExitCode {
    let mut all_pass = true;
    let mut report = |i: usize, name: &str, o: Outcome| {
        all_pass &= o.pass;
        println!("{} [{i}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    };
    report(1, "reference table", table_reproduction());
    report(2, "worked example n=10", worked_example());
    report(3, "closed-form spacings", closed_forms());
    report(4, "spacing Monte Carlo", spacing_monte_carlo());
    report(5, "ratio symmetry", ratio_symmetry());
    report(6, "exact randomized coverage", randomized_coverage());
    report(7, "sign interval coverage", sign_coverage());
    report(8, "optimality oracle", lp_oracle());
    let (qualitative, config, csv) = qualitative_study();
    report(9, "qualitative study", qualitative);
    report(10, "determinism", determinism(config, csv));
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
