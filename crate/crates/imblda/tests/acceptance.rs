//! Acceptance suite. Each test covers one exit criterion at its stated
//! tolerance and prints a pass/fail line (visible with --nocapture).

use imblda::classifiers::{
    fit_hr, fit_msplit_hr_diag, fit_msplit_hr_general, LinearRule, RuleKind,
};
use imblda::datagen::{make_setting, sample_dataset, GaussianModel, SettingId};
use imblda::eval::{
    delta_p_squared, empirical_mcr, normal_cdf, optimal_mcr, theoretical_mcr,
};
use imblda::harness::config::load_config_str;
use imblda::harness::{run_experiment, ExperimentConfig};
use imblda::linalg::{dot, solve_spd, CovSpec};
use imblda::seed::stream_rng;

struct Checks {
    criterion: &'static str,
    items: Vec<(bool, String)>,
}

impl Checks {
    fn new(criterion: &'static str) -> Self {
        Self {
            criterion,
            items: Vec::new(),
        }
    }

    fn push(&mut self, pass: bool, detail: String) {
        self.items.push((pass, detail));
    }

    fn finish(self) {
        let ok = self.items.iter().all(|(pass, _)| *pass);
        println!(
            "{}: {}",
            self.criterion,
            if ok { "PASS" } else { "FAIL" }
        );
        for (pass, detail) in &self.items {
            println!("    [{}] {}", if *pass { "ok" } else { "FAIL" }, detail);
        }
        assert!(ok, "{} failed", self.criterion);
    }
}

fn config(json: &str, out: &std::path::Path) -> ExperimentConfig {
    let mut cfg = load_config_str(json).expect("acceptance config must validate");
    cfg.out_dir = out.to_path_buf();
    cfg
}

#[test]
fn criterion_1_analytic_optima() {
    let mut c = Checks::new("criterion 1 (analytic optimal rates)");

    for (label, model, nominal) in [
        ("setting i", make_setting(SettingId::I, 1000).unwrap(), 19.32),
        ("setting ii", make_setting(SettingId::Ii, 1000).unwrap(), 7.0),
    ] {
        let opt = 100.0 * optimal_mcr(&model).unwrap();
        let from_delta =
            100.0 * normal_cdf(-delta_p_squared(&model).unwrap().sqrt() / 2.0);
        c.push(
            (opt - nominal).abs() <= 0.05,
            format!("{label}: optimal rate {opt:.4}% within 0.05 points of {nominal}%"),
        );
        c.push(
            (opt - from_delta).abs() <= 0.05,
            format!("{label}: matches the rate recomputed from the signal strength ({from_delta:.4}%)"),
        );
    }
    c.finish();
}

#[test]
fn criterion_2_signal_strength_oracles() {
    let mut c = Checks::new("criterion 2 (signal-strength oracles)");

    let cases = [
        ("setting i, p=1000", make_setting(SettingId::I, 1000).unwrap(), 3.004),
        ("setting iii, p=500", make_setting(SettingId::Iii, 500).unwrap(), 0.7088),
        ("setting iv, p=10", make_setting(SettingId::Iv, 10).unwrap(), 1.274),
        ("setting iv, p=500", make_setting(SettingId::Iv, 500).unwrap(), 1.274),
    ];
    for (label, model, expected) in &cases {
        let got = delta_p_squared(model).unwrap();
        c.push(
            (got - expected).abs() <= 1e-3,
            format!("{label}: delta^2 = {got:.6} within 1e-3 of {expected}"),
        );
    }

    // the closed-form path must agree with a dense solve
    for (label, model) in [
        ("setting iii, p=500", &cases[1].1),
        ("setting iv, p=500", &cases[3].1),
    ] {
        let mu_d = model.mu_d();
        let dense = model.cov().build_cov(model.p()).unwrap();
        let via_dense = dot(&mu_d, &solve_spd(&dense, &mu_d).unwrap());
        let via_fast = delta_p_squared(model).unwrap();
        c.push(
            (via_dense - via_fast).abs() <= 1e-8,
            format!("{label}: closed form {via_fast:.10} vs dense solve {via_dense:.10}"),
        );
    }
    c.finish();
}

#[test]
fn criterion_3_table_reproduction_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        r#"{
            "experiment": "table-repro",
            "data": {"setting": "i", "p": 1000, "n1": 50, "n2": 10},
            "test": {"n1": 50, "n2": 50},
            "replicates": 100,
            "seed": 7,
            "methods": [
                {"name": "hr", "grid_size": 20},
                {"name": "msplit-hr-diag", "splits": 30, "cv_splits": 10, "grid_size": 20}
            ]
        }"#,
        dir.path(),
    );
    let out = run_experiment(&cfg).unwrap();
    let hr = &out.summary[0].summary;
    let ms = &out.summary[1].summary;

    let mut c = Checks::new("criterion 3 (diagonal-case table reproduction)");
    let hr1 = 100.0 * hr.mcr1_mean;
    let hr2 = 100.0 * hr.mcr2_mean;
    let ms1 = 100.0 * ms.mcr1_mean;
    let ms2 = 100.0 * ms.mcr2_mean;
    c.push(
        (hr1 - 19.36).abs() <= 6.0,
        format!("hr mcr1 {hr1:.2}% within 19.36 +/- 6"),
    );
    c.push(
        (hr2 - 40.82).abs() <= 8.0,
        format!("hr mcr2 {hr2:.2}% within 40.82 +/- 8"),
    );
    c.push(
        (ms1 - 30.22).abs() <= 6.0,
        format!("msplit mcr1 {ms1:.2}% within 30.22 +/- 6"),
    );
    c.push(
        (ms2 - 26.68).abs() <= 6.0,
        format!("msplit mcr2 {ms2:.2}% within 26.68 +/- 6"),
    );
    c.push(
        ms2 <= hr2 - 5.0,
        format!("ordering: msplit mcr2 {ms2:.2} <= hr mcr2 {hr2:.2} - 5"),
    );
    c.push(
        (ms1 - ms2).abs() < (hr1 - hr2).abs(),
        format!(
            "balance: msplit gap {:.2} < hr gap {:.2}",
            (ms1 - ms2).abs(),
            (hr1 - hr2).abs()
        ),
    );
    c.finish();
}

#[test]
fn criterion_4_table_spot_check_general() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        r#"{
            "experiment": "table-repro",
            "data": {"setting": "iv", "p": 500, "n1": 50, "n2": 10},
            "test": {"n1": 50, "n2": 50},
            "replicates": 100,
            "seed": 7,
            "methods": [
                {"name": "msplit-hr-general", "splits": 30, "cv_splits": 10, "grid_size": 20}
            ]
        }"#,
        dir.path(),
    );
    let out = run_experiment(&cfg).unwrap();
    let ms = &out.summary[0].summary;

    let mut c = Checks::new("criterion 4 (general-case table spot check)");
    let mcr2 = 100.0 * ms.mcr2_mean;
    c.push(
        (mcr2 - 40.7).abs() <= 8.0,
        format!("msplit-general mcr2 {mcr2:.2}% within 40.7 +/- 8"),
    );
    c.push(
        ms.s_median <= 5.0,
        format!("median stability-support size {:.1} <= 5", ms.s_median),
    );
    c.finish();
}

#[test]
fn criterion_5_known_covariance_ignorance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        r#"{
            "experiment": "theorem1-ignorance",
            "data": {"setting": "i", "p": 100, "n1": 200, "n2": 20},
            "replicates": 200,
            "seed": 7,
            "dims": [100, 500, 2000]
        }"#,
        dir.path(),
    );
    let out = run_experiment(&cfg).unwrap();
    let rows = &out.ignorance;

    let mut c = Checks::new("criterion 5 (known-covariance plug-in rule ignores the minority)");
    c.push(
        rows[0].mcr2_mean < rows[1].mcr2_mean && rows[1].mcr2_mean < rows[2].mcr2_mean,
        format!(
            "minority rate strictly increases in p: {:.4} < {:.4} < {:.4}",
            rows[0].mcr2_mean, rows[1].mcr2_mean, rows[2].mcr2_mean
        ),
    );
    c.push(
        rows[2].mcr2_mean >= 0.9,
        format!("minority rate at p=2000 is {:.4} >= 0.9", rows[2].mcr2_mean),
    );
    c.push(
        rows[2].mcr1_mean <= 0.1,
        format!("majority rate at p=2000 is {:.4} <= 0.1", rows[2].mcr1_mean),
    );
    c.finish();
}

#[test]
fn criterion_6_bias_correction() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        r#"{
            "experiment": "bias-verification",
            "data": {"setting": "i", "p": 1000, "n1": 50, "n2": 10},
            "seed": 7,
            "fixed_tau": 2.0,
            "bias_draws": 2000,
            "methods": [{"name": "msplit-hr-diag", "splits": 30, "tau": 2.0}]
        }"#,
        dir.path(),
    );
    let out = run_experiment(&cfg).unwrap();
    let b = out.bias.unwrap();

    let mut c = Checks::new("criterion 6 (analytic score-gap correction)");
    c.push(
        b.rbar < 0.0,
        format!("gap unit is negative under imbalance: {:.6}", b.rbar),
    );
    c.push(
        (b.paired_diff_mean).abs() <= 3.0 * b.paired_diff_se,
        format!(
            "uncorrected gap {:.5} matches prediction {:.5} within 3 se ({:.5})",
            b.uncorrected_mean, b.predicted_gap, b.paired_diff_se
        ),
    );
    c.push(
        b.corrected_mean.abs() <= 3.0 * b.corrected_se,
        format!(
            "corrected gap {:.5} within 3 se ({:.5}) of zero",
            b.corrected_mean, b.corrected_se
        ),
    );
    c.finish();
}

#[test]
fn criterion_7_split_count_trend() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        r#"{
            "experiment": "l-sweep",
            "data": {"setting": "i", "p": 1000, "n1": 50, "n2": 10},
            "test": {"n1": 50, "n2": 50},
            "replicates": 100,
            "seed": 7,
            "sweep_splits": [1, 5, 10, 20, 30],
            "methods": [{"name": "msplit-hr-diag", "cv_splits": 10, "grid_size": 20}]
        }"#,
        dir.path(),
    );
    let out = run_experiment(&cfg).unwrap();
    let first = out.sweep.first().unwrap();
    let last = out.sweep.last().unwrap();

    let mut c = Checks::new("criterion 7 (split-count trend)");
    c.push(
        last.mcr2_mean <= first.mcr2_mean + 0.01,
        format!(
            "mcr2 at L=30 ({:.4}) <= mcr2 at L=1 ({:.4}) + 1 point",
            last.mcr2_mean, first.mcr2_mean
        ),
    );
    c.push(
        last.gap <= first.gap,
        format!(
            "rate gap at L=30 ({:.4}) <= gap at L=1 ({:.4})",
            last.gap, first.gap
        ),
    );
    c.finish();
}

#[test]
fn criterion_8_exact_vs_empirical_rates() {
    use rand::Rng;
    let mut c = Checks::new("criterion 8 (exact vs empirical rates)");
    let per_class = 500_000usize;

    let mut worst = 0.0f64;
    for k in 0..20u64 {
        let p = 4 + (k as usize % 5);
        let mut rng = stream_rng(211, &[k, 0]);
        let mu2: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let cov = if k % 2 == 0 {
            CovSpec::Diagonal((0..p).map(|_| rng.gen_range(0.5..2.0)).collect())
        } else {
            CovSpec::Equicorrelation {
                variance: 1.5,
                covariance: rng.gen_range(-0.1..1.0),
            }
        };
        let model = GaussianModel::new(vec![0.0; p], mu2, cov).unwrap();
        let weights: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let rule = LinearRule::new(weights, rng.gen_range(-1.0..1.0), RuleKind::Hr);

        let (t1, t2) = theoretical_mcr(&rule, &model).unwrap();
        let test = sample_dataset(
            &model,
            per_class,
            per_class,
            &mut stream_rng(211, &[k, 1]),
        )
        .unwrap();
        let (e1, e2) = empirical_mcr(&rule, &test).unwrap();

        for (theo, emp) in [(t1, e1), (t2, e2)] {
            let se = (theo * (1.0 - theo) / per_class as f64).sqrt().max(1e-9);
            worst = worst.max((emp - theo).abs() / se);
            if (emp - theo).abs() > 3.0 * se {
                c.push(
                    false,
                    format!("pair {k}: empirical {emp:.6} vs exact {theo:.6} beyond 3 se"),
                );
            }
        }
    }
    c.push(
        true,
        format!("20 random rule/model pairs agree; worst deviation {worst:.2} se"),
    );
    c.finish();
}

#[test]
fn criterion_9_property_suites() {
    use rand::Rng;
    let mut c = Checks::new("criterion 9 (property suites)");

    // ensemble-collapse identity at random inputs, both variants
    let mut collapse_ok = true;
    for s in 0..20u64 {
        let model = make_setting(SettingId::I, 40).unwrap();
        let d = sample_dataset(&model, 16, 8, &mut stream_rng(223, &[s, 0])).unwrap();
        let (rule, trace) =
            fit_msplit_hr_diag(&d, 0.8, 6, &mut stream_rng(223, &[s, 1])).unwrap();
        let model_g = make_setting(SettingId::Iv, 40).unwrap();
        let dg = sample_dataset(&model_g, 16, 8, &mut stream_rng(223, &[s, 2])).unwrap();
        let (rule_g, trace_g) =
            fit_msplit_hr_general(&dg, 0.3, 6, &mut stream_rng(223, &[s, 3])).unwrap();
        let mut rng = stream_rng(223, &[s, 4]);
        for _ in 0..5 {
            let x: Vec<f64> = (0..40).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let d1 = (rule.discriminant(&x) - trace.ensemble_discriminant(&x, true)).abs();
            let d2 = (rule_g.discriminant(&x) - trace_g.ensemble_discriminant(&x, true)).abs();
            let s1 = rule.discriminant(&x).abs().max(1.0);
            let s2 = rule_g.discriminant(&x).abs().max(1.0);
            collapse_ok &= d1 <= 1e-10 * s1 && d2 <= 1e-10 * s2;
        }
    }
    c.push(collapse_ok, "ensemble collapse is exact to 1e-10".into());

    // determinism
    let model = make_setting(SettingId::I, 60).unwrap();
    let d = sample_dataset(&model, 20, 10, &mut stream_rng(227, &[0])).unwrap();
    let (a, _) = fit_msplit_hr_diag(&d, 1.0, 12, &mut stream_rng(227, &[1])).unwrap();
    let (b, _) = fit_msplit_hr_diag(&d, 1.0, 12, &mut stream_rng(227, &[1])).unwrap();
    c.push(a == b, "identical seeds give bit-identical rules".into());

    // monotone thresholding along a grid
    let mut sizes = Vec::new();
    for tau in [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
        sizes.push(fit_hr(&d, tau).unwrap().support().len());
    }
    c.push(
        sizes.windows(2).all(|w| w[1] <= w[0]),
        format!("selection path is nonincreasing: {sizes:?}"),
    );

    // positive rescaling leaves exact rates and predictions unchanged
    let rule = fit_hr(&d, 0.5).unwrap();
    let (r1, r2) = theoretical_mcr(&rule, &model).unwrap();
    let mut scale_ok = true;
    let mut rng = stream_rng(229, &[]);
    for scale in [1e-6, 1.0, 1e6] {
        let scaled = LinearRule::new(
            rule.weights().iter().map(|w| scale * w).collect(),
            scale * rule.intercept(),
            RuleKind::Hr,
        );
        let (s1, s2) = theoretical_mcr(&scaled, &model).unwrap();
        scale_ok &= (s1 - r1).abs() <= 1e-9 && (s2 - r2).abs() <= 1e-9;
        for _ in 0..20 {
            let x: Vec<f64> = (0..60).map(|_| rng.gen_range(-3.0..3.0)).collect();
            scale_ok &= scaled.predict(&x).unwrap() == rule.predict(&x).unwrap();
        }
    }
    c.push(scale_ok, "rates and predictions are scale-invariant".into());

    c.finish();
}
