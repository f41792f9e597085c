//! Statistical behaviour checks run at fixed seeds: selection consistency
//! of the thresholded t-statistic, screening coverage of the mean
//! difference, sampler moment accuracy, and the balancing effect of
//! under-sampling.

use imblda::classifiers::{fit_hr, fit_us_hr};
use imblda::datagen::{make_setting, sample_dataset, GaussianModel, SettingId};
use imblda::estimators::{
    class_means, select_by_meandiff, select_by_t, t_statistics, SupportSet,
};
use imblda::eval::theoretical_mcr;
use imblda::linalg::{sym_eigen, CovSpec, SymMatrix};
use imblda::seed::stream_rng;

/// Strong signals and a threshold growing with sqrt(n2) recover exactly
/// the active set nearly always.
#[test]
fn thresholded_t_recovers_the_active_set() {
    let (n1, n2, p) = (1200usize, 180usize, 200usize);
    let model = make_setting(SettingId::I, p).unwrap();
    let truth: SupportSet = [0usize, 1].into_iter().collect();
    let tau = 0.3 * (n2 as f64).sqrt(); // d0 = 1

    let mut exact = 0u64;
    let reps: u64 = 200;
    for r in 0..reps {
        let d = sample_dataset(&model, n1, n2, &mut stream_rng(101, &[r])).unwrap();
        let t = t_statistics(&d).unwrap();
        let selected = select_by_t(&t, tau);
        if truth.is_subset_of(&selected) && selected.len() == truth.len() {
            exact += 1;
        }
    }
    assert!(
        exact * 10 >= reps * 9,
        "exact recovery in {exact}/{reps} replicates, expected at least 90%"
    );
}

/// Mean-difference screening at a threshold proportional to the weakest
/// signal keeps every active feature nearly always.
#[test]
fn meandiff_screening_covers_the_active_set() {
    let (n1, n2, p) = (100usize, 20usize, 200usize);
    let model = make_setting(SettingId::I, p).unwrap();
    let truth: SupportSet = [0usize, 1].into_iter().collect();
    let tau = 0.3; // 0.3 * d0

    let mut covered = 0u64;
    let reps: u64 = 200;
    for r in 0..reps {
        let d = sample_dataset(&model, n1, n2, &mut stream_rng(103, &[r])).unwrap();
        let (mu1, mu2) = class_means(&d);
        let mu_d: Vec<f64> = mu2.iter().zip(&mu1).map(|(b, a)| b - a).collect();
        if truth.is_subset_of(&select_by_meandiff(&mu_d, tau)) {
            covered += 1;
        }
    }
    assert!(
        covered * 10 >= reps * 9,
        "active set covered in {covered}/{reps} replicates, expected at least 90%"
    );
}

/// Law-of-large-numbers check on the sampler's per-feature moments.
#[test]
fn sampler_moments_converge() {
    let p = 20;
    let model = make_setting(SettingId::I, p).unwrap();
    let n = 50_000usize;
    let d = sample_dataset(&model, n, n, &mut stream_rng(107, &[])).unwrap();
    let (mu1, mu2) = class_means(&d);
    let vars = match model.cov() {
        CovSpec::Diagonal(v) => v.clone(),
        _ => unreachable!(),
    };

    for j in 0..p {
        let sd = vars[j].sqrt();
        let tol = 4.0 * sd / (n as f64).sqrt();
        assert!(
            (mu1[j] - model.mu1()[j]).abs() < tol,
            "class-1 mean of feature {j} off by more than 4 standard errors"
        );
        assert!((mu2[j] - model.mu2()[j]).abs() < tol);
    }

    // per-class sample variances within 5%
    for (label, mu, count) in [(1u8, &mu1, n), (2u8, &mu2, n)] {
        let rows: Vec<usize> = (0..d.n()).filter(|&i| d.label(i) == label).collect();
        for j in 0..p {
            let ss: f64 = rows.iter().map(|&i| {
                let dev = d.row(i)[j] - mu[j];
                dev * dev
            }).sum();
            let var = ss / (count - 1) as f64;
            assert!(
                (var / vars[j] - 1.0).abs() < 0.05,
                "variance of feature {j} off by more than 5%"
            );
        }
    }
}

/// The empirical covariance converges to the structured build in operator
/// norm.
#[test]
fn sampler_covariance_converges_in_operator_norm() {
    let p = 10;
    let model = make_setting(SettingId::Iv, p).unwrap();
    let sigma = model.cov().build_cov(p).unwrap();
    let n = 100_000usize;
    let d = sample_dataset(&model, n, 1, &mut stream_rng(109, &[])).unwrap();

    let rows: Vec<usize> = (0..d.n()).filter(|&i| d.label(i) == 1).collect();
    let (mu1, _) = class_means(&d);
    let mut acc = vec![0.0; p * p];
    for &i in &rows {
        let row = d.row(i);
        for a in 0..p {
            let da = row[a] - mu1[a];
            for b in 0..p {
                acc[a * p + b] += da * (row[b] - mu1[b]);
            }
        }
    }
    let emp = SymMatrix::from_fn(p, |a, b| acc[a * p + b] / (rows.len() - 1) as f64);

    let diff = SymMatrix::from_fn(p, |a, b| emp.get(a, b) - sigma.get(a, b));
    let op_norm = |m: &SymMatrix| {
        sym_eigen(m)
            .0
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    };
    assert!(op_norm(&diff) < 0.05 * op_norm(&sigma));
}

/// Down-sampling the majority class narrows the gap between the two exact
/// error rates relative to the plain thresholded rule.
#[test]
fn under_sampling_balances_the_error_rates() {
    let model = make_setting(SettingId::I, 100).unwrap();
    let (n1, n2) = (50usize, 10usize);
    let tau = 2.0;

    let mut gap_plain = 0.0;
    let mut gap_us = 0.0;
    let reps = 200;
    for r in 0..reps {
        let d = sample_dataset(&model, n1, n2, &mut stream_rng(113, &[r])).unwrap();
        let plain = fit_hr(&d, tau).unwrap();
        let us = fit_us_hr(&d, tau, &mut stream_rng(113, &[1000 + r])).unwrap();
        let (p1, p2) = theoretical_mcr(&plain, &model).unwrap();
        let (u1, u2) = theoretical_mcr(&us, &model).unwrap();
        gap_plain += (p1 - p2).abs();
        gap_us += (u1 - u2).abs();
    }
    assert!(
        gap_us < gap_plain,
        "mean exact-rate gap: balanced {:.4} vs plain {:.4}",
        gap_us / reps as f64,
        gap_plain / reps as f64
    );
}

/// Split-half moments drive both rule variants; their seeds must fully
/// determine the model bytes on disk as well.
#[test]
fn saved_models_round_trip_through_json() {
    let model = GaussianModel::new(
        vec![0.0; 6],
        vec![0.9; 6],
        CovSpec::Diagonal(vec![1.0; 6]),
    )
    .unwrap();
    let d = sample_dataset(&model, 12, 8, &mut stream_rng(127, &[])).unwrap();
    let rule = fit_hr(&d, 1.0).unwrap();

    let saved = imblda::harness::SavedModel::from_rule(&rule, Some(127), Default::default());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    imblda::harness::save_model(&path, &saved).unwrap();
    let loaded = imblda::harness::load_model(&path).unwrap().to_rule().unwrap();
    assert_eq!(loaded, rule);
}
