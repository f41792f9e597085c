//! Seeded experiment execution with parallel replication.
//!
//! The parallelism unit is the replicate; methods inside a replicate run
//! sequentially against the shared train/test draw. Every random stream is
//! derived from the master seed and a path of labels, so outputs are
//! independent of the worker count. The deterministic CSVs (summary, runs,
//! sweep, ignorance, bias) are byte-identical across runs of the same
//! config; wall-clock timing goes to a separate timing.csv and to
//! run_meta.json.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use crate::classifiers::{
    bayes_rule, bias_rbar_diag, fit_hr, fit_lda, fit_msplit_hr_diag, fit_msplit_hr_general,
    fit_slda, fit_us_hr, LinearRule, RuleKind,
};
use crate::datagen::{sample_dataset, GaussianModel, GENERATOR_ID};
use crate::error::{Error, Result};
use crate::estimators::{class_means, LabeledDataset, SupportSet};
use crate::eval::{
    aggregate, empirical_mcr, selection_metrics, stability_support, theoretical_mcr,
    MetricsRecord, MetricsSummary,
};
use crate::harness::config::{
    DataSource, ExperimentConfig, ExperimentKind, MethodConfig, Tuning,
};
use crate::harness::csvio::load_csv_dataset;
use crate::harness::model_io::{save_model, SavedModel};
use crate::linalg::{dot, CovSpec};
use crate::seed::{derive_seed, stream_rng};
use crate::tuning::{loocv_select, loocv_select_slda, make_grid, TunableFitter};

// seed path tags
const TAG_TRAIN: u64 = 0;
const TAG_TEST: u64 = 1;
const TAG_METHOD: u64 = 2;
const TAG_TUNE: u64 = 0;
const TAG_FIT: u64 = 1;
const TAG_SWEEP: u64 = 2;

/// Per-(replicate, method) result.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub replicate: usize,
    pub method: RuleKind,
    /// Split count, for sweep rows fitted at varying L.
    pub splits: Option<usize>,
    pub metrics: MetricsRecord,
    pub chosen_tau: Option<f64>,
    pub wall_secs: f64,
    pub ridge_fallbacks: usize,
}

#[derive(Debug, Clone)]
pub struct MethodSummaryRow {
    pub label: String,
    pub method: RuleKind,
    pub summary: MetricsSummary,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub splits: usize,
    pub mcr1_mean: f64,
    pub mcr1_std: f64,
    pub mcr2_mean: f64,
    pub mcr2_std: f64,
    /// |mcr1_mean - mcr2_mean|.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct IgnoranceRow {
    pub p: usize,
    pub mcr1_mean: f64,
    pub mcr1_std: f64,
    pub mcr2_mean: f64,
    pub mcr2_std: f64,
}

/// Monte-Carlo check of the analytic score-gap correction.
#[derive(Debug, Clone, Copy)]
pub struct BiasReport {
    pub draws: usize,
    pub splits: usize,
    pub tau: f64,
    pub rbar: f64,
    pub mean_selected: f64,
    /// rbar times the mean selected-set size.
    pub predicted_gap: f64,
    pub uncorrected_mean: f64,
    pub uncorrected_se: f64,
    pub corrected_mean: f64,
    pub corrected_se: f64,
    /// Per-draw uncorrected gap minus rbar times that draw's mean selected
    /// size (a paired version of the same comparison).
    pub paired_diff_mean: f64,
    pub paired_diff_se: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub records: Vec<RunRecord>,
    pub summary: Vec<MethodSummaryRow>,
    pub sweep: Vec<SweepRow>,
    pub ignorance: Vec<IgnoranceRow>,
    pub bias: Option<BiasReport>,
    pub written: Vec<PathBuf>,
}

/// Runs the configured experiment and writes its output files.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let started = Instant::now();
    let mut outcome = match cfg.kind {
        ExperimentKind::TableRepro => run_table(cfg)?,
        ExperimentKind::LSweep => run_sweep(cfg)?,
        ExperimentKind::Theorem1Ignorance => run_ignorance(cfg)?,
        ExperimentKind::BiasVerification => run_bias(cfg)?,
        ExperimentKind::CustomFit => run_custom_fit(cfg)?,
    };
    write_meta(cfg, started.elapsed().as_secs_f64(), &mut outcome)?;
    Ok(outcome)
}

fn with_context<T>(r: Result<T>, context: impl Fn() -> String) -> Result<T> {
    r.map_err(|e| Error::Experiment {
        context: context(),
        source: Box::new(e),
    })
}

fn run_table(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let (n1, n2) = match cfg.source.train_sizes() {
        Some(sizes) => sizes,
        None => unreachable!("validated: table-repro uses a synthetic setting"),
    };
    let model = cfg.source.model(None)?;
    let truth = model.true_active_set()?;

    let per_rep: Vec<Vec<RunRecord>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|rep| -> Result<Vec<RunRecord>> {
            let train = sample_dataset(
                &model,
                n1,
                n2,
                &mut stream_rng(cfg.seed, &[TAG_TRAIN, rep as u64]),
            )?;
            let test = sample_dataset(
                &model,
                cfg.test_n1,
                cfg.test_n2,
                &mut stream_rng(cfg.seed, &[TAG_TEST, rep as u64]),
            )?;
            cfg.methods
                .iter()
                .enumerate()
                .map(|(mi, mc)| {
                    with_context(
                        run_method(cfg, rep, mi, mc, &model, &truth, &train, &test),
                        || format!("replicate {rep}, method {}", mc.kind.name()),
                    )
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let records: Vec<RunRecord> = per_rep.into_iter().flatten().collect();
    let labels = method_labels(&cfg.methods);
    let mut summary = Vec::with_capacity(cfg.methods.len());
    for (mi, mc) in cfg.methods.iter().enumerate() {
        let metrics: Vec<MetricsRecord> = records
            .iter()
            .skip(mi)
            .step_by(cfg.methods.len())
            .map(|r| r.metrics)
            .collect();
        summary.push(MethodSummaryRow {
            label: labels[mi].clone(),
            method: mc.kind,
            summary: aggregate(&metrics)?,
        });
    }

    let mut outcome = RunOutcome {
        records,
        summary,
        ..Default::default()
    };
    write_summary_csv(cfg, &mut outcome)?;
    write_runs_csv(cfg, &mut outcome, &labels)?;
    write_timing_csv(cfg, &mut outcome, &labels)?;
    Ok(outcome)
}

#[allow(clippy::too_many_arguments)]
fn run_method(
    cfg: &ExperimentConfig,
    rep: usize,
    mi: usize,
    mc: &MethodConfig,
    model: &GaussianModel,
    truth: &SupportSet,
    train: &LabeledDataset,
    test: &LabeledDataset,
) -> Result<RunRecord> {
    let t0 = Instant::now();
    let base = derive_seed(cfg.seed, &[TAG_METHOD, rep as u64, mi as u64]);
    let fitted = if mc.kind == RuleKind::Bayes {
        let rule = bayes_rule(model)?;
        let selection = rule.support();
        FitOutput {
            rule,
            selection,
            tau: None,
            ridge_fallbacks: 0,
            slda_constants: None,
        }
    } else {
        fit_method(mc, train, base)?
    };
    let (mcr1, mcr2) = empirical_mcr(&fitted.rule, test)?;
    let (a, n_false, s_total) = selection_metrics(&fitted.selection, truth);
    Ok(RunRecord {
        replicate: rep,
        method: mc.kind,
        splits: None,
        metrics: MetricsRecord::new(mcr1, mcr2, a, n_false, s_total),
        chosen_tau: fitted.tau,
        wall_secs: t0.elapsed().as_secs_f64(),
        ridge_fallbacks: fitted.ridge_fallbacks,
    })
}

/// A fitted method: the rule, the support used for selection scoring
/// (stability support for the split-and-average rules), and diagnostics.
#[derive(Debug, Clone)]
pub struct FitOutput {
    pub rule: LinearRule,
    /// Support scored against the true active set (stability support for
    /// the split-and-average rules, the rule support otherwise).
    pub selection: SupportSet,
    pub tau: Option<f64>,
    pub ridge_fallbacks: usize,
    pub slda_constants: Option<(f64, f64)>,
}

/// Tunes (when configured) and fits one method on a dataset. Seeds derive
/// from `base`, so results are reproducible.
pub fn fit_method(mc: &MethodConfig, train: &LabeledDataset, base: u64) -> Result<FitOutput> {
    // bayes is handled by callers that hold the model
    match mc.kind {
        RuleKind::Bayes => Err(Error::Validation {
            field: "methods".into(),
            message: "the bayes oracle needs a synthetic model".into(),
        }),
        RuleKind::Lda => {
            let rule = fit_lda(train)?;
            let selection = rule.support();
            Ok(FitOutput {
                rule,
                selection,
                tau: None,
                ridge_fallbacks: 0,
                slda_constants: None,
            })
        }
        RuleKind::Hr | RuleKind::UsHr => {
            let fitter = if mc.kind == RuleKind::Hr {
                TunableFitter::Hr
            } else {
                TunableFitter::UsHr
            };
            let tau = resolve_tau(mc, train, fitter, base)?;
            let rule = match mc.kind {
                RuleKind::Hr => fit_hr(train, tau)?,
                _ => fit_us_hr(train, tau, &mut stream_rng(base, &[TAG_FIT]))?,
            };
            let selection = rule.support();
            Ok(FitOutput {
                rule,
                selection,
                tau: Some(tau),
                ridge_fallbacks: 0,
                slda_constants: None,
            })
        }
        RuleKind::MsplitHrDiag | RuleKind::MsplitHrGeneral => {
            let cv_fitter = if mc.kind == RuleKind::MsplitHrDiag {
                TunableFitter::MsplitDiag {
                    splits: mc.cv_splits,
                }
            } else {
                TunableFitter::MsplitGeneral {
                    splits: mc.cv_splits,
                }
            };
            let tau = resolve_tau(mc, train, cv_fitter, base)?;
            let mut rng = stream_rng(base, &[TAG_FIT]);
            let (rule, trace) = if mc.kind == RuleKind::MsplitHrDiag {
                fit_msplit_hr_diag(train, tau, mc.splits, &mut rng)?
            } else {
                fit_msplit_hr_general(train, tau, mc.splits, &mut rng)?
            };
            Ok(FitOutput {
                rule,
                selection: stability_support(&trace),
                tau: Some(tau),
                ridge_fallbacks: trace.ridge_fallbacks(),
                slda_constants: None,
            })
        }
        RuleKind::Slda => {
            let (m1, m2) = match (mc.m1, mc.m2) {
                (Some(m1), Some(m2)) => (m1, m2),
                _ => {
                    let grids = (
                        mc.m1_grid.as_deref().unwrap_or(&[]),
                        mc.m2_grid.as_deref().unwrap_or(&[]),
                    );
                    loocv_select_slda(train, grids.0, grids.1, mc.alpha)?.0
                }
            };
            let rule = fit_slda(train, m1, m2, mc.alpha)?;
            let selection = rule.support();
            Ok(FitOutput {
                rule,
                selection,
                tau: None,
                ridge_fallbacks: 0,
                slda_constants: Some((m1, m2)),
            })
        }
    }
}

fn resolve_tau(
    mc: &MethodConfig,
    train: &LabeledDataset,
    fitter: TunableFitter,
    base: u64,
) -> Result<f64> {
    match mc.tuning {
        Tuning::Fixed(tau) => Ok(tau),
        Tuning::Loocv { grid_size } => {
            let grid = make_grid(train, fitter.grid_kind(), grid_size)?;
            let (tau, _) = loocv_select(train, &fitter, &grid, derive_seed(base, &[TAG_TUNE]))?;
            Ok(tau)
        }
    }
}

fn run_sweep(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let (n1, n2) = cfg.source.train_sizes().expect("validated");
    let model = cfg.source.model(None)?;
    let truth = model.true_active_set()?;
    let mc = &cfg.methods[0];

    let per_rep: Vec<Vec<RunRecord>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|rep| -> Result<Vec<RunRecord>> {
            let ctx = || format!("replicate {rep}, l-sweep");
            let train = sample_dataset(
                &model,
                n1,
                n2,
                &mut stream_rng(cfg.seed, &[TAG_TRAIN, rep as u64]),
            )?;
            let test = sample_dataset(
                &model,
                cfg.test_n1,
                cfg.test_n2,
                &mut stream_rng(cfg.seed, &[TAG_TEST, rep as u64]),
            )?;
            let base = derive_seed(cfg.seed, &[TAG_METHOD, rep as u64, 0]);
            let cv_fitter = if mc.kind == RuleKind::MsplitHrDiag {
                TunableFitter::MsplitDiag {
                    splits: mc.cv_splits,
                }
            } else {
                TunableFitter::MsplitGeneral {
                    splits: mc.cv_splits,
                }
            };
            let tau = with_context(resolve_tau(mc, &train, cv_fitter, base), ctx)?;

            cfg.sweep_splits
                .iter()
                .enumerate()
                .map(|(li, &l)| -> Result<RunRecord> {
                    let t0 = Instant::now();
                    let mut rng = stream_rng(base, &[TAG_SWEEP, li as u64]);
                    let (rule, trace) = with_context(
                        if mc.kind == RuleKind::MsplitHrDiag {
                            fit_msplit_hr_diag(&train, tau, l, &mut rng)
                        } else {
                            fit_msplit_hr_general(&train, tau, l, &mut rng)
                        },
                        ctx,
                    )?;
                    let (mcr1, mcr2) = empirical_mcr(&rule, &test)?;
                    let (a, n_false, s_total) =
                        selection_metrics(&stability_support(&trace), &truth);
                    Ok(RunRecord {
                        replicate: rep,
                        method: mc.kind,
                        splits: Some(l),
                        metrics: MetricsRecord::new(mcr1, mcr2, a, n_false, s_total),
                        chosen_tau: Some(tau),
                        wall_secs: t0.elapsed().as_secs_f64(),
                        ridge_fallbacks: trace.ridge_fallbacks(),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let records: Vec<RunRecord> = per_rep.into_iter().flatten().collect();
    let mut sweep = Vec::with_capacity(cfg.sweep_splits.len());
    for (li, &l) in cfg.sweep_splits.iter().enumerate() {
        let metrics: Vec<MetricsRecord> = records
            .iter()
            .skip(li)
            .step_by(cfg.sweep_splits.len())
            .map(|r| r.metrics)
            .collect();
        let s = aggregate(&metrics)?;
        sweep.push(SweepRow {
            splits: l,
            mcr1_mean: s.mcr1_mean,
            mcr1_std: s.mcr1_std,
            mcr2_mean: s.mcr2_mean,
            mcr2_std: s.mcr2_std,
            gap: (s.mcr1_mean - s.mcr2_mean).abs(),
        });
    }

    let mut outcome = RunOutcome {
        records,
        sweep,
        ..Default::default()
    };
    write_sweep_csv(cfg, &mut outcome)?;
    Ok(outcome)
}

fn run_ignorance(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let (n1, n2) = cfg.source.train_sizes().expect("validated");
    let mut rows = Vec::with_capacity(cfg.dims.len());
    for (pi, &p) in cfg.dims.iter().enumerate() {
        let model = cfg.source.model(Some(p))?;
        let rates: Vec<(f64, f64)> = (0..cfg.replicates)
            .into_par_iter()
            .map(|rep| -> Result<(f64, f64)> {
                let train = sample_dataset(
                    &model,
                    n1,
                    n2,
                    &mut stream_rng(cfg.seed, &[TAG_TRAIN, pi as u64, rep as u64]),
                )?;
                // plug-in rule with the covariance known exactly
                let (mu1, mu2) = class_means(&train);
                let mu_d: Vec<f64> = mu2.iter().zip(&mu1).map(|(b, a)| b - a).collect();
                let mu_a: Vec<f64> = mu2.iter().zip(&mu1).map(|(b, a)| (a + b) / 2.0).collect();
                let w = model.cov().solve(&mu_d)?;
                let b = -dot(&w, &mu_a);
                let rule = LinearRule::new(w, b, RuleKind::Lda);
                theoretical_mcr(&rule, &model)
            })
            .collect::<Result<_>>()?;
        let (m1_mean, m1_std) = mean_std(rates.iter().map(|r| r.0));
        let (m2_mean, m2_std) = mean_std(rates.iter().map(|r| r.1));
        rows.push(IgnoranceRow {
            p,
            mcr1_mean: m1_mean,
            mcr1_std: m1_std,
            mcr2_mean: m2_mean,
            mcr2_std: m2_std,
        });
    }
    let mut outcome = RunOutcome {
        ignorance: rows,
        ..Default::default()
    };
    write_ignorance_csv(cfg, &mut outcome)?;
    Ok(outcome)
}

fn run_bias(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let (n1, n2) = cfg.source.train_sizes().expect("validated");
    let model = cfg.source.model(None)?;
    if !matches!(model.cov(), CovSpec::Diagonal(_)) {
        return Err(Error::Validation {
            field: "data.setting".into(),
            message: "bias verification needs a diagonal-covariance setting".into(),
        });
    }
    let tau = cfg.fixed_tau.expect("validated");
    let splits = cfg.methods[0].splits;
    let draws = cfg.bias_draws;
    let rbar = bias_rbar_diag(n1 / 2, n2 / 2)?;
    let mu1 = model.mu1().to_vec();
    let mu2 = model.mu2().to_vec();

    let samples: Vec<(f64, f64, f64)> = (0..draws)
        .into_par_iter()
        .map(|r| -> Result<(f64, f64, f64)> {
            let train = sample_dataset(
                &model,
                n1,
                n2,
                &mut stream_rng(cfg.seed, &[TAG_TRAIN, r as u64]),
            )?;
            let (corrected, trace) = fit_msplit_hr_diag(
                &train,
                tau,
                splits,
                &mut stream_rng(cfg.seed, &[TAG_METHOD, r as u64]),
            )?;
            let uncorrected = trace.collapse(false);
            let u = uncorrected.discriminant(&mu1) + uncorrected.discriminant(&mu2);
            let c = corrected.discriminant(&mu1) + corrected.discriminant(&mu2);
            Ok((u, c, trace.mean_selected()))
        })
        .collect::<Result<_>>()?;

    let (u_mean, u_std) = mean_std(samples.iter().map(|s| s.0));
    let (c_mean, c_std) = mean_std(samples.iter().map(|s| s.1));
    let (sel_mean, _) = mean_std(samples.iter().map(|s| s.2));
    let (d_mean, d_std) = mean_std(samples.iter().map(|s| s.0 - rbar * s.2));
    let sqrt_m = (draws as f64).sqrt();
    let report = BiasReport {
        draws,
        splits,
        tau,
        rbar,
        mean_selected: sel_mean,
        predicted_gap: rbar * sel_mean,
        uncorrected_mean: u_mean,
        uncorrected_se: u_std / sqrt_m,
        corrected_mean: c_mean,
        corrected_se: c_std / sqrt_m,
        paired_diff_mean: d_mean,
        paired_diff_se: d_std / sqrt_m,
    };
    let mut outcome = RunOutcome {
        bias: Some(report),
        ..Default::default()
    };
    write_bias_csv(cfg, &mut outcome)?;
    Ok(outcome)
}

fn run_custom_fit(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let (path, label) = match &cfg.source {
        DataSource::Csv { path, label } => (path.clone(), label.clone()),
        _ => unreachable!("validated"),
    };
    let data = load_csv_dataset(&path, &label)?;
    let labels = method_labels(&cfg.methods);

    let mut records = Vec::with_capacity(cfg.methods.len());
    let mut written = Vec::new();
    for (mi, mc) in cfg.methods.iter().enumerate() {
        let t0 = Instant::now();
        let base = derive_seed(cfg.seed, &[TAG_METHOD, 0, mi as u64]);
        let fitted = with_context(fit_method(mc, &data, base), || {
            format!("method {}", mc.kind.name())
        })?;
        let (mcr1, mcr2) = empirical_mcr(&fitted.rule, &data)?;
        let support = fitted.selection.len();

        let mut hyper = serde_json::Map::new();
        if let Some(tau) = fitted.tau {
            hyper.insert("tau".into(), serde_json::json!(tau));
        }
        if let Some((m1, m2)) = fitted.slda_constants {
            hyper.insert("m1".into(), serde_json::json!(m1));
            hyper.insert("m2".into(), serde_json::json!(m2));
            hyper.insert("alpha".into(), serde_json::json!(mc.alpha));
        }
        if matches!(mc.kind, RuleKind::MsplitHrDiag | RuleKind::MsplitHrGeneral) {
            hyper.insert("splits".into(), serde_json::json!(mc.splits));
        }
        let saved = SavedModel::from_rule(&fitted.rule, Some(cfg.seed), hyper);
        let model_path = cfg.out_dir.join(format!("model_{}.json", labels[mi]));
        save_model(&model_path, &saved)?;
        written.push(model_path);

        records.push(RunRecord {
            replicate: 0,
            method: mc.kind,
            splits: None,
            metrics: MetricsRecord::new(mcr1, mcr2, 0, 0, support),
            chosen_tau: fitted.tau,
            wall_secs: t0.elapsed().as_secs_f64(),
            ridge_fallbacks: fitted.ridge_fallbacks,
        });
    }

    let mut outcome = RunOutcome {
        records,
        written,
        ..Default::default()
    };
    write_fits_csv(cfg, &mut outcome, &labels)?;
    Ok(outcome)
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Stable unique labels for the configured methods (a kind name repeats
/// with an index suffix when configured more than once).
fn method_labels(methods: &[MethodConfig]) -> Vec<String> {
    let mut labels = Vec::with_capacity(methods.len());
    for (mi, mc) in methods.iter().enumerate() {
        let name = mc.kind.name().to_string();
        let duplicated = methods
            .iter()
            .enumerate()
            .any(|(other, o)| other != mi && o.kind == mc.kind);
        labels.push(if duplicated {
            format!("{name}#{mi}")
        } else {
            name
        });
    }
    labels
}

fn pct(x: f64) -> String {
    format!("{:.4}", 100.0 * x)
}

fn write_file(cfg: &ExperimentConfig, outcome: &mut RunOutcome, name: &str, body: String) -> Result<()> {
    let path = cfg.out_dir.join(name);
    std::fs::write(&path, body)?;
    outcome.written.push(path);
    Ok(())
}

fn write_summary_csv(cfg: &ExperimentConfig, outcome: &mut RunOutcome) -> Result<()> {
    let mut body = String::from(
        "method,mcr1_mean,mcr1_std,mcr2_mean,mcr2_std,gm_mean,gm_std,a_median,n_median,s_median\n",
    );
    for row in &outcome.summary {
        let s = &row.summary;
        body.push_str(&format!(
            "{},{},{},{},{},{},{},{:.4},{:.4},{:.4}\n",
            row.label,
            pct(s.mcr1_mean),
            pct(s.mcr1_std),
            pct(s.mcr2_mean),
            pct(s.mcr2_std),
            pct(s.gm_mean),
            pct(s.gm_std),
            s.a_median,
            s.n_median,
            s.s_median,
        ));
    }
    write_file(cfg, outcome, "summary.csv", body)
}

fn record_rows(records: &[RunRecord], labels: &[String], methods: &[MethodConfig]) -> String {
    let mut body =
        String::from("replicate,method,splits,mcr1,mcr2,gm,a,n_false,s_total,tau,ridge_fallbacks\n");
    for r in records {
        let label = labels
            .iter()
            .zip(methods)
            .find(|(_, mc)| mc.kind == r.method)
            .map(|(l, _)| l.clone())
            .unwrap_or_else(|| r.method.name().to_string());
        body.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.replicate,
            label,
            r.splits.map(|l| l.to_string()).unwrap_or_default(),
            pct(r.metrics.mcr1),
            pct(r.metrics.mcr2),
            pct(r.metrics.gm),
            r.metrics.a,
            r.metrics.n_false,
            r.metrics.s_total,
            r.chosen_tau.map(|t| t.to_string()).unwrap_or_default(),
            r.ridge_fallbacks,
        ));
    }
    body
}

fn write_runs_csv(cfg: &ExperimentConfig, outcome: &mut RunOutcome, labels: &[String]) -> Result<()> {
    let body = record_rows(&outcome.records, labels, &cfg.methods);
    write_file(cfg, outcome, "runs.csv", body)
}

fn write_fits_csv(cfg: &ExperimentConfig, outcome: &mut RunOutcome, labels: &[String]) -> Result<()> {
    let body = record_rows(&outcome.records, labels, &cfg.methods);
    write_file(cfg, outcome, "fits.csv", body)
}

fn write_timing_csv(cfg: &ExperimentConfig, outcome: &mut RunOutcome, labels: &[String]) -> Result<()> {
    let mut body = String::from("replicate,method,wall_secs\n");
    for r in &outcome.records {
        let label = labels
            .iter()
            .zip(&cfg.methods)
            .find(|(_, mc)| mc.kind == r.method)
            .map(|(l, _)| l.clone())
            .unwrap_or_else(|| r.method.name().to_string());
        body.push_str(&format!("{},{},{:.6}\n", r.replicate, label, r.wall_secs));
    }
    write_file(cfg, outcome, "timing.csv", body)
}

fn write_sweep_csv(cfg: &ExperimentConfig, outcome: &mut RunOutcome) -> Result<()> {
    let mut body = String::from("splits,mcr1_mean,mcr1_std,mcr2_mean,mcr2_std,gap\n");
    for row in &outcome.sweep {
        body.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.splits,
            pct(row.mcr1_mean),
            pct(row.mcr1_std),
            pct(row.mcr2_mean),
            pct(row.mcr2_std),
            pct(row.gap),
        ));
    }
    write_file(cfg, outcome, "sweep.csv", body)
}

fn write_ignorance_csv(cfg: &ExperimentConfig, outcome: &mut RunOutcome) -> Result<()> {
    let mut body = String::from("p,mcr1_mean,mcr1_std,mcr2_mean,mcr2_std\n");
    for row in &outcome.ignorance {
        body.push_str(&format!(
            "{},{},{},{},{}\n",
            row.p,
            pct(row.mcr1_mean),
            pct(row.mcr1_std),
            pct(row.mcr2_mean),
            pct(row.mcr2_std),
        ));
    }
    write_file(cfg, outcome, "ignorance.csv", body)
}

fn write_bias_csv(cfg: &ExperimentConfig, outcome: &mut RunOutcome) -> Result<()> {
    let b = outcome.bias.as_ref().expect("bias report present");
    let body = format!(
        "draws,splits,tau,rbar,mean_selected,predicted_gap,uncorrected_mean,uncorrected_se,corrected_mean,corrected_se,paired_diff_mean,paired_diff_se\n{},{},{},{},{},{},{},{},{},{},{},{}\n",
        b.draws,
        b.splits,
        b.tau,
        b.rbar,
        b.mean_selected,
        b.predicted_gap,
        b.uncorrected_mean,
        b.uncorrected_se,
        b.corrected_mean,
        b.corrected_se,
        b.paired_diff_mean,
        b.paired_diff_se,
    );
    write_file(cfg, outcome, "bias.csv", body)
}

fn write_meta(cfg: &ExperimentConfig, elapsed_secs: f64, outcome: &mut RunOutcome) -> Result<()> {
    let meta = serde_json::json!({
        "experiment": cfg.kind.name(),
        "seed": cfg.seed,
        "replicates": cfg.replicates,
        "normal_generator": GENERATOR_ID,
        "version": env!("CARGO_PKG_VERSION"),
        "elapsed_secs": elapsed_secs,
    });
    let path = cfg.out_dir.join("run_meta.json");
    std::fs::write(&path, serde_json::to_string_pretty(&meta).unwrap())?;
    outcome.written.push(path);
    Ok(())
}
