//! simlab: run replicated experiments from JSON configs, fit single
//! models on CSV data, and score datasets with saved models.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use imblda::classifiers::RuleKind;
use imblda::eval::empirical_mcr;
use imblda::harness::{
    fit_method, load_config, load_csv_dataset, load_csv_features, load_model, run_experiment,
    save_model, MethodConfig, SavedModel, Tuning,
};

#[derive(Parser)]
#[command(name = "simlab", version, about = "Imbalanced linear-discriminant simulation lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config file.
    Run(RunArgs),
    /// Fit one classifier on a labeled CSV dataset and save the model.
    Fit(FitArgs),
    /// Classify a CSV dataset with a saved model.
    Predict(PredictArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the experiment config (JSON).
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the replicate count.
    #[arg(long)]
    reps: Option<usize>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Labeled CSV dataset.
    #[arg(long)]
    data: PathBuf,
    /// Name of the label column (values 1 and 2).
    #[arg(long)]
    label: String,
    /// Classifier: lda, hr, us-hr, msplit-hr-diag, msplit-hr-general, slda.
    #[arg(long)]
    method: String,
    /// Fixed threshold; omit to tune by leave-one-out cross-validation.
    #[arg(long)]
    tau: Option<f64>,
    /// Threshold grid: "auto" or a grid size.
    #[arg(long, default_value = "auto")]
    tau_grid: String,
    /// Split count L for the msplit variants.
    #[arg(long, default_value_t = 30)]
    splits: usize,
    /// Split count used inside cross-validation.
    #[arg(long, default_value_t = 10)]
    cv_splits: usize,
    /// Covariance-threshold constant (slda).
    #[arg(long)]
    m1: Option<f64>,
    /// Mean-threshold constant (slda).
    #[arg(long)]
    m2: Option<f64>,
    /// Mean-threshold exponent (slda).
    #[arg(long, default_value_t = 0.3)]
    alpha: f64,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Where to write the fitted model (JSON).
    #[arg(long, default_value = "model.json")]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// Saved model (JSON).
    #[arg(long)]
    model: PathBuf,
    /// CSV dataset to classify.
    #[arg(long)]
    data: PathBuf,
    /// Label column to exclude from the features; when present the
    /// per-class error rates are reported on stderr.
    #[arg(long)]
    label: Option<String>,
    /// Where to write the predictions CSV (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Fit(args) => fit(args),
        Command::Predict(args) => predict(args),
    }
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let mut cfg = load_config(&args.config)
        .with_context(|| format!("loading {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(reps) = args.reps {
        cfg.replicates = reps;
    }
    if let Some(out) = args.out {
        cfg.out_dir = out;
    }
    let outcome = run_experiment(&cfg)?;
    for path in &outcome.written {
        println!("wrote {}", path.display());
    }
    for row in &outcome.summary {
        let s = &row.summary;
        println!(
            "{:<20} mcr1 {:6.2}% ({:5.2})  mcr2 {:6.2}% ({:5.2})  gm {:6.2}%  A {:.1}  N {:.1}  S {:.1}",
            row.label,
            100.0 * s.mcr1_mean,
            100.0 * s.mcr1_std,
            100.0 * s.mcr2_mean,
            100.0 * s.mcr2_std,
            100.0 * s.gm_mean,
            s.a_median,
            s.n_median,
            s.s_median,
        );
    }
    for row in &outcome.sweep {
        println!(
            "L = {:>3}: mcr1 {:6.2}%  mcr2 {:6.2}%  gap {:5.2}",
            row.splits,
            100.0 * row.mcr1_mean,
            100.0 * row.mcr2_mean,
            100.0 * row.gap,
        );
    }
    for row in &outcome.ignorance {
        println!(
            "p = {:>5}: mcr1 {:6.2}%  mcr2 {:6.2}%",
            row.p,
            100.0 * row.mcr1_mean,
            100.0 * row.mcr2_mean,
        );
    }
    if let Some(b) = &outcome.bias {
        println!(
            "bias check over {} draws: uncorrected {:+.4} (se {:.4}) vs predicted {:+.4}; corrected {:+.4} (se {:.4})",
            b.draws, b.uncorrected_mean, b.uncorrected_se, b.predicted_gap, b.corrected_mean, b.corrected_se,
        );
    }
    Ok(())
}

fn method_config_from_args(args: &FitArgs) -> anyhow::Result<MethodConfig> {
    let kind = RuleKind::parse(&args.method).with_context(|| {
        format!(
            "unknown method `{}`; valid: lda, hr, us-hr, msplit-hr-diag, msplit-hr-general, slda",
            args.method
        )
    })?;
    if kind == RuleKind::Bayes {
        bail!("the bayes oracle needs a synthetic model and cannot be fit to data");
    }
    let tuning = match args.tau {
        Some(tau) => Tuning::Fixed(tau),
        None => {
            let grid_size = if args.tau_grid == "auto" {
                20
            } else {
                args.tau_grid
                    .parse()
                    .context("--tau-grid takes `auto` or a grid size")?
            };
            Tuning::Loocv { grid_size }
        }
    };
    let mut mc = MethodConfig::simple(kind, tuning);
    mc.splits = args.splits;
    mc.cv_splits = args.cv_splits;
    mc.alpha = args.alpha;
    mc.m1 = args.m1;
    mc.m2 = args.m2;
    if kind == RuleKind::Slda && (args.m1.is_none() || args.m2.is_none()) {
        bail!("slda needs --m1 and --m2");
    }
    Ok(mc)
}

fn fit(args: FitArgs) -> anyhow::Result<()> {
    let data = load_csv_dataset(&args.data, &args.label)?;
    let mc = method_config_from_args(&args)?;
    let fitted = fit_method(&mc, &data, args.seed)?;
    let (mcr1, mcr2) = empirical_mcr(&fitted.rule, &data)?;

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
    let saved = SavedModel::from_rule(&fitted.rule, Some(args.seed), hyper);
    save_model(&args.out, &saved)?;

    eprintln!(
        "fit {} on {} rows x {} features: support {}, in-sample mcr1 {:.2}%, mcr2 {:.2}%{}",
        mc.kind.name(),
        data.n(),
        data.p(),
        fitted.selection.len(),
        100.0 * mcr1,
        100.0 * mcr2,
        fitted
            .tau
            .map(|t| format!(", tau {t}"))
            .unwrap_or_default(),
    );
    println!("wrote {}", args.out.display());
    Ok(())
}

fn predict(args: PredictArgs) -> anyhow::Result<()> {
    let saved = load_model(&args.model)?;
    let rule = saved.to_rule()?;

    let mut output = String::from("row,label\n");
    match &args.label {
        Some(label) => {
            let data = load_csv_dataset(&args.data, label)?;
            if data.p() != rule.p() {
                bail!(
                    "model expects {} features but the data has {}",
                    rule.p(),
                    data.p()
                );
            }
            for i in 0..data.n() {
                output.push_str(&format!("{},{}\n", i + 1, rule.predict(data.row(i))?));
            }
            let (mcr1, mcr2) = empirical_mcr(&rule, &data)?;
            eprintln!("mcr1 {:.2}%  mcr2 {:.2}%", 100.0 * mcr1, 100.0 * mcr2);
        }
        None => {
            let (rows, p) = load_csv_features(&args.data)?;
            if p != rule.p() {
                bail!("model expects {} features but the data has {}", rule.p(), p);
            }
            for (i, row) in rows.iter().enumerate() {
                output.push_str(&format!("{},{}\n", i + 1, rule.predict(row)?));
            }
        }
    }
    match &args.out {
        Some(path) => {
            std::fs::write(path, output)?;
            println!("wrote {}", path.display());
        }
        None => print!("{output}"),
    }
    Ok(())
}
