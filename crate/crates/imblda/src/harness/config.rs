//! JSON experiment configs: one experiment per file, unknown keys
//! rejected, scalar fields overridable from the command line.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::classifiers::RuleKind;
use crate::datagen::{make_setting, make_setting_ii_as_printed, GaussianModel, SettingId};
use crate::error::{Error, Result};

pub const DEFAULT_REPLICATES: usize = 100;
pub const DEFAULT_SPLITS: usize = 30;
pub const DEFAULT_CV_SPLITS: usize = 10;
pub const DEFAULT_GRID_SIZE: usize = 20;
pub const DEFAULT_TEST_SIZE: usize = 50;
pub const DEFAULT_ALPHA: f64 = 0.3;
pub const DEFAULT_BIAS_DRAWS: usize = 2000;

const VALID_METHODS: &str = "bayes, lda, hr, us-hr, msplit-hr-diag, msplit-hr-general, slda";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    TableRepro,
    LSweep,
    Theorem1Ignorance,
    BiasVerification,
    CustomFit,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::TableRepro => "table-repro",
            ExperimentKind::LSweep => "l-sweep",
            ExperimentKind::Theorem1Ignorance => "theorem1-ignorance",
            ExperimentKind::BiasVerification => "bias-verification",
            ExperimentKind::CustomFit => "custom-fit",
        }
    }
}

/// Where the data comes from: a synthetic model or a CSV file.
#[derive(Debug, Clone)]
pub enum DataSource {
    Setting {
        id: SettingId,
        /// Use the as-printed variance reading of setting (ii).
        ii_printed: bool,
        p: usize,
        n1: usize,
        n2: usize,
    },
    Csv {
        path: PathBuf,
        label: String,
    },
}

impl DataSource {
    /// Builds the generating model, optionally overriding the dimension.
    pub fn model(&self, p_override: Option<usize>) -> Result<GaussianModel> {
        match self {
            DataSource::Setting {
                id, ii_printed, p, ..
            } => {
                let dim = p_override.unwrap_or(*p);
                if *ii_printed {
                    make_setting_ii_as_printed(dim)
                } else {
                    make_setting(*id, dim)
                }
            }
            DataSource::Csv { .. } => Err(Error::Validation {
                field: "data.setting".into(),
                message: "this experiment requires a synthetic setting".into(),
            }),
        }
    }

    pub fn train_sizes(&self) -> Option<(usize, usize)> {
        match self {
            DataSource::Setting { n1, n2, .. } => Some((*n1, *n2)),
            DataSource::Csv { .. } => None,
        }
    }
}

/// How a method's threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tuning {
    Fixed(f64),
    Loocv { grid_size: usize },
}

/// One classifier entry in a config, validated.
#[derive(Debug, Clone)]
pub struct MethodConfig {
    pub kind: RuleKind,
    pub tuning: Tuning,
    /// Number of splits L for the split-and-average rules.
    pub splits: usize,
    /// Reduced split count used inside leave-one-out tuning.
    pub cv_splits: usize,
    /// Sparse-LDA constants; `m1`/`m2` fixed, or grids for 2-D tuning.
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub m1_grid: Option<Vec<f64>>,
    pub m2_grid: Option<Vec<f64>>,
    pub alpha: f64,
}

impl MethodConfig {
    pub fn simple(kind: RuleKind, tuning: Tuning) -> Self {
        Self {
            kind,
            tuning,
            splits: DEFAULT_SPLITS,
            cv_splits: DEFAULT_CV_SPLITS,
            m1: None,
            m2: None,
            m1_grid: None,
            m2_grid: None,
            alpha: DEFAULT_ALPHA,
        }
    }
}

/// A fully validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub source: DataSource,
    pub test_n1: usize,
    pub test_n2: usize,
    pub replicates: usize,
    pub seed: u64,
    pub methods: Vec<MethodConfig>,
    pub out_dir: PathBuf,
    /// Split counts visited by the l-sweep experiment.
    pub sweep_splits: Vec<usize>,
    /// Dimensions visited by the known-covariance ignorance experiment.
    pub dims: Vec<usize>,
    /// Fixed threshold for the bias-verification experiment.
    pub fixed_tau: Option<f64>,
    /// Training draws for the bias-verification experiment.
    pub bias_draws: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: ExperimentKind,
    data: RawData,
    #[serde(default)]
    test: Option<RawTest>,
    #[serde(default)]
    replicates: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    methods: Vec<RawMethod>,
    #[serde(default)]
    out_dir: Option<PathBuf>,
    #[serde(default)]
    sweep_splits: Option<Vec<usize>>,
    #[serde(default)]
    dims: Option<Vec<usize>>,
    #[serde(default)]
    fixed_tau: Option<f64>,
    #[serde(default)]
    bias_draws: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawData {
    #[serde(default)]
    setting: Option<String>,
    #[serde(default)]
    p: Option<usize>,
    #[serde(default)]
    n1: Option<usize>,
    #[serde(default)]
    n2: Option<usize>,
    #[serde(default)]
    dataset: Option<PathBuf>,
    #[serde(default)]
    label: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTest {
    #[serde(default)]
    n1: Option<usize>,
    #[serde(default)]
    n2: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMethod {
    name: String,
    #[serde(default)]
    tau: Option<f64>,
    #[serde(default)]
    grid_size: Option<usize>,
    #[serde(default)]
    splits: Option<usize>,
    #[serde(default)]
    cv_splits: Option<usize>,
    #[serde(default)]
    m1: Option<f64>,
    #[serde(default)]
    m2: Option<f64>,
    #[serde(default)]
    m1_grid: Option<Vec<f64>>,
    #[serde(default)]
    m2_grid: Option<Vec<f64>>,
    #[serde(default)]
    alpha: Option<f64>,
}

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::Validation {
        field: field.into(),
        message: message.into(),
    }
}

/// Loads and validates a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    let raw: RawConfig = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        row: Some(e.line()),
        column: Some(e.column().to_string()),
        message: e.to_string(),
    })?;
    validate(raw)
}

pub fn load_config_str(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: PathBuf::from("<inline>"),
        row: Some(e.line()),
        column: Some(e.column().to_string()),
        message: e.to_string(),
    })?;
    validate(raw)
}

fn validate(raw: RawConfig) -> Result<ExperimentConfig> {
    let seed = raw
        .seed
        .ok_or_else(|| invalid("seed", "a master seed is required; wall-clock seeding is not supported"))?;

    let source = validate_data(&raw.data, raw.experiment)?;

    let replicates = raw.replicates.unwrap_or(DEFAULT_REPLICATES);
    if replicates == 0 {
        return Err(invalid("replicates", "must be at least 1"));
    }

    let test_n1 = raw.test.as_ref().and_then(|t| t.n1).unwrap_or(DEFAULT_TEST_SIZE);
    let test_n2 = raw.test.as_ref().and_then(|t| t.n2).unwrap_or(DEFAULT_TEST_SIZE);
    if test_n1 == 0 || test_n2 == 0 {
        return Err(invalid("test", "test sizes must be at least 1"));
    }

    let mut methods = Vec::with_capacity(raw.methods.len());
    for (i, m) in raw.methods.iter().enumerate() {
        methods.push(validate_method(m, i)?);
    }

    match raw.experiment {
        ExperimentKind::TableRepro | ExperimentKind::CustomFit => {
            if methods.is_empty() {
                return Err(invalid("methods", "at least one method is required"));
            }
        }
        ExperimentKind::LSweep => {
            if methods.len() != 1
                || !matches!(
                    methods[0].kind,
                    RuleKind::MsplitHrDiag | RuleKind::MsplitHrGeneral
                )
            {
                return Err(invalid(
                    "methods",
                    "the l-sweep experiment takes exactly one msplit-hr-diag or msplit-hr-general method",
                ));
            }
        }
        ExperimentKind::BiasVerification => {
            if raw.fixed_tau.is_none() {
                return Err(invalid("fixed_tau", "bias verification needs a fixed threshold"));
            }
            if methods.is_empty() {
                methods.push(MethodConfig::simple(
                    RuleKind::MsplitHrDiag,
                    Tuning::Fixed(raw.fixed_tau.unwrap()),
                ));
            }
            if methods.len() != 1 || methods[0].kind != RuleKind::MsplitHrDiag {
                return Err(invalid(
                    "methods",
                    "bias verification runs a single msplit-hr-diag method",
                ));
            }
        }
        ExperimentKind::Theorem1Ignorance => {}
    }

    let sweep_splits = raw.sweep_splits.unwrap_or_else(|| vec![1, 5, 10, 20, 30, 50]);
    if raw.experiment == ExperimentKind::LSweep
        && (sweep_splits.is_empty() || sweep_splits.iter().any(|&l| l == 0))
    {
        return Err(invalid("sweep_splits", "split counts must be positive"));
    }

    let dims = raw.dims.unwrap_or_else(|| vec![100, 500, 2000]);
    if raw.experiment == ExperimentKind::Theorem1Ignorance && dims.is_empty() {
        return Err(invalid("dims", "at least one dimension is required"));
    }

    Ok(ExperimentConfig {
        kind: raw.experiment,
        source,
        test_n1,
        test_n2,
        replicates,
        seed,
        methods,
        out_dir: raw.out_dir.unwrap_or_else(|| PathBuf::from("runs")),
        sweep_splits,
        dims,
        fixed_tau: raw.fixed_tau,
        bias_draws: raw.bias_draws.unwrap_or(DEFAULT_BIAS_DRAWS),
    })
}

fn validate_data(raw: &RawData, kind: ExperimentKind) -> Result<DataSource> {
    match (&raw.setting, &raw.dataset) {
        (Some(_), Some(_)) => Err(invalid(
            "data",
            "give either a synthetic setting or a dataset path, not both",
        )),
        (Some(setting), None) => {
            let (id, ii_printed) = match setting.to_ascii_lowercase().as_str() {
                "ii-printed" => (SettingId::Ii, true),
                other => (
                    SettingId::parse(other).ok_or_else(|| {
                        invalid("data.setting", "expected one of: i, ii, ii-printed, iii, iv")
                    })?,
                    false,
                ),
            };
            let p = raw.p.ok_or_else(|| invalid("data.p", "dimension p is required"))?;
            let n1 = raw.n1.ok_or_else(|| invalid("data.n1", "class-1 size is required"))?;
            let n2 = raw.n2.ok_or_else(|| invalid("data.n2", "class-2 size is required"))?;
            if n1 == 0 || n2 == 0 {
                return Err(invalid("data", "class sizes must be at least 1"));
            }
            // fail early on impossible (setting, p) pairs
            let probe = if ii_printed {
                make_setting_ii_as_printed(p).map(|_| ())
            } else {
                make_setting(id, p).map(|_| ())
            };
            probe.map_err(|e| invalid("data.p", e.to_string()))?;
            Ok(DataSource::Setting {
                id,
                ii_printed,
                p,
                n1,
                n2,
            })
        }
        (None, Some(path)) => {
            if kind != ExperimentKind::CustomFit {
                return Err(invalid(
                    "data.dataset",
                    format!("the {} experiment requires a synthetic setting", kind.name()),
                ));
            }
            let label = raw
                .label
                .clone()
                .ok_or_else(|| invalid("data.label", "the label column name is required"))?;
            Ok(DataSource::Csv {
                path: path.clone(),
                label,
            })
        }
        (None, None) => Err(invalid("data", "either a setting or a dataset is required")),
    }
}

fn validate_method(raw: &RawMethod, index: usize) -> Result<MethodConfig> {
    let field = |suffix: &str| format!("methods[{index}].{suffix}");
    let kind = RuleKind::parse(&raw.name).ok_or_else(|| {
        invalid(
            &field("name"),
            format!("unknown method `{}`; valid names: {VALID_METHODS}", raw.name),
        )
    })?;

    let tuning = match raw.tau {
        Some(tau) => {
            if tau < 0.0 {
                return Err(invalid(&field("tau"), "thresholds are nonnegative"));
            }
            Tuning::Fixed(tau)
        }
        None => Tuning::Loocv {
            grid_size: raw.grid_size.unwrap_or(DEFAULT_GRID_SIZE),
        },
    };
    if let Tuning::Loocv { grid_size } = tuning {
        if grid_size < 2 {
            return Err(invalid(&field("grid_size"), "grid size must be at least 2"));
        }
    }

    let splits = raw.splits.unwrap_or(DEFAULT_SPLITS);
    let cv_splits = raw.cv_splits.unwrap_or(DEFAULT_CV_SPLITS);
    if splits == 0 || cv_splits == 0 {
        return Err(invalid(&field("splits"), "split counts must be positive"));
    }

    if kind == RuleKind::Slda {
        let fixed = raw.m1.is_some() && raw.m2.is_some();
        let grids = raw.m1_grid.is_some() && raw.m2_grid.is_some();
        if !fixed && !grids {
            return Err(invalid(
                &field("m1"),
                "slda needs either fixed constants (m1, m2) or grids (m1_grid, m2_grid)",
            ));
        }
        if let Some(g) = raw.m1_grid.as_ref().or(raw.m2_grid.as_ref()) {
            if g.is_empty() {
                return Err(invalid(&field("m1_grid"), "constant grids must be nonempty"));
            }
        }
    } else if raw.m1.is_some() || raw.m2.is_some() || raw.m1_grid.is_some() || raw.m2_grid.is_some()
    {
        return Err(invalid(
            &field("m1"),
            "thresholding constants only apply to slda",
        ));
    }
    let alpha = raw.alpha.unwrap_or(DEFAULT_ALPHA);
    if !(0.0..0.5).contains(&alpha) || alpha <= 0.0 {
        return Err(invalid(&field("alpha"), "alpha must lie in (0, 0.5)"));
    }

    Ok(MethodConfig {
        kind,
        tuning,
        splits,
        cv_splits,
        m1: raw.m1,
        m2: raw.m2,
        m1_grid: raw.m1_grid.clone(),
        m2_grid: raw.m2_grid.clone(),
        alpha,
    })
}
