//! Exact and empirical misclassification rates, optimality diagnostics,
//! and feature-selection scoring.
//!
//! For an affine score delta(x) = w·x + b under X | Y=k ~ N(mu_k, Sigma),
//! the exact conditional rates are
//!
//!   MCR_1 = Phi( (w·mu_1 + b) / sqrt(w' Sigma w) ),
//!   MCR_2 = Phi( -(w·mu_2 + b) / sqrt(w' Sigma w) ),
//!
//! and both reduce to Phi(-Delta_p / 2) for the optimal rule. A degenerate
//! score (w' Sigma w = 0) classifies by the sign of b alone.

use crate::classifiers::{LinearRule, MsplitTrace};
use crate::datagen::GaussianModel;
use crate::error::{Error, Result};
use crate::estimators::{LabeledDataset, SupportSet, LABEL_MAJORITY};
use crate::linalg::dot;

/// Standard normal CDF through the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Squared discriminative power mu_d' Sigma^{-1} mu_d.
pub fn delta_p_squared(model: &GaussianModel) -> Result<f64> {
    model.cov().quad_form_inv(&model.mu_d())
}

/// The optimal misclassification rate Phi(-Delta_p / 2), shared by both
/// classes under the optimal rule.
pub fn optimal_mcr(model: &GaussianModel) -> Result<f64> {
    Ok(normal_cdf(-delta_p_squared(model)?.sqrt() / 2.0))
}

/// Exact conditional (MCR_1, MCR_2) of an affine rule under the model.
pub fn theoretical_mcr(rule: &LinearRule, model: &GaussianModel) -> Result<(f64, f64)> {
    if rule.p() != model.p() {
        return Err(Error::DimensionMismatch {
            expected: model.p(),
            actual: rule.p(),
        });
    }
    let w = rule.weights();
    let b = rule.intercept();
    let variance = dot(w, &model.cov().matvec(w)?);
    if variance <= 0.0 {
        // constant score: b >= 0 sends everything to class 2
        return Ok(if b >= 0.0 { (1.0, 0.0) } else { (0.0, 1.0) });
    }
    let sd = variance.sqrt();
    let m1 = dot(w, model.mu1()) + b;
    let m2 = dot(w, model.mu2()) + b;
    Ok((normal_cdf(m1 / sd), normal_cdf(-m2 / sd)))
}

/// Per-class empirical error fractions of a rule on labeled test data.
pub fn empirical_mcr(rule: &LinearRule, test: &LabeledDataset) -> Result<(f64, f64)> {
    let (mut err1, mut err2) = (0usize, 0usize);
    for i in 0..test.n() {
        let predicted = rule.predict(test.row(i))?;
        if predicted != test.label(i) {
            if test.label(i) == LABEL_MAJORITY {
                err1 += 1;
            } else {
                err2 += 1;
            }
        }
    }
    Ok((
        err1 as f64 / test.n1() as f64,
        err2 as f64 / test.n2() as f64,
    ))
}

/// (true selections, false selections, support size).
pub fn selection_metrics(support: &SupportSet, true_set: &SupportSet) -> (usize, usize, usize) {
    let a = support.intersection_len(true_set);
    (a, support.len() - a, support.len())
}

/// Features selected in at least half of the splits (inclusive).
pub fn stability_support(trace: &MsplitTrace) -> SupportSet {
    let l = trace.split_count();
    trace
        .selection_counts()
        .iter()
        .enumerate()
        .filter(|&(_, &f)| 2 * f >= l)
        .map(|(j, _)| j)
        .collect()
}

/// Per-replicate metrics of one fitted rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRecord {
    pub mcr1: f64,
    pub mcr2: f64,
    pub gm: f64,
    pub a: usize,
    pub n_false: usize,
    pub s_total: usize,
}

impl MetricsRecord {
    pub fn new(mcr1: f64, mcr2: f64, a: usize, n_false: usize, s_total: usize) -> Self {
        Self {
            mcr1,
            mcr2,
            gm: (mcr1 * mcr2).sqrt(),
            a,
            n_false,
            s_total,
        }
    }
}

/// Replication aggregates: means and sample standard deviations for the
/// rates, medians for the selection counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsSummary {
    pub mcr1_mean: f64,
    pub mcr1_std: f64,
    pub mcr2_mean: f64,
    pub mcr2_std: f64,
    pub gm_mean: f64,
    pub gm_std: f64,
    pub a_median: f64,
    pub n_median: f64,
    pub s_median: f64,
}

fn mean_and_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

pub fn aggregate(records: &[MetricsRecord]) -> Result<MetricsSummary> {
    if records.is_empty() {
        return Err(Error::EmptyList);
    }
    let (mcr1_mean, mcr1_std) = mean_and_std(records.iter().map(|r| r.mcr1));
    let (mcr2_mean, mcr2_std) = mean_and_std(records.iter().map(|r| r.mcr2));
    let (gm_mean, gm_std) = mean_and_std(records.iter().map(|r| r.gm));
    let mut a: Vec<f64> = records.iter().map(|r| r.a as f64).collect();
    let mut n: Vec<f64> = records.iter().map(|r| r.n_false as f64).collect();
    let mut s: Vec<f64> = records.iter().map(|r| r.s_total as f64).collect();
    Ok(MetricsSummary {
        mcr1_mean,
        mcr1_std,
        mcr2_mean,
        mcr2_std,
        gm_mean,
        gm_std,
        a_median: median(&mut a),
        n_median: median(&mut n),
        s_median: median(&mut s),
    })
}
