//! Discriminant rules. Every classifier here reduces to an affine score
//! delta(x) = w·x + b with the convention
//!
//!   class 1  iff  delta(x) < 0,    class 2 otherwise (ties to class 2).
//!
//! The split-and-average rules (`fit_msplit_hr_*`) partition each class in
//! half L times: feature selection runs on part 1, coefficients come from
//! part 2, and an analytic term corrects the expected gap between the two
//! class scores that imbalanced sizes would otherwise leave behind. The
//! correction is the Gamma-ratio form under a diagonal covariance and the
//! Wishart-moment form in general. Each per-split score is affine in x, so
//! the L-average collapses exactly into a single [`LinearRule`]; the
//! per-split pieces are retained in [`MsplitTrace`] for stability selection
//! and diagnostics.

use rand::Rng;

use crate::error::{Error, Result};
use crate::estimators::{
    slda_threshold_cov, slda_threshold_meandiff, LabeledDataset, SupportSet, LABEL_MAJORITY,
    LABEL_MINORITY,
};
use crate::linalg::{cholesky, dot, pseudo_inverse, SymMatrix, PSEUDO_INVERSE_REL_TOL};

/// How a rule was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Bayes,
    Lda,
    Hr,
    UsHr,
    MsplitHrDiag,
    MsplitHrGeneral,
    Slda,
}

impl RuleKind {
    pub fn name(&self) -> &'static str {
        match self {
            RuleKind::Bayes => "bayes",
            RuleKind::Lda => "lda",
            RuleKind::Hr => "hr",
            RuleKind::UsHr => "us-hr",
            RuleKind::MsplitHrDiag => "msplit-hr-diag",
            RuleKind::MsplitHrGeneral => "msplit-hr-general",
            RuleKind::Slda => "slda",
        }
    }

    pub fn parse(s: &str) -> Option<RuleKind> {
        match s {
            "bayes" => Some(RuleKind::Bayes),
            "lda" => Some(RuleKind::Lda),
            "hr" => Some(RuleKind::Hr),
            "us-hr" => Some(RuleKind::UsHr),
            "msplit-hr-diag" => Some(RuleKind::MsplitHrDiag),
            "msplit-hr-general" => Some(RuleKind::MsplitHrGeneral),
            "slda" => Some(RuleKind::Slda),
            _ => None,
        }
    }
}

/// An affine discriminant rule.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRule {
    weights: Vec<f64>,
    intercept: f64,
    kind: RuleKind,
}

impl LinearRule {
    pub fn new(weights: Vec<f64>, intercept: f64, kind: RuleKind) -> Self {
        Self {
            weights,
            intercept,
            kind,
        }
    }

    pub fn zero(p: usize, kind: RuleKind) -> Self {
        Self::new(vec![0.0; p], 0.0, kind)
    }

    pub fn p(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn support(&self) -> SupportSet {
        (0..self.weights.len())
            .filter(|&j| self.weights[j] != 0.0)
            .collect()
    }

    pub fn discriminant(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.intercept
    }

    pub fn predict(&self, x: &[f64]) -> Result<u8> {
        predict(self, x)
    }
}

/// Classifies `x`: class 1 iff the score is negative, class 2 otherwise.
pub fn predict(rule: &LinearRule, x: &[f64]) -> Result<u8> {
    if x.len() != rule.p() {
        return Err(Error::DimensionMismatch {
            expected: rule.p(),
            actual: x.len(),
        });
    }
    Ok(if rule.discriminant(x) < 0.0 {
        LABEL_MAJORITY
    } else {
        LABEL_MINORITY
    })
}

/// The optimal rule for a known model: w = Sigma^{-1} mu_d, b = -w·mu_a.
pub fn bayes_rule(model: &crate::datagen::GaussianModel) -> Result<LinearRule> {
    let w = model.cov().solve(&model.mu_d())?;
    let b = -dot(&w, &model.mu_a());
    Ok(LinearRule::new(w, b, RuleKind::Bayes))
}

/// Plug-in LDA with the pooled covariance; falls back to the Moore-Penrose
/// inverse when the covariance is singular (always the case for p >= n-2).
pub fn fit_lda(d: &LabeledDataset) -> Result<LinearRule> {
    let m = crate::estimators::moments_full(d)?;
    let cov = match &m.sigma_hat {
        crate::estimators::SigmaHat::Full(c) => c,
        _ => unreachable!(),
    };
    let w = match cholesky(cov) {
        Ok(f) => f.solve(&m.mu_d_hat),
        Err(_) => pseudo_inverse(cov, PSEUDO_INVERSE_REL_TOL).matvec(&m.mu_d_hat),
    };
    let b = -dot(&w, &m.mu_a_hat);
    Ok(LinearRule::new(w, b, RuleKind::Lda))
}

fn t_from_moments(mu1: &[f64], mu2: &[f64], vars: &[f64], n1: usize, n2: usize) -> Vec<f64> {
    let scale = (((n1 + n2) as f64) / ((n1 * n2) as f64)).sqrt();
    vars.iter()
        .zip(mu1.iter().zip(mu2))
        .map(|(&var, (a, b))| {
            let diff = b - a;
            if var == 0.0 {
                if diff == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                diff / (var.sqrt() * scale)
            }
        })
        .collect()
}

/// Builds the diagonal-covariance rule over `selected`; features with zero
/// pooled variance carry no usable coefficient and are dropped.
fn diag_rule_parts(
    selected: &SupportSet,
    mu1: &[f64],
    mu2: &[f64],
    vars: &[f64],
) -> (Vec<(usize, f64)>, f64) {
    let mut weights = Vec::with_capacity(selected.len());
    let mut intercept = 0.0;
    for &j in selected.indices() {
        let var = vars[j];
        if var == 0.0 {
            continue;
        }
        let w = (mu2[j] - mu1[j]) / var;
        weights.push((j, w));
        intercept -= w * (mu1[j] + mu2[j]) / 2.0;
    }
    (weights, intercept)
}

/// Hard-thresholding rule: keep feature j iff |t_j| > tau, with the
/// diagonal plug-in coefficients. An empty selection yields the zero rule.
pub fn fit_hr(d: &LabeledDataset, tau: f64) -> Result<LinearRule> {
    let vars = crate::estimators::pooled_diag_variances(d)?;
    let (mu1, mu2) = crate::estimators::class_means(d);
    let t = t_from_moments(&mu1, &mu2, &vars, d.n1(), d.n2());
    let selected = crate::estimators::select_by_t(&t, tau);
    let (sparse, intercept) = diag_rule_parts(&selected, &mu1, &mu2, &vars);
    let mut w = vec![0.0; d.p()];
    for (j, v) in sparse {
        w[j] = v;
    }
    Ok(LinearRule::new(w, intercept, RuleKind::Hr))
}

fn sample_sorted_without_replacement<R: Rng>(pool: &[usize], k: usize, rng: &mut R) -> Vec<usize> {
    debug_assert!(k <= pool.len());
    let mut idx = pool.to_vec();
    for i in 0..k {
        let j = rng.gen_range(i..idx.len());
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

/// HR on a balanced subsample: the majority class is down-sampled to n2
/// rows without replacement, the minority class is kept whole.
pub fn fit_us_hr<R: Rng>(d: &LabeledDataset, tau: f64, rng: &mut R) -> Result<LinearRule> {
    if d.n2() < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            actual: d.n2(),
        });
    }
    let majors = d.class_indices(LABEL_MAJORITY);
    let mut rows = sample_sorted_without_replacement(&majors, d.n2(), rng);
    rows.extend(d.class_indices(LABEL_MINORITY));
    let sub = d.subset(&rows)?;
    let rule = fit_hr(&sub, tau)?;
    Ok(LinearRule::new(
        rule.weights().to_vec(),
        rule.intercept(),
        RuleKind::UsHr,
    ))
}

/// The per-feature score-gap expectation under a diagonal covariance:
/// f (1/n1' - 1/n2') Gamma(f - 1) / Gamma(f) with f = n'/2 - 1, evaluated
/// through log-gamma. Negative whenever n2' < n1'.
pub fn bias_rbar_diag(n1p: usize, n2p: usize) -> Result<f64> {
    let n_prime = n1p + n2p;
    if n_prime <= 6 || n1p == 0 || n2p == 0 {
        return Err(Error::InvalidSizes(format!(
            "need n1' + n2' > 6 with both parts nonempty, got ({n1p}, {n2p})"
        )));
    }
    let f = n_prime as f64 / 2.0 - 1.0;
    let gamma_ratio = (libm::lgamma(f - 1.0) - libm::lgamma(f)).exp();
    Ok(f * (1.0 / n1p as f64 - 1.0 / n2p as f64) * gamma_ratio)
}

/// The score-gap expectation for a split that kept `s` features under a
/// general covariance: (1/n1' - 1/n2') (n'-2)/(n'-3-s) s.
pub fn bias_rbar_general(n1p: usize, n2p: usize, s: usize) -> Result<f64> {
    let n_prime = n1p + n2p;
    if n_prime < 4 || s + 3 >= n_prime {
        return Err(Error::SelectionTooLarge {
            s,
            max: n_prime.saturating_sub(3),
        });
    }
    let shrink = (n_prime as f64 - 2.0) / (n_prime as f64 - 3.0 - s as f64);
    Ok((1.0 / n1p as f64 - 1.0 / n2p as f64) * shrink * s as f64)
}

/// One random half-split: part 1 holds exactly floor(n_k/2) rows of each
/// class, part 2 the remainder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlan {
    part1_major: Vec<usize>,
    part1_minor: Vec<usize>,
}

impl SplitPlan {
    pub fn new(mut part1_major: Vec<usize>, mut part1_minor: Vec<usize>) -> Self {
        part1_major.sort_unstable();
        part1_minor.sort_unstable();
        Self {
            part1_major,
            part1_minor,
        }
    }

    pub fn draw<R: Rng>(d: &LabeledDataset, rng: &mut R) -> Self {
        let majors = d.class_indices(LABEL_MAJORITY);
        let minors = d.class_indices(LABEL_MINORITY);
        Self {
            part1_major: sample_sorted_without_replacement(&majors, majors.len() / 2, rng),
            part1_minor: sample_sorted_without_replacement(&minors, minors.len() / 2, rng),
        }
    }

    fn validate(&self, d: &LabeledDataset) -> Result<()> {
        for (part, label, want) in [
            (&self.part1_major, LABEL_MAJORITY, d.n1() / 2),
            (&self.part1_minor, LABEL_MINORITY, d.n2() / 2),
        ] {
            if part.len() != want {
                return Err(Error::InvalidSizes(format!(
                    "part 1 of class {label} has {} rows, expected {want}",
                    part.len()
                )));
            }
            for w in part.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::InvalidSizes(format!(
                        "duplicate row {} in split plan",
                        w[0]
                    )));
                }
            }
            if part.iter().any(|&r| r >= d.n() || d.label(r) != label) {
                return Err(Error::InvalidSizes(format!(
                    "split plan rows must belong to class {label}"
                )));
            }
        }
        Ok(())
    }

    /// Rows of (part 1, part 2), each sorted, each restricted to its class.
    fn partition(&self, d: &LabeledDataset) -> (Vec<usize>, Vec<usize>) {
        let mut part1: Vec<usize> = self
            .part1_major
            .iter()
            .chain(&self.part1_minor)
            .copied()
            .collect();
        part1.sort_unstable();
        let part2: Vec<usize> = (0..d.n()).filter(|r| part1.binary_search(r).is_err()).collect();
        (part1, part2)
    }
}

/// One per-split affine piece of a split-and-average rule.
#[derive(Debug, Clone)]
pub struct SplitPiece {
    /// Features selected on part 1.
    pub selected: SupportSet,
    /// Sparse coefficients from part 2 (feature index, weight).
    pub weights: Vec<(usize, f64)>,
    /// Intercept before the bias correction.
    pub intercept_uncorrected: f64,
    /// The split's raw gap expectation (the diagonal per-feature unit, or
    /// the general per-split total).
    pub rbar: f64,
    /// Amount subtracted from the intercept by the correction.
    pub bias_correction: f64,
    /// Whether the restricted covariance needed a ridge to factorize.
    pub ridge_used: bool,
}

impl SplitPiece {
    pub fn discriminant(&self, x: &[f64], corrected: bool) -> f64 {
        let mut s = self.intercept_uncorrected;
        if corrected {
            s -= self.bias_correction;
        }
        for &(j, w) in &self.weights {
            s += w * x[j];
        }
        s
    }
}

/// Per-split detail of a split-and-average fit.
#[derive(Debug, Clone)]
pub struct MsplitTrace {
    p: usize,
    kind: RuleKind,
    pieces: Vec<SplitPiece>,
}

impl MsplitTrace {
    pub fn split_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn pieces(&self) -> &[SplitPiece] {
        &self.pieces
    }

    /// f_j: how many splits selected feature j.
    pub fn selection_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.p];
        for piece in &self.pieces {
            for &j in piece.selected.indices() {
                counts[j] += 1;
            }
        }
        counts
    }

    /// Mean selected-set size across splits.
    pub fn mean_selected(&self) -> f64 {
        if self.pieces.is_empty() {
            return 0.0;
        }
        self.pieces.iter().map(|s| s.selected.len() as f64).sum::<f64>()
            / self.pieces.len() as f64
    }

    pub fn ridge_fallbacks(&self) -> usize {
        self.pieces.iter().filter(|s| s.ridge_used).count()
    }

    /// The exact affine collapse of the per-split average.
    pub fn collapse(&self, corrected: bool) -> LinearRule {
        let l = self.pieces.len().max(1) as f64;
        let mut w = vec![0.0; self.p];
        let mut b = 0.0;
        for piece in &self.pieces {
            for &(j, v) in &piece.weights {
                w[j] += v;
            }
            b += piece.intercept_uncorrected;
            if corrected {
                b -= piece.bias_correction;
            }
        }
        w.iter_mut().for_each(|v| *v /= l);
        LinearRule::new(w, b / l, self.kind)
    }

    /// Mean of the per-split scores at x; equals the collapsed rule's score.
    pub fn ensemble_discriminant(&self, x: &[f64], corrected: bool) -> f64 {
        let l = self.pieces.len().max(1) as f64;
        self.pieces
            .iter()
            .map(|s| s.discriminant(x, corrected))
            .sum::<f64>()
            / l
    }
}

fn check_split_sizes(d: &LabeledDataset) -> Result<(usize, usize)> {
    let n1p = d.n1() / 2;
    let n2p = d.n2() / 2;
    if n1p < 2 || n2p < 2 {
        return Err(Error::TooFewSamples {
            required: 4,
            actual: d.n1().min(d.n2()),
        });
    }
    Ok((n1p, n2p))
}

/// Moments of the rows in `rows`, split by class.
fn subset_means(d: &LabeledDataset, rows: &[usize]) -> (Vec<f64>, Vec<f64>, usize, usize) {
    let p = d.p();
    let mut mu1 = vec![0.0; p];
    let mut mu2 = vec![0.0; p];
    let (mut c1, mut c2) = (0usize, 0usize);
    for &r in rows {
        let (target, count) = if d.label(r) == LABEL_MAJORITY {
            (&mut mu1, &mut c1)
        } else {
            (&mut mu2, &mut c2)
        };
        *count += 1;
        for (t, v) in target.iter_mut().zip(d.row(r)) {
            *t += v;
        }
    }
    mu1.iter_mut().for_each(|v| *v /= c1 as f64);
    mu2.iter_mut().for_each(|v| *v /= c2 as f64);
    (mu1, mu2, c1, c2)
}

fn subset_pooled_diag(d: &LabeledDataset, rows: &[usize], mu1: &[f64], mu2: &[f64]) -> Vec<f64> {
    let p = d.p();
    let mut acc = vec![0.0; p];
    for &r in rows {
        let mu = if d.label(r) == LABEL_MAJORITY { mu1 } else { mu2 };
        for ((a, v), m) in acc.iter_mut().zip(d.row(r)).zip(mu) {
            let dev = v - m;
            *a += dev * dev;
        }
    }
    let divisor = (rows.len() - 2) as f64;
    acc.iter_mut().for_each(|v| *v /= divisor);
    acc
}

/// Split-and-average rule under a diagonal covariance.
///
/// Per split: thresholded t-statistics from part 1 pick the features; the
/// diagonal plug-in coefficients come from part 2; half the per-feature gap
/// unit is subtracted per selected feature.
pub fn fit_msplit_hr_diag<R: Rng>(
    d: &LabeledDataset,
    tau: f64,
    l: usize,
    rng: &mut R,
) -> Result<(LinearRule, MsplitTrace)> {
    let plans: Vec<SplitPlan> = (0..l.max(1)).map(|_| SplitPlan::draw(d, rng)).collect();
    fit_msplit_hr_diag_with_plans(d, tau, &plans)
}

pub fn fit_msplit_hr_diag_with_plans(
    d: &LabeledDataset,
    tau: f64,
    plans: &[SplitPlan],
) -> Result<(LinearRule, MsplitTrace)> {
    if plans.is_empty() {
        return Err(Error::InvalidSizes("need at least one split".into()));
    }
    let (n1p, n2p) = check_split_sizes(d)?;
    let rbar = bias_rbar_diag(n1p, n2p)?;

    let mut pieces = Vec::with_capacity(plans.len());
    for plan in plans {
        plan.validate(d)?;
        let (part1, part2) = plan.partition(d);

        let (mu1_a, mu2_a, c1a, c2a) = subset_means(d, &part1);
        let vars_a = subset_pooled_diag(d, &part1, &mu1_a, &mu2_a);
        let t = t_from_moments(&mu1_a, &mu2_a, &vars_a, c1a, c2a);
        let selected = crate::estimators::select_by_t(&t, tau);

        let (mu1_b, mu2_b, _, _) = subset_means(d, &part2);
        let vars_b = subset_pooled_diag(d, &part2, &mu1_b, &mu2_b);
        let (weights, intercept) = diag_rule_parts(&selected, &mu1_b, &mu2_b, &vars_b);

        let bias_correction = selected.len() as f64 * rbar / 2.0;
        pieces.push(SplitPiece {
            selected,
            weights,
            intercept_uncorrected: intercept,
            rbar,
            bias_correction,
            ridge_used: false,
        });
    }

    let trace = MsplitTrace {
        p: d.p(),
        kind: RuleKind::MsplitHrDiag,
        pieces,
    };
    Ok((trace.collapse(true), trace))
}

/// Ridge scale applied when a restricted covariance fails to factorize.
const RIDGE_EPSILON: f64 = 1e-8;

/// Split-and-average rule under a general covariance.
///
/// Per split: features are screened on part 1 by |mean difference| > tau,
/// capped at n1'+n2'-4 by descending magnitude (ties to the smaller index);
/// part 2 supplies the restricted means and covariance; the split's
/// Wishart-moment gap term is halved and subtracted.
pub fn fit_msplit_hr_general<R: Rng>(
    d: &LabeledDataset,
    tau: f64,
    l: usize,
    rng: &mut R,
) -> Result<(LinearRule, MsplitTrace)> {
    let plans: Vec<SplitPlan> = (0..l.max(1)).map(|_| SplitPlan::draw(d, rng)).collect();
    fit_msplit_hr_general_with_plans(d, tau, &plans)
}

pub fn fit_msplit_hr_general_with_plans(
    d: &LabeledDataset,
    tau: f64,
    plans: &[SplitPlan],
) -> Result<(LinearRule, MsplitTrace)> {
    if plans.is_empty() {
        return Err(Error::InvalidSizes("need at least one split".into()));
    }
    let (n1p, n2p) = check_split_sizes(d)?;
    let n_prime = n1p + n2p;
    if n_prime < 8 {
        return Err(Error::TooFewSamples {
            required: 8,
            actual: n_prime,
        });
    }
    let cap = n_prime - 4;

    let mut pieces = Vec::with_capacity(plans.len());
    for plan in plans {
        plan.validate(d)?;
        let (part1, part2) = plan.partition(d);

        let (mu1_a, mu2_a, _, _) = subset_means(d, &part1);
        let mu_d_a: Vec<f64> = mu2_a.iter().zip(&mu1_a).map(|(b, a)| b - a).collect();
        let screened = crate::estimators::select_by_meandiff(&mu_d_a, tau);

        let kept: Vec<usize> = if screened.len() < n_prime - 3 {
            screened.indices().to_vec()
        } else {
            let mut ranked: Vec<usize> = screened.indices().to_vec();
            ranked.sort_by(|&a, &b| {
                mu_d_a[b]
                    .abs()
                    .total_cmp(&mu_d_a[a].abs())
                    .then(a.cmp(&b))
            });
            ranked.truncate(cap);
            ranked.sort_unstable();
            ranked
        };

        let rbar = bias_rbar_general(n1p, n2p, kept.len())?;
        let piece = if kept.is_empty() {
            SplitPiece {
                selected: SupportSet::empty(),
                weights: Vec::new(),
                intercept_uncorrected: 0.0,
                rbar,
                bias_correction: 0.0,
                ridge_used: false,
            }
        } else {
            restricted_piece(d, &part2, &kept, rbar)
        };
        pieces.push(piece);
    }

    let trace = MsplitTrace {
        p: d.p(),
        kind: RuleKind::MsplitHrGeneral,
        pieces,
    };
    Ok((trace.collapse(true), trace))
}

/// Builds the affine piece mu_d' Sigma^{-1} (x_S - mu_a) - rbar/2 from the
/// part-2 rows restricted to `kept`.
fn restricted_piece(d: &LabeledDataset, part2: &[usize], kept: &[usize], rbar: f64) -> SplitPiece {
    let s = kept.len();
    let mut mu1 = vec![0.0; s];
    let mut mu2 = vec![0.0; s];
    let (mut c1, mut c2) = (0usize, 0usize);
    for &r in part2 {
        let row = d.row(r);
        let (target, count) = if d.label(r) == LABEL_MAJORITY {
            (&mut mu1, &mut c1)
        } else {
            (&mut mu2, &mut c2)
        };
        *count += 1;
        for (t, &j) in target.iter_mut().zip(kept) {
            *t += row[j];
        }
    }
    mu1.iter_mut().for_each(|v| *v /= c1 as f64);
    mu2.iter_mut().for_each(|v| *v /= c2 as f64);

    let mut acc = vec![0.0; s * s];
    let mut dev = vec![0.0; s];
    for &r in part2 {
        let row = d.row(r);
        let mu = if d.label(r) == LABEL_MAJORITY { &mu1 } else { &mu2 };
        for (k, &j) in kept.iter().enumerate() {
            dev[k] = row[j] - mu[k];
        }
        for a in 0..s {
            let da = dev[a];
            for b in a..s {
                acc[a * s + b] += da * dev[b];
            }
        }
    }
    let divisor = (part2.len() - 2) as f64;
    let sigma = SymMatrix::from_fn(s, |a, b| acc[a * s + b] / divisor);

    let mu_d: Vec<f64> = mu2.iter().zip(&mu1).map(|(b, a)| b - a).collect();
    let mu_a: Vec<f64> = mu2.iter().zip(&mu1).map(|(b, a)| (a + b) / 2.0).collect();

    let mut ridge_used = false;
    let v = match cholesky(&sigma) {
        Ok(f) => f.solve(&mu_d),
        Err(_) => {
            ridge_used = true;
            let ridge = RIDGE_EPSILON * sigma.trace() / s as f64;
            match cholesky(&sigma.with_ridge(ridge)) {
                Ok(f) => f.solve(&mu_d),
                // all part-2 rows identical; no direction information
                Err(_) => vec![0.0; s],
            }
        }
    };

    let intercept = -dot(&v, &mu_a);
    SplitPiece {
        selected: kept.iter().copied().collect(),
        weights: kept.iter().copied().zip(v).collect(),
        intercept_uncorrected: intercept,
        rbar,
        bias_correction: rbar / 2.0,
        ridge_used,
    }
}

/// Sparse LDA: entrywise-thresholded covariance and mean difference, with
/// the unthresholded mean average in the intercept.
pub fn fit_slda(d: &LabeledDataset, m1: f64, m2: f64, alpha: f64) -> Result<LinearRule> {
    let sigma = slda_threshold_cov(d, m1)?;
    let mu_d = slda_threshold_meandiff(d, m2, alpha);
    let (mu1, mu2) = crate::estimators::class_means(d);
    let mu_a: Vec<f64> = mu2.iter().zip(&mu1).map(|(b, a)| (a + b) / 2.0).collect();
    let w = match cholesky(&sigma) {
        Ok(f) => f.solve(&mu_d),
        Err(_) => pseudo_inverse(&sigma, PSEUDO_INVERSE_REL_TOL).matvec(&mu_d),
    };
    let b = -dot(&w, &mu_a);
    Ok(LinearRule::new(w, b, RuleKind::Slda))
}
