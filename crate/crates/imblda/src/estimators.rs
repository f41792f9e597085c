//! Sample moments, two-sample t-statistics, and the thresholding and
//! screening estimators consumed by the classifiers.
//!
//! Labels are 1 (majority) and 2 (minority). Datasets that break the
//! minority convention (n2 > n1) are accepted with a warning since every
//! formula remains valid.

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

pub const LABEL_MAJORITY: u8 = 1;
pub const LABEL_MINORITY: u8 = 2;

/// An n x p feature matrix with class labels in {1, 2}.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    x: Vec<f64>, // row-major n x p
    y: Vec<u8>,
    n: usize,
    p: usize,
    n1: usize,
    n2: usize,
}

impl LabeledDataset {
    /// Builds a dataset from feature rows and labels.
    ///
    /// Both classes must be nonempty; every label must be 1 or 2.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: rows.len(),
                actual: labels.len(),
            });
        }
        if rows.is_empty() {
            return Err(Error::EmptyClass { label: LABEL_MAJORITY });
        }
        let p = rows[0].len();
        if p == 0 {
            return Err(Error::InvalidDimension("zero-width feature rows".into()));
        }
        let mut x = Vec::with_capacity(rows.len() * p);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != p {
                return Err(Error::InvalidDimension(format!(
                    "row {i} has {} features, expected {p}",
                    row.len()
                )));
            }
            x.extend_from_slice(row);
        }
        for (i, &label) in labels.iter().enumerate() {
            if label != LABEL_MAJORITY && label != LABEL_MINORITY {
                return Err(Error::Label {
                    row: i,
                    value: label.to_string(),
                });
            }
        }
        let n1 = labels.iter().filter(|&&l| l == LABEL_MAJORITY).count();
        let n2 = labels.len() - n1;
        if n1 == 0 {
            return Err(Error::EmptyClass { label: LABEL_MAJORITY });
        }
        if n2 == 0 {
            return Err(Error::EmptyClass { label: LABEL_MINORITY });
        }
        if n2 > n1 {
            log::warn!(
                "class 2 ({n2} samples) outnumbers class 1 ({n1}); \
                 label 2 is conventionally the minority class"
            );
        }
        Ok(Self {
            n: labels.len(),
            p,
            x,
            y: labels,
            n1,
            n2,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn class_count(&self, label: u8) -> usize {
        if label == LABEL_MAJORITY {
            self.n1
        } else {
            self.n2
        }
    }

    pub fn label(&self, i: usize) -> u8 {
        self.y[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.y
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.p..(i + 1) * self.p]
    }

    /// Row indices belonging to class `label`, in dataset order.
    pub fn class_indices(&self, label: u8) -> Vec<usize> {
        (0..self.n).filter(|&i| self.y[i] == label).collect()
    }

    /// A copy with row `i` removed (leave-one-out fits).
    pub fn without_row(&self, i: usize) -> Result<Self> {
        let rows: Vec<Vec<f64>> = (0..self.n)
            .filter(|&r| r != i)
            .map(|r| self.row(r).to_vec())
            .collect();
        let labels: Vec<u8> = (0..self.n).filter(|&r| r != i).map(|r| self.y[r]).collect();
        Self::from_rows(rows, labels)
    }

    /// A copy containing only the given rows, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        let feats: Vec<Vec<f64>> = rows.iter().map(|&r| self.row(r).to_vec()).collect();
        let labels: Vec<u8> = rows.iter().map(|&r| self.y[r]).collect();
        Self::from_rows(feats, labels)
    }
}

/// A sorted set of selected feature indices (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self { indices }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.binary_search(&j).is_ok()
    }

    pub fn is_subset_of(&self, other: &SupportSet) -> bool {
        self.indices.iter().all(|&j| other.contains(j))
    }

    pub fn intersection_len(&self, other: &SupportSet) -> usize {
        self.indices.iter().filter(|&&j| other.contains(j)).count()
    }
}

impl FromIterator<usize> for SupportSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// Covariance estimate attached to [`MomentEstimates`].
#[derive(Debug, Clone)]
pub enum SigmaHat {
    Diagonal(Vec<f64>),
    Full(SymMatrix),
}

/// Plug-in moment estimates of a two-class Gaussian model.
#[derive(Debug, Clone)]
pub struct MomentEstimates {
    pub mu1_hat: Vec<f64>,
    pub mu2_hat: Vec<f64>,
    pub mu_d_hat: Vec<f64>,
    pub mu_a_hat: Vec<f64>,
    pub sigma_hat: SigmaHat,
    pub n1: usize,
    pub n2: usize,
}

/// Per-class arithmetic means.
pub fn class_means(d: &LabeledDataset) -> (Vec<f64>, Vec<f64>) {
    let p = d.p();
    let mut mu1 = vec![0.0; p];
    let mut mu2 = vec![0.0; p];
    for i in 0..d.n() {
        let target = if d.label(i) == LABEL_MAJORITY {
            &mut mu1
        } else {
            &mut mu2
        };
        for (t, v) in target.iter_mut().zip(d.row(i)) {
            *t += v;
        }
    }
    let (n1, n2) = (d.n1() as f64, d.n2() as f64);
    mu1.iter_mut().for_each(|v| *v /= n1);
    mu2.iter_mut().for_each(|v| *v /= n2);
    (mu1, mu2)
}

fn require_pooled_df(d: &LabeledDataset) -> Result<()> {
    if d.n() < 3 {
        return Err(Error::TooFewSamples {
            required: 3,
            actual: d.n(),
        });
    }
    Ok(())
}

/// Pooled covariance with divisor n - 2.
pub fn pooled_covariance(d: &LabeledDataset) -> Result<SymMatrix> {
    require_pooled_df(d)?;
    let p = d.p();
    let (mu1, mu2) = class_means(d);
    let mut acc = vec![0.0; p * p];
    let mut dev = vec![0.0; p];
    for i in 0..d.n() {
        let mu = if d.label(i) == LABEL_MAJORITY { &mu1 } else { &mu2 };
        for ((dst, v), m) in dev.iter_mut().zip(d.row(i)).zip(mu) {
            *dst = v - m;
        }
        for a in 0..p {
            let da = dev[a];
            for b in a..p {
                acc[a * p + b] += da * dev[b];
            }
        }
    }
    let divisor = (d.n() - 2) as f64;
    let mut m = SymMatrix::from_fn(p, |_, _| 0.0);
    for a in 0..p {
        for b in a..p {
            m.set(a, b, acc[a * p + b] / divisor);
        }
    }
    Ok(m)
}

/// Diagonal of the pooled covariance, computed without forming the matrix.
pub fn pooled_diag_variances(d: &LabeledDataset) -> Result<Vec<f64>> {
    require_pooled_df(d)?;
    let p = d.p();
    let (mu1, mu2) = class_means(d);
    let mut acc = vec![0.0; p];
    for i in 0..d.n() {
        let mu = if d.label(i) == LABEL_MAJORITY { &mu1 } else { &mu2 };
        for ((a, v), m) in acc.iter_mut().zip(d.row(i)).zip(mu) {
            let dev = v - m;
            *a += dev * dev;
        }
    }
    let divisor = (d.n() - 2) as f64;
    acc.iter_mut().for_each(|v| *v /= divisor);
    Ok(acc)
}

/// Moment estimates with a diagonal covariance estimate.
pub fn moments_diag(d: &LabeledDataset) -> Result<MomentEstimates> {
    let (mu1, mu2) = class_means(d);
    let vars = pooled_diag_variances(d)?;
    Ok(assemble_moments(d, mu1, mu2, SigmaHat::Diagonal(vars)))
}

/// Moment estimates with the full pooled covariance.
pub fn moments_full(d: &LabeledDataset) -> Result<MomentEstimates> {
    let (mu1, mu2) = class_means(d);
    let cov = pooled_covariance(d)?;
    Ok(assemble_moments(d, mu1, mu2, SigmaHat::Full(cov)))
}

fn assemble_moments(
    d: &LabeledDataset,
    mu1: Vec<f64>,
    mu2: Vec<f64>,
    sigma_hat: SigmaHat,
) -> MomentEstimates {
    let mu_d: Vec<f64> = mu2.iter().zip(&mu1).map(|(b, a)| b - a).collect();
    let mu_a: Vec<f64> = mu2.iter().zip(&mu1).map(|(b, a)| (a + b) / 2.0).collect();
    MomentEstimates {
        mu1_hat: mu1,
        mu2_hat: mu2,
        mu_d_hat: mu_d,
        mu_a_hat: mu_a,
        sigma_hat,
        n1: d.n1(),
        n2: d.n2(),
    }
}

/// Two-sample t-statistics t_j = mu_d_j / (sigma_j * sqrt(n / (n1 n2))).
///
/// A feature with zero pooled variance gets t_j = 0 when the mean
/// difference also vanishes (uninformative), and +inf otherwise so that a
/// perfectly separating constant feature is always selected.
pub fn t_statistics(d: &LabeledDataset) -> Result<Vec<f64>> {
    let vars = pooled_diag_variances(d)?;
    let (mu1, mu2) = class_means(d);
    let scale = ((d.n() as f64) / ((d.n1() * d.n2()) as f64)).sqrt();
    Ok(vars
        .iter()
        .zip(mu1.iter().zip(&mu2))
        .map(|(&var, (m1, m2))| {
            let diff = m2 - m1;
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
        .collect())
}

/// Indices with |t_j| strictly above `tau`.
pub fn select_by_t(t: &[f64], tau: f64) -> SupportSet {
    (0..t.len()).filter(|&j| t[j].abs() > tau).collect()
}

/// Indices with |mu_d_j| strictly above `tau`.
pub fn select_by_meandiff(mu_d_hat: &[f64], tau: f64) -> SupportSet {
    (0..mu_d_hat.len())
        .filter(|&j| mu_d_hat[j].abs() > tau)
        .collect()
}

/// Entrywise hard-thresholded scaled covariance.
///
/// Every entry, the diagonal included, becomes
/// (1 - 2/n) sigma_ij 1{ (1 - 2/n)|sigma_ij| > m1 sqrt(log p / n) }.
pub fn slda_threshold_cov(d: &LabeledDataset, m1: f64) -> Result<SymMatrix> {
    let cov = pooled_covariance(d)?;
    let n = d.n() as f64;
    let p = d.p();
    let shrink = 1.0 - 2.0 / n;
    let t_n = m1 * ((p as f64).ln() / n).sqrt();
    Ok(SymMatrix::from_fn(p, |i, j| {
        let scaled = shrink * cov.get(i, j);
        if scaled.abs() > t_n {
            scaled
        } else {
            0.0
        }
    }))
}

/// Entrywise hard-thresholded mean difference with cutoff
/// m2 (log p / n)^alpha.
pub fn slda_threshold_meandiff(d: &LabeledDataset, m2: f64, alpha: f64) -> Vec<f64> {
    let (mu1, mu2) = class_means(d);
    let a_n = m2 * ((d.p() as f64).ln() / d.n() as f64).powf(alpha);
    mu2.iter()
        .zip(&mu1)
        .map(|(b, a)| {
            let diff = b - a;
            if diff.abs() > a_n {
                diff
            } else {
                0.0
            }
        })
        .collect()
}

#[cfg(test)]
pub(crate) fn ds4() -> LabeledDataset {
    LabeledDataset::from_rows(
        vec![
            vec![0.0, 0.0],
            vec![2.0, 1.0],
            vec![3.0, 0.0],
            vec![5.0, 1.0],
        ],
        vec![1, 1, 2, 2],
    )
    .unwrap()
}
