//! Threshold grids and leave-one-out cross-validation minimizing the
//! minority-class error.

use crate::classifiers::{
    fit_hr, fit_msplit_hr_diag, fit_msplit_hr_general, fit_slda, fit_us_hr, LinearRule,
};
use crate::error::{Error, Result};
use crate::estimators::{class_means, t_statistics, LabeledDataset, LABEL_MINORITY};
use crate::seed::stream_rng;

/// Which statistic a grid is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Magnitudes of the two-sample t-statistics.
    TScale,
    /// Magnitudes of the estimated mean differences.
    MeandiffScale,
}

/// A sorted, strictly increasing list of nonnegative candidate thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdGrid {
    values: Vec<f64>,
    kind: GridKind,
}

impl ThresholdGrid {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn from_values(mut values: Vec<f64>, kind: GridKind) -> Result<Self> {
        values.sort_by(f64::total_cmp);
        values.dedup();
        if values.is_empty() || values[0] < 0.0 {
            return Err(Error::InvalidSpec(
                "grid needs nonnegative candidate thresholds".into(),
            ));
        }
        Ok(Self { values, kind })
    }
}

/// Builds a grid of empirical quantiles (equally spaced in rank) of the
/// relevant statistic magnitudes, augmented with the largest `size - 1`
/// magnitudes and always including 0.
///
/// The quantiles alone make the selection path visit model sizes in steps
/// of roughly p/size, which under p >> n skips every sparse model between
/// "a few dozen features" and "none"; the top order statistics fill in
/// that end, so the path ranges over all of 0, 1, 2, ... up to p.
pub fn make_grid(d: &LabeledDataset, kind: GridKind, size: usize) -> Result<ThresholdGrid> {
    if size < 2 {
        return Err(Error::InvalidSpec("grid size must be at least 2".into()));
    }
    let stats: Vec<f64> = match kind {
        GridKind::TScale => t_statistics(d)?,
        GridKind::MeandiffScale => {
            let (mu1, mu2) = class_means(d);
            mu2.iter().zip(&mu1).map(|(b, a)| b - a).collect()
        }
    };
    let mut magnitudes: Vec<f64> = stats
        .iter()
        .map(|v| v.abs())
        .filter(|v| v.is_finite())
        .collect();
    magnitudes.sort_by(f64::total_cmp);

    let mut values = vec![0.0];
    if !magnitudes.is_empty() {
        let top = magnitudes.len() - 1;
        for k in 1..size {
            let rank = (k as f64 / (size - 1) as f64) * top as f64;
            let lo = rank.floor() as usize;
            let hi = rank.ceil() as usize;
            let w = rank - lo as f64;
            values.push(magnitudes[lo] * (1.0 - w) + magnitudes[hi] * w);
        }
        values.extend(magnitudes.iter().rev().take(size - 1));
    }
    values.sort_by(f64::total_cmp);
    values.dedup();
    Ok(ThresholdGrid { values, kind })
}

/// One row of a cross-validation table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvRow {
    pub tau: f64,
    pub mcr1: f64,
    pub mcr2: f64,
}

/// A rule-fitting procedure driven by a scalar threshold and a seed.
pub trait ThresholdFitter {
    fn fit(&self, d: &LabeledDataset, tau: f64, seed: u64) -> Result<LinearRule>;
}

/// The threshold-tunable classifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TunableFitter {
    Hr,
    UsHr,
    /// Split-and-average rule under a diagonal covariance with L splits.
    MsplitDiag { splits: usize },
    /// Split-and-average rule under a general covariance with L splits.
    MsplitGeneral { splits: usize },
}

impl ThresholdFitter for TunableFitter {
    fn fit(&self, d: &LabeledDataset, tau: f64, seed: u64) -> Result<LinearRule> {
        match *self {
            TunableFitter::Hr => fit_hr(d, tau),
            TunableFitter::UsHr => fit_us_hr(d, tau, &mut stream_rng(seed, &[])),
            TunableFitter::MsplitDiag { splits } => {
                fit_msplit_hr_diag(d, tau, splits, &mut stream_rng(seed, &[])).map(|(r, _)| r)
            }
            TunableFitter::MsplitGeneral { splits } => {
                fit_msplit_hr_general(d, tau, splits, &mut stream_rng(seed, &[])).map(|(r, _)| r)
            }
        }
    }
}

impl TunableFitter {
    /// The statistic scale the fitter thresholds on.
    pub fn grid_kind(&self) -> GridKind {
        match self {
            TunableFitter::Hr | TunableFitter::UsHr | TunableFitter::MsplitDiag { .. } => {
                GridKind::TScale
            }
            TunableFitter::MsplitGeneral { .. } => GridKind::MeandiffScale,
        }
    }
}

/// Leave-one-out selection of the threshold minimizing the held-out
/// minority error.
///
/// For every (tau, held-out index) cell the fitter runs on the remaining
/// n-1 rows under a seed derived from the cell, so the table is
/// deterministic and schedule-independent. Ties go to the smaller
/// cross-validated geometric mean, then to the larger (sparser) threshold.
///
/// A fit that selects nothing counts as a misclassification of its
/// held-out point: the empty rule sends every observation to class 2 and
/// would otherwise post a trivial zero minority error that beats every
/// informative threshold.
pub fn loocv_select<F: ThresholdFitter>(
    d: &LabeledDataset,
    fitter: &F,
    grid: &ThresholdGrid,
    seed: u64,
) -> Result<(f64, Vec<CvRow>)> {
    if d.n2() < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            actual: d.n2(),
        });
    }
    let mut err1 = vec![0usize; grid.values.len()];
    let mut err2 = vec![0usize; grid.values.len()];
    for i in 0..d.n() {
        let train = d.without_row(i)?;
        for (t_idx, &tau) in grid.values.iter().enumerate() {
            let cell_seed = crate::seed::derive_seed(seed, &[t_idx as u64, i as u64]);
            let rule = fitter.fit(&train, tau, cell_seed)?;
            let wrong =
                rule.support().is_empty() || rule.predict(d.row(i))? != d.label(i);
            if wrong {
                if d.label(i) == LABEL_MINORITY {
                    err2[t_idx] += 1;
                } else {
                    err1[t_idx] += 1;
                }
            }
        }
    }
    let table: Vec<CvRow> = grid
        .values
        .iter()
        .enumerate()
        .map(|(t_idx, &tau)| CvRow {
            tau,
            mcr1: err1[t_idx] as f64 / d.n1() as f64,
            mcr2: err2[t_idx] as f64 / d.n2() as f64,
        })
        .collect();
    let best = pick_best(&table);
    Ok((table[best].tau, table))
}

/// Index of the winning row: smallest mcr2, then smallest gm, then the
/// largest threshold (rows are in ascending tau order).
fn pick_best(table: &[CvRow]) -> usize {
    let mut best = 0;
    for (i, row) in table.iter().enumerate().skip(1) {
        let b = &table[best];
        let row_gm = (row.mcr1 * row.mcr2).sqrt();
        let best_gm = (b.mcr1 * b.mcr2).sqrt();
        if row.mcr2 < b.mcr2 || (row.mcr2 == b.mcr2 && row_gm <= best_gm) {
            best = i;
        }
    }
    best
}

/// One row of the two-dimensional sparse-LDA cross-validation table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SldaCvRow {
    pub m1: f64,
    pub m2: f64,
    pub mcr1: f64,
    pub mcr2: f64,
}

/// Leave-one-out selection over a 2-D (m1, m2) constant grid for the
/// sparse-LDA rule, with alpha held fixed. Same objective and tie rules as
/// [`loocv_select`], preferring larger constants (sparser fits) on ties.
pub fn loocv_select_slda(
    d: &LabeledDataset,
    m1_grid: &[f64],
    m2_grid: &[f64],
    alpha: f64,
) -> Result<((f64, f64), Vec<SldaCvRow>)> {
    if d.n2() < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            actual: d.n2(),
        });
    }
    if m1_grid.is_empty() || m2_grid.is_empty() {
        return Err(Error::InvalidSpec("empty constant grid".into()));
    }
    let cells: Vec<(f64, f64)> = m1_grid
        .iter()
        .flat_map(|&m1| m2_grid.iter().map(move |&m2| (m1, m2)))
        .collect();
    let mut err1 = vec![0usize; cells.len()];
    let mut err2 = vec![0usize; cells.len()];
    for i in 0..d.n() {
        let train = d.without_row(i)?;
        for (c, &(m1, m2)) in cells.iter().enumerate() {
            let rule = fit_slda(&train, m1, m2, alpha)?;
            let wrong =
                rule.support().is_empty() || rule.predict(d.row(i))? != d.label(i);
            if wrong {
                if d.label(i) == LABEL_MINORITY {
                    err2[c] += 1;
                } else {
                    err1[c] += 1;
                }
            }
        }
    }
    let table: Vec<SldaCvRow> = cells
        .iter()
        .enumerate()
        .map(|(c, &(m1, m2))| SldaCvRow {
            m1,
            m2,
            mcr1: err1[c] as f64 / d.n1() as f64,
            mcr2: err2[c] as f64 / d.n2() as f64,
        })
        .collect();
    let mut best = 0;
    for i in 1..table.len() {
        let (r, b) = (&table[i], &table[best]);
        let r_gm = (r.mcr1 * r.mcr2).sqrt();
        let b_gm = (b.mcr1 * b.mcr2).sqrt();
        if r.mcr2 < b.mcr2 || (r.mcr2 == b.mcr2 && r_gm <= b_gm) {
            best = i;
        }
    }
    Ok(((table[best].m1, table[best].m2), table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{make_setting, sample_dataset, SettingId};
    use crate::estimators::ds4;
    use crate::seed::stream_rng;
    use approx::assert_relative_eq;

    #[test]
    fn grid_from_ds4_t_statistics() {
        // |t| = (2.1213, 0)
        let g = make_grid(&ds4(), GridKind::TScale, 3).unwrap();
        assert_eq!(g.values().len(), 3);
        assert_eq!(g.values()[0], 0.0);
        assert_relative_eq!(g.values()[1], 3.0 / 2.0f64.sqrt() / 2.0, epsilon = 1e-12);
        assert_relative_eq!(g.values()[2], 3.0 / 2.0f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn grid_collapses_duplicates() {
        let d = LabeledDataset::from_rows(
            vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![4.0, 4.0], vec![5.0, 5.0]],
            vec![1, 1, 2, 2],
        )
        .unwrap();
        // identical statistics in both features: grid is {0, c}
        let g = make_grid(&d, GridKind::MeandiffScale, 5).unwrap();
        assert_eq!(g.values().len(), 2);
        assert_eq!(g.values()[0], 0.0);
        assert_relative_eq!(g.values()[1], 4.0, epsilon = 1e-12);
    }

    #[test]
    fn grid_size_two_is_zero_and_max() {
        let g = make_grid(&ds4(), GridKind::MeandiffScale, 2).unwrap();
        assert_eq!(g.values().len(), 2);
        assert_eq!(g.values()[0], 0.0);
        assert_relative_eq!(g.values()[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn grid_covers_the_sparse_end_of_the_path() {
        // many null features: every model size up to size-1 must be
        // visitable despite the rank quantiles bunching in the null bulk
        let m = make_setting(SettingId::I, 400).unwrap();
        let d = sample_dataset(&m, 30, 10, &mut stream_rng(97, &[])).unwrap();
        let size = 10;
        let g = make_grid(&d, GridKind::TScale, size).unwrap();
        let t = crate::estimators::t_statistics(&d).unwrap();
        let reachable: std::collections::BTreeSet<usize> = g
            .values()
            .iter()
            .map(|&tau| crate::estimators::select_by_t(&t, tau).len())
            .collect();
        for want in 0..size - 1 {
            assert!(
                reachable.contains(&want),
                "model size {want} unreachable; reachable: {reachable:?}"
            );
        }
    }

    #[test]
    fn loocv_prefers_perfect_minority_classification() {
        // well-separated model: the moderate threshold classifies the
        // held-out minority points perfectly; the absurdly large one fits
        // nothing and is charged full error
        let m = crate::datagen::GaussianModel::new(
            vec![0.0, 0.0],
            vec![6.0, 0.0],
            crate::linalg::CovSpec::Diagonal(vec![1.0, 1.0]),
        )
        .unwrap();
        let d = sample_dataset(&m, 14, 6, &mut stream_rng(51, &[])).unwrap();
        let grid = ThresholdGrid::from_values(vec![0.5, 1e12], GridKind::TScale).unwrap();
        let (tau, table) = loocv_select(&d, &TunableFitter::Hr, &grid, 7).unwrap();
        assert_eq!(tau, 0.5);
        assert_eq!(table.len(), 2);
        assert_eq!(table[0].mcr2, 0.0);
        assert_eq!(table[1].mcr2, 1.0);
    }

    #[test]
    fn loocv_tie_breaks_to_largest_tau() {
        // every threshold here yields an empty fit, so all rows tie at full
        // error and the largest (sparsest) tau wins
        let m = crate::datagen::GaussianModel::new(
            vec![0.0],
            vec![0.1],
            crate::linalg::CovSpec::Diagonal(vec![1.0]),
        )
        .unwrap();
        let d = sample_dataset(&m, 10, 5, &mut stream_rng(53, &[])).unwrap();
        let grid = ThresholdGrid::from_values(vec![1e6, 1e9, 1e12], GridKind::TScale).unwrap();
        let (tau, table) = loocv_select(&d, &TunableFitter::Hr, &grid, 7).unwrap();
        assert!(table.iter().all(|r| r.mcr2 == table[0].mcr2));
        assert!(table.iter().all(|r| (r.mcr1, r.mcr2) == (1.0, 1.0)));
        assert_eq!(tau, 1e12);
    }

    #[test]
    fn loocv_is_deterministic() {
        let m = make_setting(SettingId::I, 40).unwrap();
        let d = sample_dataset(&m, 16, 6, &mut stream_rng(59, &[])).unwrap();
        let grid = make_grid(&d, GridKind::TScale, 8).unwrap();
        let fitter = TunableFitter::MsplitDiag { splits: 3 };
        let a = loocv_select(&d, &fitter, &grid, 77).unwrap();
        let b = loocv_select(&d, &fitter, &grid, 77).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn loocv_rates_stay_in_range_and_tau_in_grid() {
        let m = make_setting(SettingId::I, 25).unwrap();
        let d = sample_dataset(&m, 12, 6, &mut stream_rng(61, &[])).unwrap();
        let grid = make_grid(&d, GridKind::TScale, 6).unwrap();
        let (tau, table) = loocv_select(&d, &TunableFitter::Hr, &grid, 3).unwrap();
        assert!(grid.values().contains(&tau));
        for row in table {
            assert!((0.0..=1.0).contains(&row.mcr1));
            assert!((0.0..=1.0).contains(&row.mcr2));
        }
    }

    #[test]
    fn hr_selection_path_is_monotone_in_tau() {
        let m = make_setting(SettingId::I, 30).unwrap();
        let d = sample_dataset(&m, 20, 8, &mut stream_rng(67, &[])).unwrap();
        let grid = make_grid(&d, GridKind::TScale, 10).unwrap();
        let mut last = usize::MAX;
        for &tau in grid.values() {
            let size = fit_hr(&d, tau).unwrap().support().len();
            assert!(size <= last);
            last = size;
        }
    }

    #[test]
    fn slda_grid_search_runs() {
        let m = make_setting(SettingId::I, 6).unwrap();
        let d = sample_dataset(&m, 12, 6, &mut stream_rng(71, &[])).unwrap();
        let ((m1, m2), table) =
            loocv_select_slda(&d, &[0.5, 2.0], &[0.5, 2.0], 0.3).unwrap();
        assert_eq!(table.len(), 4);
        assert!([0.5, 2.0].contains(&m1));
        assert!([0.5, 2.0].contains(&m2));
    }
}
