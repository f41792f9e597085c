//! Two-class Gaussian models: the four benchmark parameter settings and a
//! seeded sampler.
//!
//! Sampling uses Box-Muller over a counter-derived ChaCha stream, so every
//! dataset is a pure function of (model, sizes, seed). The generator
//! identity is exported as [`GENERATOR_ID`] for run metadata.

use rand::Rng;

use crate::error::{Error, Result};
use crate::estimators::{LabeledDataset, SupportSet};
use crate::linalg::{BlockSpec, CovFactor, CovSpec};

/// Identity of the standard-normal generator, recorded in run metadata.
pub const GENERATOR_ID: &str = "box-muller";

/// A two-class Gaussian model N(mu_k, Sigma) with common covariance.
#[derive(Debug, Clone)]
pub struct GaussianModel {
    mu1: Vec<f64>,
    mu2: Vec<f64>,
    cov: CovSpec,
    factor: CovFactor,
}

impl GaussianModel {
    pub fn new(mu1: Vec<f64>, mu2: Vec<f64>, cov: CovSpec) -> Result<Self> {
        if mu1.len() != mu2.len() {
            return Err(Error::DimensionMismatch {
                expected: mu1.len(),
                actual: mu2.len(),
            });
        }
        let p = mu1.len();
        if p == 0 {
            return Err(Error::InvalidDimension("p must be at least 1".into()));
        }
        cov.validate(p)?;
        let factor = cov.factor(p)?;
        Ok(Self {
            mu1,
            mu2,
            cov,
            factor,
        })
    }

    pub fn p(&self) -> usize {
        self.mu1.len()
    }

    pub fn mu1(&self) -> &[f64] {
        &self.mu1
    }

    pub fn mu2(&self) -> &[f64] {
        &self.mu2
    }

    pub fn cov(&self) -> &CovSpec {
        &self.cov
    }

    pub fn mu_d(&self) -> Vec<f64> {
        self.mu2.iter().zip(&self.mu1).map(|(b, a)| b - a).collect()
    }

    pub fn mu_a(&self) -> Vec<f64> {
        self.mu2
            .iter()
            .zip(&self.mu1)
            .map(|(b, a)| (a + b) / 2.0)
            .collect()
    }

    /// True active set {j : beta_j != 0} with beta = Sigma^{-1} mu_d.
    ///
    /// Under a diagonal covariance this reduces to {j : mu_d_j != 0}; in
    /// general beta is computed numerically and entries below a relative
    /// floor count as zero.
    pub fn true_active_set(&self) -> Result<SupportSet> {
        let mu_d = self.mu_d();
        if let CovSpec::Diagonal(_) = self.cov {
            return Ok((0..self.p()).filter(|&j| mu_d[j] != 0.0).collect());
        }
        let beta = self.cov.solve(&mu_d)?;
        let max_abs = beta.iter().fold(0.0f64, |m, b| m.max(b.abs()));
        let floor = 1e-12 * max_abs;
        Ok((0..self.p()).filter(|&j| beta[j].abs() > floor).collect())
    }
}

/// Identifier for one of the benchmark parameter settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SettingId {
    /// Two active features with differing variances; diagonal covariance.
    I,
    /// Nine active features; diagonal covariance. Uses the variance vector
    /// consistent with the advertised signal strength of 8.73; see
    /// [`make_setting_ii_as_printed`] for the alternative reading.
    Ii,
    /// Equicorrelated covariance (variance 4, covariance 0.8), eleven
    /// active mean-difference entries.
    Iii,
    /// Alternating 5x5 equicorrelated blocks (correlations 0.3 and 0.8).
    Iv,
}

impl SettingId {
    pub fn parse(s: &str) -> Option<SettingId> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "1" => Some(SettingId::I),
            "ii" | "2" => Some(SettingId::Ii),
            "iii" | "3" => Some(SettingId::Iii),
            "iv" | "4" => Some(SettingId::Iv),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SettingId::I => "i",
            SettingId::Ii => "ii",
            SettingId::Iii => "iii",
            SettingId::Iv => "iv",
        }
    }

    /// Whether the setting has a diagonal covariance.
    pub fn is_diagonal(&self) -> bool {
        matches!(self, SettingId::I | SettingId::Ii)
    }
}

/// Constructs the benchmark model for `id` at dimension `p`.
pub fn make_setting(id: SettingId, p: usize) -> Result<GaussianModel> {
    match id {
        SettingId::I => {
            require_dim(p, 2, "setting i")?;
            let mut mu1 = vec![0.0; p];
            let mut mu2 = vec![0.0; p];
            mu1[0] = 1.0;
            mu1[1] = 1.0;
            mu2[0] = 2.0;
            mu2[1] = 2.2;
            let mut vars = vec![1.0; p];
            vars[0] = 1.5 * 1.5;
            vars[1] = 0.75 * 0.75;
            GaussianModel::new(mu1, mu2, CovSpec::Diagonal(vars))
        }
        SettingId::Ii => {
            require_dim(p, 9, "setting ii")?;
            let mut vars = vec![1.0; p];
            for v in vars.iter_mut().take(4) {
                *v = 10.0;
            }
            for v in vars.iter_mut().take(7).skip(4) {
                *v = 2.25;
            }
            for v in vars.iter_mut().take(9).skip(7) {
                *v = 1.5;
            }
            setting_ii_model(p, vars)
        }
        SettingId::Iii => {
            require_dim(p, 11, "setting iii")?;
            let mut mu2 = vec![0.0; p];
            mu2[0] = 1.0;
            for v in mu2.iter_mut().take(6).skip(1) {
                *v = 0.5;
            }
            for v in mu2.iter_mut().take(11).skip(6) {
                *v = 0.1;
            }
            GaussianModel::new(
                vec![0.0; p],
                mu2,
                CovSpec::Equicorrelation {
                    variance: 4.0,
                    covariance: 0.8,
                },
            )
        }
        SettingId::Iv => {
            if p < 10 || p % 5 != 0 {
                return Err(Error::InvalidDimension(format!(
                    "setting iv needs p >= 10 and divisible by 5, got {p}"
                )));
            }
            let mut mu2 = vec![0.0; p];
            mu2[0] = 1.0;
            mu2[5] = 0.1;
            let blocks: Vec<BlockSpec> = (0..p / 5)
                .map(|b| BlockSpec {
                    size: 5,
                    variance: 1.0,
                    covariance: if b % 2 == 0 { 0.3 } else { 0.8 },
                })
                .collect();
            GaussianModel::new(vec![0.0; p], mu2, CovSpec::BlockDiagonal(blocks))
        }
    }
}

/// Setting (ii) with the variances read literally as printed
/// (10, 2.25^2, 1.5^2, 1, ...), which yields a signal strength of 5.29
/// instead of the advertised 8.73. Kept selectable so the discrepancy
/// itself is testable.
pub fn make_setting_ii_as_printed(p: usize) -> Result<GaussianModel> {
    require_dim(p, 9, "setting ii")?;
    let mut vars = vec![1.0; p];
    for v in vars.iter_mut().take(4) {
        *v = 10.0;
    }
    for v in vars.iter_mut().take(7).skip(4) {
        *v = 2.25 * 2.25;
    }
    for v in vars.iter_mut().take(9).skip(7) {
        *v = 1.5 * 1.5;
    }
    setting_ii_model(p, vars)
}

fn setting_ii_model(p: usize, vars: Vec<f64>) -> Result<GaussianModel> {
    let mut mu1 = vec![0.0; p];
    let mut mu2 = vec![0.0; p];
    for v in mu1.iter_mut().take(9) {
        *v = 1.0;
    }
    for v in mu2.iter_mut().take(4) {
        *v = 2.0;
    }
    for v in mu2.iter_mut().take(7).skip(4) {
        *v = 2.5;
    }
    for v in mu2.iter_mut().take(9).skip(7) {
        *v = 3.0;
    }
    GaussianModel::new(mu1, mu2, CovSpec::Diagonal(vars))
}

fn require_dim(p: usize, min: usize, what: &str) -> Result<()> {
    if p < min {
        return Err(Error::InvalidDimension(format!(
            "{what} needs p >= {min}, got {p}"
        )));
    }
    Ok(())
}

/// Streams standard normals from a uniform RNG via Box-Muller.
pub struct NormalSource<R: Rng> {
    rng: R,
    spare: Option<f64>,
}

impl<R: Rng> NormalSource<R> {
    pub fn new(rng: R) -> Self {
        Self { rng, spare: None }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps the log finite
        let u1: f64 = 1.0 - self.rng.gen::<f64>();
        let u2: f64 = self.rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = self.next_normal();
        }
    }
}

/// Draws `n1` rows from class 1 followed by `n2` rows from class 2.
pub fn sample_dataset<R: Rng>(
    model: &GaussianModel,
    n1: usize,
    n2: usize,
    rng: &mut R,
) -> Result<LabeledDataset> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidDimension(
            "both class sizes must be at least 1".into(),
        ));
    }
    let p = model.p();
    let mut source = NormalSource::new(rng);
    let mut rows = Vec::with_capacity(n1 + n2);
    let mut labels = Vec::with_capacity(n1 + n2);
    let mut z = vec![0.0; p];
    for (count, mu, label) in [(n1, &model.mu1, 1u8), (n2, &model.mu2, 2u8)] {
        for _ in 0..count {
            source.fill(&mut z);
            model.factor.colour(&mut z);
            rows.push(z.iter().zip(mu).map(|(e, m)| m + e).collect());
            labels.push(label);
        }
    }
    LabeledDataset::from_rows(rows, labels)
}
