//! Dense symmetric linear algebra: Cholesky factorization, SPD solves,
//! a Moore-Penrose pseudo-inverse via Jacobi eigendecomposition, and
//! structured covariance builders with closed-form fast paths.
//!
//! Everything is dense and row-major; the dimensions in play stay in the
//! low thousands.

use crate::error::{Error, Result};

/// Relative pivot tolerance for declaring a Cholesky factorization degenerate.
pub const CHOLESKY_PIVOT_REL_TOL: f64 = 1e-12;

/// Relative eigenvalue cutoff used by [`pseudo_inverse`] by default.
pub const PSEUDO_INVERSE_REL_TOL: f64 = 1e-10;

const SYMMETRY_REL_TOL: f64 = 1e-12;

/// A dense symmetric matrix, stored row-major in full.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds from a full row-major buffer, checking symmetry to within
    /// 1e-12 relative tolerance.
    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::InvalidDimension(format!(
                "expected {dim}x{dim} buffer, got {} entries",
                data.len()
            )));
        }
        let scale = data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for i in 0..dim {
            for j in (i + 1)..dim {
                if (data[i * dim + j] - data[j * dim + i]).abs() > SYMMETRY_REL_TOL * scale {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::InvalidDimension(format!(
                    "row of length {} in a {dim}x{dim} matrix",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(dim, data)
    }

    /// Builds from the entry generator `f(i, j)`; only `j >= i` is queried.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                data[i * dim + j] = v;
                data[j * dim + i] = v;
            }
        }
        Self { dim, data }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let dim = values.len();
        Self::from_fn(dim, |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.dim).fold(f64::NEG_INFINITY, |m, i| m.max(self.get(i, i)))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| dot(self.row(i), x))
            .collect()
    }

    /// Returns a copy with `ridge` added to every diagonal entry.
    pub fn with_ridge(&self, ridge: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            let v = out.get(i, i);
            out.set(i, i, v + ridge);
        }
        out
    }

    /// Extracts the principal sub-matrix on `indices` (sorted, in range).
    pub fn principal_submatrix(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), |a, b| self.get(indices[a], indices[b]))
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower-triangular Cholesky factor L with L·Lᵀ = A.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    dim: usize,
    lower: Vec<f64>, // row-major, upper part unused
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j <= i {
            self.lower[i * self.dim + j]
        } else {
            0.0
        }
    }

    /// Solves A x = b given the factorization of A.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.dim);
        let n = self.dim;
        // forward: L y = b
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            for j in 0..i {
                s -= self.lower[i * n + j] * y[j];
            }
            y[i] = s / self.lower[i * n + i];
        }
        // backward: Lᵀ x = y
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in (i + 1)..n {
                s -= self.lower[j * n + i] * x[j];
            }
            x[i] = s / self.lower[i * n + i];
        }
        x
    }

    /// Applies L to a vector (used to colour standard normals).
    pub fn matvec_lower(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        let n = self.dim;
        (0..n)
            .map(|i| (0..=i).map(|j| self.lower[i * n + j] * x[j]).sum())
            .collect()
    }

    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.dim;
        SymMatrix::from_fn(n, |i, j| {
            (0..=i.min(j))
                .map(|k| self.lower[i * n + k] * self.lower[j * n + k])
                .sum()
        })
    }
}

/// Cholesky factorization of a symmetric positive definite matrix.
///
/// Fails with [`Error::NotPositiveDefinite`] when a pivot falls at or below
/// `1e-12 * max(diagonal)`.
pub fn cholesky(a: &SymMatrix) -> Result<CholeskyFactor> {
    let n = a.dim();
    let tol = CHOLESKY_PIVOT_REL_TOL * a.max_diagonal().max(0.0);
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= tol {
                    return Err(Error::NotPositiveDefinite { index: i, pivot: s });
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(CholeskyFactor { dim: n, lower: l })
}

/// Solves A x = b for symmetric positive definite A.
pub fn solve_spd(a: &SymMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.len(),
        });
    }
    Ok(cholesky(a)?.solve(b))
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues and eigenvectors; `vectors[k]` is the eigenvector for
/// `values[k]`. Intended for the moderate dimensions this crate works at.
pub fn sym_eigen(a: &SymMatrix) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.dim();
    let mut m = a.data.clone();
    // v starts as identity; columns accumulate the rotations.
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let stop = (1e-15 * frob).max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[p * n + q].abs());
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() <= stop {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // classical two-sided update; only rows/columns p and q move
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    let new_p = c * akp - s * akq;
                    let new_q = s * akp + c * akq;
                    m[k * n + p] = new_p;
                    m[p * n + k] = new_p;
                    m[k * n + q] = new_q;
                    m[q * n + k] = new_q;
                }
                m[p * n + p] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                m[q * n + q] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;

                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let values: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    let vectors: Vec<Vec<f64>> = (0..n)
        .map(|k| (0..n).map(|i| v[i * n + k]).collect())
        .collect();
    (values, vectors)
}

/// Moore-Penrose pseudo-inverse via symmetric eigendecomposition.
///
/// Eigenvalues with magnitude below `rel_tol * max|eigenvalue|` are treated
/// as zero and annihilated.
pub fn pseudo_inverse(a: &SymMatrix, rel_tol: f64) -> SymMatrix {
    let n = a.dim();
    let (values, vectors) = sym_eigen(a);
    let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cutoff = rel_tol * max_abs;
    let inv: Vec<f64> = values
        .iter()
        .map(|&l| if l.abs() > cutoff { 1.0 / l } else { 0.0 })
        .collect();
    SymMatrix::from_fn(n, |i, j| {
        (0..n)
            .map(|k| inv[k] * vectors[k][i] * vectors[k][j])
            .sum()
    })
}

/// Specification of a structured covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum CovSpec {
    /// Independent features with the given per-feature variances.
    Diagonal(Vec<f64>),
    /// Constant variance on the diagonal, constant covariance off it.
    Equicorrelation { variance: f64, covariance: f64 },
    /// Blocks along the diagonal, each equicorrelated; sizes must sum to p.
    BlockDiagonal(Vec<BlockSpec>),
    /// An explicit dense matrix.
    Dense(SymMatrix),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockSpec {
    pub size: usize,
    pub variance: f64,
    pub covariance: f64,
}

impl CovSpec {
    /// Validates the spec against dimension `p`.
    pub fn validate(&self, p: usize) -> Result<()> {
        match self {
            CovSpec::Diagonal(vars) => {
                if vars.len() != p {
                    return Err(Error::InvalidSpec(format!(
                        "{} variances for p = {p}",
                        vars.len()
                    )));
                }
                if let Some(v) = vars.iter().find(|v| **v <= 0.0) {
                    return Err(Error::InvalidSpec(format!("nonpositive variance {v}")));
                }
            }
            CovSpec::Equicorrelation {
                variance,
                covariance,
            } => validate_equicorrelation(*variance, *covariance)?,
            CovSpec::BlockDiagonal(blocks) => {
                let total: usize = blocks.iter().map(|b| b.size).sum();
                if total != p {
                    return Err(Error::InvalidSpec(format!(
                        "block sizes sum to {total}, expected p = {p}"
                    )));
                }
                for b in blocks {
                    if b.size == 0 {
                        return Err(Error::InvalidSpec("empty block".into()));
                    }
                    validate_equicorrelation(b.variance, b.covariance)?;
                }
            }
            CovSpec::Dense(m) => {
                if m.dim() != p {
                    return Err(Error::InvalidSpec(format!(
                        "dense matrix of dim {} for p = {p}",
                        m.dim()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Materializes the spec as a dense matrix.
    pub fn build_cov(&self, p: usize) -> Result<SymMatrix> {
        self.validate(p)?;
        Ok(match self {
            CovSpec::Diagonal(vars) => SymMatrix::diagonal(vars),
            CovSpec::Equicorrelation {
                variance,
                covariance,
            } => {
                let (a, c) = (*variance, *covariance);
                SymMatrix::from_fn(p, |i, j| if i == j { a } else { c })
            }
            CovSpec::BlockDiagonal(blocks) => {
                let mut out = SymMatrix::from_fn(p, |_, _| 0.0);
                let mut offset = 0;
                for b in blocks {
                    for i in 0..b.size {
                        for j in i..b.size {
                            let v = if i == j { b.variance } else { b.covariance };
                            out.set(offset + i, offset + j, v);
                        }
                    }
                    offset += b.size;
                }
                out
            }
            CovSpec::Dense(m) => m.clone(),
        })
    }

    /// Solves Σ x = b using the closed form where one exists.
    ///
    /// The equicorrelated inverse is
    /// (1/(a−c)) [ I − c/(a−c+m·c) · J ] for Σ = (a−c)I + cJ on m features,
    /// valid exactly when both a−c and a−c+m·c are positive.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        match self {
            CovSpec::Diagonal(vars) => {
                if vars.len() != b.len() {
                    return Err(Error::DimensionMismatch {
                        expected: vars.len(),
                        actual: b.len(),
                    });
                }
                Ok(b.iter().zip(vars).map(|(x, v)| x / v).collect())
            }
            CovSpec::Equicorrelation {
                variance,
                covariance,
            } => equicorrelation_solve(*variance, *covariance, b),
            CovSpec::BlockDiagonal(blocks) => {
                let total: usize = blocks.iter().map(|bl| bl.size).sum();
                if total != b.len() {
                    return Err(Error::DimensionMismatch {
                        expected: total,
                        actual: b.len(),
                    });
                }
                let mut out = Vec::with_capacity(b.len());
                let mut offset = 0;
                for bl in blocks {
                    let piece =
                        equicorrelation_solve(bl.variance, bl.covariance, &b[offset..offset + bl.size])?;
                    out.extend(piece);
                    offset += bl.size;
                }
                Ok(out)
            }
            CovSpec::Dense(m) => solve_spd(m, b),
        }
    }

    /// Computes Σ x.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            CovSpec::Diagonal(vars) => {
                if vars.len() != x.len() {
                    return Err(Error::DimensionMismatch {
                        expected: vars.len(),
                        actual: x.len(),
                    });
                }
                Ok(x.iter().zip(vars).map(|(v, s)| v * s).collect())
            }
            CovSpec::Equicorrelation {
                variance,
                covariance,
            } => Ok(equicorrelation_matvec(*variance, *covariance, x)),
            CovSpec::BlockDiagonal(blocks) => {
                let total: usize = blocks.iter().map(|bl| bl.size).sum();
                if total != x.len() {
                    return Err(Error::DimensionMismatch {
                        expected: total,
                        actual: x.len(),
                    });
                }
                let mut out = Vec::with_capacity(x.len());
                let mut offset = 0;
                for bl in blocks {
                    out.extend(equicorrelation_matvec(
                        bl.variance,
                        bl.covariance,
                        &x[offset..offset + bl.size],
                    ));
                    offset += bl.size;
                }
                Ok(out)
            }
            CovSpec::Dense(m) => {
                if m.dim() != x.len() {
                    return Err(Error::DimensionMismatch {
                        expected: m.dim(),
                        actual: x.len(),
                    });
                }
                Ok(m.matvec(x))
            }
        }
    }

    /// Quadratic form vᵀ Σ⁻¹ v through [`CovSpec::solve`].
    pub fn quad_form_inv(&self, v: &[f64]) -> Result<f64> {
        Ok(dot(v, &self.solve(v)?))
    }

    /// Prepares a sampling factor F with F Fᵀ = Σ.
    pub fn factor(&self, p: usize) -> Result<CovFactor> {
        self.validate(p)?;
        Ok(match self {
            CovSpec::Diagonal(vars) => CovFactor::Scale(vars.iter().map(|v| v.sqrt()).collect()),
            CovSpec::Equicorrelation { .. } | CovSpec::Dense(_) => {
                CovFactor::Lower(cholesky(&self.build_cov(p)?)?)
            }
            CovSpec::BlockDiagonal(blocks) => {
                let mut factors = Vec::with_capacity(blocks.len());
                for b in blocks {
                    let m = SymMatrix::from_fn(b.size, |i, j| {
                        if i == j {
                            b.variance
                        } else {
                            b.covariance
                        }
                    });
                    factors.push((b.size, cholesky(&m)?));
                }
                CovFactor::Blocks(factors)
            }
        })
    }
}

fn validate_equicorrelation(variance: f64, covariance: f64) -> Result<()> {
    if variance <= 0.0 {
        return Err(Error::InvalidSpec(format!("nonpositive variance {variance}")));
    }
    if covariance.abs() >= variance {
        return Err(Error::InvalidSpec(format!(
            "|covariance| {} must stay below the variance {}",
            covariance.abs(),
            variance
        )));
    }
    Ok(())
}

fn equicorrelation_solve(a: f64, c: f64, b: &[f64]) -> Result<Vec<f64>> {
    let m = b.len() as f64;
    let base = a - c;
    let denom = base + m * c;
    if base <= 0.0 || denom <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            index: 0,
            pivot: base.min(denom),
        });
    }
    let total: f64 = b.iter().sum();
    let shift = c * total / denom;
    Ok(b.iter().map(|x| (x - shift) / base).collect())
}

fn equicorrelation_matvec(a: f64, c: f64, x: &[f64]) -> Vec<f64> {
    let total: f64 = x.iter().sum();
    x.iter().map(|v| (a - c) * v + c * total).collect()
}

/// A sampling factor for a covariance spec.
#[derive(Debug, Clone)]
pub enum CovFactor {
    /// Per-feature standard deviations (diagonal Σ).
    Scale(Vec<f64>),
    /// Dense lower-triangular factor.
    Lower(CholeskyFactor),
    /// Per-block lower factors.
    Blocks(Vec<(usize, CholeskyFactor)>),
}

impl CovFactor {
    /// Transforms a vector of independent standard normals in place.
    pub fn colour(&self, z: &mut [f64]) {
        match self {
            CovFactor::Scale(sd) => {
                for (v, s) in z.iter_mut().zip(sd) {
                    *v *= s;
                }
            }
            CovFactor::Lower(l) => {
                let out = l.matvec_lower(z);
                z.copy_from_slice(&out);
            }
            CovFactor::Blocks(blocks) => {
                let mut offset = 0;
                for (size, l) in blocks {
                    let out = l.matvec_lower(&z[offset..offset + size]);
                    z[offset..offset + size].copy_from_slice(&out);
                    offset += size;
                }
            }
        }
    }
}
