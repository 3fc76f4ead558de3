//! Dense complex linear algebra on `B(C^n)`: self-adjoint operators,
//! projections and their lattice operations, eigenstructure and spectral
//! families.
//!
//! Every comparison between matrices is made in the operator (spectral)
//! norm against an absolute tolerance `eps`, which defaults to
//! [`DEFAULT_TOL`].

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A self-adjoint `n x n` complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Validates self-adjointness (relative to `max(1, ||m||)`) and stores the
    /// exactly symmetrized matrix.
    pub fn new(matrix: CMatrix, eps: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::Parse("operator dimension must be positive".into()));
        }
        let asymmetry = spectral_norm(&(&matrix - matrix.adjoint()));
        let scale = spectral_norm(&matrix).max(1.0);
        if asymmetry > eps * scale {
            return Err(Error::NotHermitian { asymmetry });
        }
        Ok(Self::symmetrized(matrix))
    }

    pub(crate) fn symmetrized(matrix: CMatrix) -> Self {
        let h = (&matrix + matrix.adjoint()).map(|z| z * 0.5);
        Self { matrix: h }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let matrix = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self { matrix }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    pub fn scalar(n: usize, a: f64) -> Self {
        Self::from_real_diagonal(&vec![a; n])
    }

    /// `sum_i c_i * P_i`.
    pub fn linear_combination(dim: usize, terms: &[(f64, &Projection)]) -> Result<Self> {
        let mut m = CMatrix::zeros(dim, dim);
        for (c, p) in terms {
            check_dims(dim, p.dim())?;
            m += p.matrix().map(|z| z * *c);
        }
        Ok(Self::symmetrized(m))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn distance(&self, other: &Self) -> f64 {
        spectral_norm(&(&self.matrix - &other.matrix))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim() && self.distance(other) <= tol
    }

    /// `<psi|A|psi>` for an arbitrary (not necessarily normalized) vector.
    pub fn quadratic_form(&self, psi: &CVector) -> Result<f64> {
        check_dims(self.dim(), psi.len())?;
        Ok((psi.adjoint() * &self.matrix * psi)[(0, 0)].re)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn eigenstructure(&self, eps: f64) -> EigenStructure {
        eigenstructure(self, eps)
    }

    pub fn spectral_family(&self, eps: f64) -> SpectralFamily {
        spectral_family(self, eps)
    }
}

impl fmt::Display for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .map(|j| format_complex(self.matrix[(i, j)]))
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn format_complex(z: Complex64) -> String {
    let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    if im == 0.0 {
        format!("{re:.6}")
    } else {
        format!("{re:.6}{im:+.6}i")
    }
}

/// An orthogonal projection. Stored in canonical form: rebuilt from the
/// eigenvectors of its eigenvalue-one eigenspace, so chained lattice
/// operations do not accumulate drift.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    op: HermitianOperator,
    rank: usize,
}

impl Projection {
    pub fn new(matrix: CMatrix, eps: f64) -> Result<Self> {
        let op = HermitianOperator::new(matrix, eps)?;
        let m = op.matrix();
        let defect = spectral_norm(&(m * m - m));
        if defect > eps {
            return Err(Error::NotAProjection { defect });
        }
        Ok(Self::canonicalize(op.matrix))
    }

    /// Re-projects the eigenvalues of a Hermitian, nearly idempotent matrix
    /// onto `{0, 1}`.
    pub(crate) fn canonicalize(matrix: CMatrix) -> Self {
        let n = matrix.nrows();
        let h = HermitianOperator::symmetrized(matrix);
        let eig = SymmetricEigen::new(h.matrix);
        let cols: Vec<CVector> = (0..n)
            .filter(|&i| eig.eigenvalues[i] > 0.5)
            .map(|i| eig.eigenvectors.column(i).into_owned())
            .collect();
        Self::from_orthonormal(n, &cols)
    }

    fn from_orthonormal(dim: usize, cols: &[CVector]) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        for v in cols {
            m += outer(v);
        }
        Self {
            op: HermitianOperator::symmetrized(m),
            rank: cols.len(),
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            op: HermitianOperator::scalar(n, 0.0),
            rank: 0,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            op: HermitianOperator::identity(n),
            rank: n,
        }
    }

    /// Diagonal projection with ones where `mask` is true.
    pub fn diagonal(mask: &[bool]) -> Self {
        let diag: Vec<f64> = mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        Self {
            rank: mask.iter().filter(|&&b| b).count(),
            op: HermitianOperator::from_real_diagonal(&diag),
        }
    }

    /// Rank-one projection onto the `i`-th standard basis vector of `C^n`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut mask = vec![false; n];
        mask[i] = true;
        Self::diagonal(&mask)
    }

    /// Rank-one projection onto the ray through `v`.
    pub fn onto_vector(v: &CVector) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        let u = v.map(|z| z / norm);
        Ok(Self::from_orthonormal(v.len(), &[u]))
    }

    /// Projection onto the span of the given vectors.
    pub fn onto_span(dim: usize, vectors: &[CVector]) -> Result<Self> {
        if vectors.is_empty() {
            return Ok(Self::zero(dim));
        }
        for v in vectors {
            check_dims(dim, v.len())?;
        }
        let m = CMatrix::from_columns(vectors);
        let svd = m.svd(true, false);
        let u = svd
            .u
            .ok_or_else(|| Error::InternalInvariantViolation("SVD without U".into()))?;
        let smax = svd.singular_values.max();
        let cols: Vec<CVector> = (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] > 1e-12 * smax.max(1.0))
            .map(|i| u.column(i).into_owned())
            .collect();
        Ok(Self::from_orthonormal(dim, &cols))
    }

    /// Sum of pairwise-orthogonal projections, canonicalized.
    pub fn orthogonal_sum<'a, I>(dim: usize, parts: I) -> Self
    where
        I: IntoIterator<Item = &'a Projection>,
    {
        let mut m = CMatrix::zeros(dim, dim);
        let mut any = false;
        for p in parts {
            m += p.matrix();
            any = true;
        }
        if !any {
            return Self::zero(dim);
        }
        Self::canonicalize(m)
    }

    pub fn complement(&self) -> Self {
        let n = self.dim();
        Self {
            op: HermitianOperator::symmetrized(CMatrix::identity(n, n) - self.matrix()),
            rank: n - self.rank,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn as_operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0
    }

    pub fn is_identity(&self) -> bool {
        self.rank == self.dim()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rank == other.rank && self.op.approx_eq(&other.op, tol)
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.op.fmt(f)
    }
}

/// Distinct eigenvalues (ascending) with their eigenprojections.
#[derive(Clone, Debug)]
pub struct EigenStructure {
    pub eigenvalues: Vec<f64>,
    pub eigenprojections: Vec<Projection>,
}

impl EigenStructure {
    pub fn reconstruct(&self) -> HermitianOperator {
        let dim = self.eigenprojections[0].dim();
        let terms: Vec<(f64, &Projection)> = self
            .eigenvalues
            .iter()
            .copied()
            .zip(self.eigenprojections.iter())
            .collect();
        HermitianOperator::linear_combination(dim, &terms).expect("eigenprojections share dim")
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// Whether `x` is one of the eigenvalues within `tol`.
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.eigenvalues.iter().any(|a| (a - x).abs() <= tol)
    }
}

/// Spectral decomposition with eigenvalues closer than `eps` merged into one
/// eigenspace. The merged eigenvalue is the cluster mean.
pub fn eigenstructure(a: &HermitianOperator, eps: f64) -> EigenStructure {
    let n = a.dim();
    let eig = SymmetricEigen::new(a.matrix().clone());
    let mut pairs: Vec<(f64, CVector)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned()))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut clusters: Vec<Vec<(f64, CVector)>> = Vec::new();
    for (val, vec) in pairs {
        match clusters.last_mut() {
            Some(c) if val - c.last().expect("non-empty cluster").0 <= eps => c.push((val, vec)),
            _ => clusters.push(vec![(val, vec)]),
        }
    }

    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut eigenprojections = Vec::with_capacity(clusters.len());
    for c in clusters {
        let mean = c.iter().map(|(v, _)| v).sum::<f64>() / c.len() as f64;
        let vecs: Vec<CVector> = c.into_iter().map(|(_, v)| v).collect();
        eigenvalues.push(mean);
        eigenprojections.push(Projection::from_orthonormal(n, &vecs));
    }
    EigenStructure {
        eigenvalues,
        eigenprojections,
    }
}

/// `P <= Q` in the projection lattice, i.e. `range(P)` is contained in `range(Q)`.
pub fn proj_leq(p: &Projection, q: &Projection, eps: f64) -> Result<bool> {
    check_dims(p.dim(), q.dim())?;
    Ok(spectral_norm(&(q.matrix() * p.matrix() - p.matrix())) <= eps)
}

/// Projection onto `range(P) ∩ range(Q)`: the eigenvalue-2 eigenspace of `P + Q`.
pub fn proj_meet(p: &Projection, q: &Projection, eps: f64) -> Result<Projection> {
    check_dims(p.dim(), q.dim())?;
    Ok(eigenspace_where(p.matrix() + q.matrix(), |x| x >= 2.0 - eps))
}

/// Projection onto the closed span of `range(P) ∪ range(Q)`: the support of `P + Q`.
pub fn proj_join(p: &Projection, q: &Projection, eps: f64) -> Result<Projection> {
    check_dims(p.dim(), q.dim())?;
    Ok(eigenspace_where(p.matrix() + q.matrix(), |x| x > eps))
}

fn eigenspace_where(m: CMatrix, keep: impl Fn(f64) -> bool) -> Projection {
    let n = m.nrows();
    let eig = SymmetricEigen::new(HermitianOperator::symmetrized(m).matrix);
    let cols: Vec<CVector> = (0..n)
        .filter(|&i| keep(eig.eigenvalues[i]))
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    Projection::from_orthonormal(n, &cols)
}

/// Right-continuous step function `r -> E_r` of projections.
///
/// `steps[i]` is `E_r` for `thresholds[i] <= r < thresholds[i + 1]`; below the
/// first threshold `E_r = 0`, from the last threshold on `E_r = 1`.
#[derive(Clone, Debug)]
pub struct SpectralFamily {
    thresholds: Vec<f64>,
    steps: Vec<Projection>,
}

impl SpectralFamily {
    pub fn new(thresholds: Vec<f64>, steps: Vec<Projection>, eps: f64) -> Result<Self> {
        if thresholds.is_empty() || thresholds.len() != steps.len() {
            return Err(Error::InvalidFamily(format!(
                "{} thresholds for {} steps",
                thresholds.len(),
                steps.len()
            )));
        }
        if thresholds.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidFamily("thresholds must be strictly increasing".into()));
        }
        let dim = steps[0].dim();
        for s in &steps {
            check_dims(dim, s.dim())?;
        }
        if steps[0].is_zero() {
            return Err(Error::InvalidFamily("first step is the zero projection".into()));
        }
        for w in steps.windows(2) {
            if !proj_leq(&w[0], &w[1], eps)? || w[0].rank() >= w[1].rank() {
                return Err(Error::InvalidFamily("steps must be strictly increasing".into()));
            }
        }
        if !steps.last().expect("non-empty").is_identity() {
            return Err(Error::InvalidFamily("last step must be the identity".into()));
        }
        Ok(Self { thresholds, steps })
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn steps(&self) -> &[Projection] {
        &self.steps
    }

    pub fn dim(&self) -> usize {
        self.steps[0].dim()
    }

    /// Index of the step in force at `r`, `None` below the first threshold.
    pub fn step_index(&self, r: f64) -> Option<usize> {
        self.thresholds.iter().rposition(|&t| t <= r)
    }

    pub fn at(&self, r: f64) -> Projection {
        match self.step_index(r) {
            Some(i) => self.steps[i].clone(),
            None => Projection::zero(self.dim()),
        }
    }
}

pub fn spectral_family(a: &HermitianOperator, eps: f64) -> SpectralFamily {
    let es = eigenstructure(a, eps);
    let n = a.dim();
    let mut steps = Vec::with_capacity(es.eigenvalues.len());
    for i in 0..es.eigenvalues.len() {
        steps.push(Projection::orthogonal_sum(n, &es.eigenprojections[..=i]));
    }
    SpectralFamily {
        thresholds: es.eigenvalues,
        steps,
    }
}

/// `A = sum_i t_i (E_{t_i} - E_{t_{i-1}})`.
pub fn from_spectral_family(sf: &SpectralFamily) -> HermitianOperator {
    let n = sf.dim();
    let mut m = CMatrix::zeros(n, n);
    let mut prev = CMatrix::zeros(n, n);
    for (t, step) in sf.thresholds.iter().zip(&sf.steps) {
        m += (step.matrix() - &prev).map(|z| z * *t);
        prev = step.matrix().clone();
    }
    HermitianOperator::symmetrized(m)
}
