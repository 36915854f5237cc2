//! Dense operator algebra on finite-dimensional Hilbert spaces.
//!
//! Everything is stored as complex `faer` matrices. Operators whose entries
//! are exactly real (the radar scenario, every diagonal example) are routed
//! through the real symmetric eigensolver, which is about four times faster
//! and produces identical spectra.

use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};
use std::sync::{Arc, OnceLock};

use faer::{c64, Mat, MatRef, Side};

use crate::{Error, Result};

const NORMALIZATION_TOLERANCE: f64 = 1e-10;
const DENSITY_TOLERANCE: f64 = 1e-10;
const PHASE_THRESHOLD: f64 = 1e-10;

// ---------------------------------------------------------------------------
// State vectors
// ---------------------------------------------------------------------------

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<c64>,
}

impl StateVector {
    /// Normalizes `amplitudes`. Fails on an empty or zero vector.
    pub fn new(amplitudes: Vec<c64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("state vector must be nonempty".into()));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidState(format!("cannot normalize vector of norm {norm}")));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| c64::new(a, 0.0)).collect())
    }

    /// Computational basis vector `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::ShapeMismatch(format!("basis index {index} out of range for dimension {dim}")));
        }
        let mut amplitudes = vec![c64::new(0.0, 0.0); dim];
        amplitudes[index] = c64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[c64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &StateVector) -> Result<c64> {
        if self.dim() != other.dim() {
            return Err(shape(format!("inner product of dimensions {} and {}", self.dim(), other.dim())));
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let amplitudes = self.amplitudes.iter().flat_map(|a| other.amplitudes.iter().map(move |b| a * b)).collect();
        StateVector { amplitudes }
    }

    pub(crate) fn from_normalized(amplitudes: Vec<c64>) -> Self {
        debug_assert!((amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs() < NORMALIZATION_TOLERANCE);
        Self { amplitudes }
    }
}

// ---------------------------------------------------------------------------
// Hermitian operators
// ---------------------------------------------------------------------------

/// A square complex matrix equal to its conjugate transpose.
///
/// Inputs are symmetrized as `(A + A†)/2` on construction.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    mat: Mat<c64>,
}

impl PartialEq for HermitianOperator {
    fn eq(&self, other: &Self) -> bool {
        self.mat == other.mat
    }
}

impl HermitianOperator {
    pub fn from_mat(mat: Mat<c64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(shape(format!("operator must be square and nonempty, got {}x{}", mat.nrows(), mat.ncols())));
        }
        Ok(Self::symmetrized(mat.as_ref()))
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> c64) -> Self {
        Self::symmetrized(Mat::from_fn(dim, dim, f).as_ref())
    }

    /// Real matrix given row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(shape("rows must form a nonempty square matrix".into()));
        }
        Ok(Self::from_fn(dim, |i, j| c64::new(rows[i][j], 0.0)))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let dim = values.len();
        Self { mat: Mat::from_fn(dim, dim, |i, j| if i == j { c64::new(values[i], 0.0) } else { c64::new(0.0, 0.0) }) }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn zeros(dim: usize) -> Self {
        Self { mat: Mat::zeros(dim, dim) }
    }

    /// `|v><v|`.
    pub fn projector(v: &StateVector) -> Self {
        let a = v.amplitudes();
        Self { mat: Mat::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj()) }
    }

    fn symmetrized(m: MatRef<'_, c64>) -> Self {
        let n = m.nrows();
        Self { mat: Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5) }
    }

    /// Wraps a matrix that is Hermitian by construction (Kronecker products,
    /// sums of Hermitian operators).
    pub(crate) fn from_exact(mat: Mat<c64>) -> Self {
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.mat[(i, j)]
    }

    pub fn as_mat(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }

    pub fn diagonal_values(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).collect()
    }

    /// True when every entry has an exactly zero imaginary part.
    pub fn is_real(&self) -> bool {
        is_real(self.mat.as_ref())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { mat: Mat::from_fn(self.dim(), self.dim(), |i, j| self.mat[(i, j)] * s) }
    }

    /// `Tr(self · other)`, real for Hermitian arguments.
    pub fn trace_product(&self, other: &HermitianOperator) -> Result<f64> {
        self.check_same_dim(other, "trace product")?;
        let n = self.dim();
        let mut acc = 0.0;
        for j in 0..n {
            for i in 0..n {
                // Tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij)
                let a = self.mat[(i, j)];
                let b = other.mat[(i, j)];
                acc += a.re * b.re + a.im * b.im;
            }
        }
        Ok(acc)
    }

    /// `<v|self|v>`.
    pub fn expectation(&self, v: &StateVector) -> Result<f64> {
        if v.dim() != self.dim() {
            return Err(shape(format!("vector of dimension {} against operator of dimension {}", v.dim(), self.dim())));
        }
        let a = v.amplitudes();
        let mut acc = c64::new(0.0, 0.0);
        for (j, aj) in a.iter().enumerate() {
            let col: c64 = a.iter().enumerate().map(|(i, ai)| ai.conj() * self.mat[(i, j)]).sum();
            acc += col * aj;
        }
        Ok(acc.re)
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &HermitianOperator) -> Result<f64> {
        self.check_same_dim(other, "comparison")?;
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                worst = worst.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        Ok(worst)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm_l2()
    }

    /// Matrix product, which is Hermitian only when the factors commute.
    pub fn product(&self, other: &HermitianOperator) -> Result<Mat<c64>> {
        self.check_same_dim(other, "product")?;
        Ok(matmul(self.mat.as_ref(), other.mat.as_ref()))
    }

    /// `U self U†` for a unitary (or any square) `u`.
    pub fn conjugate_by(&self, u: MatRef<'_, c64>) -> Result<HermitianOperator> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(shape("conjugating matrix must match operator dimension".into()));
        }
        let left = matmul(u, self.mat.as_ref());
        Ok(Self::symmetrized(matmul_adj(left.as_ref(), u).as_ref()))
    }

    pub(crate) fn check_same_dim(&self, other: &HermitianOperator, what: &str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(shape(format!("{what}: dimensions {} and {} differ", self.dim(), other.dim())));
        }
        Ok(())
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;

    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        HermitianOperator::from_exact(&self.mat + &rhs.mat)
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;

    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimensions differ");
        HermitianOperator::from_exact(&self.mat - &rhs.mat)
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;

    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scaled(rhs)
    }
}

// ---------------------------------------------------------------------------
// Spectral decomposition
// ---------------------------------------------------------------------------

/// Eigenvalues sorted descending with matching orthonormal eigenvector columns.
///
/// Each eigenvector's first amplitude above 1e-10 in modulus is rotated to be
/// real and positive. Exactly equal eigenvalues are ordered by comparing
/// their eigenvectors lexicographically, larger first.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Arc<Mat<c64>>,
}

impl SpectralDecomposition {
    pub(crate) fn new_sorted(eigenvalues: Vec<f64>, mut vectors: Mat<c64>) -> Self {
        fix_phases(&mut vectors);
        let n = eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eigenvalues[b].total_cmp(&eigenvalues[a]).then_with(|| compare_columns(vectors.as_ref(), b, a))
        });
        if order.iter().enumerate().all(|(i, &o)| i == o) {
            return Self { eigenvalues, eigenvectors: Arc::new(vectors) };
        }
        let sorted_values = order.iter().map(|&o| eigenvalues[o]).collect();
        let sorted_vectors = Mat::from_fn(vectors.nrows(), n, |i, j| vectors[(i, order[j])]);
        Self { eigenvalues: sorted_values, eigenvectors: Arc::new(sorted_vectors) }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvectors as matrix columns.
    pub fn eigenvectors(&self) -> MatRef<'_, c64> {
        self.eigenvectors.as_ref().as_ref()
    }

    pub fn eigenvector(&self, j: usize) -> StateVector {
        StateVector::from_normalized(self.eigenvectors.col(j).iter().copied().collect())
    }

    /// `sum_j lambda_j |v_j><v_j|`.
    pub fn reconstruct(&self) -> HermitianOperator {
        self.map(|x| x)
    }

    /// `sum_j f(lambda_j) |v_j><v_j|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        weighted_projection_sum(self.eigenvectors(), &weights)
    }

    /// Same eigenvectors, new eigenvalues. Caller keeps the descending order.
    pub(crate) fn with_eigenvalues(&self, eigenvalues: Vec<f64>) -> Self {
        debug_assert_eq!(eigenvalues.len(), self.eigenvalues.len());
        Self { eigenvalues, eigenvectors: Arc::clone(&self.eigenvectors) }
    }

    /// Largest deviation of the eigenvector Gram matrix from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let v = self.eigenvectors();
        let gram = adj_matmul(v, v);
        let n = gram.nrows();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - c64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// Spectrum of the n-fold Kronecker power of the decomposed operator.
    pub(crate) fn kronecker_power(&self, n: usize) -> Self {
        self.kronecker_combined(n, 1.0, |acc, x| acc * x)
    }

    /// Spectrum of `sum_i I ⊗ .. ⊗ A ⊗ .. ⊗ I` over `n` slots.
    pub(crate) fn kronecker_sum(&self, n: usize) -> Self {
        self.kronecker_combined(n, 0.0, |acc, x| acc + x)
    }

    fn kronecker_combined(&self, n: usize, unit: f64, combine: impl Fn(f64, f64) -> f64) -> Self {
        let d = self.dim();
        let total = d.pow(n as u32);
        let mut values = vec![unit; total];
        let mut vectors = Mat::<c64>::from_fn(total, total, |_, _| c64::new(1.0, 0.0));
        let base = self.eigenvectors();
        // column index J = (j_1..j_n), row index I = (i_1..i_n), both most-significant first
        for (col, value) in values.iter_mut().enumerate() {
            let mut rem = col;
            for _ in 0..n {
                *value = combine(*value, self.eigenvalues[rem % d]);
                rem /= d;
            }
        }
        for col in 0..total {
            for row in 0..total {
                let (mut r, mut c) = (row, col);
                let mut amp = c64::new(1.0, 0.0);
                for _ in 0..n {
                    amp *= base[(r % d, c % d)];
                    r /= d;
                    c /= d;
                }
                vectors[(row, col)] = amp;
            }
        }
        Self::new_sorted(values, vectors)
    }
}

fn fix_phases(vectors: &mut Mat<c64>) {
    for j in 0..vectors.ncols() {
        let lead = (0..vectors.nrows()).map(|i| vectors[(i, j)]).find(|a| a.norm() > PHASE_THRESHOLD);
        if let Some(a) = lead {
            let phase = a.conj() / a.norm();
            if (phase - c64::new(1.0, 0.0)).norm() > 0.0 {
                for i in 0..vectors.nrows() {
                    vectors[(i, j)] *= phase;
                }
            }
        }
    }
}

fn compare_columns(m: MatRef<'_, c64>, a: usize, b: usize) -> Ordering {
    for i in 0..m.nrows() {
        let (x, y) = (m[(i, a)], m[(i, b)]);
        let ord = x.re.total_cmp(&y.re).then_with(|| x.im.total_cmp(&y.im));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

// ---------------------------------------------------------------------------
// Density operators
// ---------------------------------------------------------------------------

/// Hermitian, positive semidefinite, unit trace.
///
/// The spectrum is computed on first use and cached. Tensor powers and
/// attacker best responses populate it from structure they already know.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    op: HermitianOperator,
    spectrum: OnceLock<SpectralDecomposition>,
    power_of: Option<(Arc<SpectralDecomposition>, usize)>,
}

impl DensityOperator {
    /// Validates trace and positivity. Eigenvalues in `[-1e-10, 0)` are clamped
    /// to zero and the result renormalized.
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > DENSITY_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        let spectrum = eig_hermitian(&op)?;
        let min = spectrum.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -DENSITY_TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        if min < 0.0 {
            let clamped: Vec<f64> = spectrum.eigenvalues().iter().map(|&x| x.max(0.0)).collect();
            let total: f64 = clamped.iter().sum();
            let clamped: Vec<f64> = clamped.into_iter().map(|x| x / total).collect();
            let spectrum = spectrum.with_eigenvalues(clamped);
            return Ok(Self::from_spectrum(spectrum));
        }
        Ok(Self::with_spectrum(op, spectrum))
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        if probabilities.iter().any(|&p| !(p >= -DENSITY_TOLERANCE)) {
            return Err(Error::InvalidState("diagonal entries must be nonnegative".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > DENSITY_TOLERANCE {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        let p: Vec<f64> = probabilities.iter().map(|&x| x.max(0.0)).collect();
        Ok(Self::trusted(HermitianOperator::diagonal(&p)))
    }

    pub fn pure(v: &StateVector) -> Self {
        Self::trusted(HermitianOperator::projector(v))
    }

    /// Convex combination `sum_i w_i rho_i`.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(Error::InvalidState("empty mixture".into()));
        };
        let dim = first.dim();
        if parts.iter().any(|(w, _)| !(*w >= 0.0)) {
            return Err(Error::InvalidState("mixture weights must be nonnegative".into()));
        }
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > DENSITY_TOLERANCE {
            return Err(Error::InvalidState(format!("mixture weights sum to {total}")));
        }
        let mut acc = HermitianOperator::zeros(dim);
        for (w, rho) in parts {
            if rho.dim() != dim {
                return Err(shape("mixture components differ in dimension".into()));
            }
            acc = &acc + &rho.op.scaled(*w);
        }
        Ok(Self::trusted(acc))
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::trusted(HermitianOperator::diagonal(&vec![1.0 / dim as f64; dim]))
    }

    pub(crate) fn trusted(op: HermitianOperator) -> Self {
        Self { op, spectrum: OnceLock::new(), power_of: None }
    }

    pub(crate) fn with_spectrum(op: HermitianOperator, spectrum: SpectralDecomposition) -> Self {
        let cell = OnceLock::new();
        let _ = cell.set(spectrum);
        Self { op, spectrum: cell, power_of: None }
    }

    /// Rebuilds the matrix from a spectrum of nonnegative weights summing to one.
    pub(crate) fn from_spectrum(spectrum: SpectralDecomposition) -> Self {
        let op = spectrum.reconstruct();
        Self::with_spectrum(op, spectrum)
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.op
    }

    pub fn spectrum(&self) -> Result<&SpectralDecomposition> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let computed = match &self.power_of {
            Some((base, n)) => base.kronecker_power(*n),
            None => eig_hermitian(&self.op)?,
        };
        Ok(self.spectrum.get_or_init(|| computed))
    }

    /// `rho^{⊗n}`; the spectrum is assembled from the single-copy one on demand.
    pub fn tensor_power(&self, n: usize, cap: usize) -> Result<Self> {
        let op = tensor_power(&self.op, n, cap)?;
        if n == 1 {
            return Ok(self.clone());
        }
        let base = Arc::new(self.spectrum()?.clone());
        Ok(Self { op, spectrum: OnceLock::new(), power_of: Some((base, n)) })
    }

    pub fn tensor(&self, other: &DensityOperator) -> Self {
        Self::trusted(tensor_product(&self.op, &other.op))
    }

    /// `Tr(effect · rho)`.
    pub fn expectation_of(&self, effect: &HermitianOperator) -> Result<f64> {
        self.op.trace_product(effect)
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    HermitianOperator::from_exact(kron(a.as_mat(), b.as_mat()))
}

/// n-fold Kronecker power. Fails when `dim^n` exceeds `cap`.
pub fn tensor_power(a: &HermitianOperator, n: usize, cap: usize) -> Result<HermitianOperator> {
    if n == 0 {
        return Err(Error::DomainError("tensor power requires n >= 1".into()));
    }
    check_cap(a.dim(), n, cap)?;
    let mut acc = a.clone();
    for _ in 1..n {
        acc = tensor_product(&acc, a);
    }
    Ok(acc)
}

/// Returns `d^n` or `DimensionCapExceeded`.
pub fn check_cap(d: usize, n: usize, cap: usize) -> Result<usize> {
    let dim = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if dim > cap as u128 {
        return Err(Error::DimensionCapExceeded { base: d, copies: n, dim, cap });
    }
    Ok(dim as usize)
}

/// `sum_i I ⊗ .. ⊗ a (slot i) ⊗ .. ⊗ I` over `n` slots.
pub fn kronecker_sum(a: &HermitianOperator, n: usize, cap: usize) -> Result<HermitianOperator> {
    if n == 0 {
        return Err(Error::DomainError("kronecker sum requires n >= 1".into()));
    }
    let d = a.dim();
    let total = check_cap(d, n, cap)?;
    let mut out = Mat::<c64>::zeros(total, total);
    let mut stride = 1;
    for _ in 0..n {
        // slot with digit weight `stride`
        for row in 0..total {
            let digit = (row / stride) % d;
            let base = row - digit * stride;
            for c in 0..d {
                let v = a.get(digit, c);
                if v.re != 0.0 || v.im != 0.0 {
                    out[(row, base + c * stride)] += v;
                }
            }
        }
        stride *= d;
    }
    Ok(HermitianOperator::from_exact(out))
}

/// Traces out every factor not listed in `keep`. Factors are ordered most
/// significant first, matching `tensor_product`.
pub fn partial_trace(a: &HermitianOperator, dims: &[usize], keep: &[usize]) -> Result<HermitianOperator> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != a.dim() {
        return Err(shape(format!("factor dimensions {dims:?} do not multiply to {}", a.dim())));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(shape(format!("keep index {bad} out of range for {} factors", dims.len())));
    }
    let kept_dim: usize = keep.iter().map(|&k| dims[k]).product();
    let traced_dim = total / kept_dim;

    // split every full index into (kept index, traced index)
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(kept_dim); traced_dim];
    for full in 0..total {
        let (mut kept, mut traced) = (0usize, 0usize);
        let mut rem = full;
        let mut digits = vec![0usize; dims.len()];
        for f in (0..dims.len()).rev() {
            digits[f] = rem % dims[f];
            rem /= dims[f];
        }
        for (f, &digit) in digits.iter().enumerate() {
            if keep.binary_search(&f).is_ok() {
                kept = kept * dims[f] + digit;
            } else {
                traced = traced * dims[f] + digit;
            }
        }
        groups[traced].push((kept, full));
    }

    let m = a.as_mat();
    let mut out = Mat::<c64>::zeros(kept_dim, kept_dim);
    for group in &groups {
        for &(k1, f1) in group {
            for &(k2, f2) in group {
                out[(k1, k2)] += m[(f1, f2)];
            }
        }
    }
    Ok(HermitianOperator::from_exact(out))
}

/// Hermitian eigendecomposition, eigenvalues descending.
pub fn eig_hermitian(a: &HermitianOperator) -> Result<SpectralDecomposition> {
    let (values, vectors) = eig_raw(a.as_mat())?;
    Ok(SpectralDecomposition::new_sorted(values, vectors))
}

/// Eigenvalues only, descending.
pub fn eigenvalues_hermitian(a: &HermitianOperator) -> Result<Vec<f64>> {
    let m = a.as_mat();
    let fail = || Error::ConvergenceFailure { dim: m.nrows(), norm: m.norm_l2() };
    let mut values = if is_real(m) {
        to_real(m).self_adjoint_eigenvalues(Side::Lower).map_err(|_| fail())?
    } else {
        m.self_adjoint_eigenvalues(Side::Lower).map_err(|_| fail())?
    };
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// `f` applied to the spectrum of `a`.
pub fn matrix_function(a: &HermitianOperator, f: impl Fn(f64) -> f64) -> Result<HermitianOperator> {
    Ok(eig_hermitian(a)?.map(f))
}

pub fn expm(a: &HermitianOperator) -> Result<HermitianOperator> {
    matrix_function(a, f64::exp)
}

/// Natural logarithm. With a `floor`, eigenvalues below it are raised to the
/// floor first; without one, any eigenvalue `<= 0` is a domain error.
pub fn logm(a: &HermitianOperator, floor: Option<f64>) -> Result<HermitianOperator> {
    let spectrum = eig_hermitian(a)?;
    log_of_spectrum(&spectrum, floor)
}

pub(crate) fn log_of_spectrum(spectrum: &SpectralDecomposition, floor: Option<f64>) -> Result<HermitianOperator> {
    match floor {
        Some(floor) if floor > 0.0 => Ok(spectrum.map(|x| x.max(floor).ln())),
        Some(floor) => Err(Error::DomainError(format!("log floor must be positive, got {floor}"))),
        None => {
            if let Some(&bad) = spectrum.eigenvalues().iter().find(|&&x| x <= 0.0) {
                return Err(Error::DomainError(format!("logarithm of eigenvalue {bad} without a floor")));
            }
            Ok(spectrum.map(f64::ln))
        }
    }
}

/// Schatten-1 norm: sum of absolute eigenvalues.
pub fn trace_norm(a: &HermitianOperator) -> Result<f64> {
    Ok(eigenvalues_hermitian(a)?.iter().map(|x| x.abs()).sum())
}

/// Largest absolute eigenvalue.
pub fn operator_norm(a: &HermitianOperator) -> Result<f64> {
    Ok(eigenvalues_hermitian(a)?.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

// ---------------------------------------------------------------------------
// Dense kernels
// ---------------------------------------------------------------------------

pub(crate) fn shape(msg: String) -> Error {
    Error::ShapeMismatch(msg)
}

pub(crate) fn is_real(m: MatRef<'_, c64>) -> bool {
    (0..m.ncols()).all(|j| (0..m.nrows()).all(|i| m[(i, j)].im == 0.0))
}

fn is_diagonal(m: MatRef<'_, c64>) -> bool {
    (0..m.ncols()).all(|j| (0..m.nrows()).all(|i| i == j || m[(i, j)] == c64::new(0.0, 0.0)))
}

fn to_real(m: MatRef<'_, c64>) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re)
}

fn to_complex(m: MatRef<'_, f64>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| c64::new(m[(i, j)], 0.0))
}

/// Unsorted eigenpairs straight from the solver.
pub(crate) fn eig_raw(m: MatRef<'_, c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    let fail = || Error::ConvergenceFailure { dim: m.nrows(), norm: m.norm_l2() };
    if is_diagonal(m) {
        let values = (0..m.nrows()).map(|i| m[(i, i)].re).collect();
        return Ok((values, Mat::identity(m.nrows(), m.ncols())));
    }
    if is_real(m) {
        let evd = to_real(m).self_adjoint_eigen(Side::Lower).map_err(|_| fail())?;
        let values = evd.S().column_vector().iter().copied().collect();
        Ok((values, to_complex(evd.U())))
    } else {
        let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| fail())?;
        let values = evd.S().column_vector().iter().map(|x| x.re).collect();
        Ok((values, evd.U().to_owned()))
    }
}

pub(crate) fn matmul(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    if is_real(a) && is_real(b) {
        to_complex((to_real(a) * to_real(b)).as_ref())
    } else {
        a * b
    }
}

/// `a b†`.
pub(crate) fn matmul_adj(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    if is_real(a) && is_real(b) {
        to_complex((to_real(a) * to_real(b).transpose()).as_ref())
    } else {
        a * b.adjoint()
    }
}

/// `a† b`.
pub(crate) fn adj_matmul(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    if is_real(a) && is_real(b) {
        to_complex((to_real(a).transpose() * to_real(b)).as_ref())
    } else {
        a.adjoint() * b
    }
}

/// `V diag(w) V†`, skipping zero weights.
pub(crate) fn weighted_projection_sum(v: MatRef<'_, c64>, weights: &[f64]) -> HermitianOperator {
    let active: Vec<usize> = (0..weights.len()).filter(|&j| weights[j] != 0.0).collect();
    let n = v.nrows();
    if active.is_empty() {
        return HermitianOperator::zeros(n);
    }
    let left = Mat::from_fn(n, active.len(), |i, k| v[(i, active[k])] * weights[active[k]]);
    let right = Mat::from_fn(n, active.len(), |i, k| v[(i, active[k])]);
    let prod = matmul_adj(left.as_ref(), right.as_ref());
    HermitianOperator::symmetrized(prod.as_ref())
}

pub(crate) fn kron(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}
