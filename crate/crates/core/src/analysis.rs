//! Information-theoretic and asymptotic diagnostics.

use faer::{c64, Mat, MatRef};

use crate::qmat::{
    adj_matmul, eig_hermitian, matmul, partial_trace, shape, trace_norm, DensityOperator, HermitianOperator,
    SpectralDecomposition, StateVector,
};
use crate::{Error, Result};

/// Eigenvalues of the second argument at or below this belong to its kernel.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Mass of the first argument on the kernel of the second above which the
/// relative entropy is infinite.
pub const SUPPORT_MASS_TOLERANCE: f64 = 1e-10;

/// Default numerical-rank threshold for product tests, relative to the
/// largest singular value.
pub const PRODUCT_TOLERANCE: f64 = 1e-9;

/// `S(nu1 || nu0) = Tr(nu1 (ln nu1 - ln nu0))`, or `f64::INFINITY` when the
/// support of `nu1` is not contained in that of `nu0`.
pub fn relative_entropy(nu1: &DensityOperator, nu0: &DensityOperator) -> Result<f64> {
    if nu1.dim() != nu0.dim() {
        return Err(shape(format!("relative entropy of dimensions {} and {}", nu1.dim(), nu0.dim())));
    }
    let s1 = nu1.spectrum()?;
    let s0 = nu0.spectrum()?;

    let support: Vec<usize> = (0..s0.dim()).filter(|&j| s0.eigenvalues()[j] > SUPPORT_THRESHOLD).collect();
    let weights = diagonal_in_basis(nu1.operator(), s0.eigenvectors(), &support);
    let support_mass: f64 = weights.iter().sum();
    if nu1.operator().trace() - support_mass > SUPPORT_MASS_TOLERANCE {
        return Ok(f64::INFINITY);
    }

    let neg_entropy: f64 = s1.eigenvalues().iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum();
    let cross: f64 = support.iter().zip(&weights).map(|(&j, &q)| q * s0.eigenvalues()[j].ln()).sum();
    Ok(neg_entropy - cross)
}

/// `<v_j| a |v_j>` for the listed columns `j` of `basis`.
fn diagonal_in_basis(a: &HermitianOperator, basis: MatRef<'_, c64>, columns: &[usize]) -> Vec<f64> {
    if columns.is_empty() {
        return Vec::new();
    }
    let w = Mat::from_fn(basis.nrows(), columns.len(), |i, k| basis[(i, columns[k])]);
    let aw = matmul(a.as_mat(), w.as_ref());
    (0..columns.len()).map(|k| (0..w.nrows()).map(|i| (w[(i, k)].conj() * aw[(i, k)]).re).sum()).collect()
}

/// Single-state order-1 Wasserstein distance, which reduces to the
/// trace-norm distance `||rho' - rho||_1`.
pub fn wasserstein_single(rho_prime: &DensityOperator, rho: &DensityOperator) -> Result<f64> {
    rho_prime.operator().check_same_dim(rho.operator(), "wasserstein distance")?;
    trace_norm(&(rho_prime.operator() - rho.operator()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessCheck {
    pub robust: bool,
    pub distance: f64,
    /// `eps - distance`; negative when the tolerance is violated.
    pub margin: f64,
}

/// Local-robustness surrogate: is the attacked output within `eps` of the
/// clean state in trace-norm distance?
pub fn robustness_check(
    rho_attacked: &DensityOperator,
    rho_clean: &DensityOperator,
    eps: f64,
) -> Result<RobustnessCheck> {
    if !(eps >= 0.0) {
        return Err(Error::DomainError(format!("tolerance must be nonnegative, got {eps}")));
    }
    let distance = wasserstein_single(rho_attacked, rho_clean)?;
    Ok(RobustnessCheck { robust: distance <= eps, distance, margin: eps - distance })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductTest {
    pub is_product: bool,
    /// Largest second singular value met while peeling off factors.
    pub residual: f64,
}

/// Tests whether `v` factors as a product over `dims` (most significant
/// factor first) using the default rank threshold.
pub fn product_test(v: &StateVector, dims: &[usize]) -> Result<ProductTest> {
    product_test_with_tolerance(v.amplitudes(), dims, PRODUCT_TOLERANCE)
}

pub fn product_test_with_tolerance(amplitudes: &[c64], dims: &[usize], tolerance: f64) -> Result<ProductTest> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != amplitudes.len() {
        return Err(shape(format!("factor dimensions {dims:?} do not multiply to {}", amplitudes.len())));
    }
    let mut rest: Vec<c64> = amplitudes.to_vec();
    let mut residual = 0.0f64;
    let mut is_product = true;
    for &d in &dims[..dims.len() - 1] {
        let cols = rest.len() / d;
        let m = Mat::from_fn(d, cols, |i, j| rest[i * cols + j]);
        let sv = m.singular_values().map_err(|_| Error::ConvergenceFailure { dim: d, norm: m.norm_l2() })?;
        let (first, second) = (sv[0], sv.get(1).copied().unwrap_or(0.0));
        residual = residual.max(second);
        if second > tolerance * first {
            is_product = false;
            break;
        }
        // rank one: every row is proportional to the remaining factor
        let best = (0..d).max_by(|&a, &b| row_norm(m.as_ref(), a).total_cmp(&row_norm(m.as_ref(), b))).unwrap_or(0);
        let norm = row_norm(m.as_ref(), best);
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector has no product structure".into()));
        }
        rest = (0..cols).map(|j| m[(best, j)] / norm).collect();
    }
    Ok(ProductTest { is_product, residual })
}

fn row_norm(m: MatRef<'_, c64>, row: usize) -> f64 {
    (0..m.ncols()).map(|j| m[(row, j)].norm_sqr()).sum::<f64>().sqrt()
}

/// How an operator is turned into the state whose factors are certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateMap {
    /// `exp(op) / Tr exp(op)`: the operator is an exponent (log-domain).
    Exp,
    /// `op / Tr op`: the operator is already positive semidefinite.
    Normalize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorSeparability {
    pub eigenvalue: f64,
    pub is_product: bool,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct SeparabilityReport {
    pub all_product: bool,
    pub per_vector: Vec<VectorSeparability>,
    /// Single-copy marginals of the mapped state, present when `all_product`.
    pub factors: Option<Vec<DensityOperator>>,
    /// Trace-norm distance between the mapped state and the product of its
    /// marginals, present when `all_product`.
    pub product_distance: Option<f64>,
}

impl SeparabilityReport {
    /// True when every eigenvector is a product and the mapped state equals the
    /// product of its marginals to within `tolerance`.
    pub fn certified_product(&self, tolerance: f64) -> bool {
        self.all_product && self.product_distance.is_some_and(|d| d <= tolerance)
    }
}

/// Eigenvector product structure of `op`, then (when every eigenvector is a
/// product) the single-factor marginals of the state `map(op)` and their
/// distance from being an exact product.
pub fn separability_report(op: &HermitianOperator, dims: &[usize], map: StateMap) -> Result<SeparabilityReport> {
    check_dims(op, dims)?;
    let spectrum = eig_hermitian(op)?;
    let per_vector = eigenvector_separability(op, &spectrum, dims, PRODUCT_TOLERANCE)?;
    let all_product = per_vector.iter().all(|v| v.is_product);
    if !all_product {
        return Ok(SeparabilityReport { all_product, per_vector, factors: None, product_distance: None });
    }

    let state = match map {
        StateMap::Exp => {
            let top = spectrum.eigenvalues().first().copied().unwrap_or(0.0);
            let weights: Vec<f64> = spectrum.eigenvalues().iter().map(|&x| (x - top).exp()).collect();
            let z: f64 = weights.iter().sum();
            spectrum.with_eigenvalues(weights.iter().map(|w| w / z).collect()).reconstruct()
        }
        StateMap::Normalize => {
            if spectrum.eigenvalues().iter().any(|&x| x < -1e-10) {
                return Err(Error::InvalidState("normalize map needs a positive semidefinite operator".into()));
            }
            let trace = op.trace();
            if !(trace > 0.0) {
                return Err(Error::InvalidState(format!("cannot normalize operator of trace {trace}")));
            }
            op.scaled(1.0 / trace)
        }
    };

    let mut factors = Vec::with_capacity(dims.len());
    for j in 0..dims.len() {
        factors.push(DensityOperator::new(partial_trace(&state, dims, &[j])?)?);
    }
    let mut product = factors[0].operator().clone();
    for f in &factors[1..] {
        product = crate::qmat::tensor_product(&product, f.operator());
    }
    let product_distance = trace_norm(&(&state - &product))?;
    Ok(SeparabilityReport { all_product, per_vector, factors: Some(factors), product_distance: Some(product_distance) })
}

fn check_dims(op: &HermitianOperator, dims: &[usize]) -> Result<()> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != op.dim() {
        return Err(shape(format!("factor dimensions {dims:?} do not multiply to {}", op.dim())));
    }
    Ok(())
}

/// Product test on every eigenvector of `op`.
///
/// Degenerate eigenspaces have no preferred basis, so when a cluster of equal
/// eigenvalues contains an entangled solver vector the cluster is
/// re-diagonalized with a generic sum of local operators built from partial
/// traces of `op` and `op²`. That operator commutes with `op` whenever `op` has
/// a product eigenbasis, so its eigenvectors inside the cluster are products.
pub fn eigenvector_separability(
    op: &HermitianOperator,
    spectrum: &SpectralDecomposition,
    dims: &[usize],
    tolerance: f64,
) -> Result<Vec<VectorSeparability>> {
    check_dims(op, dims)?;
    let values = spectrum.eigenvalues();
    let vectors = spectrum.eigenvectors();
    let mut out: Vec<VectorSeparability> = Vec::with_capacity(values.len());
    let mut generator: Option<LocalGenerator> = None;

    let mut start = 0;
    while start < values.len() {
        let scale = values[start].abs().max(1.0);
        let mut end = start + 1;
        while end < values.len() && (values[start] - values[end]).abs() <= tolerance * scale {
            end += 1;
        }
        let tests = test_columns(vectors, start..end, dims, tolerance)?;
        let tests = if tests.iter().all(|t| t.is_product) || end - start == 1 || dims.len() == 1 {
            tests
        } else {
            let generator = match &mut generator {
                Some(g) => g,
                None => generator.insert(LocalGenerator::new(op, dims)?),
            };
            let rotated = generator.rediagonalize(vectors, start..end)?;
            let refined = test_columns(rotated.as_ref(), 0..end - start, dims, tolerance)?;
            let count = |ts: &[ProductTest]| ts.iter().filter(|t| t.is_product).count();
            if count(&refined) >= count(&tests) {
                refined
            } else {
                tests
            }
        };
        for (k, t) in tests.into_iter().enumerate() {
            out.push(VectorSeparability {
                eigenvalue: values[start + k],
                is_product: t.is_product,
                residual: t.residual,
            });
        }
        start = end;
    }
    Ok(out)
}

fn test_columns(
    vectors: MatRef<'_, c64>,
    range: std::ops::Range<usize>,
    dims: &[usize],
    tolerance: f64,
) -> Result<Vec<ProductTest>> {
    range
        .map(|j| {
            let col: Vec<c64> = vectors.col(j).iter().copied().collect();
            product_test_with_tolerance(&col, dims, tolerance)
        })
        .collect()
}

/// `G = sum_k c_k (I ⊗ .. ⊗ R_k ⊗ .. ⊗ I)` with `R_k = Tr_{¬k}(op) + γ Tr_{¬k}(op²)`.
struct LocalGenerator {
    dims: Vec<usize>,
    locals: Vec<Mat<c64>>,
}

impl LocalGenerator {
    const SQUARE_WEIGHT: f64 = 0.577_215_664_901_532_9;
    const SLOT_STEP: f64 = 0.618_033_988_749_894_8;

    fn new(op: &HermitianOperator, dims: &[usize]) -> Result<Self> {
        let mut locals = Vec::with_capacity(dims.len());
        for k in 0..dims.len() {
            let first = partial_trace(op, dims, &[k])?;
            let second = partial_trace_of_square(op, dims, k);
            let coeff = 1.0 + Self::SLOT_STEP * k as f64;
            locals.push(Mat::from_fn(dims[k], dims[k], |i, j| {
                (first.get(i, j) + second[(i, j)] * Self::SQUARE_WEIGHT) * coeff
            }));
        }
        Ok(Self { dims: dims.to_vec(), locals })
    }

    fn apply(&self, w: MatRef<'_, c64>) -> Mat<c64> {
        let total = w.nrows();
        let mut out = Mat::<c64>::zeros(total, w.ncols());
        let mut stride = 1;
        for k in (0..self.dims.len()).rev() {
            let d = self.dims[k];
            let local = &self.locals[k];
            for col in 0..w.ncols() {
                for row in 0..total {
                    let digit = (row / stride) % d;
                    let base = row - digit * stride;
                    let mut acc = c64::new(0.0, 0.0);
                    for c in 0..d {
                        acc += local[(digit, c)] * w[(base + c * stride, col)];
                    }
                    out[(row, col)] += acc;
                }
            }
            stride *= d;
        }
        out
    }

    fn rediagonalize(&self, vectors: MatRef<'_, c64>, range: std::ops::Range<usize>) -> Result<Mat<c64>> {
        let w = Mat::from_fn(vectors.nrows(), range.len(), |i, k| vectors[(i, range.start + k)]);
        let gw = self.apply(w.as_ref());
        let compressed = HermitianOperator::from_mat(adj_matmul(w.as_ref(), gw.as_ref()))?;
        let inner = eig_hermitian(&compressed)?;
        Ok(matmul(w.as_ref(), inner.eigenvectors()))
    }
}

/// `Tr_{¬k}(op²)` without forming `op²`.
fn partial_trace_of_square(op: &HermitianOperator, dims: &[usize], k: usize) -> Mat<c64> {
    let total = op.dim();
    let d = dims[k];
    let stride: usize = dims[k + 1..].iter().product();
    let m = op.as_mat();
    let mut out = Mat::<c64>::zeros(d, d);
    for a in 0..total {
        let digit_a = (a / stride) % d;
        let base = a - digit_a * stride;
        for j in 0..d {
            let b = base + j * stride;
            let mut acc = c64::new(0.0, 0.0);
            for mid in 0..total {
                acc += m[(a, mid)] * m[(mid, b)];
            }
            out[(digit_a, j)] += acc;
        }
    }
    out
}

/// Least-squares fit of `ln(error)` against `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    /// Per-observation log-rate; negative for decaying errors.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(n, ln error)` pairs actually fitted.
    pub points: Vec<(usize, f64)>,
    /// `n` values whose error was exactly zero and therefore left out.
    pub dropped: Vec<usize>,
}

pub fn decay_rate_fit(points: &[(usize, f64)]) -> Result<DecayFit> {
    let mut seen: Vec<usize> = points.iter().map(|p| p.0).collect();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InsufficientData("observation counts must be distinct".into()));
    }
    if let Some(&(n, e)) = points.iter().find(|(_, e)| !(*e >= 0.0 && *e <= 1.0)) {
        return Err(Error::DomainError(format!("error at n = {n} is {e}, outside [0, 1]")));
    }
    let dropped: Vec<usize> = points.iter().filter(|(_, e)| *e == 0.0).map(|p| p.0).collect();
    if !points.is_empty() && dropped.len() == points.len() {
        return Err(Error::AllErrorsZero);
    }
    let mut kept: Vec<(usize, f64)> = points.iter().filter(|(_, e)| *e > 0.0).map(|&(n, e)| (n, e.ln())).collect();
    kept.sort_by_key(|p| p.0);
    if kept.len() < 3 {
        return Err(Error::InsufficientData(format!("need at least 3 positive points, have {}", kept.len())));
    }

    let count = kept.len() as f64;
    let mean_x = kept.iter().map(|p| p.0 as f64).sum::<f64>() / count;
    let mean_y = kept.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = kept.iter().map(|p| (p.0 as f64 - mean_x).powi(2)).sum();
    let sxy: f64 = kept.iter().map(|p| (p.0 as f64 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = kept.iter().map(|p| (p.1 - intercept - slope * p.0 as f64).powi(2)).sum();
    let ss_tot: f64 = kept.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        // constant data is fitted exactly by a flat line
        1.0
    };
    Ok(DecayFit { slope, intercept, r_squared, points: kept, dropped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::tensor_product;

    #[test]
    fn relative_entropy_examples() {
        let rho = DensityOperator::diagonal(&[0.2, 0.3, 0.5]).unwrap();
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-15);

        let pure = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
        let mixed = DensityOperator::diagonal(&[0.5, 0.5]).unwrap();
        assert!((relative_entropy(&pure, &mixed).unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(relative_entropy(&mixed, &pure).unwrap(), f64::INFINITY);
    }

    #[test]
    fn relative_entropy_rank_deficient_same_support() {
        let a = DensityOperator::diagonal(&[0.6, 0.4, 0.0]).unwrap();
        let b = DensityOperator::diagonal(&[0.5, 0.5, 0.0]).unwrap();
        let want = 0.6 * (0.6f64 / 0.5).ln() + 0.4 * (0.4f64 / 0.5).ln();
        assert!((relative_entropy(&a, &b).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn relative_entropy_shape_mismatch() {
        let a = DensityOperator::diagonal(&[0.6, 0.4]).unwrap();
        let b = DensityOperator::diagonal(&[0.5, 0.25, 0.25]).unwrap();
        assert!(matches!(relative_entropy(&a, &b), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn wasserstein_examples() {
        let a = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
        let b = DensityOperator::diagonal(&[0.0, 1.0]).unwrap();
        assert!((wasserstein_single(&a, &b).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(wasserstein_single(&a, &a).unwrap(), 0.0);
        let c = DensityOperator::diagonal(&[0.6, 0.4]).unwrap();
        let d = DensityOperator::diagonal(&[0.5, 0.5]).unwrap();
        assert!((wasserstein_single(&c, &d).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn robustness_examples() {
        let a = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
        let b = DensityOperator::diagonal(&[0.0, 1.0]).unwrap();
        let same = robustness_check(&a, &a, 0.3).unwrap();
        assert!(same.robust && same.margin == 0.3);
        let far = robustness_check(&a, &b, 1.0).unwrap();
        assert!(!far.robust);
        assert!((far.margin + 1.0).abs() < 1e-15);

        let tilted = DensityOperator::diagonal(&[0.242766, 0.161844, 0.595390]).unwrap();
        let clean = DensityOperator::diagonal(&[0.12, 0.08, 0.8]).unwrap();
        let check = robustness_check(&tilted, &clean, 0.5).unwrap();
        assert!(check.robust);
        assert!((check.distance - 0.409220).abs() < 1e-6);
        assert!(robustness_check(&a, &a, -1.0).is_err());
    }

    #[test]
    fn product_test_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let zero_one = StateVector::from_real(&[0.0, 1.0, 0.0, 0.0]).unwrap();
        let t = product_test(&zero_one, &[2, 2]).unwrap();
        assert!(t.is_product && t.residual < 1e-15);
        let bell = StateVector::from_real(&[s, 0.0, 0.0, s]).unwrap();
        let t = product_test(&bell, &[2, 2]).unwrap();
        assert!(!t.is_product);
        assert!((t.residual - s).abs() < 1e-12);
        assert!(product_test(&bell, &[3]).is_err());
    }

    #[test]
    fn product_test_three_factors() {
        let a = StateVector::from_real(&[0.3, 0.7]).unwrap();
        let b = StateVector::new(vec![c64::new(0.1, 0.4), c64::new(-0.5, 0.2), c64::new(0.3, 0.0)]).unwrap();
        let c = StateVector::from_real(&[1.0, -2.0]).unwrap();
        let v = a.tensor(&b).tensor(&c);
        let t = product_test(&v, &[2, 3, 2]).unwrap();
        assert!(t.is_product && t.residual <= 1e-10, "{t:?}");
    }

    #[test]
    fn separability_of_kronecker_square() {
        let a = HermitianOperator::from_real_rows(&[&[0.5, 0.1, 0.05], &[0.1, 0.3, 0.02], &[0.05, 0.02, 0.2]]).unwrap();
        let aa = tensor_product(&a, &a);
        let report = separability_report(&aa, &[3, 3], StateMap::Normalize).unwrap();
        assert!(report.all_product, "{:?}", report.per_vector);
        assert!(report.certified_product(1e-8), "{:?}", report.product_distance);
        let factors = report.factors.unwrap();
        assert!(factors[0].operator().max_abs_diff(&a.scaled(1.0 / a.trace())).unwrap() < 1e-12);
    }

    #[test]
    fn separability_exp_of_kronecker_square_is_not_a_product_state() {
        let a = HermitianOperator::diagonal(&[0.9, 0.4, -0.3]);
        let report = separability_report(&tensor_product(&a, &a), &[3, 3], StateMap::Exp).unwrap();
        assert!(report.all_product);
        assert!(report.product_distance.unwrap() > 1e-3);
        assert!(!report.certified_product(1e-8));
    }

    #[test]
    fn separability_swap_has_singlet() {
        let swap = HermitianOperator::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        let report = separability_report(&swap, &[2, 2], StateMap::Exp).unwrap();
        assert!(!report.all_product);
        assert!(report.factors.is_none());
        let singlet = report.per_vector.iter().find(|v| (v.eigenvalue + 1.0).abs() < 1e-12).unwrap();
        assert!(!singlet.is_product);
    }

    #[test]
    fn separability_single_factor() {
        let a = HermitianOperator::from_real_rows(&[&[0.5, 0.1], &[0.1, 0.5]]).unwrap();
        let report = separability_report(&a, &[2], StateMap::Exp).unwrap();
        assert!(report.all_product);
        assert!(report.product_distance.unwrap() < 1e-14);
    }

    #[test]
    fn decay_fit_examples() {
        let geometric: Vec<(usize, f64)> = (1..=5).map(|n| (n, 0.2f64.powi(n as i32))).collect();
        let fit = decay_rate_fit(&geometric).unwrap();
        assert!((fit.slope - 0.2f64.ln()).abs() < 1e-12);
        assert!((fit.slope + 1.609438).abs() < 1e-6);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);

        let flat: Vec<(usize, f64)> = (1..=4).map(|n| (n, 0.3)).collect();
        let fit = decay_rate_fit(&flat).unwrap();
        assert!(fit.slope.abs() < 1e-15);

        let e: Vec<(usize, f64)> = (1..=6).map(|n| (n, (-(n as f64)).exp())).collect();
        assert!((decay_rate_fit(&e).unwrap().slope + 1.0).abs() < 1e-12);
    }

    #[test]
    fn decay_fit_degenerate_inputs() {
        assert!(matches!(decay_rate_fit(&[(1, 0.5), (2, 0.25)]), Err(Error::InsufficientData(_))));
        assert!(matches!(decay_rate_fit(&[(1, 0.0), (2, 0.0), (3, 0.0)]), Err(Error::AllErrorsZero)));
        assert!(matches!(decay_rate_fit(&[(1, 0.5), (1, 0.25), (2, 0.1)]), Err(Error::InsufficientData(_))));
        let fit = decay_rate_fit(&[(1, 0.5), (2, 0.0), (3, 0.125), (4, 0.0625)]).unwrap();
        assert_eq!(fit.dropped, vec![2]);
        assert!(matches!(decay_rate_fit(&[(1, 1.5), (2, 0.1), (3, 0.01)]), Err(Error::DomainError(_))));
    }
}
