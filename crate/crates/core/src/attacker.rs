//! Stackelberg attacker: regularized best response to a committed Helstrom
//! measurement.
//!
//! Given the projector `Π`, the attacker minimizes
//! `Tr(Π rho1') + beta S(rho1' || rho1^{⊗n}) + beta S(rho0' || rho0^{⊗n})`.
//! The null-hypothesis term is minimized by leaving `rho0^{⊗n}` alone, and the
//! first-order condition for `rho1'` gives the Gibbs-like tilt
//! `exp(ln rho1^{⊗n} - Π / beta) / Z`.

use faer::{c64, Mat, MatRef};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::analysis::relative_entropy;
use crate::detector::ProjectiveEffect;
use crate::qmat::{
    eig_hermitian, kronecker_sum, log_of_spectrum, shape, weighted_projection_sum, DensityOperator, HermitianOperator,
    SpectralDecomposition,
};
use crate::{Error, Result};

const KRAUS_TOLERANCE: f64 = 1e-9;
const STATIONARITY_STEP: f64 = 1e-5;
const STATIONARITY_SEED: u64 = 0x5eed_0fa7_7ac4;
/// Eigenvalues of the best response below this (relative to the largest) are
/// outside its support.
const SUPPORT_RELATIVE_THRESHOLD: f64 = 1e-12;

/// Attack strength `lambda`, with `beta_n = lambda^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackConfig {
    pub lambda: f64,
    /// Treat `lambda = 0` as "no attack" rather than as the divergent limit.
    pub attack_off_at_zero: bool,
}

impl AttackConfig {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::ConfigError(format!("lambda must be finite and nonnegative, got {lambda}")));
        }
        Ok(Self { lambda, attack_off_at_zero: true })
    }
}

/// Regularization weight for a given number of copies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularization {
    /// The attacker forwards the clean states.
    AttackOff,
    Beta(f64),
}

pub fn beta(cfg: &AttackConfig, n: usize) -> Regularization {
    if cfg.lambda == 0.0 && cfg.attack_off_at_zero {
        Regularization::AttackOff
    } else {
        Regularization::Beta(cfg.lambda.powi(n as i32))
    }
}

/// Best response together with the operator it exponentiates.
#[derive(Debug, Clone)]
pub struct BestResponse {
    pub state: DensityOperator,
    /// `ln rho1^{⊗n} - Π / beta`, with the log assembled as a sum of local logs.
    pub exponent: HermitianOperator,
    /// Eigendecomposition of `exponent`.
    pub exponent_spectrum: SpectralDecomposition,
}

/// `exp(ln rho1^{⊗n} - Π / beta_n) / Tr(..)`.
///
/// `ln rho1` is taken with the given spectral floor and summed over the `n`
/// slots. A rank-zero effect returns `rho1^{⊗n}` exactly.
pub fn best_response_rho1(
    rho1: &DensityOperator,
    effect: &ProjectiveEffect,
    beta_n: f64,
    n: usize,
    cap: usize,
    log_floor: f64,
) -> Result<DensityOperator> {
    Ok(solve_best_response(rho1, effect, beta_n, n, cap, log_floor)?.state)
}

pub fn solve_best_response(
    rho1: &DensityOperator,
    effect: &ProjectiveEffect,
    beta_n: f64,
    n: usize,
    cap: usize,
    log_floor: f64,
) -> Result<BestResponse> {
    if !(beta_n > 0.0) {
        return Err(Error::DomainError(format!("beta_n must be positive, got {beta_n}")));
    }
    let local_log = log_of_spectrum(rho1.spectrum()?, Some(log_floor))?;
    let log_power = kronecker_sum(&local_log, n, cap)?;
    if effect.dim() != log_power.dim() {
        return Err(shape(format!(
            "effect dimension {} against {}-copy dimension {}",
            effect.dim(),
            n,
            log_power.dim()
        )));
    }
    let exponent = &log_power - &effect.operator().scaled(1.0 / beta_n);

    if effect.rank() == 0 {
        let state = rho1.tensor_power(n, cap)?;
        let local = rho1.spectrum()?;
        let local_log = local.with_eigenvalues(local.eigenvalues().iter().map(|x| x.max(log_floor).ln()).collect());
        let exponent_spectrum = local_log.kronecker_sum(n);
        return Ok(BestResponse { state, exponent, exponent_spectrum });
    }

    let spectrum = eig_hermitian(&exponent)?;
    let top = spectrum.eigenvalues()[0];
    let unnormalized: Vec<f64> = spectrum.eigenvalues().iter().map(|&x| (x - top).exp()).collect();
    let z: f64 = unnormalized.iter().sum();
    let weights: Vec<f64> = unnormalized.iter().map(|w| w / z).collect();
    let state = DensityOperator::from_spectrum(spectrum.with_eigenvalues(weights));
    Ok(BestResponse { state, exponent, exponent_spectrum: spectrum })
}

/// Best response under a possibly switched-off attack.
pub fn attacked_rho1(
    rho1: &DensityOperator,
    effect: &ProjectiveEffect,
    regularization: Regularization,
    n: usize,
    cap: usize,
    log_floor: f64,
) -> Result<DensityOperator> {
    match regularization {
        Regularization::AttackOff => rho1.tensor_power(n, cap),
        Regularization::Beta(b) => best_response_rho1(rho1, effect, b, n, cap, log_floor),
    }
}

/// The attacker never distorts the null hypothesis: `rho0^{⊗n}`.
pub fn best_response_rho0(rho0: &DensityOperator, n: usize, cap: usize) -> Result<DensityOperator> {
    rho0.tensor_power(n, cap)
}

/// `Tr(Π rho1n) + beta S(rho1n || clean1) + beta S(rho0n || clean0)`;
/// `f64::INFINITY` when either relative entropy is.
pub fn attacker_objective(
    rho1n: &DensityOperator,
    rho0n: &DensityOperator,
    effect: &ProjectiveEffect,
    rho1_clean_n: &DensityOperator,
    rho0_clean_n: &DensityOperator,
    beta_n: f64,
) -> Result<f64> {
    let dims = [rho1n.dim(), rho0n.dim(), effect.dim(), rho1_clean_n.dim(), rho0_clean_n.dim()];
    if dims.iter().any(|&d| d != dims[0]) {
        return Err(shape(format!("attacker objective arguments have dimensions {dims:?}")));
    }
    let detection = rho1n.expectation_of(effect.operator())?;
    let s1 = relative_entropy(rho1n, rho1_clean_n)?;
    let s0 = relative_entropy(rho0n, rho0_clean_n)?;
    if s1.is_infinite() || s0.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(detection + beta_n * (s1 + s0))
}

/// Largest absolute directional derivative of the `H1` part of the attacker
/// objective at `rho1_star`, over random traceless Hermitian unit-Frobenius
/// directions supported on `supp(rho1_star)`.
///
/// Each derivative is a five-point central difference of
/// `Tr(Π rho) + beta S(rho || clean)` along `rho_star + t H`. The step is
/// 1e-5, shrunk to a tenth of the smallest support eigenvalue so that every
/// stencil point stays positive definite on the support (`||H||_op <= 1`).
/// Near zero certifies the first-order condition.
pub fn verify_stationarity(
    rho1_star: &DensityOperator,
    effect: &ProjectiveEffect,
    rho1_clean_n: &DensityOperator,
    beta_n: f64,
    directions: usize,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(STATIONARITY_SEED);
    verify_stationarity_with_rng(rho1_star, effect, rho1_clean_n, beta_n, directions, &mut rng)
}

pub fn verify_stationarity_with_rng(
    rho1_star: &DensityOperator,
    effect: &ProjectiveEffect,
    rho1_clean_n: &DensityOperator,
    beta_n: f64,
    directions: usize,
    rng: &mut impl Rng,
) -> Result<f64> {
    if !(beta_n > 0.0) {
        return Err(Error::DomainError(format!("beta_n must be positive, got {beta_n}")));
    }
    if rho1_star.dim() != effect.dim() || rho1_star.dim() != rho1_clean_n.dim() {
        return Err(shape("stationarity arguments differ in dimension".into()));
    }
    let spectrum = rho1_star.spectrum()?;
    let top = spectrum.eigenvalues()[0];
    let support: Vec<usize> =
        (0..spectrum.dim()).filter(|&j| spectrum.eigenvalues()[j] > SUPPORT_RELATIVE_THRESHOLD * top).collect();
    if support.len() < 2 {
        return Err(Error::DomainError(format!(
            "support of dimension {} admits no traceless direction",
            support.len()
        )));
    }
    let basis = Mat::from_fn(spectrum.dim(), support.len(), |i, k| spectrum.eigenvectors()[(i, support[k])]);
    let smallest = support.iter().map(|&j| spectrum.eigenvalues()[j]).fold(f64::INFINITY, f64::min);

    let objective = |rho: &DensityOperator| -> Result<f64> {
        let s = relative_entropy(rho, rho1_clean_n)?;
        Ok(rho.expectation_of(effect.operator())? + beta_n * s)
    };

    let mut worst = 0.0f64;
    for _ in 0..directions {
        let h = random_direction(basis.as_ref(), rng)?;
        let at = |t: f64| -> Result<f64> { objective(&perturbed(rho1_star, &h, t)?) };
        let step = STATIONARITY_STEP.min(0.1 * smallest);
        let derivative = (-at(2.0 * step)? + 8.0 * at(step)? - 8.0 * at(-step)? + at(-2.0 * step)?) / (12.0 * step);
        worst = worst.max(derivative.abs());
    }
    Ok(worst)
}

/// Random traceless Hermitian operator of unit Frobenius norm inside the
/// span of `basis` (orthonormal columns).
fn random_direction(basis: MatRef<'_, c64>, rng: &mut impl Rng) -> Result<HermitianOperator> {
    let s = basis.ncols();
    let mut g = Mat::from_fn(s, s, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64::new(re, im)
    });
    for i in 0..s {
        for j in 0..i {
            g[(i, j)] = g[(j, i)].conj();
        }
        g[(i, i)] = c64::new(g[(i, i)].re, 0.0);
    }
    let mean = (0..s).map(|i| g[(i, i)].re).sum::<f64>() / s as f64;
    for i in 0..s {
        g[(i, i)] -= c64::new(mean, 0.0);
    }
    let norm = g.norm_l2();
    let g = HermitianOperator::from_mat(Mat::from_fn(s, s, |i, j| g[(i, j)] / norm))?;
    // H = B g B†
    let bg = crate::qmat::matmul(basis, g.as_mat());
    HermitianOperator::from_mat(crate::qmat::matmul_adj(bg.as_ref(), basis))
}

fn perturbed(rho: &DensityOperator, direction: &HermitianOperator, t: f64) -> Result<DensityOperator> {
    let moved = rho.operator() + &direction.scaled(t);
    let spectrum = eig_hermitian(&moved)?;
    let clamped: Vec<f64> = spectrum.eigenvalues().iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    let normalized: Vec<f64> = clamped.iter().map(|x| x / total).collect();
    Ok(density_from(spectrum, normalized))
}

fn density_from(spectrum: SpectralDecomposition, weights: Vec<f64>) -> DensityOperator {
    let spectrum = spectrum.with_eigenvalues(weights);
    let op = weighted_projection_sum(spectrum.eigenvectors(), spectrum.eigenvalues());
    DensityOperator::with_spectrum(op, spectrum)
}

/// Which completeness relation a Kraus family must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KrausConvention {
    /// `sum_k E_k E_k† = I`.
    #[default]
    OuterProduct,
    /// `sum_k E_k† E_k = I`, the trace-preserving condition.
    TracePreserving,
}

#[derive(Debug, Clone)]
pub struct KrausChannel {
    ops: Vec<Mat<c64>>,
}

impl KrausChannel {
    pub fn new(ops: Vec<Mat<c64>>) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(Error::InvalidState("a channel needs at least one Kraus operator".into()));
        };
        let d = first.nrows();
        if ops.iter().any(|e| e.nrows() != d || e.ncols() != d) {
            return Err(shape("Kraus operators must be square with a common dimension".into()));
        }
        Ok(Self { ops })
    }

    pub fn dim(&self) -> usize {
        self.ops[0].nrows()
    }

    pub fn ops(&self) -> &[Mat<c64>] {
        &self.ops
    }

    /// `sum_k E_k rho E_k†`.
    pub fn apply(&self, rho: &DensityOperator) -> Result<HermitianOperator> {
        if rho.dim() != self.dim() {
            return Err(shape("channel and state dimensions differ".into()));
        }
        let mut acc = Mat::<c64>::zeros(self.dim(), self.dim());
        for e in &self.ops {
            let left = crate::qmat::matmul(e.as_ref(), rho.operator().as_mat());
            acc += crate::qmat::matmul_adj(left.as_ref(), e.as_ref());
        }
        HermitianOperator::from_mat(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausCheck {
    pub complete: bool,
    /// Largest entry of `|sum - I|`.
    pub residual: f64,
}

pub fn kraus_completeness_check(ch: &KrausChannel, convention: KrausConvention) -> KrausCheck {
    let d = ch.dim();
    let mut sum = Mat::<c64>::zeros(d, d);
    for e in ch.ops() {
        sum += match convention {
            KrausConvention::OuterProduct => crate::qmat::matmul_adj(e.as_ref(), e.as_ref()),
            KrausConvention::TracePreserving => crate::qmat::adj_matmul(e.as_ref(), e.as_ref()),
        };
    }
    let mut residual = 0.0f64;
    for j in 0..d {
        for i in 0..d {
            let target = if i == j { 1.0 } else { 0.0 };
            residual = residual.max((sum[(i, j)] - c64::new(target, 0.0)).norm());
        }
    }
    KrausCheck { complete: residual <= KRAUS_TOLERANCE, residual }
}
