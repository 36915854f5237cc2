//! The passive detector: Helstrom measurement on `n` copies, error rates, and
//! Bayesian risk.

use faer::{c64, Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::qmat::{
    eig_hermitian, shape, tensor_power, weighted_projection_sum, DensityOperator, HermitianOperator, StateVector,
};
use crate::{Error, Result};

const PROJECTOR_TOLERANCE: f64 = 1e-9;

/// `H0: rho = rho0` versus `H1: rho = rho1` on a single copy.
#[derive(Debug, Clone)]
pub struct HypothesisPair {
    rho0: DensityOperator,
    rho1: DensityOperator,
}

impl HypothesisPair {
    pub fn new(rho0: DensityOperator, rho1: DensityOperator) -> Result<Self> {
        if rho0.dim() != rho1.dim() {
            return Err(shape(format!("hypotheses have dimensions {} and {}", rho0.dim(), rho1.dim())));
        }
        Ok(Self { rho0, rho1 })
    }

    pub fn rho0(&self) -> &DensityOperator {
        &self.rho0
    }

    pub fn rho1(&self) -> &DensityOperator {
        &self.rho1
    }

    pub fn dim(&self) -> usize {
        self.rho0.dim()
    }
}

/// Threshold `tau(n) = (c0bar n + d0bar) / (c1bar n + d1bar)`.
///
/// The numerator is the false-alarm cost `c_{0,n}` and the denominator the
/// miss cost `c_{1,n}`, so the Helstrom projector at `tau(n)` is exactly the
/// minimizer of [`bayes_risk`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSchedule {
    pub c0bar: f64,
    pub d0bar: f64,
    pub c1bar: f64,
    pub d1bar: f64,
}

impl ThresholdSchedule {
    /// Constants must be finite and nonnegative, and each of the two affine
    /// costs must be positive at every `n >= 1`.
    pub fn new(c0bar: f64, d0bar: f64, c1bar: f64, d1bar: f64) -> Result<Self> {
        let s = Self { c0bar, d0bar, c1bar, d1bar };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let named = [("c0bar", self.c0bar), ("d0bar", self.d0bar), ("c1bar", self.c1bar), ("d1bar", self.d1bar)];
        for (name, v) in named {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::ConfigError(format!("threshold.{name} must be finite and nonnegative, got {v}")));
            }
        }
        if self.c0bar + self.d0bar <= 0.0 || self.c1bar + self.d1bar <= 0.0 {
            return Err(Error::ConfigError(
                "threshold costs must be positive: c0bar + d0bar > 0 and c1bar + d1bar > 0".into(),
            ));
        }
        Ok(())
    }

    /// False-alarm cost `c_{0,n}`.
    pub fn false_alarm_cost(&self, n: usize) -> f64 {
        self.c0bar * n as f64 + self.d0bar
    }

    /// Miss cost `c_{1,n}`.
    pub fn miss_cost(&self, n: usize) -> f64 {
        self.c1bar * n as f64 + self.d1bar
    }

    pub fn tau(&self, n: usize) -> f64 {
        self.false_alarm_cost(n) / self.miss_cost(n)
    }
}

pub fn threshold(sched: &ThresholdSchedule, n: usize) -> f64 {
    sched.tau(n)
}

/// An orthogonal projector, used as the `H1` measurement effect.
#[derive(Debug, Clone)]
pub struct ProjectiveEffect {
    op: HermitianOperator,
    rank: usize,
}

impl ProjectiveEffect {
    /// Checks idempotence, a `{0, 1}` spectrum, and that the trace is an integer.
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let squared = op.product(&op)?;
        let idempotence = max_abs_diff_mat(squared.as_ref(), op.as_mat());
        if idempotence > PROJECTOR_TOLERANCE {
            return Err(Error::InvalidState(format!("operator is not idempotent (residual {idempotence:.3e})")));
        }
        let spectrum = eig_hermitian(&op)?;
        if let Some(bad) = spectrum
            .eigenvalues()
            .iter()
            .find(|&&x| x.abs() > PROJECTOR_TOLERANCE && (x - 1.0).abs() > PROJECTOR_TOLERANCE)
        {
            return Err(Error::InvalidState(format!("projector eigenvalue {bad} outside {{0, 1}}")));
        }
        let trace = op.trace();
        let rank = trace.round();
        if (trace - rank).abs() >= 0.5 || rank < 0.0 {
            return Err(Error::InvalidState(format!("projector trace {trace} is not near an integer")));
        }
        Ok(Self { op, rank: rank as usize })
    }

    pub fn zero(dim: usize) -> Self {
        Self { op: HermitianOperator::zeros(dim), rank: 0 }
    }

    pub fn identity(dim: usize) -> Self {
        Self { op: HermitianOperator::identity(dim), rank: dim }
    }

    /// Projector onto the span of the given columns (orthonormalized by QR,
    /// numerically dependent columns are dropped).
    pub fn onto_span(columns: MatRef<'_, c64>) -> Result<Self> {
        let dim = columns.nrows();
        if columns.ncols() == 0 {
            return Ok(Self::zero(dim));
        }
        let qr = columns.qr();
        let q = qr.compute_thin_Q();
        let r = qr.R();
        let keep: Vec<usize> = (0..r.nrows().min(r.ncols())).filter(|&k| r[(k, k)].norm() > 1e-10).collect();
        let basis = Mat::from_fn(dim, keep.len(), |i, k| q[(i, keep[k])]);
        let op = weighted_projection_sum(basis.as_ref(), &vec![1.0; keep.len()]);
        Ok(Self { op, rank: keep.len() })
    }

    /// Projector onto the computational basis states in `indices`.
    pub fn diagonal(dim: usize, indices: &[usize]) -> Result<Self> {
        let mut diag = vec![0.0; dim];
        for &i in indices {
            if i >= dim {
                return Err(shape(format!("basis index {i} out of range for dimension {dim}")));
            }
            diag[i] = 1.0;
        }
        let rank = diag.iter().filter(|&&x| x == 1.0).count();
        Ok(Self { op: HermitianOperator::diagonal(&diag), rank })
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// `I - self`.
    pub fn complement(&self) -> Self {
        Self { op: &HermitianOperator::identity(self.dim()) - &self.op, rank: self.dim() - self.rank }
    }
}

fn max_abs_diff_mat(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// Helstrom projector onto the strictly positive eigenspace of
/// `rho1^{⊗n} - tau rho0^{⊗n}`; eigenvalues within `zero_tolerance` of zero
/// are excluded.
pub fn helstrom_effect(
    h: &HypothesisPair,
    n: usize,
    tau: f64,
    cap: usize,
    zero_tolerance: f64,
) -> Result<ProjectiveEffect> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::DomainError(format!("threshold must be positive and finite, got {tau}")));
    }
    let rho1n = tensor_power(h.rho1().operator(), n, cap)?;
    let rho0n = tensor_power(h.rho0().operator(), n, cap)?;
    helstrom_from_powers(&rho1n, &rho0n, tau, zero_tolerance)
}

/// Same as [`helstrom_effect`] when the tensor powers are already built.
pub fn helstrom_from_powers(
    rho1n: &HermitianOperator,
    rho0n: &HermitianOperator,
    tau: f64,
    zero_tolerance: f64,
) -> Result<ProjectiveEffect> {
    rho1n.check_same_dim(rho0n, "helstrom")?;
    let difference = rho1n - &rho0n.scaled(tau);
    let spectrum = eig_hermitian(&difference)?;
    let weights: Vec<f64> =
        spectrum.eigenvalues().iter().map(|&g| if g > zero_tolerance { 1.0 } else { 0.0 }).collect();
    let rank = weights.iter().filter(|&&w| w == 1.0).count();
    let op = weighted_projection_sum(spectrum.eigenvectors(), &weights);
    Ok(ProjectiveEffect { op, rank })
}

/// Detection and false-alarm probabilities `(Tr(Π rho1n), Tr(Π rho0n))`,
/// clamped to `[0, 1]`.
pub fn rates(effect: &ProjectiveEffect, rho1n: &DensityOperator, rho0n: &DensityOperator) -> Result<(f64, f64)> {
    Ok((probability(effect, rho1n)?, probability(effect, rho0n)?))
}

/// `Tr(Π rho)` clamped to `[0, 1]`.
pub fn probability(effect: &ProjectiveEffect, rho: &DensityOperator) -> Result<f64> {
    if effect.dim() != rho.dim() {
        return Err(shape(format!("effect dimension {} against state dimension {}", effect.dim(), rho.dim())));
    }
    Ok(rho.expectation_of(effect.operator())?.clamp(0.0, 1.0))
}

/// `c_{1,n} Tr((1 - Π) rho1^{⊗n}) + c_{0,n} Tr(Π rho0^{⊗n})` with costs from
/// the schedule.
pub fn bayes_risk(
    effect: &ProjectiveEffect,
    h: &HypothesisPair,
    n: usize,
    sched: &ThresholdSchedule,
    cap: usize,
) -> Result<f64> {
    bayes_risk_with_costs(effect, h, n, sched.miss_cost(n), sched.false_alarm_cost(n), cap)
}

pub fn bayes_risk_with_costs(
    effect: &ProjectiveEffect,
    h: &HypothesisPair,
    n: usize,
    miss_cost: f64,
    false_alarm_cost: f64,
    cap: usize,
) -> Result<f64> {
    let rho1n = h.rho1().tensor_power(n, cap)?;
    let rho0n = h.rho0().tensor_power(n, cap)?;
    let (p_d, p_f) = rates(effect, &rho1n, &rho0n)?;
    Ok(miss_cost * (1.0 - p_d) + false_alarm_cost * p_f)
}

/// Probability `<phi|Π|phi>` of declaring `H1` on the pure input `phi`.
pub fn decide(phi: &StateVector, effect: &ProjectiveEffect) -> Result<f64> {
    Ok(effect.operator().expectation(phi)?.clamp(0.0, 1.0))
}
