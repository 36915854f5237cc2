//! Dense dump of one best response for hand inspection.

use qspoof_core::analysis::{separability_report, SeparabilityReport, StateMap};
use qspoof_core::attacker::{
    best_response_rho0, beta, solve_best_response, verify_stationarity, AttackConfig, Regularization,
};
use qspoof_core::qmat::{eigenvalues_hermitian, kronecker_sum, logm, DensityOperator, HermitianOperator};
use qspoof_core::radar::{build_hypotheses, ScenarioConfig};
use serde_json::{json, Value};

use crate::sweep::CleanStage;
use crate::{CliError, Result};

pub const STATIONARITY_DIRECTIONS: usize = 20;

fn matrix(op: &HermitianOperator) -> Value {
    let d = op.dim();
    let re: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| op.get(i, j).re).collect()).collect();
    let im: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| op.get(i, j).im).collect()).collect();
    json!({ "re": re, "im": im })
}

fn separability(report: &SeparabilityReport) -> Value {
    json!({
        "all_product": report.all_product,
        "product_distance": report.product_distance,
        "per_vector": report.per_vector.iter().map(|v| json!({
            "eigenvalue": v.eigenvalue,
            "is_product": v.is_product,
            "residual": v.residual,
        })).collect::<Vec<_>>(),
        "factors": report.factors.as_ref().map(|fs| fs.iter().map(|f| matrix(f.operator())).collect::<Vec<_>>()),
    })
}

/// Clean and attacked states, Helstrom effect, exponent spectrum,
/// separability report and stationarity residual at `(n, lambda)`.
pub fn inspect(cfg: &ScenarioConfig, n: usize, lambda: f64) -> Result<Value> {
    cfg.validate()?;
    if n == 0 {
        return Err(CliError::Config("n must be at least 1".into()));
    }
    let h = build_hypotheses(cfg)?;
    let clean = CleanStage::new(cfg, &h, n)?;
    let rho0_star = best_response_rho0(h.rho0(), n, cfg.dimension_cap)?;
    let dims = vec![cfg.single_copy_dim(); n];
    let regularization = beta(&AttackConfig::new(lambda)?, n);

    let (rho1_star, exponent, beta_n, stationarity): (DensityOperator, HermitianOperator, Option<f64>, Value) =
        match regularization {
            Regularization::AttackOff => {
                let log = logm(h.rho1().operator(), Some(cfg.log_floor))?;
                (clean.rho1n.clone(), kronecker_sum(&log, n, cfg.dimension_cap)?, None, Value::Null)
            }
            Regularization::Beta(b) => {
                let br = solve_best_response(h.rho1(), &clean.effect, b, n, cfg.dimension_cap, cfg.log_floor)?;
                let residual =
                    match verify_stationarity(&br.state, &clean.effect, &clean.rho1n, b, STATIONARITY_DIRECTIONS) {
                        Ok(r) => json!(r),
                        Err(e) => json!({ "unavailable": e.to_string() }),
                    };
                (br.state, br.exponent, Some(b), residual)
            }
        };
    let report = separability_report(&exponent, &dims, StateMap::Exp)?;
    Ok(json!({
        "n": n,
        "lambda": lambda,
        "beta_n": beta_n,
        "tau": clean.tau,
        "basis_mode": cfg.basis_mode,
        "helstrom_rank": clean.effect.rank(),
        "rho1_clean": matrix(clean.rho1n.operator()),
        "rho1_attacked": matrix(rho1_star.operator()),
        "rho0_clean": matrix(clean.rho0n.operator()),
        "rho0_attacked": matrix(rho0_star.operator()),
        "helstrom_effect": matrix(clean.effect.operator()),
        "exponent_eigenvalues": eigenvalues_hermitian(&exponent)?,
        "separability": separability(&report),
        "stationarity_residual": stationarity,
    }))
}
