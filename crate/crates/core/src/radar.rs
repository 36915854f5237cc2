//! Quantum radar spoofing scenario.
//!
//! ```text
//! H0: rho0 = (1 - N_B)|0><0| + N_B |k><k|
//! H1: rho1 = (1 - x) rho0 + x |l><l|
//! ```
//!
//! `|k>` and `|l>` are either photon-number states or truncated coherent
//! states with mean photon numbers `k` and `l`, depending on [`BasisMode`].

use serde::{Deserialize, Serialize};

use crate::detector::{HypothesisPair, ThresholdSchedule};
use crate::qmat::{check_cap, DensityOperator, StateVector};
use crate::{c64, Error, Result, DEFAULT_DIMENSION_CAP, DEFAULT_LOG_FLOOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisMode {
    /// `|k>`, `|l>` are Fock states; requires integer `k, l <= K`.
    Number,
    /// `|k>`, `|l>` are truncated coherent states with amplitude `sqrt(k)`, `sqrt(l)`.
    Coherent,
}

fn default_cap() -> usize {
    DEFAULT_DIMENSION_CAP
}

fn default_eigen_tolerance() -> f64 {
    1e-9
}

fn default_log_floor() -> f64 {
    DEFAULT_LOG_FLOOR
}

fn default_basis_mode() -> BasisMode {
    BasisMode::Coherent
}

fn default_truncation() -> usize {
    8
}

/// Scenario plus sweep grid, read from a flat JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Photon-number truncation; the single-copy dimension is `K + 1`.
    #[serde(rename = "K", default = "default_truncation")]
    pub truncation: usize,
    #[serde(rename = "N_B")]
    pub noise_level: f64,
    /// Mean photon number of the noise state.
    pub k: f64,
    /// Mean photon number of the target return.
    pub l: f64,
    /// Reflective index of the target.
    pub x: f64,
    #[serde(default = "default_basis_mode")]
    pub basis_mode: BasisMode,
    pub threshold: ThresholdSchedule,
    pub lambdas: Vec<f64>,
    pub n_max: usize,
    #[serde(default = "default_cap")]
    pub dimension_cap: usize,
    #[serde(default = "default_eigen_tolerance")]
    pub eigen_tolerance: f64,
    #[serde(default = "default_log_floor")]
    pub log_floor: f64,
}

/// Case-study parameters: `N_B = 0.4, k = 1, l = 2, x = 0.8`,
/// `tau(n) = (0.7 n + 1.5) / (n + 1)`.
pub fn default_scenario() -> ScenarioConfig {
    ScenarioConfig {
        truncation: 8,
        noise_level: 0.4,
        k: 1.0,
        l: 2.0,
        x: 0.8,
        basis_mode: BasisMode::Coherent,
        threshold: ThresholdSchedule { c0bar: 0.7, d0bar: 1.5, c1bar: 1.0, d1bar: 1.0 },
        lambdas: vec![0.0, 0.25, 0.5, 1.0, 2.0],
        // 9^3 = 729 <= 4096 < 9^4
        n_max: 3,
        dimension_cap: DEFAULT_DIMENSION_CAP,
        eigen_tolerance: 1e-9,
        log_floor: DEFAULT_LOG_FLOOR,
    }
}

impl ScenarioConfig {
    pub fn single_copy_dim(&self) -> usize {
        self.truncation + 1
    }

    /// Checks parameter ranges and mode compatibility. Returns warnings for
    /// settings that are valid but poorly resolved by the truncation.
    pub fn validate(&self) -> Result<Vec<String>> {
        let cfg_err = |msg: String| Err(Error::ConfigError(msg));
        if self.truncation == 0 {
            return cfg_err("K must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.noise_level) {
            return cfg_err(format!("N_B must lie in [0, 1], got {}", self.noise_level));
        }
        if !(0.0..=1.0).contains(&self.x) {
            return cfg_err(format!("x must lie in [0, 1], got {}", self.x));
        }
        for (name, v) in [("k", self.k), ("l", self.l)] {
            if !v.is_finite() || v < 0.0 {
                return cfg_err(format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        let mut warnings = Vec::new();
        match self.basis_mode {
            BasisMode::Number => {
                for (name, v) in [("k", self.k), ("l", self.l)] {
                    if v.fract() != 0.0 {
                        return cfg_err(format!("{name} must be integer in number mode, got {v}"));
                    }
                    if v > self.truncation as f64 {
                        return cfg_err(format!("{name} = {v} exceeds truncation K = {}", self.truncation));
                    }
                }
            }
            BasisMode::Coherent => {
                for (name, v) in [("k", self.k), ("l", self.l)] {
                    if v > self.truncation as f64 {
                        return cfg_err(format!("{name} = {v} exceeds truncation K = {}", self.truncation));
                    }
                    if v > self.truncation as f64 / 2.0 {
                        warnings.push(format!(
                            "{name} = {v} exceeds K/2 = {}; the truncated coherent state is poorly resolved",
                            self.truncation as f64 / 2.0
                        ));
                    }
                }
            }
        }
        self.threshold.validate()?;
        if self.lambdas.is_empty() {
            return cfg_err("lambdas must be nonempty".into());
        }
        if let Some(bad) = self.lambdas.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return cfg_err(format!("lambdas must be finite and nonnegative, got {bad}"));
        }
        if self.n_max == 0 {
            return cfg_err("n_max must be at least 1".into());
        }
        if self.dimension_cap == 0 {
            return cfg_err("dimension_cap must be positive".into());
        }
        if !(self.eigen_tolerance > 0.0) {
            return cfg_err(format!("eigen_tolerance must be positive, got {}", self.eigen_tolerance));
        }
        if !(self.log_floor > 0.0) {
            return cfg_err(format!("log_floor must be positive, got {}", self.log_floor));
        }
        Ok(warnings)
    }

    /// `(K + 1)^{n_max} <= dimension_cap`.
    pub fn validate_budget(&self) -> Result<usize> {
        check_cap(self.single_copy_dim(), self.n_max, self.dimension_cap)
    }

    /// Largest `n` whose `n`-copy dimension fits under the cap.
    pub fn max_feasible_n(&self) -> usize {
        let d = self.single_copy_dim();
        let mut n = 0;
        while check_cap(d, n + 1, self.dimension_cap).is_ok() {
            n += 1;
        }
        n
    }
}

/// Truncated coherent state `∝ sum_{i<=K} zeta^i / sqrt(i!) |i>`, normalized.
pub fn coherent_state(zeta: f64, truncation: usize) -> StateVector {
    let amps = coherent_amplitudes(zeta, truncation);
    StateVector::new(amps.into_iter().map(|a| c64::new(a, 0.0)).collect())
        .expect("coherent amplitudes always include the vacuum term 1")
}

fn coherent_amplitudes(zeta: f64, truncation: usize) -> Vec<f64> {
    let mut amps = Vec::with_capacity(truncation + 1);
    let mut term = 1.0f64;
    amps.push(term);
    for i in 1..=truncation {
        term *= zeta / (i as f64).sqrt();
        amps.push(term);
    }
    amps
}

/// `Z_K` for which `e^{-|zeta|^2} / Z_K · sum_i zeta^i / sqrt(i!) |i>` has unit norm.
pub fn coherent_normalizer(zeta: f64, truncation: usize) -> f64 {
    let norm = coherent_amplitudes(zeta, truncation).iter().map(|a| a * a).sum::<f64>().sqrt();
    (-zeta * zeta).exp() * norm
}

/// Mean photon number `sum_i i |<i|v>|^2`.
pub fn mean_photon_number(v: &StateVector) -> f64 {
    v.amplitudes().iter().enumerate().map(|(i, a)| i as f64 * a.norm_sqr()).sum()
}

fn mode_state(cfg: &ScenarioConfig, mean: f64) -> Result<StateVector> {
    match cfg.basis_mode {
        BasisMode::Number => StateVector::basis(cfg.single_copy_dim(), mean as usize),
        BasisMode::Coherent => Ok(coherent_state(mean.sqrt(), cfg.truncation)),
    }
}

/// Builds `(rho0, rho1)` with `rho1 = (1 - x) rho0 + x |l><l|`.
pub fn build_hypotheses(cfg: &ScenarioConfig) -> Result<HypothesisPair> {
    cfg.validate()?;
    let vacuum = DensityOperator::pure(&StateVector::basis(cfg.single_copy_dim(), 0)?);
    let noise = DensityOperator::pure(&mode_state(cfg, cfg.k)?);
    let target = DensityOperator::pure(&mode_state(cfg, cfg.l)?);
    let rho0 = DensityOperator::mixture(&[(1.0 - cfg.noise_level, &vacuum), (cfg.noise_level, &noise)])?;
    let rho1 = DensityOperator::mixture(&[(1.0 - cfg.x, &rho0), (cfg.x, &target)])?;
    HypothesisPair::new(rho0, rho1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{eigenvalues_hermitian, HermitianOperator};

    fn number_mode(truncation: usize) -> ScenarioConfig {
        ScenarioConfig { truncation, basis_mode: BasisMode::Number, ..default_scenario() }
    }

    #[test]
    fn coherent_state_examples() {
        let vac = coherent_state(0.0, 5);
        assert_eq!(vac.amplitudes()[0], c64::new(1.0, 0.0));
        assert!(vac.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));

        let one = coherent_state(1.0, 2);
        let want = [0.632456, 0.632456, 0.447214];
        for (a, w) in one.amplitudes().iter().zip(want) {
            assert!((a.re - w).abs() < 1e-6);
        }
        assert!((mean_photon_number(&coherent_state(1.0, 64)) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn coherent_normalizer_matches_definition() {
        let z = coherent_normalizer(1.0, 2);
        let raw = [1.0, 1.0, 0.5f64.sqrt()];
        let scaled: f64 = raw.iter().map(|a| ((-1.0f64).exp() / z * a).powi(2)).sum();
        assert!((scaled - 1.0).abs() < 1e-14);
    }

    #[test]
    fn number_mode_defaults() {
        let h = build_hypotheses(&number_mode(8)).unwrap();
        let d0 = h.rho0().operator().diagonal_values();
        let d1 = h.rho1().operator().diagonal_values();
        let mut want0 = [0.0; 9];
        want0[0] = 0.6;
        want0[1] = 0.4;
        let mut want1 = [0.0; 9];
        want1[0] = 0.12;
        want1[1] = 0.08;
        want1[2] = 0.8;
        for i in 0..9 {
            assert!((d0[i] - want0[i]).abs() < 1e-15);
            assert!((d1[i] - want1[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn no_reflection_means_equal_hypotheses() {
        let cfg = ScenarioConfig { x: 0.0, ..default_scenario() };
        let h = build_hypotheses(&cfg).unwrap();
        assert_eq!(h.rho0().operator().max_abs_diff(h.rho1().operator()).unwrap(), 0.0);
    }

    #[test]
    fn no_noise_coherent_null_is_vacuum() {
        let cfg = ScenarioConfig { noise_level: 0.0, ..default_scenario() };
        let h = build_hypotheses(&cfg).unwrap();
        let mut vac = vec![0.0; 9];
        vac[0] = 1.0;
        assert!(h.rho0().operator().max_abs_diff(&HermitianOperator::diagonal(&vac)).unwrap() < 1e-15);
    }

    #[test]
    fn default_scenario_fields() {
        let d = default_scenario();
        assert_eq!(d.threshold.tau(1), 1.1);
        assert_eq!(d.x, 0.8);
        assert_eq!(d.max_feasible_n(), 3);
        assert!(d.validate_budget().is_ok());
        let deep = ScenarioConfig { n_max: 4, ..d };
        let err = deep.validate_budget().unwrap_err();
        assert_eq!(err, Error::DimensionCapExceeded { base: 9, copies: 4, dim: 6561, cap: 4096 });
        assert!(err.to_string().contains("9^4 = 6561"));
    }

    #[test]
    fn config_rules() {
        let frac = ScenarioConfig { k: 1.5, ..number_mode(8) };
        let err = frac.validate().unwrap_err().to_string();
        assert!(err.contains("k must be integer in number mode"), "{err}");
        assert!(ScenarioConfig { l: 9.0, ..number_mode(8) }.validate().is_err());
        assert!(ScenarioConfig { noise_level: 1.5, ..default_scenario() }.validate().is_err());
        assert!(ScenarioConfig { x: -0.1, ..default_scenario() }.validate().is_err());
        let warned = ScenarioConfig { truncation: 3, ..default_scenario() }.validate().unwrap();
        assert_eq!(warned.len(), 1);
    }

    #[test]
    fn coherent_ranks() {
        let h = build_hypotheses(&default_scenario()).unwrap();
        let rank = |op: &HermitianOperator| eigenvalues_hermitian(op).unwrap().iter().filter(|&&v| v > 1e-10).count();
        assert!(rank(h.rho0().operator()) <= 2);
        assert!(rank(h.rho1().operator()) <= 3);
    }

    #[test]
    fn config_json_round_trip_and_unknown_keys() {
        let json = serde_json::to_string(&default_scenario()).unwrap();
        assert!(json.contains("\"K\":8") && json.contains("\"N_B\":0.4"));
        let back: ScenarioConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, default_scenario());
        let bad = json.replace("\"x\":0.8", "\"x\":0.8,\"bogus\":1");
        let err = serde_json::from_str::<ScenarioConfig>(&bad).unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
    }
}
