use proptest::prelude::*;
use qspoof_core::qmat::{eigenvalues_hermitian, DensityOperator, HermitianOperator, StateVector};
use qspoof_core::radar::{build_hypotheses, coherent_state, default_scenario, BasisMode, ScenarioConfig};

fn rank(op: &HermitianOperator) -> usize {
    eigenvalues_hermitian(op).unwrap().iter().filter(|&&v| v > 1e-10).count()
}

fn scenario() -> impl Strategy<Value = ScenarioConfig> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0u8..=4, 0u8..=4, any::<bool>()).prop_map(|(nb, x, k, l, number)| ScenarioConfig {
        truncation: 8,
        noise_level: nb,
        x,
        k: k as f64,
        l: l as f64,
        basis_mode: if number { BasisMode::Number } else { BasisMode::Coherent },
        ..default_scenario()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reflected_component_identity(cfg in scenario()) {
        let h = build_hypotheses(&cfg).unwrap();
        let target = match cfg.basis_mode {
            BasisMode::Number => StateVector::basis(9, cfg.l as usize).unwrap(),
            BasisMode::Coherent => coherent_state(cfg.l.sqrt(), 8),
        };
        let lhs = h.rho1().operator() - &h.rho0().operator().scaled(1.0 - cfg.x);
        let rhs = DensityOperator::pure(&target).operator().scaled(cfg.x);
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12);
    }

    #[test]
    fn number_mode_is_diagonal_and_ranks_bounded(cfg in scenario()) {
        let h = build_hypotheses(&cfg).unwrap();
        if cfg.basis_mode == BasisMode::Number {
            for rho in [h.rho0(), h.rho1()] {
                let op = rho.operator();
                for i in 0..9 {
                    for j in 0..9 {
                        if i != j {
                            prop_assert_eq!(op.get(i, j).norm(), 0.0);
                        }
                    }
                }
            }
        }
        prop_assert!(rank(h.rho0().operator()) <= 2);
        prop_assert!(rank(h.rho1().operator()) <= 3);
    }

    #[test]
    fn coherent_state_normalized(zeta in 0.0..=4.0f64, k in 2usize..=64) {
        let v = coherent_state(zeta, k);
        let norm: f64 = v.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() <= 1e-12);
    }
}
