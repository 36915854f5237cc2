mod common;

use common::{classical_lrt, density_from, probabilities, raw};
use faer::Mat;
use proptest::prelude::*;
use qspoof_core::c64;
use qspoof_core::detector::{bayes_risk_with_costs, decide, helstrom_effect, rates, HypothesisPair, ProjectiveEffect};
use qspoof_core::qmat::DensityOperator;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAP: usize = 4096;
const ZERO: f64 = 1e-12;

fn random_projector(d: usize, rank: usize, rng: &mut ChaCha8Rng) -> ProjectiveEffect {
    if rank == 0 {
        return ProjectiveEffect::zero(d);
    }
    let cols = Mat::from_fn(d, rank, |_, _| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    ProjectiveEffect::onto_span(cols.as_ref()).unwrap()
}

fn diagonal_pair(r1: &[f64], r0: &[f64]) -> HypothesisPair {
    HypothesisPair::new(DensityOperator::diagonal(r0).unwrap(), DensityOperator::diagonal(r1).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn helstrom_beats_random_projectors(r0 in raw(3), r1 in raw(3), seed in any::<u64>()) {
        let h = HypothesisPair::new(density_from(3, &r0, false), density_from(3, &r1, false)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for tau in [0.5, 1.0, 2.0] {
            let best = helstrom_effect(&h, 1, tau, CAP, ZERO).unwrap();
            // tau = false-alarm cost / miss cost
            let risk = |e: &ProjectiveEffect| bayes_risk_with_costs(e, &h, 1, 1.0, tau, CAP).unwrap();
            let optimum = risk(&best);
            for k in 0..200 {
                let candidate = random_projector(3, k % 4, &mut rng);
                prop_assert!(optimum <= risk(&candidate) + 1e-12);
            }
        }
    }

    #[test]
    fn commuting_case_matches_classical_lrt(
        r1 in probabilities(3),
        r0 in probabilities(3),
        n in 1usize..5,
        tau in 0.2..3.0f64,
    ) {
        let h = diagonal_pair(&r1, &r0);
        let effect = helstrom_effect(&h, n, tau, CAP, ZERO).unwrap();
        let rho1n = h.rho1().tensor_power(n, CAP).unwrap();
        let rho0n = h.rho0().tensor_power(n, CAP).unwrap();
        let (p_d, p_f) = rates(&effect, &rho1n, &rho0n).unwrap();
        let (want_d, want_f) = classical_lrt(&r1, &r0, n, tau);
        prop_assert!((p_d - want_d).abs() <= 1e-10);
        prop_assert!((p_f - want_f).abs() <= 1e-10);
    }

    #[test]
    fn neyman_pearson_monotonicity(
        r1 in probabilities(3),
        r0 in probabilities(3),
        n in 1usize..4,
        ta in 0.1..3.0f64,
        gap in 0.0..3.0f64,
    ) {
        let h = diagonal_pair(&r1, &r0);
        let rho1n = h.rho1().tensor_power(n, CAP).unwrap();
        let rho0n = h.rho0().tensor_power(n, CAP).unwrap();
        let at = |tau: f64| rates(&helstrom_effect(&h, n, tau, CAP, ZERO).unwrap(), &rho1n, &rho0n).unwrap();
        let (da, fa) = at(ta);
        let (db, fb) = at(ta + gap);
        prop_assert!(da >= db - 1e-12);
        prop_assert!(fa >= fb - 1e-12);
    }

    #[test]
    fn decide_over_eigenbasis_reproduces_rates(r0 in raw(3), r1 in raw(3), rho in raw(3), tau in 0.3..3.0f64) {
        let h = HypothesisPair::new(density_from(3, &r0, false), density_from(3, &r1, false)).unwrap();
        let effect = helstrom_effect(&h, 1, tau, CAP, ZERO).unwrap();
        let state = density_from(3, &rho, false);
        let spectrum = state.spectrum().unwrap();
        let ensemble: f64 = (0..3)
            .map(|j| spectrum.eigenvalues()[j] * decide(&spectrum.eigenvector(j), &effect).unwrap())
            .sum();
        let direct = state.expectation_of(effect.operator()).unwrap();
        prop_assert!((ensemble - direct).abs() <= 1e-10);
    }
}
