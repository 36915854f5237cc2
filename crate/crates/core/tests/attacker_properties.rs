mod common;

use common::{density_from, probabilities, raw};
use proptest::prelude::*;
use qspoof_core::analysis::relative_entropy;
use qspoof_core::attacker::{best_response_rho0, best_response_rho1};
use qspoof_core::detector::{helstrom_effect, HypothesisPair, ProjectiveEffect};
use qspoof_core::qmat::{tensor_power, DensityOperator};

const CAP: usize = 4096;
const FLOOR: f64 = 1e-18;
const BETAS: [f64; 5] = [0.1, 0.5, 1.0, 5.0, 25.0];

fn detection(effect: &ProjectiveEffect, rho: &DensityOperator) -> f64 {
    rho.expectation_of(effect.operator()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn attack_never_raises_detection_and_weakens_with_beta(
        r0 in raw(3),
        r1 in raw(3),
        d in 2usize..4,
        n in 1usize..3,
        tau in 0.3..2.0f64,
        full_rank in any::<bool>(),
    ) {
        let h = HypothesisPair::new(density_from(d, &r0, full_rank), density_from(d, &r1, full_rank)).unwrap();
        let effect = helstrom_effect(&h, n, tau, CAP, 1e-12).unwrap();
        let clean = h.rho1().tensor_power(n, CAP).unwrap();
        let baseline = detection(&effect, &clean);

        let mut previous_rate = f64::NEG_INFINITY;
        let mut previous_cost = f64::INFINITY;
        for beta in BETAS {
            let star = best_response_rho1(h.rho1(), &effect, beta, n, CAP, FLOOR).unwrap();
            let rate = detection(&effect, &star);
            let cost = relative_entropy(&star, &clean).unwrap();
            prop_assert!(rate <= baseline + 1e-10, "no-gain: {rate} > {baseline}");
            prop_assert!(rate >= previous_rate - 1e-10, "beta-monotone rate");
            prop_assert!(cost <= previous_cost + 1e-10, "beta-monotone cost");
            previous_rate = rate;
            previous_cost = cost;
        }
    }

    #[test]
    fn commuting_case_is_diagonal_tilt(
        r in probabilities(3),
        mask in prop::collection::vec(any::<bool>(), 9),
        n in 1usize..3,
        beta in 0.1..10.0f64,
    ) {
        let rho1 = DensityOperator::diagonal(&r).unwrap();
        let dim = 3usize.pow(n as u32);
        let indices: Vec<usize> = (0..dim).filter(|&i| mask[i]).collect();
        let effect = ProjectiveEffect::diagonal(dim, &indices).unwrap();
        let star = best_response_rho1(&rho1, &effect, beta, n, CAP, FLOOR).unwrap();

        let weights: Vec<f64> = (0..dim)
            .map(|s| {
                let (a, b) = (s / 3, s % 3);
                let prior = if n == 1 { r[s] } else { r[a] * r[b] };
                prior * if mask[s] { (-1.0 / beta).exp() } else { 1.0 }
            })
            .collect();
        let z: f64 = weights.iter().sum();
        let want = DensityOperator::diagonal(&weights.iter().map(|w| w / z).collect::<Vec<_>>()).unwrap();
        prop_assert!(star.operator().max_abs_diff(want.operator()).unwrap() <= 1e-10);
    }

    #[test]
    fn null_hypothesis_is_exact_power(r in raw(3), n in 1usize..4) {
        let rho0 = density_from(3, &r, false);
        let star = best_response_rho0(&rho0, n, CAP).unwrap();
        let direct = tensor_power(rho0.operator(), n, CAP).unwrap();
        prop_assert!(star.operator() == &direct);
    }
}
