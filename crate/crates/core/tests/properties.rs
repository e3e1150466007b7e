use multidep::dependence::{dependence, dependence_classical, dependence_pure};
use multidep::formats::{parse_dmat, parse_pdist, write_dmat, write_pdist};
use multidep::{random_density, random_state_vector, DensityOperator, ProbTensor};
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((3, 2)), Just((4, 2)), Just((3, 3))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mixed_dependence_in_range((n, d) in shape(), rank in 1usize..6, seed in any::<u64>()) {
        let rho = random_density(n, d, rank, seed).unwrap();
        let r = dependence(&rho).unwrap();
        prop_assert!(r.value >= -1e-9 && r.value <= 2.0 + 1e-9);
        prop_assert!(r.pair_values.iter().all(|p| p.cmi >= r.value - 1e-12));
    }

    #[test]
    fn relabelling_parties_keeps_dependence((n, d) in shape(), seed in any::<u64>()) {
        let rho = random_density(n, d, 2, seed).unwrap();
        let order: Vec<usize> = (0..n).rev().collect();
        let a = dependence(&rho).unwrap().value;
        let b = dependence(&rho.permute(&order).unwrap()).unwrap().value;
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn pure_shortcut_agrees((n, d) in shape(), seed in any::<u64>()) {
        let psi = random_state_vector(n, d, seed).unwrap();
        let fast = dependence_pure(&psi).unwrap();
        let slow = dependence(&DensityOperator::from_pure(&psi)).unwrap();
        prop_assert!(fast.value <= 1.0 + 1e-9);
        prop_assert!((fast.value - slow.value).abs() < 1e-8);
    }

    #[test]
    fn classical_matches_diagonal_embedding((n, d) in shape(), seed in any::<u64>()) {
        let p = ProbTensor::random(n, d, seed).unwrap();
        let c = dependence_classical(&p).unwrap().value;
        let q = dependence(&p.to_density()).unwrap().value;
        prop_assert!(c <= 1.0 + 1e-9);
        prop_assert!((c - q).abs() < 1e-9);
    }

    #[test]
    fn text_formats_round_trip((n, d) in shape(), seed in any::<u64>()) {
        let rho = random_density(n, d, 3, seed).unwrap();
        let back = parse_dmat(&write_dmat(&rho), true).unwrap();
        let diff = rho.matrix().iter().zip(back.matrix().iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-12);
        let p = ProbTensor::random(n, d, seed).unwrap();
        let q = parse_pdist(&write_pdist(&p)).unwrap();
        prop_assert!(p.probs().iter().zip(q.probs()).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}
