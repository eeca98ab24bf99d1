use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use stabmagic::anneal::{anneal_minimize, AnnealConfig};
use stabmagic::bmsa::{bmsa, bmsa_bruteforce, Backend};
use stabmagic::clifford::random_clifford;
use stabmagic::measures::{sre, stabilizer_fidelity};
use stabmagic::simkit::{doped_circuit, random_stabilizer_state, simulate, CircuitOp, SparseStabExpansion};
use stabmagic::{PauliString, Statevector};

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Statevector {
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    Statevector::from_unnormalized(amps).unwrap()
}

#[test]
fn minimized_participation_entropy_matches_bmsa() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..3 {
        let psi = random_state(3, &mut rng);
        for alpha in [1.0, 2.0] {
            let res = bmsa(&psi, alpha).unwrap();
            for _ in 0..200 {
                let c = random_clifford(3, &mut rng);
                let s = c.apply_to_state(&psi).unwrap().participation_entropy(alpha);
                assert!(s >= res.value - 1e-9);
            }
            let best = res.tableau().unwrap().inverse().apply_to_state(&psi).unwrap();
            assert!((best.participation_entropy(alpha) - res.value).abs() < 1e-10);
        }
    }
}

#[test]
fn stabilizer_states_are_free() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for n in 1..=4 {
        for _ in 0..5 {
            let s = random_stabilizer_state(n, &mut rng).unwrap();
            assert!(sre(&s, 2.0, false).unwrap().abs() < 1e-9);
            assert!(bmsa(&s, 1.0).unwrap().value < 1e-9);
            assert!((stabilizer_fidelity(&s).unwrap().0 - 1.0).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operations_preserve_norm(seed in any::<u64>(), idx in 0u64..64, theta in -3.2f64..3.2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(3, &mut rng);
        let p = PauliString::from_index(3, idx);
        prop_assert!((psi.apply_pauli_rotation(&p, theta).unwrap().norm_sqr() - 1.0).abs() < 1e-10);
        prop_assert!((psi.apply_pauli(&p).unwrap().norm_sqr() - 1.0).abs() < 1e-10);
        let c = random_clifford(3, &mut rng);
        prop_assert!((c.apply_to_state(&psi).unwrap().norm_sqr() - 1.0).abs() < 1e-10);
        for (_, prob, post) in psi.measure_qubit_outcomes(rng.random_range(0..3)).unwrap() {
            if prob > 1e-14 {
                prop_assert!((post.norm_sqr() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn subadditive_and_clifford_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_state(1, &mut rng);
        let b = random_state(2, &mut rng);
        let joint = a.tensor(&b);
        for alpha in [1.0, 2.0, f64::INFINITY] {
            let va = bmsa(&a, alpha).unwrap().value;
            let vb = bmsa(&b, alpha).unwrap().value;
            let vj = bmsa(&joint, alpha).unwrap().value;
            prop_assert!(vj <= va + vb + 1e-9);
            let moved = random_clifford(3, &mut rng).apply_to_state(&joint).unwrap();
            prop_assert!((bmsa(&moved, alpha).unwrap().value - vj).abs() < 1e-9);
        }
    }

    #[test]
    fn sparse_terms_at_most_double(seed in any::<u64>(), n_t in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circ = doped_circuit(5, n_t, &mut rng).unwrap();
        let mut state = SparseStabExpansion::new(5).unwrap();
        for op in circ.ops() {
            let before = state.term_count();
            state.apply(op).unwrap();
            match op {
                CircuitOp::Clifford(_) => prop_assert_eq!(state.term_count(), before),
                CircuitOp::Rotation { .. } => prop_assert!(state.term_count() <= 2 * before),
            }
        }
    }

    #[test]
    fn truncation_error_is_bounded_by_drift_angle(seed in any::<u64>(), eps in 1e-4f64..5e-2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circ = doped_circuit(5, 5, &mut rng).unwrap();
        let (_, report) = simulate(&circ, eps, true).unwrap();
        let infidelity = 1.0 - report.fidelity.unwrap();
        prop_assert!(infidelity <= report.infidelity_bound + 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn anneal_is_an_upper_bound(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(n, &mut rng);
        let exact = bmsa_bruteforce(&psi, 1.0, Backend::Overlap).unwrap().value;
        let cfg = AnnealConfig { seed, restarts: 2, ..Default::default() };
        let r = anneal_minimize(&psi, &cfg).unwrap();
        prop_assert!(r.best_value >= exact - 1e-9);
        let check = r.best_tableau.inverse().apply_to_state(&psi).unwrap();
        prop_assert!((check.participation_entropy(1.0) - r.best_value).abs() < 1e-10);
        prop_assert!(r.trace.windows(2).all(|w| w[1].best_value <= w[0].best_value));
    }
}
