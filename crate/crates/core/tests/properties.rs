use kvnsim::estimator::select_truncation;
use kvnsim::evolution::evolve;
use kvnsim::fock::{dimension, encode_position, FockBasis, StateVector};
use kvnsim::hamiltonian::{build_hamiltonian, norm_certificate};
use kvnsim::models::{random_system, RandomSystemSpec};
use kvnsim::ode::{validate_system, OdeSystem, ZERO_SUM_TOL};
use proptest::prelude::*;

fn random_sys(n: usize, interactions: usize, max_size: usize, scale: f64, seed: u64) -> OdeSystem {
    let spec = RandomSystemSpec {
        n_vars: n,
        interactions,
        max_size: max_size.min(n),
        coupling_scale: scale,
    };
    random_system(&spec, seed).unwrap()
}

prop_compose! {
    fn small_system()(n in 2usize..=5, k in 1usize..=5, d in 2usize..=4, scale in 0.1f64..3.0, seed in any::<u64>()) -> OdeSystem {
        random_sys(n, k, d, scale, seed)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_unrank_round_trip(n in 1usize..=8, m in 0usize..=6, frac in 0.0f64..1.0) {
        let basis = FockBasis::new(n, m).unwrap();
        let i = ((basis.dim() as f64 * frac) as u64).min(basis.dim() - 1);
        let w = basis.unrank(i).unwrap();
        prop_assert_eq!(w.len(), m);
        prop_assert!(w.symbols().windows(2).all(|p| p[0] <= p[1]));
        prop_assert_eq!(basis.rank(&w).unwrap(), i);
        prop_assert_eq!(basis.rank_occupations(&w.occupations(n)).unwrap(), i);
    }

    #[test]
    fn generated_systems_are_valid_and_zero_sum(sys in small_system()) {
        prop_assert!(validate_system(&sys.to_draft()).ok);
        for p in sys.interactions() {
            prop_assert!(p.coupling_sum().abs() <= ZERO_SUM_TOL);
        }
        prop_assert!(sys.is_divergence_free());
        // Σ x_i ẋ_i vanishes for zero-sum couplings.
        let x: Vec<f64> = (0..sys.n_vars()).map(|i| 0.3 - 0.17 * i as f64).collect();
        prop_assert!(sys.weight_drift(&x).unwrap().abs() <= 1e-12 * sys.weight_drift_scale(&x).unwrap().max(1.0));
    }

    #[test]
    fn hamiltonian_is_hermitian_and_imaginary(sys in small_system(), m in 1usize..=4) {
        let basis = FockBasis::new(sys.n_vars(), m).unwrap();
        let h = build_hamiltonian(&sys, &basis).unwrap();
        prop_assert!(h.is_hermitian());
        prop_assert!(h.is_purely_imaginary());
        prop_assert_eq!(h.hermiticity_defect(), 0.0);
        prop_assert!(norm_certificate(&h, &sys, &basis).passes());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn evolution_is_unitary(sys in small_system(), m in 1usize..=3, t in 0.0f64..5.0, x_seed in 0u64..1000) {
        let basis = FockBasis::new(sys.n_vars(), m).unwrap();
        let h = build_hamiltonian(&sys, &basis).unwrap();
        let x0: Vec<f64> = (0..sys.n_vars()).map(|i| ((x_seed + 7 * i as u64) % 11) as f64 / 11.0 - 0.5).collect();
        let (psi0, _) = encode_position(&basis, &x0).unwrap();
        let r = evolve(&h, &psi0, &[t / 2.0, t], 1e-10).unwrap();
        for (n, psi) in r.norms.iter().zip(&r.states) {
            prop_assert!((n - 1.0).abs() <= 1e-9);
            prop_assert!((psi.norm() - 1.0).abs() <= 1e-9);
            prop_assert!(psi.max_abs_imag() <= 1e-10);
        }
    }

    #[test]
    fn semigroup(sys in small_system(), t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
        let basis = FockBasis::new(sys.n_vars(), 2).unwrap();
        let h = build_hamiltonian(&sys, &basis).unwrap();
        let amps: Vec<f64> = (0..basis.len()).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let psi0 = StateVector::from_real(&basis, &amps).unwrap();
        let a = evolve(&h, &psi0, &[t1], 1e-12).unwrap();
        let ab = evolve(&h, &a.states[0], &[t2], 1e-12).unwrap();
        let direct = evolve(&h, &psi0, &[t1 + t2], 1e-12).unwrap();
        for (x, y) in ab.states[0].amplitudes().iter().zip(direct.states[0].amplitudes()) {
            prop_assert!((x - y).norm() <= 1e-9);
        }
    }

    #[test]
    fn truncation_grows_with_accuracy_and_horizon(
        sys in small_system(),
        b in 1usize..=3,
        e1 in 1e-12f64..0.5,
        shrink in 1e-6f64..1.0,
        t1 in 0.1f64..100.0,
        grow in 1.0f64..50.0,
    ) {
        let e2 = e1 * shrink;
        let loose = select_truncation(&sys, b, e1, t1).unwrap();
        let tight = select_truncation(&sys, b, e2, t1).unwrap();
        prop_assert!(tight.m >= loose.m);
        let longer = select_truncation(&sys, b, e1, t1 * grow).unwrap();
        prop_assert!(longer.m >= loose.m);
        prop_assert!(longer.delta >= loose.delta);
        prop_assert_eq!(loose.m, sys.d() as u64 * loose.n0 + b as u64);
    }

    #[test]
    fn position_encoding_is_normalized(n in 1usize..=4, m in 0usize..=5, scale in 0.0f64..2.0) {
        let basis = FockBasis::new(n, m).unwrap();
        let x: Vec<f64> = (0..n).map(|i| scale * (i as f64 - 1.5)).collect();
        let (psi, l) = encode_position(&basis, &x).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() <= 1e-12);
        prop_assert!(l > 0.0);
        prop_assert_eq!(psi.len() as u64, dimension(n, m).unwrap());
    }
}
