//! Randomized checks of the simulator, metric and channel invariants.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use vqoc_core::linalg::{hermitian_eigenvalues, unitarity_defect};
use vqoc_core::metrics::{
    empirical_cdf, kl_divergence, kl_from_haar, state_fidelity, trotter_error, w1_optimality,
    w1_optimality_cdf, wasserstein1, EmpiricalDistribution,
};
use vqoc_core::noise::{depolarize, max_depolarizing_probability, run_noisy_circuit};
use vqoc_core::{
    build_circuit, circuit_unitary, run_circuit, single_excitation_population, AnsatzKind, ChainSetup,
    ControlPolicy, DensityMatrix, NoiseConfig, Shots, StateVector,
};

fn kind_of(i: usize) -> AnsatzKind {
    AnsatzKind::ALL[i % 3]
}

/// Policy with arbitrary parameter values, not only the initialization range.
fn policy(max_qubits: usize) -> impl Strategy<Value = ControlPolicy> {
    (2..=max_qubits, 2usize..=6, 0.0..5.0f64, 0usize..3, -2.0..2.0f64).prop_flat_map(
        |(n, steps, t, k, j0)| {
            let kind = kind_of(k);
            let len = kind.param_count(n, steps);
            prop::collection::vec(-10.0..10.0f64, len).prop_map(move |params| {
                let setup = ChainSetup::new(n, steps, t).unwrap().with_coupling(j0).unwrap();
                ControlPolicy::new(kind, setup, params).unwrap()
            })
        },
    )
}

fn density(max_qubits: usize) -> impl Strategy<Value = DensityMatrix> {
    (1..=max_qubits).prop_flat_map(|n| {
        let dim = 1usize << n;
        // a random A A† has full support; rank-1 cases come from the pure branch
        (
            prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim),
            any::<bool>(),
        )
            .prop_map(move |(v, pure)| {
                let a =
                    DMatrix::from_iterator(dim, dim, v.into_iter().map(|(re, im)| Complex64::new(re, im)));
                if pure {
                    let col: Vec<Complex64> = a.column(0).iter().copied().collect();
                    return StateVector::normalized(col, n).unwrap().to_density();
                }
                let m = &a * a.adjoint();
                let tr = m.trace();
                DensityMatrix::new(m / tr, n).unwrap()
            })
    })
}

fn min_eigenvalue(rho: &DensityMatrix) -> f64 {
    hermitian_eigenvalues(rho.matrix())
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn excitation_number_is_conserved(p in policy(6), site in 1usize..=6) {
        let n = p.num_qubits();
        let psi = StateVector::excitation(n, (site - 1) % n + 1).unwrap();
        let out = run_circuit(&build_circuit(&p).unwrap(), &psi).unwrap();
        prop_assert!((single_excitation_population(&out) - 1.0).abs() < 1e-12);
        prop_assert!((out.norm() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn depolarizing_keeps_a_valid_state(rho in density(3), u in 0.0..=1.0f64) {
        let p = u * max_depolarizing_probability(rho.num_qubits());
        let out = depolarize(&rho, p).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-11);
        prop_assert!(out.trace().im.abs() < 1e-11);
        prop_assert!(out.hermiticity_defect() < 1e-11);
        prop_assert!(min_eigenvalue(&out) >= -1e-10);
        if p <= 1.0 {
            prop_assert!(out.purity() <= rho.purity() + 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn circuits_are_unitary(p in policy(4)) {
        let u = circuit_unitary(&build_circuit(&p).unwrap());
        prop_assert!(unitarity_defect(&u) < 1e-10);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in density(3), b in density(3)) {
        prop_assume!(a.num_qubits() == b.num_qubits());
        let ab = state_fidelity(&a, &b).unwrap();
        let ba = state_fidelity(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-10);
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn noisy_runs_stay_physical(p in policy(3), ps in 0.0..0.3f64, pg in 0.0..0.3f64) {
        let n = p.num_qubits();
        let seq = build_circuit(&p).unwrap();
        let rho0 = StateVector::excitation(n, 1).unwrap().to_density();
        let out = run_noisy_circuit(&seq, &rho0, &NoiseConfig::new(ps, pg, Shots::Exact)).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-11);
        prop_assert!(out.hermiticity_defect() < 1e-11);
        prop_assert!(min_eigenvalue(&out) >= -1e-10);
    }

    #[test]
    fn spam_degrades_fidelity_monotonically(p in policy(4), pg in 0.0..0.1f64) {
        // SPAM layers compose to F(p) = (1−p)² F₀ + (1 − (1−p)²)/2^N; against
        // the ideal output F₀ ≥ 2^−N, so F is nonincreasing in p
        let n = p.num_qubits();
        let seq = build_circuit(&p).unwrap();
        let psi = StateVector::excitation(n, 1).unwrap();
        let target = run_circuit(&seq, &psi).unwrap();
        let fid = |ps: f64| {
            run_noisy_circuit(&seq, &psi.to_density(), &NoiseConfig::new(ps, pg, Shots::Exact))
                .unwrap()
                .expectation_pure(&target)
                .unwrap()
        };
        let f0 = fid(0.0);
        let d = (1usize << n) as f64;
        let mut prev = f64::INFINITY;
        for ps in [0.0, 0.005, 0.01, 0.02] {
            let f = fid(ps);
            let keep = (1.0 - ps) * (1.0 - ps);
            prop_assert!((f - (keep * f0 + (1.0 - keep) / d)).abs() < 1e-12);
            prop_assert!(f <= prev + 1e-15);
            prev = f;
        }
    }

    #[test]
    fn commuting_layers_have_no_trotter_error(p in policy(4)) {
        let setup = p.setup().with_coupling(0.0).unwrap();
        let q = ControlPolicy::new(p.kind(), setup, p.params().to_vec()).unwrap();
        prop_assert!(trotter_error(&q, 4).unwrap() < 1e-10);
    }

    #[test]
    fn kl_is_nonnegative(raw_p in prop::collection::vec(0.0..1.0f64, 20), raw_q in prop::collection::vec(1e-6..1.0f64, 20)) {
        let sp: f64 = raw_p.iter().sum();
        prop_assume!(sp > 0.0);
        let sq: f64 = raw_q.iter().sum();
        let p: Vec<f64> = raw_p.iter().map(|x| x / sp).collect();
        let q: Vec<f64> = raw_q.iter().map(|x| x / sq).collect();
        prop_assert!(kl_divergence(&p, &q).unwrap() >= 0.0);
    }

    #[test]
    fn haar_kl_is_nonnegative(samples in prop::collection::vec(0.0..=1.0f64, 1..400), n in 1usize..=6, bins in 1usize..=75) {
        prop_assert!(kl_from_haar(&samples, bins, n).unwrap() >= 0.0);
    }
}

fn fidelity_sets() -> impl Strategy<Value = Vec<f64>> {
    // mix of arbitrary fidelities and ones close to 1 so the clamp at −ε is hit
    prop::collection::vec(
        prop_oneof![0.0..=1.0f64, (0.0..8.0f64).prop_map(|e| 1.0 - 10f64.powf(-e))],
        1..200,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn w1_closed_form_matches_cdf_integral(f in fidelity_sets(), eps in 1.0..8.0f64) {
        let closed = w1_optimality(&f, eps).unwrap();
        let integral = w1_optimality_cdf(&f, eps).unwrap();
        prop_assert!((closed - integral).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&closed));
        prop_assert!((0.0..=1.0).contains(&integral));
    }

    #[test]
    fn w1_is_symmetric(a in prop::collection::vec(-4.0..0.0f64, 1..100), b in prop::collection::vec(-4.0..0.0f64, 1..100)) {
        let p = EmpiricalDistribution::new(&a, -4.0, 0.0).unwrap();
        let q = empirical_cdf(&b).unwrap();
        let q = EmpiricalDistribution::new(q.samples(), -4.0, 0.0).unwrap();
        prop_assert_eq!(wasserstein1(&p, &q), wasserstein1(&q, &p));
        prop_assert_eq!(wasserstein1(&p, &p), 0.0);
    }
}

#[test]
fn trotter_error_halves_with_doubled_steps() {
    for seed in 0..3 {
        for kind in AnsatzKind::ALL {
            let xi = |steps: usize| {
                let setup = ChainSetup::new(4, steps, 2.0).unwrap();
                let p = vqoc_core::smooth_policy(kind, setup, seed).unwrap();
                trotter_error(&p, 64).unwrap()
            };
            let ratio = xi(16) / xi(8);
            assert!((ratio - 0.5).abs() <= 0.1, "{kind} seed {seed}: {ratio}");
        }
    }
}
