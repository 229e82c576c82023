use plantbench_core::dynamics::{random_initial, run_class2, Schedule, SolverConfig};
use plantbench_core::instance::{generate_small_scale, CatalogueId, EWeighting};
use plantbench_core::oracle::{brute_force, max_eigenvalue, DEFAULT_EIGEN_TOL};

/// Class II on (a) with a linear beta ramp, recorded once and frozen.
#[test]
fn beta_ramp_on_a() {
    let inst = generate_small_scale(CatalogueId::A, EWeighting::default());
    let lmax = max_eigenvalue(&inst, DEFAULT_EIGEN_TOL).unwrap();
    assert!((lmax - 13.050985713370535).abs() < 1e-9);
    let cfg = SolverConfig {
        alpha: (0.4 * lmax).into(),
        beta: Schedule::Ramp {
            from: 0.0,
            to: 1.0,
            over_steps: 1000,
        },
        max_steps: 5000,
        ..SolverConfig::default()
    };
    let golden = [
        "planted:2", "mirror:2", "planted:2", "mirror:2", "mirror:2", "planted:2", "mirror:2", "planted:2",
        "planted:2", "mirror:2",
    ];
    let ground = brute_force(&inst, false).unwrap();
    for (seed, want) in golden.iter().enumerate() {
        let x0 = random_initial(8, 0.5, seed as u64).unwrap();
        let out = run_class2(&inst, &cfg, &x0).unwrap();
        assert_eq!(&out.label.as_ref().unwrap().to_string(), want, "seed {seed}");
        assert!(out.converged);
        assert_eq!(out.steps_used, 1029);
        assert!((out.final_energy + 46.4).abs() < 1e-12);
        assert!(ground.is_ground(&out.final_spins));
    }
}
