use nalgebra::{DMatrix, SymmetricEigen};
use plantbench_core::instance::{
    build_couplings, coarse_grain, generate_orthogonal_patterns, generate_small_scale, CatalogueId, EWeighting,
    Instance,
};
use plantbench_core::oracle::{brute_force, dominant_eigenpair, max_eigenvalue, spectral_bounds, DEFAULT_EIGEN_TOL};
use plantbench_core::spin_of;

fn dense(inst: &Instance) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let n = inst.n;
    SymmetricEigen::new(DMatrix::from_row_slice(n, n, inst.coupling.as_slice()))
}

fn reference_max(inst: &Instance) -> f64 {
    dense(inst).eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn power_iteration_matches_dense_eigensolver() {
    let mut cases: Vec<Instance> = CatalogueId::ALL
        .iter()
        .map(|&id| generate_small_scale(id, EWeighting::default()))
        .collect();
    for (n, k, dw, seed) in [
        (16, 3, 0.05, 1),
        (16, 3, 0.001, 5),
        (16, 7, 0.001, 4),
        (16, 12, 0.01, 2),
        (32, 8, 0.02, 3),
        (64, 10, 0.001, 4),
        (64, 40, 0.001, 5),
        (64, 64, 0.001, 6),
        (64, 33, 0.01, 7),
    ] {
        let ps = generate_orthogonal_patterns(n, k, seed).unwrap().with_dw(dw).unwrap();
        cases.push(build_couplings(&ps));
    }
    for inst in &cases {
        let want = reference_max(inst);
        let got = max_eigenvalue(inst, DEFAULT_EIGEN_TOL).unwrap();
        assert!(
            (got - want).abs() <= 1e-8 * want.abs().max(1e-12),
            "{}: {got} vs {want}",
            inst.label
        );
        let (lo, _) = spectral_bounds(&inst.coupling, DEFAULT_EIGEN_TOL).unwrap();
        let want_lo = dense(inst).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((lo - want_lo).abs() <= 1e-8 * want_lo.abs().max(1.0), "{}: {lo} vs {want_lo}", inst.label);
    }
}

#[test]
fn c_principal_eigenvector_is_not_the_ground_state() {
    let inst = generate_small_scale(CatalogueId::C, EWeighting::default());
    let eig = dominant_eigenpair(&inst, DEFAULT_EIGEN_TOL).unwrap();
    let signs: Vec<i8> = eig.vector.iter().map(|&v| spin_of(v)).collect();
    let ground = brute_force(&inst, false).unwrap();
    assert!(!ground.is_ground(&signs));

    // Same conclusion from the dense reference.
    let d = dense(&inst);
    let top = (0..8).max_by(|&a, &b| d.eigenvalues[a].total_cmp(&d.eigenvalues[b])).unwrap();
    let v: Vec<i8> = d.eigenvectors.column(top).iter().map(|&x| spin_of(x)).collect();
    assert!(!ground.is_ground(&v));
}

#[test]
fn heaviest_pattern_is_the_ground_state_for_small_orthogonal_sets() {
    for seed in 0..40u64 {
        let n = if seed % 2 == 0 { 8 } else { 16 };
        let k = 1 + (seed as usize / 2) % (n / 2);
        let dw = 0.9 / k as f64 * (0.1 + 0.8 * ((seed * 7 % 10) as f64 / 10.0));
        let ps = generate_orthogonal_patterns(n, k, seed).unwrap().with_dw(dw).unwrap();
        let inst = build_couplings(&ps);
        let r = brute_force(&inst, false).unwrap();
        assert!(r.is_ground(ps.pattern(ps.heaviest())), "n={n} k={k} dw={dw}");
        assert_eq!(r.degeneracy, 2);
    }
}

#[test]
fn catalogue_ground_states() {
    // The heaviest pattern is the ground state for every catalogue entry
    // except (a), where pattern 2 wins: pattern 2 sits one flip from
    // pattern 1 and collects most of its weight.
    for id in CatalogueId::ALL {
        let inst = generate_small_scale(id, EWeighting::default());
        let ps = inst.patterns().unwrap();
        let r = brute_force(&inst, false).unwrap();
        let want = if id == CatalogueId::A { 1 } else { ps.heaviest() };
        assert!(r.is_ground(ps.pattern(want)), "{id}");
    }
}

#[test]
fn coarse_graining_c_preserves_the_ground_state() {
    let inst = generate_small_scale(CatalogueId::C, EWeighting::default());
    let g = coarse_grain(&inst, 0.05).unwrap();
    assert_eq!(brute_force(&inst, false).unwrap().ground_state, brute_force(&g, false).unwrap().ground_state);
}

#[test]
fn power_iteration_over_a_grid_of_orthogonal_sets() {
    // Close top clusters (small dw) and degenerate ladders (dw = 0) included.
    for n in [8usize, 16, 32] {
        for k in 1..=n {
            for (seed, dw) in [(0, 0.0), (1, 0.001), (2, 0.01), (3, 0.1 / k as f64)] {
                let ps = generate_orthogonal_patterns(n, k, seed).unwrap().with_dw(dw).unwrap();
                let inst = build_couplings(&ps);
                let ev = dense(&inst).eigenvalues;
                let (want_lo, want_hi) = ev.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
                let (lo, hi) = spectral_bounds(&inst.coupling, DEFAULT_EIGEN_TOL).unwrap();
                let scale = want_lo.abs().max(want_hi.abs()).max(1e-12);
                assert!((hi - want_hi).abs() <= 1e-8 * scale, "n{n} k{k} dw{dw}: {hi} vs {want_hi}");
                assert!((lo - want_lo).abs() <= 1e-8 * scale, "n{n} k{k} dw{dw}: {lo} vs {want_lo}");
            }
        }
    }
}
