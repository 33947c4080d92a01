use hullopt::config::RunConfig;
use hullopt::geometry::{build_grid, GridSpec};
use hullopt::viscous::assemble_md;
use hullopt::wave::{assemble_mw, j_vector, select_quadrature, LambdaQuadrature};
use nalgebra::SymmetricEigen;
use proptest::prelude::*;

/// `int |grad f_h|^2` of the Q1 interpolant by 2x2 Gauss per cell.
fn dirichlet_energy(grid: &GridSpec, f: &[f64]) -> f64 {
    let (dx, dz) = (grid.dx(), grid.dz());
    let g = 0.5 / 3f64.sqrt();
    let mut total = 0.0;
    for cz in 0..grid.nz() {
        for cx in 0..grid.nx() {
            let c = |ix, iz| grid.lattice_value(f, ix, iz);
            let (f00, f10, f01, f11) = (c(cx, cz), c(cx + 1, cz), c(cx, cz + 1), c(cx + 1, cz + 1));
            for s in [0.5 - g, 0.5 + g] {
                for t in [0.5 - g, 0.5 + g] {
                    let fx = ((f10 - f00) * (1.0 - t) + (f11 - f01) * t) / dx;
                    let fz = ((f01 - f00) * (1.0 - s) + (f11 - f10) * s) / dz;
                    total += 0.25 * dx * dz * (fx * fx + fz * fz);
                }
            }
        }
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stiffness_reproduces_the_q1_energy(nx in 2usize..12, nz in 2usize..8, seed in proptest::collection::vec(-1.0f64..1.0, 200)) {
        let grid = build_grid(2.0, 0.2, nx, nz).unwrap();
        let f: Vec<f64> = (0..grid.len()).map(|i| seed[i % seed.len()]).collect();
        let md = assemble_md(&grid);
        let exact = dirichlet_energy(&grid, &f);
        prop_assert!((md.quadratic_form(&f).unwrap() - exact).abs() <= 1e-12 * exact.max(1e-300));
    }
}

#[test]
fn bilinear_patch_on_one_interior_node() {
    // an interior hat has energy (4/3)(dz/dx + dx/dz)
    let grid = build_grid(1.0, 1.0, 4, 4).unwrap();
    let i = grid.index_of(2, 2).unwrap();
    let mut e = vec![0.0; grid.len()];
    e[i] = 1.0;
    let md = assemble_md(&grid);
    let (dx, dz) = (grid.dx(), grid.dz());
    let expect = 4.0 * (dz / dx + dx / dz) / 3.0;
    assert!((md.get(i, i) - expect).abs() < 1e-12);
    assert!((md.quadratic_form(&e).unwrap() - dirichlet_energy(&grid, &e)).abs() < 1e-12);
}

#[test]
fn stiffness_is_symmetric_positive_definite() {
    let grid = build_grid(2.0, 0.2, 10, 5).unwrap();
    let m = assemble_md(&grid).to_dense();
    assert!((&m - m.transpose()).amax() == 0.0);
    let eig = SymmetricEigen::new(m).eigenvalues;
    assert!(eig.min() > 0.0);
}

#[test]
fn wave_matrix_is_a_weighted_gram_sum() {
    let grid = build_grid(2.0, 0.2, 6, 3).unwrap();
    let q = LambdaQuadrature::uniform(4, 3).unwrap();
    let v = 0.7;
    let mw = assemble_mw(&grid, v, &q).unwrap();
    let n = grid.len();
    let mut expect = nalgebra::DMatrix::<f64>::zeros(n, n);
    for (&l, &w) in q.nodes().iter().zip(q.weights()) {
        let j = nalgebra::DVector::from_vec(j_vector(&grid, v, l));
        expect += w * &j * j.transpose();
    }
    assert!((mw.matrix() - &expect).amax() <= 1e-13 * expect.amax());
}

#[test]
fn wave_matrix_is_psd_with_rank_at_least_the_grid_side() {
    let cfg = RunConfig::default();
    let grid = build_grid(2.0, 0.2, 20, 6).unwrap();
    for fr in [0.5, 1.0] {
        let v = cfg.flow_at(fr).unwrap().kelvin_wavenumber();
        let q = select_quadrature(&grid, v, 80, 14, 1e-12).unwrap();
        let mw = assemble_mw(&grid, v, &q).unwrap();
        let eig = SymmetricEigen::new(mw.matrix().clone()).eigenvalues;
        let max = eig.max();
        assert!(eig.min() >= -1e-10 * max);
        assert!(eig.iter().filter(|&&e| e > 1e-12 * max).count() >= 19);
    }
}

#[test]
fn single_node_rule_gives_one_positive_eigenvalue() {
    let grid = build_grid(2.0, 0.2, 8, 4).unwrap();
    let mw = assemble_mw(&grid, 0.5, &LambdaQuadrature::single_node(80).unwrap()).unwrap();
    let eig = SymmetricEigen::new(mw.matrix().clone()).eigenvalues;
    let max = eig.max();
    assert_eq!(eig.iter().filter(|&&e| e > 1e-12 * max).count(), 1);
}
