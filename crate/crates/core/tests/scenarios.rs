mod common;

use common::*;
use liefield_core::algebroid::structure_equation_residuals;
use liefield_core::linalg::identity;
use liefield_core::scenarios::*;
use liefield_core::variational::el_residual;
use liefield_core::{
    Boundary, DiscretizedSection, FibredAlgebroidPair, GridSpec, Lagrangian, ProjectableSection,
    SmoothField,
};

fn catalog() -> Vec<(&'static str, FibredAlgebroidPair, bool)> {
    let gamma = random_fourier(&mut rng(40), 4, 4, 2, 0.5);
    let h = gamma.clone();
    let standard = StandardCaseData::new(2, 2, gamma.to_field())
        .unwrap()
        .with_hessian(move |m| h.hessian(m));
    let cs = ChernSimonsData::new(levi_civita(), identity(3)).unwrap();
    let lattice = GridSpec::periodic_cube(3, 4, 1.0).unwrap();
    let omega = SmoothField::constant(2, vec![0.0, 0.4, -0.4, 0.0]);
    vec![
        ("standard", builder_standard(&standard).unwrap(), false),
        (
            "standard trivial",
            builder_standard(&StandardCaseData::trivial(3, 2)).unwrap(),
            true,
        ),
        ("rigid body", rigid_body_pair(), true),
        ("heavy top", heavy_top_pair(), false),
        ("free particle", free_particle_pair(3), true),
        (
            "chern-simons",
            builder_chern_simons(&cs, &lattice).unwrap().0,
            true,
        ),
        (
            "atiyah flat",
            builder_atiyah(&AtiyahData::flat(2, levi_civita()).unwrap()).unwrap(),
            true,
        ),
        (
            "atiyah abelian",
            builder_atiyah(&AtiyahData::new(2, vec![0.0], omega).unwrap()).unwrap(),
            true,
        ),
    ]
}

#[test]
fn every_builder_yields_a_lie_algebroid() {
    let mut g = rng(41);
    for (name, pair, constant) in catalog() {
        let full = pair.full_algebroid();
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let m = random_vec(&mut g, full.base_dim(), 2.0);
            worst = worst.max(structure_equation_residuals(&full, &m).unwrap().max());
        }
        if constant {
            assert_eq!(worst, 0.0, "{name}");
        } else {
            assert!(worst < 1e-8, "{name}: {worst}");
        }
    }
}

fn rigid_body_drifts(dt: f64) -> (f64, f64, f64) {
    let inertia = [1.0, 2.0, 3.0];
    let pair = rigid_body_pair();
    let l = Lagrangian::rigid_body(inertia, 0);
    let s0 = MechanicsState::new(0.0, vec![], vec![1.0, 1.0, 1.0]);
    let tr = integrate_mechanics(&pair, &l, &s0, 10.0, dt).unwrap();
    let casimir = |s: &MechanicsState| (0..3).map(|a| (inertia[a] * s.y[a]).powi(2)).sum::<f64>();
    let (e0, c0) = (energy(&l, &s0), casimir(&s0));
    let de = tr.values(|s| ((energy(&l, s) - e0) / e0).abs());
    let dc = tr.values(|s| ((casimir(s) - c0) / c0).abs());
    let max = |v: Vec<f64>| v.into_iter().fold(0.0, f64::max);
    (max(de), max(dc), tr.max_el_residual())
}

#[test]
fn rigid_body_conserves_energy_and_casimir() {
    let (de, dc, _) = rigid_body_drifts(1e-3);
    assert!(de < 1e-8 && dc < 1e-8, "{de} {dc}");
}

#[test]
fn rigid_body_drift_is_fourth_order() {
    let (e1, c1, el1) = rigid_body_drifts(0.0125);
    let (e2, c2, el2) = rigid_body_drifts(0.00625);
    for ratio in [e1 / e2, c1 / c2, el1 / el2] {
        assert!((10.0..=24.0).contains(&ratio), "{ratio}");
    }
}

/// Lagrange top: `I₁ = I₂`, centre of mass on the figure axis.
fn lagrange_top() -> (FibredAlgebroidPair, Lagrangian, Trajectory) {
    let pair = heavy_top_pair();
    let l = Lagrangian::heavy_top([1.0, 1.0, 2.5], 0.8, [0.0, 0.0, 1.0]);
    let s0 = MechanicsState::new(0.0, vec![0.3, 0.1, 0.95], vec![0.4, -0.2, 2.0]);
    let tr = integrate_mechanics(&pair, &l, &s0, 10.0, 1e-3).unwrap();
    (pair, l, tr)
}

#[test]
fn heavy_top_noether_charges_are_conserved() {
    let (_, l, tr) = lagrange_top();
    let axis = ProjectableSection::vertical(SmoothField::constant(4, vec![0.0, 0.0, 1.0]));
    let vertical = ProjectableSection::vertical(SmoothField::new(4, 3, |m| m[1..4].to_vec()));
    for sigma in [axis, vertical] {
        let q = tr.values(|s| noether_charge(&l, &sigma, s).unwrap());
        let drift = q.iter().map(|v| (v - q[0]).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-6, "{drift}");
    }
    let e = tr.values(|s| energy(&l, s));
    assert!(e.iter().all(|v| (v - e[0]).abs() < 1e-8));
}

#[test]
fn integrated_trajectory_solves_the_grid_euler_lagrange_equations() {
    let (pair, l, tr) = lagrange_top();
    let phi = tr.to_section().unwrap();
    for node in [1, 500, 5000, 9998] {
        let d = el_residual(&pair, &l, &phi, node).unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-5), "{node}: {d:?}");
    }
}

#[test]
fn flat_atiyah_on_a_line_is_the_rigid_body() {
    let atiyah = builder_atiyah(&AtiyahData::flat(1, levi_civita()).unwrap()).unwrap();
    let rigid = rigid_body_pair();
    let l = Lagrangian::rigid_body([1.0, 2.0, 3.0], 0);
    let grid = GridSpec::uniform(1, 30, 0.05, 0.0, Boundary::OneSided).unwrap();
    let curve = random_fourier(&mut rng(42), 1, 3, 3, 1.0);
    let phi = DiscretizedSection::from_fn(grid, 0, 3, |t| (vec![], curve.eval(t))).unwrap();
    for node in 0..30 {
        let a = el_residual(&atiyah, &l, &phi, node).unwrap();
        let b = el_residual(&rigid, &l, &phi, node).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn free_particle_is_exact() {
    let pair = free_particle_pair(2);
    let l = Lagrangian::free_field(1, 2, 2);
    let s0 = MechanicsState::new(1.0, vec![0.5, -1.0], vec![2.0, 0.25]);
    let tr = integrate_mechanics(&pair, &l, &s0, 3.0, 0.1).unwrap();
    let last = tr.states.last().unwrap();
    assert!((last.u[0] - 4.5).abs() < 1e-12 && (last.u[1] + 0.5).abs() < 1e-12);
    assert_eq!(last.y, s0.y);
}
