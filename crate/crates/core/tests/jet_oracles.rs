#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use liefield_core::algebroid::{flow_of_section, lie_derivative, structure_equation_residuals};
use liefield_core::jet::{
    affine_eval, affine_lie_derivative, complete_lift, z_functions, AffineDualValue,
};
use liefield_core::scenarios::{builder_standard, levi_civita, StandardCaseData};
use liefield_core::{
    AffineDualSection, FibredAlgebroidPair, JetPoint, PFormOnE, ProjectableSection, SectionOfE,
    SmoothField,
};
use proptest::prelude::*;

fn standard_pair(seed: u64) -> FibredAlgebroidPair {
    let mut g = rng(seed);
    let gamma = random_fourier(&mut g, 4, 4, 2, 0.5);
    let h = gamma.clone();
    let data = StandardCaseData::new(2, 2, gamma.to_field())
        .unwrap()
        .with_hessian(move |m| h.hessian(m));
    builder_standard(&data).unwrap()
}

/// `F` is the action algebroid of `so(3)` on `ℝ³`, acting on the fibre `ℝ³`
/// and on an abelian kernel of rank 3; the kernel anchor translates `u`.
fn rotating_pair() -> FibredAlgebroidPair {
    let eps = levi_civita();
    let e1 = eps.clone();
    let base_anchor = SmoothField::new(3, 9, move |x| {
        let mut out = vec![0.0; 9];
        for a in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    out[a * 3 + i] += e1[(a * 3 + i) * 3 + j] * x[j];
                }
            }
        }
        out
    });
    let e2 = eps.clone();
    let anchor_h = SmoothField::new(6, 9, move |m| {
        let mut out = vec![0.0; 9];
        for a in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    out[a * 3 + i] += e2[(a * 3 + i) * 3 + j] * m[3 + j];
                }
            }
        }
        out
    });
    let mut id = vec![0.0; 9];
    for a in 0..3 {
        id[a * 3 + a] = 1.0;
    }
    FibredAlgebroidPair::builder(3, 3, 3)
        .base_anchor(base_anchor)
        .base_bracket(SmoothField::constant(3, eps.clone()))
        .anchor_horizontal(anchor_h)
        .anchor_vertical(SmoothField::constant(6, id))
        .bracket_mixed(SmoothField::constant(6, eps))
        .build()
        .unwrap()
}

fn rigid_body_pair() -> FibredAlgebroidPair {
    FibredAlgebroidPair::builder(1, 0, 3)
        .bracket_vertical(SmoothField::constant(1, levi_civita()))
        .build()
        .unwrap()
}

fn random_jet(g: &mut Rng8, pair: &FibredAlgebroidPair) -> JetPoint {
    JetPoint::new(
        random_vec(g, pair.r(), 1.0),
        random_vec(g, pair.m_u(), 1.0),
        random_vec(g, pair.r() * pair.m_k(), 1.0),
    )
}

fn pairs() -> Vec<(&'static str, FibredAlgebroidPair)> {
    vec![
        ("standard", standard_pair(3)),
        ("rotating", rotating_pair()),
        ("rigid body", rigid_body_pair()),
    ]
}

#[test]
fn test_pairs_are_lie_algebroids() {
    let mut g = rng(1);
    for (name, pair) in pairs() {
        let full = pair.full_algebroid();
        for _ in 0..5 {
            let m = random_vec(&mut g, pair.r() + pair.m_u(), 1.0);
            let res = structure_equation_residuals(&full, &m).unwrap();
            assert!(res.max() < 1e-8, "{name}: {}", res.max());
        }
    }
}

/// `Z_{aγ}^α` and `Z_{ac}^α` are the affine functions of `d_{e_γ} e^α ⊗ ē_a`
/// and `d_{e_c} e^α ⊗ ē_a`.
#[test]
fn z_functions_are_lie_derivatives_of_the_coframe() {
    let mut g = rng(2);
    for (name, pair) in pairs() {
        let (r, mu, mk) = (pair.r(), pair.m_u(), pair.m_k());
        let (n, k) = (r + mu, r + mk);
        let full = pair.full_algebroid();
        let p = random_jet(&mut g, &pair);
        let m = p.base_point();
        let z = z_functions(&pair, &p).unwrap();
        let affine = |generator: usize, alpha: usize, a: usize| {
            let mut e = vec![0.0; k];
            e[generator] = 1.0;
            let sigma = SectionOfE::constant(n, e);
            let form = PFormOnE::dual_basis(n, k, r + alpha);
            let d = lie_derivative(&full, &sigma, &form, &m).unwrap();
            let mut v = AffineDualValue {
                horizontal: vec![0.0; r * r],
                vertical: vec![0.0; mk * r],
            };
            for b in 0..r {
                v.horizontal[b * r + a] = d[b];
            }
            for be in 0..mk {
                v.vertical[be * r + a] = d[r + be];
            }
            v.eval(&p)
        };
        for a in 0..r {
            for al in 0..mk {
                for ga in 0..mk {
                    let want = affine(r + ga, al, a);
                    let got = z.mixed[(a * mk + ga) * mk + al];
                    assert!((want - got).abs() < 1e-8, "{name} mixed {a} {ga} {al}");
                }
                for c in 0..r {
                    let want = affine(c, al, a);
                    let got = z.horizontal[(a * r + c) * mk + al];
                    assert!((want - got).abs() < 1e-8, "{name} horizontal {a} {c} {al}");
                }
            }
        }
    }
}

fn random_theta(g: &mut Rng8, pair: &FibredAlgebroidPair) -> AffineDualSection {
    let (r, n) = (pair.r(), pair.r() + pair.m_u());
    AffineDualSection {
        horizontal: random_field(g, n, r * r, 2, 0.7),
        vertical: random_field(g, n, pair.m_k() * r, 2, 0.7),
    }
}

fn lift_directional(
    pair: &FibredAlgebroidPair,
    sigma: &ProjectableSection,
    theta: &AffineDualSection,
    p: &JetPoint,
) -> (f64, f64) {
    let x = complete_lift(pair, sigma, p).unwrap();
    let t = 1e-5;
    let shift = |s: f64| {
        JetPoint::new(
            p.x.iter().zip(&x.dx).map(|(a, b)| a + s * b).collect(),
            p.u.iter().zip(&x.du).map(|(a, b)| a + s * b).collect(),
            p.y.iter().zip(&x.dy).map(|(a, b)| a + s * b).collect(),
        )
    };
    let lhs = (affine_eval(theta, &shift(t)) - affine_eval(theta, &shift(-t))) / (2.0 * t);
    let rhs = affine_lie_derivative(pair, sigma, theta, &p.base_point())
        .unwrap()
        .eval(p);
    (lhs, rhs)
}

/// `X_σ^{(1)} θ̂ = (d_σθ)^` for vertical and projectable sections.
#[test]
fn complete_lift_acts_on_affine_functions_as_lie_derivative() {
    let mut g = rng(4);
    for (name, pair) in pairs() {
        let (r, n, mk) = (pair.r(), pair.r() + pair.m_u(), pair.m_k());
        for trial in 0..4 {
            let theta = random_theta(&mut g, &pair);
            let p = random_jet(&mut g, &pair);
            let vertical = random_field(&mut g, n, mk, 2, 0.8);
            let sigmas = [
                ProjectableSection::vertical(vertical.clone()),
                ProjectableSection::projectable(random_field(&mut g, r, r, 2, 0.8), vertical),
            ];
            for sigma in &sigmas {
                let (lhs, rhs) = lift_directional(&pair, sigma, &theta, &p);
                assert!(
                    (lhs - rhs).abs() < 1e-6 * (1.0 + rhs.abs()),
                    "{name} trial {trial} projectable={}: {lhs} vs {rhs}",
                    sigma.base.is_some()
                );
            }
        }
    }
}

/// The `y` part of the complete lift is the derivative at `s = 0` of the
/// prolonged flow `j¹Φ_s`.
#[test]
fn complete_lift_is_generator_of_prolonged_flow() {
    let mut g = rng(5);
    for (name, pair) in pairs() {
        let (r, mu, mk) = (pair.r(), pair.m_u(), pair.m_k());
        let (n, k) = (r + mu, r + mk);
        let full = pair.full_algebroid();
        let sigma = ProjectableSection::vertical(random_field(&mut g, n, mk, 2, 0.8));
        let section = sigma.as_section_of_e(&pair);
        let p = random_jet(&mut g, &pair);
        let m0 = p.base_point();
        let lift = complete_lift(&pair, &sigma, &p).unwrap();

        let push = |s: f64| {
            let f = flow_of_section(&full, &section, s, &m0, 20).unwrap();
            let mut y = vec![0.0; mk * r];
            for be in 0..mk {
                for a in 0..r {
                    let mut v = f.matrix[(r + be) * k + a];
                    for al in 0..mk {
                        v += f.matrix[(r + be) * k + r + al] * p.y_at(al, a);
                    }
                    y[be * r + a] = v;
                }
            }
            (f.point, y)
        };
        let s = 1e-3;
        let (mp, yp) = push(s);
        let (mm, ym) = push(-s);
        let dy: Vec<f64> = yp
            .iter()
            .zip(&ym)
            .map(|(a, b)| (a - b) / (2.0 * s))
            .collect();
        let du: Vec<f64> = (0..mu)
            .map(|i| (mp[r + i] - mm[r + i]) / (2.0 * s))
            .collect();
        assert!(
            max_diff(&dy, &lift.dy) < 1e-5,
            "{name}: {dy:?} vs {:?}",
            lift.dy
        );
        assert!(max_diff(&du, &lift.du) < 1e-5, "{name}");
    }
}

#[test]
fn complete_lift_via_total_derivative_in_standard_case() {
    // trivial connection, abelian kernel: dy_a = ∂σ/∂x^a + ∂σ/∂u · y_a
    let pair = builder_standard(&StandardCaseData::trivial(2, 1)).unwrap();
    let sigma = ProjectableSection::vertical(SmoothField::new(3, 1, |m| vec![m[0] * m[2] + m[1]]));
    let p = JetPoint::new(vec![0.5, 1.0], vec![2.0], vec![0.3, -0.7]);
    let t = complete_lift(&pair, &sigma, &p).unwrap();
    assert!((t.dy[0] - (2.0 + 0.5 * 0.3)).abs() < 1e-8);
    assert!((t.dy[1] - (1.0 + 0.5 * -0.7)).abs() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn complete_lift_is_linear(seed in 0u64..1000, c in -3.0f64..3.0) {
        let pair = rotating_pair();
        let mut g = rng(seed);
        let f1 = random_fourier(&mut g, 6, 3, 2, 1.0);
        let f2 = random_fourier(&mut g, 6, 3, 2, 1.0);
        let b1 = random_fourier(&mut g, 3, 3, 1, 1.0);
        let b2 = random_fourier(&mut g, 3, 3, 1, 1.0);
        let p = random_jet(&mut g, &pair);
        let mut fs = f1.clone();
        let mut bs = b1.clone();
        for (dst, src) in [(&mut fs, &f2), (&mut bs, &b2)] {
            for (o, v) in dst.offset.iter_mut().zip(&src.offset) {
                *o += c * v;
            }
            for mode in &src.modes {
                let mut mode = mode.clone();
                mode.amplitude *= c;
                dst.modes.push(mode);
            }
        }
        let lift = |b: &liefield_core::scenarios::FourierField, f: &liefield_core::scenarios::FourierField| {
            complete_lift(&pair, &ProjectableSection::projectable(b.to_field(), f.to_field()), &p).unwrap()
        };
        let (l1, l2, ls) = (lift(&b1, &f1), lift(&b2, &f2), lift(&bs, &fs));
        let combine = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + c * y).collect() };
        let tol = 1e-10 * (1.0 + c.abs());
        prop_assert!(max_diff(&combine(&l1.dx, &l2.dx), &ls.dx) < tol);
        prop_assert!(max_diff(&combine(&l1.du, &l2.du), &ls.du) < tol);
        prop_assert!(max_diff(&combine(&l1.dy, &l2.dy), &ls.dy) < tol);
    }
}
