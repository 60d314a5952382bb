mod common;

use common::*;
use liefield_core::algebroid::{
    exterior_differential, flow_of_section, lie_derivative, morphism_residuals,
    structure_equation_residuals,
};
use liefield_core::linalg::{identity, matmul, max_abs};
use liefield_core::scenarios::levi_civita;
use liefield_core::{LieAlgebroidModel, PFormOnE, SectionOfE, SmoothField};

fn valid_algebroids() -> Vec<(&'static str, LieAlgebroidModel)> {
    vec![
        ("so3", so3()),
        ("sl2 action", sl2_action()),
        ("tangent", LieAlgebroidModel::tangent_bundle(2)),
        ("standard", standard_full(9)),
    ]
}

fn random_form(g: &mut Rng8, a: &LieAlgebroidModel, p: usize) -> PFormOnE {
    let (n, k) = (a.base_dim(), a.rank());
    PFormOnE::new(k, p, random_field(g, n, k.pow(p as u32), 2, 1.0)).unwrap()
}

fn random_section(g: &mut Rng8, a: &LieAlgebroidModel) -> SectionOfE {
    SectionOfE::new(random_field(g, a.base_dim(), a.rank(), 2, 1.0))
}

/// `d(dω)` with the inner differential wrapped as a form.
fn d_squared(a: &LieAlgebroidModel, w: &PFormOnE, x: &[f64]) -> Vec<f64> {
    exterior_differential(a, &w.differential(a).unwrap(), x).unwrap()
}

#[test]
fn valid_algebroids_satisfy_structure_equations() {
    let mut g = rng(1);
    for (name, a) in valid_algebroids() {
        for _ in 0..20 {
            let x = random_vec(&mut g, a.base_dim(), 2.0);
            let s = structure_equation_residuals(&a, &x).unwrap();
            assert!(s.max() < 1e-8, "{name}: {}", s.max());
        }
    }
}

#[test]
fn d_squared_vanishes_on_functions_and_one_forms() {
    let mut g = rng(2);
    for (name, a) in valid_algebroids() {
        for p in 0..2 {
            if p + 2 > a.rank() {
                continue;
            }
            for _ in 0..5 {
                let w = random_form(&mut g, &a, p);
                let x = random_vec(&mut g, a.base_dim(), 1.0);
                let r = max_abs(&d_squared(&a, &w, &x));
                assert!(r < 1e-6, "{name} degree {p}: {r}");
            }
        }
    }
}

#[test]
fn broken_jacobi_gives_nonzero_d_squared() {
    // C_{12}^1 = 0.1 on top of ε breaks Jacobi
    let mut c = levi_civita();
    c[3] = 0.1;
    c[9] = -0.1;
    let broken = LieAlgebroidModel::lie_algebra(1, 3, c).unwrap();
    assert!(
        structure_equation_residuals(&broken, &[0.0])
            .unwrap()
            .max_jacobi()
            > 1e-2
    );
    let mut worst = 0.0f64;
    for gamma in 0..3 {
        let w = PFormOnE::dual_basis(1, 3, gamma);
        worst = worst.max(max_abs(&d_squared(&broken, &w, &[0.3])));
    }
    assert!(worst > 1e-2, "{worst}");
}

#[test]
fn lie_derivative_commutes_with_d() {
    let mut g = rng(3);
    for (name, a) in valid_algebroids() {
        for p in 0..2 {
            if p + 1 > a.rank() {
                continue;
            }
            let w = random_form(&mut g, &a, p);
            let sigma = random_section(&mut g, &a);
            let x = random_vec(&mut g, a.base_dim(), 1.0);
            let lhs = lie_derivative(&a, &sigma, &w.differential(&a).unwrap(), &x).unwrap();
            let (aa, s, ww) = (a.clone(), sigma.clone(), w.clone());
            let n = a.base_dim();
            let lw = PFormOnE::new(
                a.rank(),
                p,
                SmoothField::new(n, a.rank().pow(p as u32), move |x| {
                    lie_derivative(&aa, &s, &ww, x).unwrap()
                }),
            )
            .unwrap();
            let rhs = exterior_differential(&a, &lw, &x).unwrap();
            let r = max_diff(&lhs, &rhs);
            assert!(r < 1e-6, "{name} degree {p}: {r}");
        }
    }
}

#[test]
fn differential_is_a_derivation_on_functions() {
    let mut g = rng(4);
    for (name, a) in valid_algebroids() {
        let n = a.base_dim();
        let f = random_fourier(&mut g, n, 1, 2, 1.0);
        let h = random_fourier(&mut g, n, 1, 2, 1.0);
        let (f2, h2) = (f.clone(), h.clone());
        let fh = SmoothField::new(n, 1, move |x| vec![f2.eval(x)[0] * h2.eval(x)[0]]);
        let x = random_vec(&mut g, n, 1.0);
        let d = |s: SmoothField| {
            exterior_differential(&a, &PFormOnE::function(s, a.rank()).unwrap(), &x).unwrap()
        };
        let (df, dh, dfh) = (d(f.to_field()), d(h.to_field()), d(fh));
        let (fv, hv) = (f.eval(&x)[0], h.eval(&x)[0]);
        let want: Vec<f64> = df.iter().zip(&dh).map(|(p, q)| p * hv + fv * q).collect();
        assert!(max_diff(&dfh, &want) < 1e-7, "{name}");
    }
}

#[test]
fn anchor_is_a_bracket_homomorphism() {
    // ρ([σ, η]) f = ρ(σ) ρ(η) f − ρ(η) ρ(σ) f, checked through d on functions:
    // (d f)([σ, η]) = σ(d(η·df)) − η(d(σ·df))
    let mut g = rng(5);
    for (name, a) in valid_algebroids() {
        let n = a.base_dim();
        let k = a.rank();
        let f = PFormOnE::function(random_field(&mut g, n, 1, 2, 1.0), k).unwrap();
        let (s, e) = (random_section(&mut g, &a), random_section(&mut g, &a));
        let x = random_vec(&mut g, n, 1.0);
        let br = liefield_core::algebroid::bracket(&a, &s, &e, &x).unwrap();
        let df = exterior_differential(&a, &f, &x).unwrap();
        let lhs: f64 = br.iter().zip(&df).map(|(p, q)| p * q).sum();
        let pair = |u: &SectionOfE| {
            let (aa, ff, uu) = (a.clone(), f.clone(), u.clone());
            PFormOnE::function(
                SmoothField::new(n, 1, move |x| {
                    let d = exterior_differential(&aa, &ff, x).unwrap();
                    vec![uu.at(x).iter().zip(&d).map(|(p, q)| p * q).sum()]
                }),
                k,
            )
            .unwrap()
        };
        let along = |u: &SectionOfE, w: &PFormOnE| -> f64 {
            exterior_differential(&a, w, &x)
                .unwrap()
                .iter()
                .zip(u.at(&x))
                .map(|(p, q)| p * q)
                .sum()
        };
        let rhs = along(&s, &pair(&e)) - along(&e, &pair(&s));
        assert!((lhs - rhs).abs() < 1e-6, "{name}: {lhs} vs {rhs}");
    }
}

/// Rodrigues: `exp(−s ad_σ)` for `so(3)` with `(ad_σ)^β_γ = ε_{αγβ} σ^α`.
fn so3_flow_closed_form(sigma: &[f64], s: f64) -> Vec<f64> {
    let eps = levi_civita();
    let theta = sigma.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut kmat = vec![0.0; 9];
    for b in 0..3 {
        for g in 0..3 {
            kmat[b * 3 + g] = (0..3)
                .map(|a| eps[(a * 3 + g) * 3 + b] * sigma[a])
                .sum::<f64>()
                / theta;
        }
    }
    let k2 = matmul(&kmat, &kmat, 3, 3, 3);
    let t = s * theta;
    let mut out = identity(3);
    for i in 0..9 {
        out[i] += -t.sin() * kmat[i] + (1.0 - t.cos()) * k2[i];
    }
    out
}

#[test]
fn so3_constant_flow_matches_exponential() {
    let a = so3();
    let s = core::f64::consts::FRAC_PI_2;
    for sigma in [vec![0.0, 0.0, 1.0], vec![0.3, -0.8, 0.5]] {
        let f =
            flow_of_section(&a, &SectionOfE::constant(1, sigma.clone()), s, &[0.0], 1000).unwrap();
        let r = max_diff(&f.matrix, &so3_flow_closed_form(&sigma, s));
        assert!(r < 1e-8, "{r}");
    }
}

#[test]
fn flow_composes() {
    let mut g = rng(6);
    for (name, a) in valid_algebroids() {
        let sigma = random_section(&mut g, &a);
        let x = random_vec(&mut g, a.base_dim(), 0.5);
        let (s1, s2) = (0.3, 0.45);
        let f1 = flow_of_section(&a, &sigma, s1, &x, 200).unwrap();
        let f2 = flow_of_section(&a, &sigma, s2, &f1.point, 300).unwrap();
        let f12 = flow_of_section(&a, &sigma, s1 + s2, &x, 500).unwrap();
        let k = a.rank();
        assert!(max_diff(&f2.point, &f12.point) < 1e-8, "{name}");
        let comp = matmul(&f2.matrix, &f1.matrix, k, k, k);
        assert!(max_diff(&comp, &f12.matrix) < 1e-8, "{name}");
    }
}

#[test]
fn flows_of_sections_are_morphisms() {
    let mut g = rng(7);
    for (name, a) in [
        ("sl2 action", sl2_action()),
        ("tangent", LieAlgebroidModel::tangent_bundle(2)),
    ] {
        for _ in 0..3 {
            let sigma = random_section(&mut g, &a);
            let x = random_vec(&mut g, 2, 0.5);
            let (aa, ss) = (a.clone(), sigma.clone());
            let map = move |x: &[f64]| {
                let f = flow_of_section(&aa, &ss, 0.4, x, 200)?;
                Ok((f.point, f.matrix))
            };
            let d = morphism_residuals(&a, map, &x, 1e-4).unwrap();
            assert!(d.max() < 1e-6, "{name}: {}", d.max());
        }
    }
}

#[test]
fn non_flow_map_is_not_a_morphism() {
    let a = sl2_action();
    let bend = |x: &[f64]| Ok((vec![x[0] + x[1] * x[1], x[1]], identity(3)));
    let d = morphism_residuals(&a, bend, &[0.4, 0.7], 1e-4).unwrap();
    assert!(d.max() > 1e-2);
}

#[test]
fn lie_derivative_is_derivative_of_flow_pullback() {
    // (Φ_s^* θ)_γ(x) = θ_β(φ_s(x)) Φ^β_γ(x)
    let mut g = rng(8);
    for (name, a) in valid_algebroids() {
        let k = a.rank();
        let theta = random_form(&mut g, &a, 1);
        let sigma = random_section(&mut g, &a);
        let x = random_vec(&mut g, a.base_dim(), 0.5);
        let pull = |s: f64| -> Vec<f64> {
            let f = flow_of_section(&a, &sigma, s, &x, 20).unwrap();
            let t = theta.at(&f.point);
            (0..k)
                .map(|c| (0..k).map(|b| t[b] * f.matrix[b * k + c]).sum())
                .collect()
        };
        let s = 1e-4;
        let fd: Vec<f64> = pull(s)
            .iter()
            .zip(pull(-s))
            .map(|(p, q)| (p - q) / (2.0 * s))
            .collect();
        let ld = lie_derivative(&a, &sigma, &theta, &x).unwrap();
        assert!(max_diff(&fd, &ld) < 1e-6, "{name}");
    }
}
