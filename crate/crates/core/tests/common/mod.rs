#![allow(dead_code)]

use liefield_core::scenarios::FourierField;
use liefield_core::SmoothField;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A smooth field with `modes` sine modes per output and amplitude `amp`.
pub fn random_field(rng: &mut Rng8, n: usize, m: usize, modes: usize, amp: f64) -> SmoothField {
    random_fourier(rng, n, m, modes, amp).to_field()
}

pub fn random_fourier(rng: &mut Rng8, n: usize, m: usize, modes: usize, amp: f64) -> FourierField {
    let mut f = FourierField::new(n, m);
    for o in 0..m {
        f.offset[o] = amp * rng.gen_range(-1.0..1.0);
        for _ in 0..modes {
            let k: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
            f = f.with_mode(
                o,
                amp * rng.gen_range(-1.0..1.0),
                k,
                rng.gen_range(0.0..core::f64::consts::TAU),
            );
        }
    }
    f
}

pub fn random_vec(rng: &mut Rng8, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * rng.gen_range(-1.0..1.0)).collect()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max)
}

/// The action algebroid of `sl(2, ℝ)` acting linearly on `ℝ²`, basis
/// `(H, E, F)`. Linear vector fields satisfy `[X_A, X_B] = −X_{[A,B]}`,
/// hence the sign of the constants.
pub fn sl2_action() -> liefield_core::LieAlgebroidModel {
    let gens = [
        [1.0, 0.0, 0.0, -1.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
    ];
    let anchor = SmoothField::new(2, 6, move |x| {
        let mut out = vec![0.0; 6];
        for (a, g) in gens.iter().enumerate() {
            out[a * 2] = g[0] * x[0] + g[1] * x[1];
            out[a * 2 + 1] = g[2] * x[0] + g[3] * x[1];
        }
        out
    });
    // [H,E] = 2E, [H,F] = −2F, [E,F] = H
    let mut c = vec![0.0; 27];
    let mut set = |a: usize, b: usize, g: usize, v: f64| {
        c[(a * 3 + b) * 3 + g] = -v;
        c[(b * 3 + a) * 3 + g] = v;
    };
    set(0, 1, 1, 2.0);
    set(0, 2, 2, -2.0);
    set(1, 2, 0, 1.0);
    liefield_core::LieAlgebroidModel::new(2, 3, anchor, SmoothField::constant(2, c)).unwrap()
}

pub fn so3() -> liefield_core::LieAlgebroidModel {
    liefield_core::LieAlgebroidModel::lie_algebra(1, 3, liefield_core::scenarios::levi_civita())
        .unwrap()
}

/// Full algebroid of a standard-case pair with a random connection on
/// `r = 2`, `m_u = 1`.
pub fn standard_full(seed: u64) -> liefield_core::LieAlgebroidModel {
    let mut g = rng(seed);
    let gamma = random_fourier(&mut g, 3, 2, 2, 0.5);
    let h = gamma.clone();
    let data = liefield_core::scenarios::StandardCaseData::new(2, 1, gamma.to_field())
        .unwrap()
        .with_hessian(move |m| h.hessian(m));
    liefield_core::scenarios::builder_standard(&data)
        .unwrap()
        .full_algebroid()
}
