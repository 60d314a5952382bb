//! Pure-gauge (flat) connections `A = g⁻¹ dg` sampled on a grid, and the
//! realified `SU(2)` representation used by the Chern-Simons scenario.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::check_len;
use crate::fields::{DiscretizedSection, GridSpec};
use crate::linalg::{matmul, Lu};
use crate::{Error, Result, SmoothField};

use super::FourierField;

/// Relative residual above which a sampled `g⁻¹∂g` is declared outside the
/// span of the algebra basis.
pub const PROJECTION_TOL: f64 = 1e-6;

/// Samples `A_a = g⁻¹ ∂_a g` at every node and expands it in `basis`
/// (`d × d` row-major matrices). `gauge` maps `ℝ^r → ℝ^{d·d}`; its Jacobian
/// is analytic when supplied and central differences otherwise.
pub fn flat_connection_generator(
    gauge: &SmoothField,
    basis: &[Vec<f64>],
    grid: &GridSpec,
) -> Result<DiscretizedSection> {
    let r = grid.r();
    let m = basis.len();
    let dd = gauge.out_dim();
    let d = (0..=dd).find(|k| k * k >= dd).unwrap_or(0);
    check_len("gauge matrix (square)", d * d, dd)?;
    check_len("gauge domain", r, gauge.in_dim())?;
    for b in basis {
        check_len("algebra basis matrix", dd, b.len())?;
    }
    let gram: Vec<f64> = (0..m * m)
        .map(|i| frobenius(&basis[i / m], &basis[i % m]))
        .collect();
    let gram_lu = Lu::new(&gram, m)?;
    let mut y = Vec::with_capacity(grid.len() * m * r);
    for node in 0..grid.len() {
        let x = grid.coords(node);
        let g = gauge.eval(&x);
        let ginv = Lu::new(&g, d)?.inverse();
        let jac = gauge.jacobian(&x, crate::DEFAULT_FD_STEP);
        let mut ya = vec![0.0; m * r];
        for a in 0..r {
            let dg: Vec<f64> = (0..dd).map(|o| jac[o * r + a]).collect();
            let big_a = matmul(&ginv, &dg, d, d, d);
            let rhs: Vec<f64> = basis.iter().map(|b| frobenius(b, &big_a)).collect();
            let coef = gram_lu.solve(&rhs);
            let mut rest = big_a.clone();
            for (c, b) in coef.iter().zip(basis) {
                for (v, bv) in rest.iter_mut().zip(b) {
                    *v -= c * bv;
                }
            }
            let scale = libm::sqrt(frobenius(&big_a, &big_a)).max(1.0);
            let residual = libm::sqrt(frobenius(&rest, &rest)) / scale;
            if residual > PROJECTION_TOL {
                return Err(Error::ProjectionFailed { residual });
            }
            for al in 0..m {
                ya[al * r + a] = coef[al];
            }
        }
        y.extend(ya);
    }
    DiscretizedSection::new(grid.clone(), 0, m, Vec::new(), y)
}

fn frobenius(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Real `2n × 2n` form of a complex `n × n` matrix given as `(re, im)`:
/// `a + ib ↦ [[a, −b], [b, a]]` blockwise.
pub fn realify(re: &[f64], im: &[f64], n: usize) -> Vec<f64> {
    let d = 2 * n;
    let mut out = vec![0.0; d * d];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (re[i * n + j], im[i * n + j]);
            out[(2 * i) * d + 2 * j] = a;
            out[(2 * i) * d + 2 * j + 1] = -b;
            out[(2 * i + 1) * d + 2 * j] = b;
            out[(2 * i + 1) * d + 2 * j + 1] = a;
        }
    }
    out
}

/// `τ_α = −(i/2) σ_α`, realified to `4 × 4`. They satisfy
/// `[τ_α, τ_β] = ε_{αβγ} τ_γ`.
pub fn su2_basis() -> Vec<Vec<f64>> {
    // σ₁ = [[0,1],[1,0]], σ₂ = [[0,−i],[i,0]], σ₃ = [[1,0],[0,−1]]
    // −(i/2)σ: re = ½ Im σ, im = −½ Re σ
    let sig_re = [
        [0.0, 1.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, -1.0],
    ];
    let sig_im = [
        [0.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ];
    (0..3)
        .map(|a| {
            let re: Vec<f64> = sig_im[a].iter().map(|v| 0.5 * v).collect();
            let im: Vec<f64> = sig_re[a].iter().map(|v| -0.5 * v).collect();
            realify(&re, &im, 2)
        })
        .collect()
}

/// `exp(f^α τ_α) = cos(θ/2) I − i sin(θ/2) n·σ`, `θ = |f|`, realified.
pub fn su2_exp(f: &[f64]) -> Vec<f64> {
    let theta = libm::sqrt(f.iter().map(|v| v * v).sum());
    let c = libm::cos(0.5 * theta);
    // sin(θ/2)/θ, with its limit ½ at θ = 0
    let s = if theta < 1e-8 {
        0.5 - theta * theta / 48.0
    } else {
        libm::sin(0.5 * theta) / theta
    };
    // −i s (f·σ): re = s · Im(f·σ), im = −s · Re(f·σ)
    let re = [c, -s * f[1], s * f[1], c];
    let im = [-s * f[2], -s * f[0], -s * f[0], s * f[2]];
    realify(&re, &im, 2)
}

/// `g(x) = exp(f^α(x) τ_α)` for a field `f: ℝ^r → ℝ³`.
pub fn su2_gauge(f: FourierField) -> SmoothField {
    assert_eq!(f.out_dim(), 3, "su(2) has dimension 3");
    SmoothField::new(f.in_dim, 16, move |x| su2_exp(&f.eval(x)))
}

/// `g(x) = exp(φ(x) ξ)` for a single generator `ξ` (`d × d`), computed by
/// the series of `φ ξ` truncated at machine precision.
pub fn one_parameter_gauge(phi: SmoothField, xi: Vec<f64>) -> SmoothField {
    assert_eq!(phi.out_dim(), 1);
    let d = (0..=xi.len()).find(|k| k * k >= xi.len()).unwrap_or(0);
    SmoothField::new(phi.in_dim(), d * d, move |x| {
        let t = phi.eval(x)[0];
        let a: Vec<f64> = xi.iter().map(|v| t * v).collect();
        expm(&a, d)
    })
}

/// Matrix exponential by scaling and squaring of a Taylor series.
pub fn expm(a: &[f64], d: usize) -> Vec<f64> {
    let norm = a.iter().map(|v| v.abs()).fold(0.0, f64::max) * d as f64;
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a: Vec<f64> = a.iter().map(|v| v * scale).collect();
    let mut out = crate::linalg::identity(d);
    let mut term = crate::linalg::identity(d);
    for k in 1..30 {
        term = matmul(&term, &a, d, d, d);
        for v in term.iter_mut() {
            *v /= k as f64;
        }
        for (o, t) in out.iter_mut().zip(&term) {
            *o += t;
        }
        if term.iter().all(|v| v.abs() < 1e-18) {
            break;
        }
    }
    for _ in 0..squarings {
        out = matmul(&out, &out, d, d, d);
    }
    out
}
