//! Flows of sections and the morphism test for bundle maps `E → E`.

use alloc::vec;
use alloc::vec::Vec;

use super::{LieAlgebroidModel, SectionOfE};
use crate::error::check_len;
use crate::{Error, Result};

/// Result of [`flow_of_section`]: the base point `φ_s(x₀)` and the matrix of
/// `Φ_s: E_{x₀} → E_{φ_s(x₀)}`, layout `[β * k + γ]` so that
/// `Φ_s(e_γ) = Φ^β_γ e_β`.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    pub point: Vec<f64>,
    pub matrix: Vec<f64>,
}

/// `D^β_γ = ρ_γ^i ∂_i σ^β + C_{γα}^β σ^α`, the coefficients of `d_σ e^β`.
fn coframe_generator(
    algebroid: &LieAlgebroidModel,
    sigma: &SectionOfE,
    x: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let (n, k) = (algebroid.base_dim(), algebroid.rank());
    let rho = algebroid.anchor_at(x);
    let c = algebroid.bracket_at(x);
    let s = sigma.at(x);
    let ds = sigma.jacobian_at(x, algebroid.fd_step());
    let velocity: Vec<f64> = (0..n)
        .map(|i| (0..k).map(|a| rho[a * n + i] * s[a]).sum())
        .collect();
    let mut d = vec![0.0; k * k];
    for b in 0..k {
        for g in 0..k {
            let mut v = 0.0;
            for i in 0..n {
                v += rho[g * n + i] * ds[b * n + i];
            }
            for a in 0..k {
                v += c[(g * k + a) * k + b] * s[a];
            }
            d[b * k + g] = v;
        }
    }
    (velocity, d)
}

/// Integrates the flow of `σ` for time `s` with `steps` classical RK4 steps.
///
/// The base curve solves `ẋ = ρ(σ(x))`; the linear part solves
/// `dM/ds = D(x(s)) M`, `M(0) = I`, with `D` the matrix of `d_σ` on the
/// coframe. On `TM` this is the tangent map of the flow of the vector field.
pub fn flow_of_section(
    algebroid: &LieAlgebroidModel,
    sigma: &SectionOfE,
    s: f64,
    x0: &[f64],
    steps: usize,
) -> Result<Flow> {
    algebroid.check_point(x0)?;
    check_len("section rank", algebroid.rank(), sigma.rank())?;
    if steps == 0 {
        return Err(Error::ZeroSteps);
    }
    let (n, k) = (algebroid.base_dim(), algebroid.rank());
    let mut state = Vec::with_capacity(n + k * k);
    state.extend_from_slice(x0);
    state.extend(crate::linalg::identity(k));

    let rhs = |st: &[f64]| -> Vec<f64> {
        let (x, m) = st.split_at(n);
        let (vel, d) = coframe_generator(algebroid, sigma, x);
        let mut out = vel;
        out.extend(crate::linalg::matmul(&d, m, k, k, k));
        out
    };
    let dt = s / steps as f64;
    let len = state.len();
    let mut tmp = vec![0.0; len];
    for step in 0..steps {
        let k1 = rhs(&state);
        axpy_into(&mut tmp, &state, 0.5 * dt, &k1);
        let k2 = rhs(&tmp);
        axpy_into(&mut tmp, &state, 0.5 * dt, &k2);
        let k3 = rhs(&tmp);
        axpy_into(&mut tmp, &state, dt, &k3);
        let k4 = rhs(&tmp);
        for i in 0..len {
            state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if state.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step });
        }
    }
    let matrix = state.split_off(n);
    Ok(Flow {
        point: state,
        matrix,
    })
}

fn axpy_into(out: &mut [f64], x: &[f64], a: f64, y: &[f64]) {
    for i in 0..out.len() {
        out[i] = x[i] + a * y[i];
    }
}

/// Defects of a vector bundle map `Φ: E → E` over `φ: M → M` against the
/// admissibility and morphism conditions.
#[derive(Debug, Clone)]
pub struct MorphismDefect {
    /// `ρ_α^j ∂_j φ^i − ρ'^i_β Φ^β_α`, layout `[α * n + i]`.
    pub admissibility: Vec<f64>,
    /// `ρ_α^i ∂_i Φ^β_δ − ρ_δ^i ∂_i Φ^β_α − C_{αδ}^γ Φ^β_γ + C'^β_{θσ} Φ^θ_α Φ^σ_δ`,
    /// layout `[(β * k + α) * k + δ]`. Primed quantities are evaluated at `φ(x)`.
    pub morphism: Vec<f64>,
}

impl MorphismDefect {
    pub fn max(&self) -> f64 {
        crate::linalg::max_abs(&self.admissibility).max(crate::linalg::max_abs(&self.morphism))
    }
}

/// Checks `Φ*df = dΦ*f` on coordinate functions and `Φ*dθ = dΦ*θ` on the
/// coframe for a bundle map given pointwise by `map(x) = (φ(x), Φ(x))`.
/// Base derivatives of the map are central differences with step `h`.
pub fn morphism_residuals<F>(
    algebroid: &LieAlgebroidModel,
    map: F,
    x: &[f64],
    h: f64,
) -> Result<MorphismDefect>
where
    F: Fn(&[f64]) -> Result<(Vec<f64>, Vec<f64>)>,
{
    algebroid.check_point(x)?;
    let (n, k) = (algebroid.base_dim(), algebroid.rank());
    let (phi, big) = map(x)?;
    check_len("base map", n, phi.len())?;
    check_len("fibre map", k * k, big.len())?;

    let mut dphi = vec![0.0; n * n]; // [i * n + j] = ∂_j φ^i
    let mut dbig = vec![0.0; k * k * n]; // [(β k + γ) n + j]
    let mut xp = x.to_vec();
    for j in 0..n {
        xp[j] = x[j] + h;
        let (pp, bp) = map(&xp)?;
        xp[j] = x[j] - h;
        let (pm, bm) = map(&xp)?;
        xp[j] = x[j];
        for i in 0..n {
            dphi[i * n + j] = (pp[i] - pm[i]) / (2.0 * h);
        }
        for q in 0..k * k {
            dbig[q * n + j] = (bp[q] - bm[q]) / (2.0 * h);
        }
    }

    let rho = algebroid.anchor_at(x);
    let c = algebroid.bracket_at(x);
    let rho_t = algebroid.anchor_at(&phi);
    let c_t = algebroid.bracket_at(&phi);

    let mut admissibility = vec![0.0; k * n];
    for a in 0..k {
        for i in 0..n {
            let mut v = 0.0;
            for j in 0..n {
                v += rho[a * n + j] * dphi[i * n + j];
            }
            for b in 0..k {
                v -= rho_t[b * n + i] * big[b * k + a];
            }
            admissibility[a * n + i] = v;
        }
    }

    let mut morphism = vec![0.0; k * k * k];
    for b in 0..k {
        for a in 0..k {
            for d in 0..k {
                let mut v = 0.0;
                for i in 0..n {
                    v += rho[a * n + i] * dbig[(b * k + d) * n + i]
                        - rho[d * n + i] * dbig[(b * k + a) * n + i];
                }
                for g in 0..k {
                    v -= c[(a * k + d) * k + g] * big[b * k + g];
                }
                for th in 0..k {
                    for sg in 0..k {
                        v += c_t[(th * k + sg) * k + b] * big[th * k + a] * big[sg * k + d];
                    }
                }
                morphism[(b * k + a) * k + d] = v;
            }
        }
    }
    Ok(MorphismDefect {
        admissibility,
        morphism,
    })
}
