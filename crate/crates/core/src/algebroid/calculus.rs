//! Bracket, exterior differential, contraction and Lie derivative in
//! coordinates, plus the structure-equation residuals.

use alloc::vec;
use alloc::vec::Vec;

use super::{LieAlgebroidModel, PFormOnE, SectionOfE};
use crate::error::check_len;
use crate::{Error, Result};

/// Permutations of `0..p` with their signs.
fn permutations(p: usize) -> Vec<(Vec<usize>, f64)> {
    if p == 0 {
        return vec![(Vec::new(), 1.0)];
    }
    let mut out = Vec::new();
    for (perm, sign) in permutations(p - 1) {
        // insert p-1 at every slot; moving it left past j elements flips the
        // sign j times
        for slot in 0..p {
            let mut q = perm.clone();
            q.insert(slot, p - 1);
            let flips = p - 1 - slot;
            out.push((q, if flips.is_multiple_of(2) { sign } else { -sign }));
        }
    }
    out
}

fn decode(mut idx: usize, k: usize, p: usize) -> Vec<usize> {
    let mut out = vec![0; p];
    for slot in (0..p).rev() {
        out[slot] = idx % k;
        idx /= k;
    }
    out
}

fn encode(indices: &[usize], k: usize) -> usize {
    indices.iter().fold(0, |acc, &i| acc * k + i)
}

/// Projects `v[I * tail + t]` (`I` a multi-index of length `p` over `0..k`)
/// onto its antisymmetric part in `I`.
pub fn antisymmetrize(v: &mut [f64], k: usize, p: usize, tail: usize) {
    if p < 2 || tail == 0 {
        return;
    }
    let perms = permutations(p);
    let norm = perms.len() as f64;
    let src = v.to_vec();
    let count = k.pow(p as u32);
    let mut permuted = vec![0; p];
    for idx in 0..count {
        let multi = decode(idx, k, p);
        for t in 0..tail {
            let mut acc = 0.0;
            for (perm, sign) in &perms {
                for (slot, &s) in perm.iter().enumerate() {
                    permuted[slot] = multi[s];
                }
                acc += sign * src[encode(&permuted, k) * tail + t];
            }
            v[idx * tail + t] = acc / norm;
        }
    }
}

/// `[σ, η]^γ(x) = ρ_α^i σ^α ∂_i η^γ − ρ_β^i η^β ∂_i σ^γ + C_{αβ}^γ σ^α η^β`.
pub fn bracket(
    algebroid: &LieAlgebroidModel,
    sigma: &SectionOfE,
    eta: &SectionOfE,
    x: &[f64],
) -> Result<Vec<f64>> {
    algebroid.check_point(x)?;
    let (n, k) = (algebroid.base_dim(), algebroid.rank());
    check_len("section rank", k, sigma.rank())?;
    check_len("section rank", k, eta.rank())?;
    let h = algebroid.fd_step();
    let rho = algebroid.anchor_at(x);
    let c = algebroid.bracket_at(x);
    let s = sigma.at(x);
    let e = eta.at(x);
    let ds = sigma.jacobian_at(x, h);
    let de = eta.jacobian_at(x, h);
    let rs = anchor_of(&rho, &s, n, k);
    let re = anchor_of(&rho, &e, n, k);
    let mut out = vec![0.0; k];
    for g in 0..k {
        let mut v = 0.0;
        for i in 0..n {
            v += rs[i] * de[g * n + i] - re[i] * ds[g * n + i];
        }
        for a in 0..k {
            for b in 0..k {
                v += c[(a * k + b) * k + g] * s[a] * e[b];
            }
        }
        out[g] = v;
    }
    Ok(out)
}

fn anchor_of(rho: &[f64], a: &[f64], n: usize, k: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (0..k).map(|al| rho[al * n + i] * a[al]).sum())
        .collect()
}

/// `dω` at `x` from coefficient values and their base derivatives.
pub(crate) fn exterior_differential_values(
    algebroid: &LieAlgebroidModel,
    x: &[f64],
    coeffs: &[f64],
    jac: &[f64],
    p: usize,
) -> Vec<f64> {
    let (n, k) = (algebroid.base_dim(), algebroid.rank());
    let rho = algebroid.anchor_at(x);
    let c = algebroid.bracket_at(x);
    let count = k.pow(p as u32 + 1);
    let mut out = vec![0.0; count];
    let mut rest = Vec::with_capacity(p);
    for (idx, slot) in out.iter_mut().enumerate() {
        let multi = decode(idx, k, p + 1);
        let mut v = 0.0;
        for i in 0..=p {
            rest.clear();
            rest.extend(
                multi
                    .iter()
                    .enumerate()
                    .filter(|(s, _)| *s != i)
                    .map(|(_, &a)| a),
            );
            let r = encode(&rest, k);
            let a_i = multi[i];
            let mut term = 0.0;
            for j in 0..n {
                term += rho[a_i * n + j] * jac[r * n + j];
            }
            v += if i % 2 == 0 { term } else { -term };
        }
        for i in 0..=p {
            for j in i + 1..=p {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                let (ai, aj) = (multi[i], multi[j]);
                for beta in 0..k {
                    let cb = c[(ai * k + aj) * k + beta];
                    if cb == 0.0 {
                        continue;
                    }
                    rest.clear();
                    rest.push(beta);
                    rest.extend(
                        multi
                            .iter()
                            .enumerate()
                            .filter(|(s, _)| *s != i && *s != j)
                            .map(|(_, &a)| a),
                    );
                    v += sign * cb * coeffs[encode(&rest, k)];
                }
            }
        }
        *slot = v;
    }
    out
}

/// Coefficients of `dω` at `x`, a `(p+1)`-form stored as a full `k^{p+1}`
/// array:
///
/// `(dω)_{α₀…α_p} = Σ_i (−1)^i ρ_{α_i}^j ∂_j ω_{…α̂_i…}
///                + Σ_{i<j} (−1)^{i+j} C_{α_iα_j}^β ω_{β…α̂_i…α̂_j…}`.
pub fn exterior_differential(
    algebroid: &LieAlgebroidModel,
    omega: &PFormOnE,
    x: &[f64],
) -> Result<Vec<f64>> {
    algebroid.check_point(x)?;
    check_len("form rank", algebroid.rank(), omega.rank())?;
    check_len(
        "form base dimension",
        algebroid.base_dim(),
        omega.base_dim(),
    )?;
    let p = omega.degree();
    if p >= algebroid.rank() {
        return Err(Error::DegreeOverflow {
            degree: p,
            rank: algebroid.rank(),
        });
    }
    let coeffs = omega.at(x);
    let jac = omega.jacobian_at(x, algebroid.fd_step());
    Ok(exterior_differential_values(algebroid, x, &coeffs, &jac, p))
}

/// `(i_σ ω)_{α₂…α_p} = σ^α ω_{α α₂…α_p}` on coefficient arrays.
pub fn contraction(sigma: &[f64], omega: &[f64], k: usize, p: usize) -> Vec<f64> {
    assert!(p >= 1, "cannot contract a function");
    let tail = k.pow(p as u32 - 1);
    (0..tail)
        .map(|t| (0..k).map(|a| sigma[a] * omega[a * tail + t]).sum())
        .collect()
}

/// `d_σ ω = i_σ dω + d i_σ ω` at `x`.
pub fn lie_derivative(
    algebroid: &LieAlgebroidModel,
    sigma: &SectionOfE,
    omega: &PFormOnE,
    x: &[f64],
) -> Result<Vec<f64>> {
    algebroid.check_point(x)?;
    let (n, k) = (algebroid.base_dim(), algebroid.rank());
    check_len("section rank", k, sigma.rank())?;
    check_len("form rank", k, omega.rank())?;
    let p = omega.degree();
    let h = algebroid.fd_step();
    let s = sigma.at(x);
    let w = omega.at(x);
    let dw_jac = omega.jacobian_at(x, h);

    let mut out = if p < k {
        let dw = exterior_differential_values(algebroid, x, &w, &dw_jac, p);
        contraction(&s, &dw, k, p + 1)
    } else {
        // a top form has dω = 0
        vec![0.0; k.pow(p as u32)]
    };
    if p >= 1 {
        // i_σ ω and its derivative by the product rule
        let iw = contraction(&s, &w, k, p);
        let ds = sigma.jacobian_at(x, h);
        let tail = k.pow(p as u32 - 1);
        let mut iw_jac = vec![0.0; tail * n];
        for t in 0..tail {
            for j in 0..n {
                let mut v = 0.0;
                for a in 0..k {
                    v += ds[a * n + j] * w[a * tail + t] + s[a] * dw_jac[(a * tail + t) * n + j];
                }
                iw_jac[t * n + j] = v;
            }
        }
        let d_iw = exterior_differential_values(algebroid, x, &iw, &iw_jac, p - 1);
        for (o, v) in out.iter_mut().zip(d_iw) {
            *o += v;
        }
    }
    Ok(out)
}

/// Residuals of the two structure equations at a point.
#[derive(Debug, Clone)]
pub struct StructureResiduals {
    /// `ρ_α^j ∂_j ρ_β^i − ρ_β^j ∂_j ρ_α^i − ρ_γ^i C_{αβ}^γ`, layout
    /// `[(α k + β) n + i]`.
    pub anchor: Vec<f64>,
    /// `Σ_cyclic(α,β,γ) [ρ_α^i ∂_i C_{βγ}^ν + C_{αμ}^ν C_{βγ}^μ]`, layout
    /// `[((α k + β) k + γ) k + ν]`.
    pub jacobi: Vec<f64>,
}

impl StructureResiduals {
    pub fn max_anchor(&self) -> f64 {
        crate::linalg::max_abs(&self.anchor)
    }

    pub fn max_jacobi(&self) -> f64 {
        crate::linalg::max_abs(&self.jacobi)
    }

    pub fn max(&self) -> f64 {
        self.max_anchor().max(self.max_jacobi())
    }
}

pub fn structure_equation_residuals(
    algebroid: &LieAlgebroidModel,
    x: &[f64],
) -> Result<StructureResiduals> {
    algebroid.check_point(x)?;
    let (n, k) = (algebroid.base_dim(), algebroid.rank());
    let rho = algebroid.anchor_at(x);
    let drho = algebroid.anchor_jacobian_at(x);
    let c = algebroid.bracket_at(x);
    let dc = algebroid.bracket_jacobian_at(x);

    let mut anchor = vec![0.0; k * k * n];
    for a in 0..k {
        for b in 0..k {
            for i in 0..n {
                let mut v = 0.0;
                for j in 0..n {
                    v += rho[a * n + j] * drho[(b * n + i) * n + j]
                        - rho[b * n + j] * drho[(a * n + i) * n + j];
                }
                for g in 0..k {
                    v -= rho[g * n + i] * c[(a * k + b) * k + g];
                }
                anchor[(a * k + b) * n + i] = v;
            }
        }
    }

    let term = |a: usize, b: usize, g: usize, nu: usize| -> f64 {
        let mut v = 0.0;
        for i in 0..n {
            v += rho[a * n + i] * dc[((b * k + g) * k + nu) * n + i];
        }
        for mu in 0..k {
            v += c[(a * k + mu) * k + nu] * c[(b * k + g) * k + mu];
        }
        v
    };
    let mut jacobi = vec![0.0; k * k * k * k];
    for a in 0..k {
        for b in 0..k {
            for g in 0..k {
                for nu in 0..k {
                    jacobi[((a * k + b) * k + g) * k + nu] =
                        term(a, b, g, nu) + term(b, g, a, nu) + term(g, a, b, nu);
                }
            }
        }
    }
    Ok(StructureResiduals { anchor, jacobi })
}
