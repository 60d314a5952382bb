//! Standard first-order field theory: `E = TM` for a fibration
//! `M = N × U → N` with the adapted basis built from a connection.
//!
//! With `e_i = ∂_i + Γ_i^A ∂_A` and `e_A = ∂_A` one has
//!
//! * `[e_i, e_B] = −(∂Γ_i^A/∂u^B) e_A`,
//! * `[e_i, e_j] = C_{ij}^A e_A` with
//!   `C_{ij}^A = ∂_iΓ_j^A − ∂_jΓ_i^A + Γ_i^B ∂_BΓ_j^A − Γ_j^B ∂_BΓ_i^A`,
//!
//! and the curvature is `R_{ij}^A = −C_{ij}^A`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::check_len;
use crate::jet::FibredAlgebroidPair;
use crate::{Result, SmoothField, DEFAULT_FD_STEP};

type HessianFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub struct StandardCaseData {
    r: usize,
    m_u: usize,
    /// `Γ_i^A(x, u)` at `[i * m_u + A]`.
    gamma: SmoothField,
    /// `∂_l ∂_j Γ_i^A` at `[((i * m_u + A) * n + j) * n + l]`, `n = r + m_u`.
    hessian: Option<HessianFn>,
}

impl core::fmt::Debug for StandardCaseData {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("StandardCaseData")
            .field("r", &self.r)
            .field("m_u", &self.m_u)
            .field("analytic_hessian", &self.hessian.is_some())
            .finish()
    }
}

impl StandardCaseData {
    pub fn new(r: usize, m_u: usize, gamma: SmoothField) -> Result<Self> {
        check_len("connection domain", r + m_u, gamma.in_dim())?;
        check_len("connection coefficients", r * m_u, gamma.out_dim())?;
        Ok(Self {
            r,
            m_u,
            gamma,
            hessian: None,
        })
    }

    /// Supplies second derivatives of `Γ`, so that the bracket derivatives
    /// used by the structure equations are analytic too.
    pub fn with_hessian<H>(mut self, h: H) -> Self
    where
        H: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.hessian = Some(Arc::new(h));
        self
    }

    /// The trivial connection `Γ = 0`.
    pub fn trivial(r: usize, m_u: usize) -> Self {
        Self {
            r,
            m_u,
            gamma: SmoothField::zero(r + m_u, r * m_u),
            hessian: None,
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m_u(&self) -> usize {
        self.m_u
    }

    pub fn gamma_at(&self, m: &[f64]) -> Vec<f64> {
        self.gamma.eval(m)
    }

    /// `Γ_{iB}^A = ∂Γ_i^A/∂u^B` at `[(i * m_u + B) * m_u + A]`.
    pub fn gamma_u_derivative(&self, m: &[f64]) -> Vec<f64> {
        let (r, mu) = (self.r, self.m_u);
        let n = r + mu;
        let jac = self.gamma.jacobian(m, DEFAULT_FD_STEP);
        let mut out = vec![0.0; r * mu * mu];
        for i in 0..r {
            for b in 0..mu {
                for a in 0..mu {
                    out[(i * mu + b) * mu + a] = jac[(i * mu + a) * n + r + b];
                }
            }
        }
        out
    }

    /// `C_{ij}^A` at `[(i * r + j) * m_u + A]`.
    pub fn horizontal_bracket(&self, m: &[f64]) -> Vec<f64> {
        let (r, mu) = (self.r, self.m_u);
        let n = r + mu;
        let g = self.gamma.eval(m);
        let jac = self.gamma.jacobian(m, DEFAULT_FD_STEP);
        let d = |i: usize, a: usize, j: usize| jac[(i * mu + a) * n + j];
        let mut out = vec![0.0; r * r * mu];
        for i in 0..r {
            for j in 0..r {
                for a in 0..mu {
                    let mut v = d(j, a, i) - d(i, a, j);
                    for b in 0..mu {
                        v += g[i * mu + b] * d(j, a, r + b) - g[j * mu + b] * d(i, a, r + b);
                    }
                    out[(i * r + j) * mu + a] = v;
                }
            }
        }
        out
    }

    fn hessian_at(&self, m: &[f64]) -> Option<Vec<f64>> {
        let n = self.r + self.m_u;
        self.hessian.as_ref().map(|h| {
            let v = h(m);
            assert_eq!(
                v.len(),
                self.r * self.m_u * n * n,
                "connection hessian length"
            );
            v
        })
    }

    /// `∂_l Γ_{iB}^A` at `[((i * m_u + B) * m_u + A) * n + l]`, if a Hessian was given.
    fn gamma_u_derivative_jacobian(&self, m: &[f64]) -> Option<Vec<f64>> {
        let (r, mu) = (self.r, self.m_u);
        let n = r + mu;
        let hs = self.hessian_at(m)?;
        let mut out = vec![0.0; r * mu * mu * n];
        for i in 0..r {
            for b in 0..mu {
                for a in 0..mu {
                    for l in 0..n {
                        out[((i * mu + b) * mu + a) * n + l] =
                            hs[((i * mu + a) * n + r + b) * n + l];
                    }
                }
            }
        }
        Some(out)
    }

    /// `∂_l C_{ij}^A`, if a Hessian was given.
    fn horizontal_bracket_jacobian(&self, m: &[f64]) -> Option<Vec<f64>> {
        let (r, mu) = (self.r, self.m_u);
        let n = r + mu;
        let hs = self.hessian_at(m)?;
        let g = self.gamma.eval(m);
        let jac = self.gamma.jacobian(m, DEFAULT_FD_STEP);
        let d = |i: usize, a: usize, j: usize| jac[(i * mu + a) * n + j];
        let h = |i: usize, a: usize, j: usize, l: usize| hs[((i * mu + a) * n + j) * n + l];
        let mut out = vec![0.0; r * r * mu * n];
        for i in 0..r {
            for j in 0..r {
                for a in 0..mu {
                    for l in 0..n {
                        let mut v = h(j, a, i, l) - h(i, a, j, l);
                        for b in 0..mu {
                            v += d(i, b, l) * d(j, a, r + b) + g[i * mu + b] * h(j, a, r + b, l)
                                - d(j, b, l) * d(i, a, r + b)
                                - g[j * mu + b] * h(i, a, r + b, l);
                        }
                        out[((i * r + j) * mu + a) * n + l] = v;
                    }
                }
            }
        }
        Some(out)
    }

    /// `R_{ij}^A = −C_{ij}^A`.
    pub fn curvature(&self, m: &[f64]) -> Vec<f64> {
        self.horizontal_bracket(m).into_iter().map(|v| -v).collect()
    }
}

/// The fibred pair of the standard case: `F = TN`, `K = V(M → N)`,
/// `ρ_i^A = Γ_i^A`, `ρ_B^A = δ_B^A`.
pub fn builder_standard(data: &StandardCaseData) -> Result<FibredAlgebroidPair> {
    let (r, mu) = (data.r, data.m_u);
    let n = r + mu;
    let mut id = vec![0.0; mu * mu];
    for a in 0..mu {
        id[a * mu + a] = 1.0;
    }
    let (d1, d2) = (data.clone(), data.clone());
    let mut mixed = SmoothField::new(n, r * mu * mu, move |m| {
        d1.gamma_u_derivative(m).into_iter().map(|v| -v).collect()
    });
    let mut horizontal = SmoothField::new(n, r * r * mu, move |m| d2.horizontal_bracket(m));
    if data.hessian.is_some() {
        let (d3, d4) = (data.clone(), data.clone());
        mixed = mixed.with_jacobian(move |m| {
            d3.gamma_u_derivative_jacobian(m)
                .expect("hessian present")
                .into_iter()
                .map(|v| -v)
                .collect()
        });
        horizontal = horizontal
            .with_jacobian(move |m| d4.horizontal_bracket_jacobian(m).expect("hessian present"));
    }
    FibredAlgebroidPair::builder(r, mu, mu)
        .anchor_horizontal(data.gamma.clone())
        .anchor_vertical(SmoothField::constant(n, id))
        .bracket_mixed(mixed)
        .bracket_horizontal(horizontal)
        .build()
}
