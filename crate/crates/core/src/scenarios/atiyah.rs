//! Systems with symmetry: the Atiyah algebroid of a trivialized principal
//! bundle with a reference connection of curvature `Ω`.
//!
//! In the basis of horizontal lifts `e_a` and adjoint sections `e_α`:
//! `[e_a, e_b] = −Ω_{ab}^α e_α`, `[e_a, e_α] = 0`, `[e_α, e_β] = C_{αβ}^γ e_γ`.
//! With this basis the bracket table is a Lie algebroid when `Ω` is closed
//! and takes values in the centre of `𝔤` (in particular for `Ω = 0`, the
//! covariant Euler-Poincaré case, and for abelian `𝔤` with closed `Ω`);
//! [`crate::algebroid::structure_equation_residuals`] reports otherwise.

use alloc::vec::Vec;

use crate::error::check_len;
use crate::jet::FibredAlgebroidPair;
use crate::{Result, SmoothField};

#[derive(Debug, Clone)]
pub struct AtiyahData {
    r: usize,
    m_k: usize,
    constants: Vec<f64>,
    /// `Ω_{ab}^α(x)` at `[(a * r + b) * m_k + α]`, antisymmetrized on use.
    omega: SmoothField,
}

impl AtiyahData {
    pub fn new(r: usize, constants: Vec<f64>, omega: SmoothField) -> Result<Self> {
        let m_k = (0..=constants.len())
            .find(|k| k * k * k >= constants.len())
            .unwrap_or(0);
        check_len(
            "structure constants (cube)",
            m_k * m_k * m_k,
            constants.len(),
        )?;
        check_len("curvature domain", r, omega.in_dim())?;
        check_len("curvature components", r * r * m_k, omega.out_dim())?;
        Ok(Self {
            r,
            m_k,
            constants,
            omega,
        })
    }

    /// Flat reference connection.
    pub fn flat(r: usize, constants: Vec<f64>) -> Result<Self> {
        let m_k = (0..=constants.len())
            .find(|k| k * k * k >= constants.len())
            .unwrap_or(0);
        Self::new(r, constants, SmoothField::zero(r, r * r * m_k))
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m_k(&self) -> usize {
        self.m_k
    }
}

pub fn builder_atiyah(data: &AtiyahData) -> Result<FibredAlgebroidPair> {
    let omega = data.omega.clone();
    let neg = SmoothField::new(data.r, omega.out_dim(), move |x| {
        omega.eval(x).into_iter().map(|v| -v).collect()
    });
    let omega = data.omega.clone();
    let neg = neg.with_jacobian(move |x| {
        omega
            .jacobian(x, crate::DEFAULT_FD_STEP)
            .into_iter()
            .map(|v| -v)
            .collect()
    });
    FibredAlgebroidPair::builder(data.r, 0, data.m_k)
        .bracket_horizontal(neg)
        .bracket_vertical(SmoothField::constant(data.r, data.constants.clone()))
        .build()
}
