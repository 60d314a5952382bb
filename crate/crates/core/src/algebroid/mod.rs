//! Lie algebroids in a single chart, given by their structure functions.
//!
//! With coordinates `x^i` on the base (`i < n`) and a local basis `e_α` of
//! sections (`α < k`), the algebroid is the pair of maps
//!
//! * anchor `ρ_α^i(x)`, stored row-major as `[α * n + i]`;
//! * bracket coefficients `C_{αβ}^γ(x)` with `[e_α, e_β] = C_{αβ}^γ e_γ`,
//!   stored as `[(α * k + β) * k + γ]`.
//!
//! Derivative arrays append the base index last: `∂_j ρ_α^i` lives at
//! `[(α * n + i) * n + j]`.

mod calculus;
mod flow;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::check_len;
use crate::{Result, SmoothField, DEFAULT_FD_STEP};

pub use calculus::{
    antisymmetrize, bracket, contraction, exterior_differential, lie_derivative,
    structure_equation_residuals, StructureResiduals,
};
pub use flow::{flow_of_section, morphism_residuals, Flow, MorphismDefect};

#[derive(Clone, Debug)]
pub struct LieAlgebroidModel {
    base_dim: usize,
    rank: usize,
    anchor: SmoothField,
    bracket: SmoothField,
    fd_step: f64,
}

impl LieAlgebroidModel {
    /// Builds a model from anchor (`n → k·n`) and bracket (`n → k³`) maps.
    ///
    /// Bracket coefficients are antisymmetrized in their lower indices on
    /// every evaluation, so callbacks only need to be right on `α < β`.
    /// Whether the structure equations hold is not checked here; see
    /// [`structure_equation_residuals`].
    pub fn new(
        base_dim: usize,
        rank: usize,
        anchor: SmoothField,
        bracket: SmoothField,
    ) -> Result<Self> {
        check_len("anchor input", base_dim, anchor.in_dim())?;
        check_len("anchor output", rank * base_dim, anchor.out_dim())?;
        check_len("bracket input", base_dim, bracket.in_dim())?;
        check_len("bracket output", rank * rank * rank, bracket.out_dim())?;
        Ok(Self {
            base_dim,
            rank,
            anchor,
            bracket,
            fd_step: DEFAULT_FD_STEP,
        })
    }

    /// A Lie algebra with constant structure constants, viewed as an
    /// algebroid with zero anchor over a `base_dim`-dimensional base.
    ///
    /// Unlike [`LieAlgebroidModel::new`], constants that are not exactly
    /// antisymmetric are rejected.
    pub fn lie_algebra(base_dim: usize, rank: usize, constants: Vec<f64>) -> Result<Self> {
        check_len("structure constants", rank * rank * rank, constants.len())?;
        let k = rank;
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    if constants[(a * k + b) * k + c] != -constants[(b * k + a) * k + c] {
                        return Err(crate::Error::NotAntisymmetric {
                            alpha: a,
                            beta: b,
                            gamma: c,
                        });
                    }
                }
            }
        }
        Self::new(
            base_dim,
            rank,
            SmoothField::zero(base_dim, rank * base_dim),
            SmoothField::constant(base_dim, constants),
        )
    }

    /// The standard algebroid `TM` over `ℝⁿ` in the coordinate basis.
    pub fn tangent_bundle(n: usize) -> Self {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        Self::new(
            n,
            n,
            SmoothField::constant(n, id),
            SmoothField::zero(n, n * n * n),
        )
        .expect("consistent dimensions")
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn anchor_field(&self) -> &SmoothField {
        &self.anchor
    }

    pub fn bracket_field(&self) -> &SmoothField {
        &self.bracket
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        check_len("base point", self.base_dim, x.len())
    }

    /// `ρ_α^i(x)`, layout `[α * n + i]`.
    pub fn anchor_at(&self, x: &[f64]) -> Vec<f64> {
        self.anchor.eval(x)
    }

    /// `∂_j ρ_α^i(x)`, layout `[(α * n + i) * n + j]`.
    pub fn anchor_jacobian_at(&self, x: &[f64]) -> Vec<f64> {
        self.anchor.jacobian(x, self.fd_step)
    }

    /// `C_{αβ}^γ(x)`, antisymmetrized.
    pub fn bracket_at(&self, x: &[f64]) -> Vec<f64> {
        let mut c = self.bracket.eval(x);
        antisymmetrize_pairs(&mut c, self.rank, 1);
        c
    }

    /// `∂_j C_{αβ}^γ(x)`, layout `[((α * k + β) * k + γ) * n + j]`.
    pub fn bracket_jacobian_at(&self, x: &[f64]) -> Vec<f64> {
        let mut c = self.bracket.jacobian(x, self.fd_step);
        antisymmetrize_pairs(&mut c, self.rank, self.base_dim);
        c
    }

    /// `v^i = ρ_α^i(x) a^α`.
    pub fn anchor_apply(&self, x: &[f64], a: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        check_len("algebroid element", self.rank, a.len())?;
        let rho = self.anchor_at(x);
        let n = self.base_dim;
        Ok((0..n)
            .map(|i| (0..self.rank).map(|al| rho[al * n + i] * a[al]).sum())
            .collect())
    }
}

/// Antisymmetrizes `c[(α k + β) * tail + t]` in `(α, β)`.
fn antisymmetrize_pairs(c: &mut [f64], k: usize, tail_per_gamma: usize) {
    let tail = k * tail_per_gamma;
    if k == 0 || tail == 0 {
        return;
    }
    for a in 0..k {
        for b in a..k {
            for t in 0..tail {
                let i = (a * k + b) * tail + t;
                let j = (b * k + a) * tail + t;
                let v = 0.5 * (c[i] - c[j]);
                c[i] = v;
                c[j] = -v;
            }
        }
    }
}

/// A section `σ = σ^α e_α`, coefficients `ℝⁿ → ℝᵏ`.
#[derive(Clone, Debug)]
pub struct SectionOfE {
    coeffs: SmoothField,
}

impl SectionOfE {
    pub fn new(coeffs: SmoothField) -> Self {
        Self { coeffs }
    }

    pub fn constant(base_dim: usize, values: Vec<f64>) -> Self {
        Self::new(SmoothField::constant(base_dim, values))
    }

    pub fn zero(base_dim: usize, rank: usize) -> Self {
        Self::new(SmoothField::zero(base_dim, rank))
    }

    pub fn rank(&self) -> usize {
        self.coeffs.out_dim()
    }

    pub fn field(&self) -> &SmoothField {
        &self.coeffs
    }

    pub fn at(&self, x: &[f64]) -> Vec<f64> {
        self.coeffs.eval(x)
    }

    /// `∂_i σ^α`, layout `[α * n + i]`.
    pub fn jacobian_at(&self, x: &[f64], h: f64) -> Vec<f64> {
        self.coeffs.jacobian(x, h)
    }
}

/// A `p`-form on `E`, stored as the full antisymmetric array
/// `ω_{α₁…α_p}` of length `k^p` (row-major).
#[derive(Clone, Debug)]
pub struct PFormOnE {
    rank: usize,
    degree: usize,
    coeffs: SmoothField,
}

impl PFormOnE {
    /// Coefficient callbacks are antisymmetrized on evaluation.
    pub fn new(rank: usize, degree: usize, coeffs: SmoothField) -> Result<Self> {
        if degree > rank {
            return Err(crate::Error::DegreeOverflow { degree, rank });
        }
        check_len(
            "form coefficients",
            rank.pow(degree as u32),
            coeffs.out_dim(),
        )?;
        Ok(Self {
            rank,
            degree,
            coeffs,
        })
    }

    pub fn function(f: SmoothField, rank: usize) -> Result<Self> {
        Self::new(rank, 0, f)
    }

    /// The dual basis form `e^γ` (constant coefficients).
    pub fn dual_basis(base_dim: usize, rank: usize, gamma: usize) -> Self {
        let mut v = vec![0.0; rank];
        v[gamma] = 1.0;
        Self::new(rank, 1, SmoothField::constant(base_dim, v)).expect("degree 1 fits")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base_dim(&self) -> usize {
        self.coeffs.in_dim()
    }

    pub fn field(&self) -> &SmoothField {
        &self.coeffs
    }

    pub fn at(&self, x: &[f64]) -> Vec<f64> {
        let mut v = self.coeffs.eval(x);
        antisymmetrize(&mut v, self.rank, self.degree, 1);
        v
    }

    /// `∂_j ω_I`, layout `[I * n + j]`.
    pub fn jacobian_at(&self, x: &[f64], h: f64) -> Vec<f64> {
        let mut v = self.coeffs.jacobian(x, h);
        antisymmetrize(&mut v, self.rank, self.degree, self.base_dim());
        v
    }

    /// The form `dω` as a new form whose coefficients are evaluated through
    /// [`exterior_differential`]. Its own derivatives go through finite
    /// differences.
    pub fn differential(&self, algebroid: &LieAlgebroidModel) -> Result<PFormOnE> {
        if self.degree >= self.rank {
            return Err(crate::Error::DegreeOverflow {
                degree: self.degree,
                rank: self.rank,
            });
        }
        let a = algebroid.clone();
        let w = self.clone();
        let n = self.base_dim();
        let k = self.rank;
        let out = k.pow(self.degree as u32 + 1);
        PFormOnE::new(
            k,
            self.degree + 1,
            SmoothField::new(n, out, move |x| {
                exterior_differential(&a, &w, x).expect("validated degree")
            }),
        )
    }
}
