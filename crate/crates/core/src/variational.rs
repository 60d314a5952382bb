//! Lagrangians on the jet bundle, the Euler-Lagrange residual of a
//! discretized section, Noether currents and the first-variation identity.
//!
//! The variational problem lives over `F = TN` in the coordinate basis, so
//! every operation here that differentiates along the grid checks that the
//! base algebroid of the pair is the coordinate tangent bundle.
//!
//! With `d/dx^a` the grid derivative along a section `Φ`,
//!
//! `δL_α = d/dx^a(∂L/∂y_a^α) − Z_{aα}^γ ∂L/∂y_a^γ − ρ_α^A ∂L/∂u^A`,
//!
//! and for a vertical section `σ` with current `J^a = σ^α ∂L/∂y_a^α`,
//!
//! `X_σ^{(1)} L = −δL_α σ^α + d J^a/dx^a`
//!
//! holds for every admissible `Φ`, solution or not.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::check_len;
use crate::fields::{rms, DiscretizedSection, GridSpec};
use crate::jet::{complete_lift, z_functions, FibredAlgebroidPair, JetPoint, ProjectableSection};
use crate::{Error, Result, SmoothField, DEFAULT_FD_STEP};

type ScalarFn = Arc<dyn Fn(&JetPoint) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(&JetPoint) -> Vec<f64> + Send + Sync>;

/// A function `L(x, u, y)` on the jet bundle of a pair with dimensions
/// `(r, m_u, m_k)`.
///
/// Layouts of the optional analytic derivatives (`w = m_k · r`, and `y`
/// flattened as `[α * r + a]`):
///
/// * `∂L/∂u^A`: `[A]`;
/// * `∂L/∂y_a^α`: `[α * r + a]`;
/// * `∂²L/∂y∂y`: `[(α r + a) * w + (β r + b)]`;
/// * `∂²L/∂y∂u`: `[(α r + a) * m_u + A]`;
/// * `∂²L/∂y∂x`: `[(α r + a) * r + i]`.
#[derive(Clone)]
pub struct Lagrangian {
    r: usize,
    m_u: usize,
    m_k: usize,
    value: ScalarFn,
    du: Option<VectorFn>,
    dy: Option<VectorFn>,
    hess_yy: Option<VectorFn>,
    hess_yu: Option<VectorFn>,
    hess_yx: Option<VectorFn>,
    fd_step: f64,
}

impl fmt::Debug for Lagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Lagrangian")
            .field("r", &self.r)
            .field("m_u", &self.m_u)
            .field("m_k", &self.m_k)
            .field("analytic_du", &self.du.is_some())
            .field("analytic_dy", &self.dy.is_some())
            .field("analytic_hessian", &self.hess_yy.is_some())
            .finish()
    }
}

#[derive(Clone, Copy)]
enum Slot {
    X,
    U,
    Y,
}

fn slot(p: &mut JetPoint, s: Slot) -> &mut Vec<f64> {
    match s {
        Slot::X => &mut p.x,
        Slot::U => &mut p.u,
        Slot::Y => &mut p.y,
    }
}

fn central<F: Fn(&JetPoint) -> Vec<f64>>(f: F, p: &JetPoint, s: Slot, h: f64) -> Vec<Vec<f64>> {
    let mut q = p.clone();
    let len = slot(&mut q, s).len();
    (0..len)
        .map(|i| {
            let orig = slot(&mut q, s)[i];
            slot(&mut q, s)[i] = orig + h;
            let fp = f(&q);
            slot(&mut q, s)[i] = orig - h;
            let fm = f(&q);
            slot(&mut q, s)[i] = orig;
            fp.iter()
                .zip(&fm)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect()
        })
        .collect()
}

impl Lagrangian {
    pub fn new<F>(r: usize, m_u: usize, m_k: usize, value: F) -> Self
    where
        F: Fn(&JetPoint) -> f64 + Send + Sync + 'static,
    {
        Self {
            r,
            m_u,
            m_k,
            value: Arc::new(value),
            du: None,
            dy: None,
            hess_yy: None,
            hess_yu: None,
            hess_yx: None,
            fd_step: DEFAULT_FD_STEP,
        }
    }

    pub fn with_du<F: Fn(&JetPoint) -> Vec<f64> + Send + Sync + 'static>(mut self, f: F) -> Self {
        self.du = Some(Arc::new(f));
        self
    }
    pub fn with_dy<F: Fn(&JetPoint) -> Vec<f64> + Send + Sync + 'static>(mut self, f: F) -> Self {
        self.dy = Some(Arc::new(f));
        self
    }
    pub fn with_hessian_yy<F: Fn(&JetPoint) -> Vec<f64> + Send + Sync + 'static>(
        mut self,
        f: F,
    ) -> Self {
        self.hess_yy = Some(Arc::new(f));
        self
    }
    pub fn with_hessian_yu<F: Fn(&JetPoint) -> Vec<f64> + Send + Sync + 'static>(
        mut self,
        f: F,
    ) -> Self {
        self.hess_yu = Some(Arc::new(f));
        self
    }
    pub fn with_hessian_yx<F: Fn(&JetPoint) -> Vec<f64> + Send + Sync + 'static>(
        mut self,
        f: F,
    ) -> Self {
        self.hess_yx = Some(Arc::new(f));
        self
    }
    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    /// Drops all analytic derivatives.
    pub fn fd_only(&self) -> Self {
        Self {
            du: None,
            dy: None,
            hess_yy: None,
            hess_yu: None,
            hess_yx: None,
            ..self.clone()
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }
    pub fn m_u(&self) -> usize {
        self.m_u
    }
    pub fn m_k(&self) -> usize {
        self.m_k
    }
    pub fn has_analytic_partials(&self) -> bool {
        self.du.is_some() && self.dy.is_some()
    }

    pub fn check_point(&self, p: &JetPoint) -> Result<()> {
        check_len("lagrangian x", self.r, p.x.len())?;
        check_len("lagrangian u", self.m_u, p.u.len())?;
        check_len("lagrangian y", self.m_k * self.r, p.y.len())
    }

    pub fn check_pair(&self, pair: &FibredAlgebroidPair) -> Result<()> {
        check_len("lagrangian base dimension", pair.r(), self.r)?;
        check_len("lagrangian fibre dimension", pair.m_u(), self.m_u)?;
        check_len("lagrangian kernel rank", pair.m_k(), self.m_k)
    }

    pub fn eval(&self, p: &JetPoint) -> f64 {
        (self.value)(p)
    }

    /// `∂L/∂u^A`.
    pub fn partial_u(&self, p: &JetPoint) -> Vec<f64> {
        match &self.du {
            Some(f) => f(p),
            None => self.fd_partial_u(p),
        }
    }

    /// `∂L/∂y_a^α`, layout `[α * r + a]`.
    pub fn partial_y(&self, p: &JetPoint) -> Vec<f64> {
        match &self.dy {
            Some(f) => f(p),
            None => self.fd_partial_y(p),
        }
    }

    pub fn fd_partial_u(&self, p: &JetPoint) -> Vec<f64> {
        central(|q| vec![self.eval(q)], p, Slot::U, self.fd_step)
            .into_iter()
            .map(|v| v[0])
            .collect()
    }

    pub fn fd_partial_y(&self, p: &JetPoint) -> Vec<f64> {
        central(|q| vec![self.eval(q)], p, Slot::Y, self.fd_step)
            .into_iter()
            .map(|v| v[0])
            .collect()
    }

    /// `∂L/∂x^i` (finite differences).
    pub fn partial_x(&self, p: &JetPoint) -> Vec<f64> {
        central(|q| vec![self.eval(q)], p, Slot::X, self.fd_step)
            .into_iter()
            .map(|v| v[0])
            .collect()
    }

    fn transpose(cols: Vec<Vec<f64>>, rows: usize) -> Vec<f64> {
        let n = cols.len();
        let mut out = vec![0.0; rows * n];
        for (j, c) in cols.into_iter().enumerate() {
            for i in 0..rows {
                out[i * n + j] = c[i];
            }
        }
        out
    }

    /// `∂²L/∂y∂y`; differences of `∂L/∂y` when not supplied.
    pub fn hessian_yy(&self, p: &JetPoint) -> Vec<f64> {
        match &self.hess_yy {
            Some(f) => f(p),
            None => {
                let w = self.m_k * self.r;
                Self::transpose(central(|q| self.partial_y(q), p, Slot::Y, self.fd_step), w)
            }
        }
    }

    /// `∂²L/∂y∂u`.
    pub fn hessian_yu(&self, p: &JetPoint) -> Vec<f64> {
        match &self.hess_yu {
            Some(f) => f(p),
            None => {
                let w = self.m_k * self.r;
                Self::transpose(central(|q| self.partial_y(q), p, Slot::U, self.fd_step), w)
            }
        }
    }

    /// `∂²L/∂y∂x`.
    pub fn hessian_yx(&self, p: &JetPoint) -> Vec<f64> {
        match &self.hess_yx {
            Some(f) => f(p),
            None => {
                let w = self.m_k * self.r;
                Self::transpose(central(|q| self.partial_y(q), p, Slot::X, self.fd_step), w)
            }
        }
    }

    /// `L₁ + L₂`. Analytic derivatives survive when both summands have them.
    pub fn sum(&self, other: &Lagrangian) -> Result<Lagrangian> {
        check_len("summand base dimension", self.r, other.r)?;
        check_len("summand fibre dimension", self.m_u, other.m_u)?;
        check_len("summand kernel rank", self.m_k, other.m_k)?;
        let (a, b) = (self.value.clone(), other.value.clone());
        let mut out = Lagrangian::new(self.r, self.m_u, self.m_k, move |p| a(p) + b(p))
            .with_fd_step(self.fd_step);
        fn add(x: &Option<VectorFn>, y: &Option<VectorFn>) -> Option<VectorFn> {
            match (x, y) {
                (Some(f), Some(g)) => {
                    let (f, g) = (f.clone(), g.clone());
                    Some(Arc::new(move |p: &JetPoint| {
                        f(p).iter().zip(g(p)).map(|(a, b)| a + b).collect()
                    }))
                }
                _ => None,
            }
        }
        out.du = add(&self.du, &other.du);
        out.dy = add(&self.dy, &other.dy);
        out.hess_yy = add(&self.hess_yy, &other.hess_yy);
        out.hess_yu = add(&self.hess_yu, &other.hess_yu);
        out.hess_yx = add(&self.hess_yx, &other.hess_yx);
        Ok(out)
    }

    /// `c · L`.
    pub fn scaled(&self, c: f64) -> Lagrangian {
        let v = self.value.clone();
        let mut out = self.clone();
        out.value = Arc::new(move |p| c * v(p));
        let scale = |x: &Option<VectorFn>| -> Option<VectorFn> {
            x.as_ref().map(|f| {
                let f = f.clone();
                Arc::new(move |p: &JetPoint| f(p).into_iter().map(|v| c * v).collect::<Vec<_>>())
                    as VectorFn
            })
        };
        out.du = scale(&self.du);
        out.dy = scale(&self.dy);
        out.hess_yy = scale(&self.hess_yy);
        out.hess_yu = scale(&self.hess_yu);
        out.hess_yx = scale(&self.hess_yx);
        out
    }

    /// `L = ½ Σ_{a,α} (y_a^α)²`.
    pub fn free_field(r: usize, m_u: usize, m_k: usize) -> Self {
        let w = m_k * r;
        Self::new(r, m_u, m_k, |p| {
            0.5 * p.y.iter().map(|v| v * v).sum::<f64>()
        })
        .with_du(move |_| vec![0.0; m_u])
        .with_dy(|p| p.y.clone())
        .with_hessian_yy(move |_| crate::linalg::identity(w))
        .with_hessian_yu(move |_| vec![0.0; w * m_u])
        .with_hessian_yx(move |_| vec![0.0; w * r])
    }

    /// `L = ½ Σ_{a,α} (y_a^α)² − V(u)`, with `V: ℝ^{m_u} → ℝ`.
    pub fn kinetic_minus_potential(r: usize, m_k: usize, potential: SmoothField) -> Result<Self> {
        check_len("potential output", 1, potential.out_dim())?;
        let m_u = potential.in_dim();
        let w = m_k * r;
        let (v1, v2) = (potential.clone(), potential);
        Ok(Self::new(r, m_u, m_k, move |p| {
            0.5 * p.y.iter().map(|v| v * v).sum::<f64>() - v1.eval(&p.u)[0]
        })
        .with_du(move |p| {
            v2.jacobian(&p.u, DEFAULT_FD_STEP)
                .into_iter()
                .map(|v| -v)
                .collect()
        })
        .with_dy(|p| p.y.clone())
        .with_hessian_yy(move |_| crate::linalg::identity(w))
        .with_hessian_yu(move |_| vec![0.0; w * m_u])
        .with_hessian_yx(move |_| vec![0.0; w * r]))
    }

    /// `L = ½ Σ_α I_α (y^α)²` on `r = 1`, for a pair with `m_u` fibre
    /// coordinates that the Lagrangian ignores.
    pub fn rigid_body(inertia: [f64; 3], m_u: usize) -> Self {
        Self::heavy_top(inertia, 0.0, [0.0; 3]).with_ignored_fibre(m_u)
    }

    /// `L = ½ Σ_α I_α (y^α)² − mgl ⟨u, χ⟩` on `r = 1`, `m_u = 3`: `u` is the
    /// direction of gravity in the body frame and `χ` the centre of mass.
    pub fn heavy_top(inertia: [f64; 3], mgl: f64, chi: [f64; 3]) -> Self {
        Self::new(1, 3, 3, move |p| {
            let kin: f64 = (0..3).map(|a| 0.5 * inertia[a] * p.y[a] * p.y[a]).sum();
            kin - mgl * p.u.iter().zip(&chi).map(|(u, c)| u * c).sum::<f64>()
        })
        .with_du(move |_| chi.iter().map(|c| -mgl * c).collect())
        .with_dy(move |p| (0..3).map(|a| inertia[a] * p.y[a]).collect())
        .with_hessian_yy(move |_| {
            let mut h = vec![0.0; 9];
            for a in 0..3 {
                h[a * 3 + a] = inertia[a];
            }
            h
        })
        .with_hessian_yu(|_| vec![0.0; 9])
        .with_hessian_yx(|_| vec![0.0; 3])
    }

    /// Re-targets a Lagrangian that does not depend on `u` to a pair with
    /// `m_u` fibre coordinates.
    fn with_ignored_fibre(self, m_u: usize) -> Self {
        let w = self.m_k * self.r;
        let strip = |p: &JetPoint| JetPoint::new(p.x.clone(), Vec::new(), p.y.clone());
        let inner = Lagrangian {
            m_u: 0,
            ..self.clone()
        };
        let (i1, i2, i3, i4) = (inner.clone(), inner.clone(), inner.clone(), inner);
        Lagrangian::new(self.r, m_u, self.m_k, move |p| i1.eval(&strip(p)))
            .with_du(move |_| vec![0.0; m_u])
            .with_dy(move |p| i2.partial_y(&strip(p)))
            .with_hessian_yy(move |p| i3.hessian_yy(&strip(p)))
            .with_hessian_yu(move |_| vec![0.0; w * m_u])
            .with_hessian_yx(move |p| i4.hessian_yx(&strip(p)))
    }
}

fn require_coordinate_base(pair: &FibredAlgebroidPair, x: &[f64]) -> Result<()> {
    if pair.base_is_coordinate(x, 0.0) {
        Ok(())
    } else {
        Err(Error::NonCoordinateBase)
    }
}

fn check_inputs(
    pair: &FibredAlgebroidPair,
    l: &Lagrangian,
    phi: &DiscretizedSection,
    node: usize,
) -> Result<JetPoint> {
    phi.check_pair(pair)?;
    l.check_pair(pair)?;
    let p = phi.jet_point(node)?;
    require_coordinate_base(pair, &p.x)?;
    Ok(p)
}

/// Grid divergence `Σ_a ∂_a g^a` of a node function with `r` components.
pub fn grid_divergence<F>(grid: &GridSpec, node: usize, f: F) -> f64
where
    F: Fn(usize) -> Vec<f64>,
{
    (0..grid.r())
        .map(|a| grid.derivative(node, a, |n| vec![f(n)[a]])[0])
        .sum()
}

/// `δL_α` at `node`.
pub fn el_residual(
    pair: &FibredAlgebroidPair,
    l: &Lagrangian,
    phi: &DiscretizedSection,
    node: usize,
) -> Result<Vec<f64>> {
    let p = check_inputs(pair, l, phi, node)?;
    let (r, mu, mk) = (pair.r(), pair.m_u(), pair.m_k());
    let grid = phi.grid();
    let momentum = |n: usize| l.partial_y(&phi.jet_point(n).expect("stencil node in range"));
    let mut out = vec![0.0; mk];
    for a in 0..r {
        let d = grid.derivative(node, a, momentum);
        for al in 0..mk {
            out[al] += d[al * r + a];
        }
    }
    let py = l.partial_y(&p);
    let pu = l.partial_u(&p);
    let z = z_functions(pair, &p)?;
    let rv = pair.anchor_vertical_at(&p.base_point());
    for al in 0..mk {
        for a in 0..r {
            for g in 0..mk {
                out[al] -= z.mixed[(a * mk + al) * mk + g] * py[g * r + a];
            }
        }
        for big in 0..mu {
            out[al] -= rv[al * mu + big] * pu[big];
        }
    }
    Ok(out)
}

/// `J^a = σ^α ∂L/∂y_a^α`, the components of the current against
/// `ω_a = i_{∂/∂x^a} dx¹ ∧ … ∧ dx^r`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoetherCurrent {
    pub components: Vec<f64>,
}

pub fn noether_current(
    pair: &FibredAlgebroidPair,
    l: &Lagrangian,
    sigma: &ProjectableSection,
    phi: &DiscretizedSection,
    node: usize,
) -> Result<NoetherCurrent> {
    let p = phi.jet_point(node)?;
    l.check_pair(pair)?;
    sigma.ensure_vertical_at(&p.x)?;
    Ok(NoetherCurrent {
        components: current_at(pair, l, sigma, &p),
    })
}

fn current_at(
    pair: &FibredAlgebroidPair,
    l: &Lagrangian,
    sigma: &ProjectableSection,
    p: &JetPoint,
) -> Vec<f64> {
    let (r, mk) = (pair.r(), pair.m_k());
    let s = sigma.vertical.eval(&p.base_point());
    let py = l.partial_y(p);
    (0..r)
        .map(|a| (0..mk).map(|al| s[al] * py[al * r + a]).sum())
        .collect()
}

/// `X_σ^{(1)} L` at a jet point, by the chain rule.
pub fn lift_derivative(
    pair: &FibredAlgebroidPair,
    l: &Lagrangian,
    sigma: &ProjectableSection,
    p: &JetPoint,
) -> Result<f64> {
    l.check_point(p)?;
    let t = complete_lift(pair, sigma, p)?;
    let mut v: f64 = l.partial_u(p).iter().zip(&t.du).map(|(a, b)| a * b).sum();
    v += l
        .partial_y(p)
        .iter()
        .zip(&t.dy)
        .map(|(a, b)| a * b)
        .sum::<f64>();
    if t.dx.iter().any(|d| *d != 0.0) {
        v += l
            .partial_x(p)
            .iter()
            .zip(&t.dx)
            .map(|(a, b)| a * b)
            .sum::<f64>();
    }
    Ok(v)
}

/// `X_σ^{(1)} L` at the jet point of `node`; zero for every node iff `L` is
/// invariant under `σ` along `Φ`.
pub fn invariance_defect(
    pair: &FibredAlgebroidPair,
    l: &Lagrangian,
    sigma: &ProjectableSection,
    phi: &DiscretizedSection,
    node: usize,
) -> Result<f64> {
    phi.check_pair(pair)?;
    l.check_pair(pair)?;
    let p = phi.jet_point(node)?;
    sigma.ensure_vertical_at(&p.x)?;
    lift_derivative(pair, l, sigma, &p)
}

/// The three terms of the first-variation identity at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstVariation {
    /// `X_σ^{(1)} L`
    pub lift: f64,
    /// `δL_α σ^α`
    pub el_pairing: f64,
    /// grid divergence of `J_σ`
    pub divergence: f64,
}

impl FirstVariation {
    /// `|X_σ^{(1)} L + δL_α σ^α − div J|`.
    pub fn defect(&self) -> f64 {
        (self.lift + self.el_pairing - self.divergence).abs()
    }
}

pub fn first_variation_terms(
    pair: &FibredAlgebroidPair,
    l: &Lagrangian,
    sigma: &ProjectableSection,
    phi: &DiscretizedSection,
    node: usize,
) -> Result<FirstVariation> {
    let p = check_inputs(pair, l, phi, node)?;
    sigma.ensure_vertical_at(&p.x)?;
    let lift = lift_derivative(pair, l, sigma, &p)?;
    let del = el_residual(pair, l, phi, node)?;
    let s = sigma.vertical.eval(&p.base_point());
    let el_pairing = del.iter().zip(&s).map(|(a, b)| a * b).sum();
    let divergence = grid_divergence(phi.grid(), node, |n| {
        current_at(
            pair,
            l,
            sigma,
            &phi.jet_point(n).expect("stencil node in range"),
        )
    });
    Ok(FirstVariation {
        lift,
        el_pairing,
        divergence,
    })
}

/// `|X_σ^{(1)} L + δL_α σ^α − div_h J_σ|` at `node`. For an admissible `Φ`
/// this is the discretization error of the identity, `O(h²)`.
pub fn first_variation_identity_defect(
    pair: &FibredAlgebroidPair,
    l: &Lagrangian,
    sigma: &ProjectableSection,
    phi: &DiscretizedSection,
    node: usize,
) -> Result<f64> {
    Ok(first_variation_terms(pair, l, sigma, phi, node)?.defect())
}

/// Max and RMS of `δL` over all nodes.
pub fn el_residual_norms(
    pair: &FibredAlgebroidPair,
    l: &Lagrangian,
    phi: &DiscretizedSection,
) -> Result<(f64, f64)> {
    let mut all = Vec::with_capacity(phi.grid().len() * pair.m_k());
    for node in 0..phi.grid().len() {
        all.extend(el_residual(pair, l, phi, node)?);
    }
    Ok((crate::linalg::max_abs(&all), rms(&all)))
}
