//! Discretized sections of `π` on a regular grid over `N`, and the
//! admissibility and morphism residuals evaluated with finite differences.
//!
//! Node numbering is row-major over the axes with axis 0 slowest. Node
//! coordinates are `origin[d] + i_d · spacing[d]`; on periodic axes the
//! period is `extent · spacing`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::check_len;
use crate::jet::{FibredAlgebroidPair, JetPoint};
use crate::linalg::max_abs;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    /// Central differences inside, second-order one-sided stencils on the
    /// first and last node of each axis.
    OneSided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    extents: Vec<usize>,
    spacing: Vec<f64>,
    origin: Vec<f64>,
    boundary: Boundary,
    strides: Vec<usize>,
}

impl GridSpec {
    pub fn new(
        extents: Vec<usize>,
        spacing: Vec<f64>,
        origin: Vec<f64>,
        boundary: Boundary,
    ) -> Result<Self> {
        let r = extents.len();
        if r == 0 {
            return Err(Error::InvalidGrid("a grid needs at least one axis"));
        }
        check_len("grid spacing", r, spacing.len())?;
        check_len("grid origin", r, origin.len())?;
        for (axis, &extent) in extents.iter().enumerate() {
            if extent < 3 {
                return Err(Error::GridTooSmall { axis, extent });
            }
        }
        if spacing.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(Error::InvalidGrid("spacing must be positive and finite"));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite"));
        }
        let mut strides = vec![1; r];
        for d in (0..r - 1).rev() {
            strides[d] = strides[d + 1] * extents[d + 1];
        }
        Ok(Self {
            extents,
            spacing,
            origin,
            boundary,
            strides,
        })
    }

    /// `n` nodes per axis with spacing `h`.
    pub fn uniform(r: usize, n: usize, h: f64, origin: f64, boundary: Boundary) -> Result<Self> {
        Self::new(vec![n; r], vec![h; r], vec![origin; r], boundary)
    }

    /// The periodic cube `[0, length)^r` with `n` nodes per axis.
    pub fn periodic_cube(r: usize, n: usize, length: f64) -> Result<Self> {
        Self::uniform(r, n, length / n as f64, 0.0, Boundary::Periodic)
    }

    pub fn r(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The largest spacing.
    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().cloned().fold(0.0, f64::max)
    }

    pub fn check_node(&self, node: usize) -> Result<()> {
        if node < self.len() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node,
                len: self.len(),
            })
        }
    }

    pub fn multi_index(&self, node: usize) -> Vec<usize> {
        self.extents
            .iter()
            .zip(&self.strides)
            .map(|(e, s)| (node / s) % e)
            .collect()
    }

    pub fn node(&self, index: &[usize]) -> usize {
        index.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn coords(&self, node: usize) -> Vec<f64> {
        self.multi_index(node)
            .iter()
            .enumerate()
            .map(|(d, &i)| self.origin[d] + i as f64 * self.spacing[d])
            .collect()
    }

    /// Stencil nodes and weights (already divided by the spacing) for
    /// `∂/∂x^axis` at `node`.
    pub fn stencil(&self, node: usize, axis: usize) -> [(usize, f64); 3] {
        let idx = (node / self.strides[axis]) % self.extents[axis];
        let n = self.extents[axis];
        let s = self.strides[axis];
        let h = self.spacing[axis];
        let base = node - idx * s;
        let at = |i: usize| base + i * s;
        let c = 0.5 / h;
        if idx > 0 && idx + 1 < n {
            return [(at(idx - 1), -c), (at(idx), 0.0), (at(idx + 1), c)];
        }
        match (self.boundary, idx == 0) {
            (Boundary::Periodic, true) => [(at(n - 1), -c), (at(0), 0.0), (at(1), c)],
            (Boundary::Periodic, false) => [(at(n - 2), -c), (at(n - 1), 0.0), (at(0), c)],
            (Boundary::OneSided, true) => [(at(0), -3.0 * c), (at(1), 4.0 * c), (at(2), -c)],
            (Boundary::OneSided, false) => {
                [(at(n - 1), 3.0 * c), (at(n - 2), -4.0 * c), (at(n - 3), c)]
            }
        }
    }

    /// Grid derivative along `axis` at `node` of the vector-valued node
    /// function `f`.
    pub fn derivative<F>(&self, node: usize, axis: usize, f: F) -> Vec<f64>
    where
        F: Fn(usize) -> Vec<f64>,
    {
        let mut out: Vec<f64> = Vec::new();
        for (nb, w) in self.stencil(node, axis) {
            if w == 0.0 {
                continue;
            }
            let v = f(nb);
            if out.is_empty() {
                out = vec![0.0; v.len()];
            }
            for (o, x) in out.iter_mut().zip(v) {
                *o += w * x;
            }
        }
        out
    }
}

/// A section `Φ` of `π`, sampled at every node: `u^A` (the base map) and
/// `y_a^α` (the fibre map `Φ(ē_a) = e_a + y_a^α e_α`).
///
/// Storage is node-major: `u[node * m_u + A]` and
/// `y[node * m_k * r + α * r + a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedSection {
    grid: GridSpec,
    m_u: usize,
    m_k: usize,
    u: Vec<f64>,
    y: Vec<f64>,
}

impl DiscretizedSection {
    pub fn new(grid: GridSpec, m_u: usize, m_k: usize, u: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        check_len("section u values", n * m_u, u.len())?;
        check_len("section y values", n * m_k * grid.r(), y.len())?;
        if let Some(i) = u.iter().chain(&y).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: i });
        }
        Ok(Self {
            grid,
            m_u,
            m_k,
            u,
            y,
        })
    }

    /// Samples `f(x) = (u(x), y(x))` at every node.
    pub fn from_fn<F>(grid: GridSpec, m_u: usize, m_k: usize, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> (Vec<f64>, Vec<f64>),
    {
        let n = grid.len();
        let r = grid.r();
        let mut u = Vec::with_capacity(n * m_u);
        let mut y = Vec::with_capacity(n * m_k * r);
        for node in 0..n {
            let (un, yn) = f(&grid.coords(node));
            check_len("sampled u", m_u, un.len())?;
            check_len("sampled y", m_k * r, yn.len())?;
            u.extend(un);
            y.extend(yn);
        }
        Self::new(grid, m_u, m_k, u, y)
    }

    pub fn zero(grid: GridSpec, m_u: usize, m_k: usize) -> Self {
        let n = grid.len();
        let r = grid.r();
        Self {
            grid,
            m_u,
            m_k,
            u: vec![0.0; n * m_u],
            y: vec![0.0; n * m_k * r],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn m_u(&self) -> usize {
        self.m_u
    }
    pub fn m_k(&self) -> usize {
        self.m_k
    }
    pub fn u_values(&self) -> &[f64] {
        &self.u
    }
    pub fn y_values(&self) -> &[f64] {
        &self.y
    }

    pub fn u_at(&self, node: usize) -> &[f64] {
        &self.u[node * self.m_u..(node + 1) * self.m_u]
    }

    pub fn y_at(&self, node: usize) -> &[f64] {
        let w = self.m_k * self.grid.r();
        &self.y[node * w..(node + 1) * w]
    }

    pub fn jet_point(&self, node: usize) -> Result<JetPoint> {
        self.grid.check_node(node)?;
        Ok(JetPoint::new(
            self.grid.coords(node),
            self.u_at(node).to_vec(),
            self.y_at(node).to_vec(),
        ))
    }

    pub fn check_pair(&self, pair: &FibredAlgebroidPair) -> Result<()> {
        check_len("section base dimension", pair.r(), self.grid.r())?;
        check_len("section fibre dimension", pair.m_u(), self.m_u)?;
        check_len("section kernel rank", pair.m_k(), self.m_k)
    }
}

/// `ρ_a^i ∂_i g` for each component of a node function, layout `[o * r + a]`.
pub(crate) fn anchored_gradient<F>(
    pair: &FibredAlgebroidPair,
    grid: &GridSpec,
    node: usize,
    f: F,
) -> Vec<f64>
where
    F: Fn(usize) -> Vec<f64> + Copy,
{
    let r = grid.r();
    let partials: Vec<Vec<f64>> = (0..r).map(|i| grid.derivative(node, i, f)).collect();
    let q = partials[0].len();
    let rho = pair.base_anchor_at(&grid.coords(node));
    let mut out = vec![0.0; q * r];
    for o in 0..q {
        for a in 0..r {
            out[o * r + a] = (0..r).map(|i| rho[a * r + i] * partials[i][o]).sum();
        }
    }
    out
}

/// `ρ_a^i ∂_i u^A − ρ_a^A − ρ_α^A y_a^α` at `node`, layout `[A * r + a]`.
pub fn admissibility_residual(
    pair: &FibredAlgebroidPair,
    phi: &DiscretizedSection,
    node: usize,
) -> Result<Vec<f64>> {
    phi.check_pair(pair)?;
    phi.grid.check_node(node)?;
    let (r, mu, mk) = (pair.r(), pair.m_u(), pair.m_k());
    if mu == 0 {
        return Ok(Vec::new());
    }
    let du = anchored_gradient(pair, &phi.grid, node, |n| phi.u_at(n).to_vec());
    let p = phi.jet_point(node)?;
    let m = p.base_point();
    let rh = pair.anchor_horizontal_at(&m);
    let rv = pair.anchor_vertical_at(&m);
    let mut out = vec![0.0; mu * r];
    for big in 0..mu {
        for a in 0..r {
            let mut v = du[big * r + a] - rh[a * mu + big];
            for al in 0..mk {
                v -= rv[al * mu + big] * p.y[al * r + a];
            }
            out[big * r + a] = v;
        }
    }
    Ok(out)
}

/// The morphism residual at `node`, layout `[(a * r + b) * m_k + α]`:
///
/// `ℳ_{ab}^α = ρ_b^i ∂_i y_a^α − ρ_a^i ∂_i y_b^α + C_{bγ}^α y_a^γ − C_{aγ}^α y_b^γ
///            + C_{βγ}^α y_b^β y_a^γ − C_{ab}^α + C_{ab}^d y_d^α`.
///
/// It is the coefficient of `ē^a ∧ ē^b` (up to the factor ½) in
/// `Φ*(de^α) − d(Φ*e^α)`, and is antisymmetric in `(a, b)` by construction.
pub fn morphism_residual(
    pair: &FibredAlgebroidPair,
    phi: &DiscretizedSection,
    node: usize,
) -> Result<Vec<f64>> {
    phi.check_pair(pair)?;
    phi.grid.check_node(node)?;
    let (r, mk) = (pair.r(), pair.m_k());
    let dy = anchored_gradient(pair, &phi.grid, node, |n| phi.y_at(n).to_vec());
    // dy[(α r + a) r + b] = ρ_b^i ∂_i y_a^α
    let p = phi.jet_point(node)?;
    let m = p.base_point();
    let chh = pair.bracket_horizontal_at(&m);
    let chv = pair.bracket_mixed_at(&m);
    let cvv = pair.bracket_vertical_at(&m);
    let cb = pair.base_bracket_at(&p.x);
    let y = |al: usize, a: usize| p.y[al * r + a];
    let mut out = vec![0.0; r * r * mk];
    for a in 0..r {
        for b in a + 1..r {
            for al in 0..mk {
                let mut v = dy[(al * r + a) * r + b] - dy[(al * r + b) * r + a];
                for g in 0..mk {
                    v += chv[(b * mk + g) * mk + al] * y(g, a)
                        - chv[(a * mk + g) * mk + al] * y(g, b);
                    for be in 0..mk {
                        v += cvv[(be * mk + g) * mk + al] * y(be, b) * y(g, a);
                    }
                }
                v -= chh[(a * r + b) * mk + al];
                for d in 0..r {
                    v += cb[(a * r + b) * r + d] * y(al, d);
                }
                out[(a * r + b) * mk + al] = v;
                out[(b * r + a) * mk + al] = -v;
            }
        }
    }
    Ok(out)
}

/// Per-node residuals over a whole grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualField {
    pub r: usize,
    pub m_u: usize,
    pub m_k: usize,
    /// `[node * m_u * r + A * r + a]`
    pub admissibility: Vec<f64>,
    /// `[node * r * r * m_k + (a * r + b) * m_k + α]`
    pub morphism: Vec<f64>,
}

impl ResidualField {
    pub fn nodes(&self) -> usize {
        self.morphism
            .len()
            .checked_div(self.r * self.r * self.m_k)
            .unwrap_or_else(|| self.admissibility.len() / (self.m_u * self.r).max(1))
    }

    pub fn max_admissibility(&self) -> f64 {
        max_abs(&self.admissibility)
    }

    pub fn max_morphism(&self) -> f64 {
        max_abs(&self.morphism)
    }

    /// Root mean square over all entries.
    pub fn rms_admissibility(&self) -> f64 {
        rms(&self.admissibility)
    }

    pub fn rms_morphism(&self) -> f64 {
        rms(&self.morphism)
    }

    pub fn morphism_at(&self, node: usize) -> &[f64] {
        let w = self.r * self.r * self.m_k;
        &self.morphism[node * w..(node + 1) * w]
    }

    /// Largest entry of either residual.
    pub fn max(&self) -> f64 {
        self.max_admissibility().max(self.max_morphism())
    }
}

pub(crate) fn rms(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    libm::sqrt(v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub field: ResidualField,
    pub tol: f64,
    pub is_morphism: bool,
}

/// Evaluates both residuals at every node; `is_morphism` when both max norms
/// are at most `tol`.
pub fn residual_report(
    pair: &FibredAlgebroidPair,
    phi: &DiscretizedSection,
    tol: f64,
) -> Result<ResidualReport> {
    phi.check_pair(pair)?;
    let n = phi.grid.len();
    let (r, mu, mk) = (pair.r(), pair.m_u(), pair.m_k());
    let mut admissibility = Vec::with_capacity(n * mu * r);
    let mut morphism = Vec::with_capacity(n * r * r * mk);
    for node in 0..n {
        admissibility.extend(admissibility_residual(pair, phi, node)?);
        morphism.extend(morphism_residual(pair, phi, node)?);
    }
    let field = ResidualField {
        r,
        m_u: mu,
        m_k: mk,
        admissibility,
        morphism,
    };
    let is_morphism = field.max() <= tol;
    Ok(ResidualReport {
        field,
        tol,
        is_morphism,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SmoothField;

    #[test]
    fn grid_rejects_short_axes_and_bad_spacing() {
        assert_eq!(
            GridSpec::uniform(2, 2, 0.1, 0.0, Boundary::Periodic).unwrap_err(),
            Error::GridTooSmall { axis: 0, extent: 2 }
        );
        assert!(GridSpec::new(vec![4], vec![0.0], vec![0.0], Boundary::OneSided).is_err());
    }

    #[test]
    fn node_numbering_roundtrips() {
        let g = GridSpec::new(
            vec![3, 4, 5],
            vec![1.0; 3],
            vec![0.0; 3],
            Boundary::OneSided,
        )
        .unwrap();
        for node in 0..g.len() {
            assert_eq!(g.node(&g.multi_index(node)), node);
        }
        assert_eq!(g.multi_index(1), vec![0, 0, 1]);
        assert_eq!(g.coords(5), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn stencils_are_exact_on_quadratics() {
        let g = GridSpec::uniform(1, 6, 0.5, 1.0, Boundary::OneSided).unwrap();
        for node in 0..g.len() {
            let x = g.coords(node)[0];
            let d = g.derivative(node, 0, |n| {
                let t = g.coords(n)[0];
                vec![t * t - 3.0 * t]
            });
            assert!((d[0] - (2.0 * x - 3.0)).abs() < 1e-12, "node {node}");
        }
    }

    #[test]
    fn periodic_stencil_wraps() {
        let g = GridSpec::periodic_cube(1, 8, 8.0).unwrap();
        assert_eq!(g.stencil(0, 0), [(7, -0.5), (0, 0.0), (1, 0.5)]);
        assert_eq!(g.stencil(7, 0), [(6, -0.5), (7, 0.0), (0, 0.5)]);
    }

    #[test]
    fn constant_horizontal_anchor_gives_minus_one() {
        let pair = FibredAlgebroidPair::builder(2, 1, 1)
            .anchor_horizontal(SmoothField::constant(3, vec![1.0, 1.0]))
            .build()
            .unwrap();
        let g = GridSpec::uniform(2, 4, 0.1, 0.0, Boundary::OneSided).unwrap();
        let phi = DiscretizedSection::zero(g, 1, 1);
        let rep = residual_report(&pair, &phi, 0.5).unwrap();
        assert!(rep.field.admissibility.iter().all(|v| *v == -1.0));
        assert!(!rep.is_morphism);
    }

    #[test]
    fn zero_section_on_trivial_pair_is_morphism() {
        let pair = FibredAlgebroidPair::builder(2, 1, 2).build().unwrap();
        let g = GridSpec::uniform(2, 3, 0.1, 0.0, Boundary::Periodic).unwrap();
        let rep = residual_report(&pair, &DiscretizedSection::zero(g, 1, 2), 0.0).unwrap();
        assert!(rep.is_morphism);
    }

    #[test]
    fn no_fibre_coordinates_gives_empty_admissibility() {
        let pair = FibredAlgebroidPair::builder(3, 0, 3).build().unwrap();
        let g = GridSpec::periodic_cube(3, 3, 1.0).unwrap();
        let phi = DiscretizedSection::zero(g, 0, 3);
        assert!(admissibility_residual(&pair, &phi, 4).unwrap().is_empty());
    }

    #[test]
    fn node_out_of_range() {
        let pair = FibredAlgebroidPair::builder(1, 1, 1).build().unwrap();
        let g = GridSpec::uniform(1, 3, 0.1, 0.0, Boundary::OneSided).unwrap();
        let phi = DiscretizedSection::zero(g, 1, 1);
        assert_eq!(
            morphism_residual(&pair, &phi, 3).unwrap_err(),
            Error::NodeOutOfRange { node: 3, len: 3 }
        );
    }
}
