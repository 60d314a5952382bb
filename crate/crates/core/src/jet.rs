//! The fibred pair `π: E → F` over `ν: M → N` in an adapted basis, its jet
//! bundle coordinates and the affine calculus on it.
//!
//! Index ranges: `a, b, c < r` (basis of `F`, coordinates `x^i` on `N`),
//! `A < m_u` (fibre coordinates `u^A` of `M`), `α, β, γ < m_k` (basis of the
//! kernel `K`). Functions on `M` take the concatenated point `(x, u)`.
//!
//! Flat layouts:
//!
//! | quantity            | length          | index                        |
//! |---------------------|-----------------|------------------------------|
//! | `ρ_a^i(x)`          | `r·r`           | `a * r + i`                  |
//! | `C_{bc}^a(x)`       | `r·r·r`         | `(b * r + c) * r + a`        |
//! | `ρ_a^A(x,u)`        | `r·m_u`         | `a * m_u + A`                |
//! | `ρ_α^A(x,u)`        | `m_k·m_u`       | `α * m_u + A`                |
//! | `C_{ab}^γ(x,u)`     | `r·r·m_k`       | `(a * r + b) * m_k + γ`      |
//! | `C_{aβ}^γ(x,u)`     | `r·m_k·m_k`     | `(a * m_k + β) * m_k + γ`    |
//! | `C_{αβ}^γ(x,u)`     | `m_k³`          | `(α * m_k + β) * m_k + γ`    |
//! | `y_a^α`             | `m_k·r`         | `α * r + a`                  |
//!
//! Brackets `[e_a, e_β]` and `[e_α, e_β]` have no `e_c` component; there is no
//! field for it, so `π` is a morphism by construction.

use alloc::vec;
use alloc::vec::Vec;

use crate::algebroid::{lie_derivative, LieAlgebroidModel, PFormOnE, SectionOfE};
use crate::error::check_len;
use crate::{Error, Result, SmoothField, DEFAULT_FD_STEP};

#[derive(Clone, Debug)]
pub struct FibredAlgebroidPair {
    r: usize,
    m_u: usize,
    m_k: usize,
    base_anchor: SmoothField,
    base_bracket: SmoothField,
    anchor_h: SmoothField,
    anchor_v: SmoothField,
    bracket_hh: SmoothField,
    bracket_hv: SmoothField,
    bracket_vv: SmoothField,
    fd_step: f64,
}

/// Starts from `F = TN` in the coordinate basis and every other structure
/// function zero.
#[derive(Clone, Debug)]
pub struct FibredPairBuilder {
    pair: FibredAlgebroidPair,
}

impl FibredPairBuilder {
    pub fn base_anchor(mut self, f: SmoothField) -> Self {
        self.pair.base_anchor = f;
        self
    }
    pub fn base_bracket(mut self, f: SmoothField) -> Self {
        self.pair.base_bracket = f;
        self
    }
    /// `ρ_a^A(x, u)`.
    pub fn anchor_horizontal(mut self, f: SmoothField) -> Self {
        self.pair.anchor_h = f;
        self
    }
    /// `ρ_α^A(x, u)`.
    pub fn anchor_vertical(mut self, f: SmoothField) -> Self {
        self.pair.anchor_v = f;
        self
    }
    /// `C_{ab}^γ(x, u)`.
    pub fn bracket_horizontal(mut self, f: SmoothField) -> Self {
        self.pair.bracket_hh = f;
        self
    }
    /// `C_{aβ}^γ(x, u)`.
    pub fn bracket_mixed(mut self, f: SmoothField) -> Self {
        self.pair.bracket_hv = f;
        self
    }
    /// `C_{αβ}^γ(x, u)`.
    pub fn bracket_vertical(mut self, f: SmoothField) -> Self {
        self.pair.bracket_vv = f;
        self
    }
    pub fn fd_step(mut self, h: f64) -> Self {
        self.pair.fd_step = h;
        self
    }

    pub fn build(self) -> Result<FibredAlgebroidPair> {
        let p = self.pair;
        let (r, mu, mk) = (p.r, p.m_u, p.m_k);
        let m = r + mu;
        let shapes: [(&'static str, &SmoothField, usize, usize); 7] = [
            ("base anchor", &p.base_anchor, r, r * r),
            ("base bracket", &p.base_bracket, r, r * r * r),
            ("horizontal anchor", &p.anchor_h, m, r * mu),
            ("vertical anchor", &p.anchor_v, m, mk * mu),
            ("horizontal bracket", &p.bracket_hh, m, r * r * mk),
            ("mixed bracket", &p.bracket_hv, m, r * mk * mk),
            ("vertical bracket", &p.bracket_vv, m, mk * mk * mk),
        ];
        for (what, f, i, o) in shapes {
            check_len(what, i, f.in_dim())?;
            check_len(what, o, f.out_dim())?;
        }
        Ok(p)
    }
}

fn antisym_pairs(c: &mut [f64], k: usize, tail: usize) {
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

impl FibredAlgebroidPair {
    pub fn builder(r: usize, m_u: usize, m_k: usize) -> FibredPairBuilder {
        let m = r + m_u;
        let mut id = vec![0.0; r * r];
        for a in 0..r {
            id[a * r + a] = 1.0;
        }
        FibredPairBuilder {
            pair: Self {
                r,
                m_u,
                m_k,
                base_anchor: SmoothField::constant(r, id),
                base_bracket: SmoothField::zero(r, r * r * r),
                anchor_h: SmoothField::zero(m, r * m_u),
                anchor_v: SmoothField::zero(m, m_k * m_u),
                bracket_hh: SmoothField::zero(m, r * r * m_k),
                bracket_hv: SmoothField::zero(m, r * m_k * m_k),
                bracket_vv: SmoothField::zero(m, m_k * m_k * m_k),
                fd_step: DEFAULT_FD_STEP,
            },
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
    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn base_anchor_at(&self, x: &[f64]) -> Vec<f64> {
        self.base_anchor.eval(x)
    }
    pub fn base_bracket_at(&self, x: &[f64]) -> Vec<f64> {
        let mut c = self.base_bracket.eval(x);
        antisym_pairs(&mut c, self.r, self.r);
        c
    }
    pub fn anchor_horizontal_at(&self, m: &[f64]) -> Vec<f64> {
        self.anchor_h.eval(m)
    }
    pub fn anchor_vertical_at(&self, m: &[f64]) -> Vec<f64> {
        self.anchor_v.eval(m)
    }
    pub fn bracket_horizontal_at(&self, m: &[f64]) -> Vec<f64> {
        let mut c = self.bracket_hh.eval(m);
        antisym_pairs(&mut c, self.r, self.m_k);
        c
    }
    pub fn bracket_mixed_at(&self, m: &[f64]) -> Vec<f64> {
        self.bracket_hv.eval(m)
    }
    pub fn bracket_vertical_at(&self, m: &[f64]) -> Vec<f64> {
        let mut c = self.bracket_vv.eval(m);
        antisym_pairs(&mut c, self.m_k, self.m_k);
        c
    }

    /// True when `F` is `TN` in the coordinate basis at `x` (to `tol`).
    pub fn base_is_coordinate(&self, x: &[f64], tol: f64) -> bool {
        let rho = self.base_anchor_at(x);
        let c = self.base_bracket_at(x);
        let r = self.r;
        let id_ok = (0..r).all(|a| {
            (0..r).all(|i| (rho[a * r + i] - if a == i { 1.0 } else { 0.0 }).abs() <= tol)
        });
        id_ok && c.iter().all(|v| v.abs() <= tol)
    }

    /// The algebroid `E → M` in the basis `(e_a, e_α)` and coordinates
    /// `(x^i, u^A)`.
    pub fn full_algebroid(&self) -> LieAlgebroidModel {
        let (r, mu, mk) = (self.r, self.m_u, self.m_k);
        let n = r + mu;
        let k = r + mk;
        let h = self.fd_step;

        let pa = self.clone();
        let anchor = SmoothField::new(n, k * n, move |p| {
            let mut out = vec![0.0; k * n];
            let ra = pa.base_anchor_at(&p[..r]);
            let rh = pa.anchor_horizontal_at(p);
            let rv = pa.anchor_vertical_at(p);
            for a in 0..r {
                out[a * n..a * n + r].copy_from_slice(&ra[a * r..(a + 1) * r]);
                out[a * n + r..(a + 1) * n].copy_from_slice(&rh[a * mu..(a + 1) * mu]);
            }
            for al in 0..mk {
                let row = r + al;
                out[row * n + r..(row + 1) * n].copy_from_slice(&rv[al * mu..(al + 1) * mu]);
            }
            out
        });
        let pj = self.clone();
        let anchor = anchor.with_jacobian(move |p| {
            let mut out = vec![0.0; k * n * n];
            let ra = pj.base_anchor.jacobian(&p[..r], h); // [(a r + i) r + j]
            let rh = pj.anchor_h.jacobian(p, h); // [(a mu + A) n + j]
            let rv = pj.anchor_v.jacobian(p, h);
            for a in 0..r {
                for i in 0..r {
                    for j in 0..r {
                        out[(a * n + i) * n + j] = ra[(a * r + i) * r + j];
                    }
                }
                for big in 0..mu {
                    for j in 0..n {
                        out[(a * n + r + big) * n + j] = rh[(a * mu + big) * n + j];
                    }
                }
            }
            for al in 0..mk {
                for big in 0..mu {
                    for j in 0..n {
                        out[((r + al) * n + r + big) * n + j] = rv[(al * mu + big) * n + j];
                    }
                }
            }
            out
        });

        // assemble C and its jacobian with one routine: `tail` = 1 for values
        // and n for derivatives
        fn assemble(
            r: usize,
            mk: usize,
            tail: usize,
            base: &[f64],
            hh: &[f64],
            hv: &[f64],
            vv: &[f64],
        ) -> Vec<f64> {
            let k = r + mk;
            let mut out = vec![0.0; k * k * k * tail];
            let at = |a: usize, b: usize, g: usize| ((a * k + b) * k + g) * tail;
            for a in 0..r {
                for b in 0..r {
                    for c in 0..r {
                        let src = ((a * r + b) * r + c) * tail;
                        out[at(a, b, c)..at(a, b, c) + tail]
                            .copy_from_slice(&base[src..src + tail]);
                    }
                    for g in 0..mk {
                        let src = ((a * r + b) * mk + g) * tail;
                        out[at(a, b, r + g)..at(a, b, r + g) + tail]
                            .copy_from_slice(&hh[src..src + tail]);
                    }
                }
                for be in 0..mk {
                    for g in 0..mk {
                        let src = ((a * mk + be) * mk + g) * tail;
                        for t in 0..tail {
                            out[at(a, r + be, r + g) + t] = hv[src + t];
                            out[at(r + be, a, r + g) + t] = -hv[src + t];
                        }
                    }
                }
            }
            for al in 0..mk {
                for be in 0..mk {
                    for g in 0..mk {
                        let src = ((al * mk + be) * mk + g) * tail;
                        out[at(r + al, r + be, r + g)..at(r + al, r + be, r + g) + tail]
                            .copy_from_slice(&vv[src..src + tail]);
                    }
                }
            }
            out
        }

        let pb = self.clone();
        let bracket = SmoothField::new(n, k * k * k, move |p| {
            assemble(
                r,
                mk,
                1,
                &pb.base_bracket_at(&p[..r]),
                &pb.bracket_horizontal_at(p),
                &pb.bracket_mixed_at(p),
                &pb.bracket_vertical_at(p),
            )
        });
        let pc = self.clone();
        let bracket = bracket.with_jacobian(move |p| {
            // extend base bracket derivatives (x only) to n columns
            let bj = pc.base_bracket.jacobian(&p[..r], h);
            let mut base = vec![0.0; r * r * r * n];
            for q in 0..r * r * r {
                base[q * n..q * n + r].copy_from_slice(&bj[q * r..(q + 1) * r]);
            }
            assemble(
                r,
                mk,
                n,
                &base,
                &pc.bracket_hh.jacobian(p, h),
                &pc.bracket_hv.jacobian(p, h),
                &pc.bracket_vv.jacobian(p, h),
            )
        });
        LieAlgebroidModel::new(n, k, anchor, bracket)
            .expect("assembled dimensions are consistent")
            .with_fd_step(h)
    }

    fn check_jet(&self, p: &JetPoint) -> Result<()> {
        check_len("jet x", self.r, p.x.len())?;
        check_len("jet u", self.m_u, p.u.len())?;
        check_len("jet y", self.m_k * self.r, p.y.len())
    }
}

/// A point `(x^i, u^A, y_a^α)` of the jet bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct JetPoint {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    /// `y_a^α` at `[α * r + a]`.
    pub y: Vec<f64>,
}

impl JetPoint {
    pub fn new(x: Vec<f64>, u: Vec<f64>, y: Vec<f64>) -> Self {
        Self { x, u, y }
    }

    pub fn r(&self) -> usize {
        self.x.len()
    }

    pub fn y_at(&self, alpha: usize, a: usize) -> f64 {
        self.y[alpha * self.x.len() + a]
    }

    /// The point `(x, u)` of `M`.
    pub fn base_point(&self) -> Vec<f64> {
        let mut m = self.x.clone();
        m.extend_from_slice(&self.u);
        m
    }

    pub fn is_finite(&self) -> bool {
        self.x
            .iter()
            .chain(&self.u)
            .chain(&self.y)
            .all(|v| v.is_finite())
    }
}

/// A section `θ = (θ_b^a e^b + θ_α^a e^α) ⊗ ē_a` of `L*π`, with coefficients
/// on `M`:
///
/// * `horizontal`: `θ_b^a` at `[b * r + a]` (`r·r` outputs);
/// * `vertical`: `θ_α^a` at `[α * r + a]` (`m_k·r` outputs).
#[derive(Clone, Debug)]
pub struct AffineDualSection {
    pub horizontal: SmoothField,
    pub vertical: SmoothField,
}

/// `θ̂(p) = θ_a^a + θ_α^a y_a^α`, i.e. `tr(θ ∘ φ)`.
pub fn affine_eval(theta: &AffineDualSection, p: &JetPoint) -> f64 {
    let r = p.r();
    let m = p.base_point();
    let th = theta.horizontal.eval(&m);
    let tv = theta.vertical.eval(&m);
    let trace: f64 = (0..r).map(|a| th[a * r + a]).sum();
    trace + tv.iter().zip(&p.y).map(|(t, y)| t * y).sum::<f64>()
}

/// Total derivatives `f_{|a}` of every component of `f: M → ℝ^q`, layout
/// `[o * r + a]`:
///
/// `f_{|a} = ρ_a^i ∂_i f + (ρ_a^A + ρ_α^A y_a^α) ∂_A f`.
pub fn total_derivatives(
    pair: &FibredAlgebroidPair,
    f: &SmoothField,
    p: &JetPoint,
) -> Result<Vec<f64>> {
    pair.check_jet(p)?;
    let (r, mu, mk) = (pair.r, pair.m_u, pair.m_k);
    let n = r + mu;
    check_len("function domain", n, f.in_dim())?;
    let m = p.base_point();
    let jac = f.jacobian(&m, pair.fd_step);
    let ra = pair.base_anchor_at(&p.x);
    let rh = pair.anchor_horizontal_at(&m);
    let rv = pair.anchor_vertical_at(&m);
    let q = f.out_dim();
    let mut out = vec![0.0; q * r];
    for a in 0..r {
        let mut dir = vec![0.0; n];
        for i in 0..r {
            dir[i] = ra[a * r + i];
        }
        for big in 0..mu {
            let mut v = rh[a * mu + big];
            for al in 0..mk {
                v += rv[al * mu + big] * p.y[al * r + a];
            }
            dir[r + big] = v;
        }
        for o in 0..q {
            out[o * r + a] = (0..n).map(|j| jac[o * n + j] * dir[j]).sum();
        }
    }
    Ok(out)
}

/// `f_{|a}` for a scalar function.
pub fn total_derivative(
    pair: &FibredAlgebroidPair,
    f: &SmoothField,
    p: &JetPoint,
    a: usize,
) -> Result<f64> {
    check_len("scalar function", 1, f.out_dim())?;
    if a >= pair.r {
        return Err(Error::DimensionMismatch {
            what: "base index",
            expected: pair.r,
            got: a,
        });
    }
    Ok(total_derivatives(pair, f, p)?[a])
}

/// The affine structure functions at a jet point.
#[derive(Debug, Clone, PartialEq)]
pub struct ZFunctions {
    /// `Z_{aγ}^α = C_{aγ}^α + C_{βγ}^α y_a^β`, layout `[(a * m_k + γ) * m_k + α]`.
    pub mixed: Vec<f64>,
    /// `Z_{ac}^α = C_{ac}^α + C_{βc}^α y_a^β`, layout `[(a * r + c) * m_k + α]`.
    pub horizontal: Vec<f64>,
}

pub fn z_functions(pair: &FibredAlgebroidPair, p: &JetPoint) -> Result<ZFunctions> {
    pair.check_jet(p)?;
    let (r, mk) = (pair.r, pair.m_k);
    let m = p.base_point();
    let chh = pair.bracket_horizontal_at(&m);
    let chv = pair.bracket_mixed_at(&m);
    let cvv = pair.bracket_vertical_at(&m);
    let mut mixed = vec![0.0; r * mk * mk];
    let mut horizontal = vec![0.0; r * r * mk];
    for a in 0..r {
        for g in 0..mk {
            for al in 0..mk {
                let mut v = chv[(a * mk + g) * mk + al];
                for be in 0..mk {
                    v += cvv[(be * mk + g) * mk + al] * p.y[be * r + a];
                }
                mixed[(a * mk + g) * mk + al] = v;
            }
        }
        for c in 0..r {
            for al in 0..mk {
                let mut v = chh[(a * r + c) * mk + al];
                for be in 0..mk {
                    // C_{βc}^α = −C_{cβ}^α
                    v -= chv[(c * mk + be) * mk + al] * p.y[be * r + a];
                }
                horizontal[(a * r + c) * mk + al] = v;
            }
        }
    }
    Ok(ZFunctions { mixed, horizontal })
}

/// A projectable section `σ = σ^a(x) e_a + σ^α(x, u) e_α`. `base = None`
/// means `π`-vertical.
#[derive(Clone, Debug)]
pub struct ProjectableSection {
    /// `σ^a(x)`, `r → r`.
    pub base: Option<SmoothField>,
    /// `σ^α(x, u)`, `r + m_u → m_k`.
    pub vertical: SmoothField,
}

impl ProjectableSection {
    pub fn vertical(f: SmoothField) -> Self {
        Self {
            base: None,
            vertical: f,
        }
    }

    pub fn projectable(base: SmoothField, vertical: SmoothField) -> Self {
        Self {
            base: Some(base),
            vertical,
        }
    }

    /// Rejects a section whose base part is nonzero at `x`.
    pub fn ensure_vertical_at(&self, x: &[f64]) -> Result<()> {
        if let Some(b) = &self.base {
            for (component, value) in b.eval(x).into_iter().enumerate() {
                if value != 0.0 {
                    return Err(Error::NotVertical { component, value });
                }
            }
        }
        Ok(())
    }

    /// The same section as a section of the assembled `E → M`.
    pub fn as_section_of_e(&self, pair: &FibredAlgebroidPair) -> SectionOfE {
        let (r, mu) = (pair.r, pair.m_u);
        let base = self.base.clone().map(|b| b.extend_domain(r + mu));
        let vert = self.vertical.clone();
        let k = r + pair.m_k;
        let n = r + mu;
        let (b1, v1) = (base.clone(), vert.clone());
        let field = SmoothField::new(n, k, move |m| {
            let mut out = match &b1 {
                Some(b) => b.eval(m),
                None => vec![0.0; r],
            };
            out.extend(v1.eval(m));
            out
        })
        .with_jacobian(move |m| {
            let mut out = match &base {
                Some(b) => b.jacobian(m, DEFAULT_FD_STEP),
                None => vec![0.0; r * n],
            };
            out.extend(vert.jacobian(m, DEFAULT_FD_STEP));
            out
        });
        SectionOfE::new(field)
    }
}

/// Components of a tangent vector to the jet bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct JetTangent {
    pub dx: Vec<f64>,
    pub du: Vec<f64>,
    /// layout `[α * r + a]`
    pub dy: Vec<f64>,
}

/// The complete lift `X_σ^{(1)}` of a projectable section at `p`:
///
/// * `dx^i = ρ_a^i σ^a`,
/// * `du^A = ρ_a^A σ^a + ρ_α^A σ^α`,
/// * `dy_a^α = σ^α_{|a} + Z_{ab}^α σ^b + Z_{aβ}^α σ^β − y_b^α (σ́^b_{|a} + σ^c C_{ac}^b)`,
///
/// where `σ́^b_{|a} = ρ_a^i ∂_i σ^b`.
pub fn complete_lift(
    pair: &FibredAlgebroidPair,
    sigma: &ProjectableSection,
    p: &JetPoint,
) -> Result<JetTangent> {
    pair.check_jet(p)?;
    let (r, mu, mk) = (pair.r, pair.m_u, pair.m_k);
    check_len("vertical section domain", r + mu, sigma.vertical.in_dim())?;
    check_len("vertical section rank", mk, sigma.vertical.out_dim())?;
    let m = p.base_point();
    let ra = pair.base_anchor_at(&p.x);
    let cb = pair.base_bracket_at(&p.x);
    let rh = pair.anchor_horizontal_at(&m);
    let rv = pair.anchor_vertical_at(&m);
    let z = z_functions(pair, p)?;

    let sv = sigma.vertical.eval(&m);
    let sv_total = total_derivatives(pair, &sigma.vertical, p)?; // [α r + a]
    let (sb, sb_prime) = match &sigma.base {
        Some(b) => {
            check_len("base section", r, b.out_dim())?;
            let v = b.eval(&p.x);
            let jac = b.jacobian(&p.x, pair.fd_step); // [b r + i]
            let mut prime = vec![0.0; r * r]; // [b r + a] = ρ_a^i ∂_i σ^b
            for bb in 0..r {
                for a in 0..r {
                    prime[bb * r + a] = (0..r).map(|i| ra[a * r + i] * jac[bb * r + i]).sum();
                }
            }
            (v, prime)
        }
        None => (vec![0.0; r], vec![0.0; r * r]),
    };

    let dx: Vec<f64> = (0..r)
        .map(|i| (0..r).map(|a| ra[a * r + i] * sb[a]).sum())
        .collect();
    let du: Vec<f64> = (0..mu)
        .map(|big| {
            (0..r).map(|a| rh[a * mu + big] * sb[a]).sum::<f64>()
                + (0..mk).map(|al| rv[al * mu + big] * sv[al]).sum::<f64>()
        })
        .collect();
    let mut dy = vec![0.0; mk * r];
    for al in 0..mk {
        for a in 0..r {
            let mut v = sv_total[al * r + a];
            for bb in 0..r {
                v += z.horizontal[(a * r + bb) * mk + al] * sb[bb];
            }
            for be in 0..mk {
                v += z.mixed[(a * mk + be) * mk + al] * sv[be];
            }
            for bb in 0..r {
                let mut w = sb_prime[bb * r + a];
                for c in 0..r {
                    w += sb[c] * cb[(a * r + c) * r + bb];
                }
                v -= p.y[al * r + bb] * w;
            }
            dy[al * r + a] = v;
        }
    }
    Ok(JetTangent { dx, du, dy })
}

/// Coefficients of an element of `L*π` at one point of `M`, in the layouts of
/// [`AffineDualSection`].
#[derive(Debug, Clone, PartialEq)]
pub struct AffineDualValue {
    pub horizontal: Vec<f64>,
    pub vertical: Vec<f64>,
}

impl AffineDualValue {
    pub fn eval(&self, p: &JetPoint) -> f64 {
        let r = p.r();
        let trace: f64 = (0..r).map(|a| self.horizontal[a * r + a]).sum();
        trace
            + self
                .vertical
                .iter()
                .zip(&p.y)
                .map(|(t, y)| t * y)
                .sum::<f64>()
    }
}

/// `d_σθ` for a projectable `σ` at the point `(x, u)`, by the tensor rule
/// `d_σθ = π ∘ d_σP` with `P` the lift of `θ` to `E* ⊗ E`:
///
/// `d_σθ = Σ_c d_σ(θ^c) ⊗ ē_c + θ^c ⊗ [η, ē_c]`,
///
/// where `θ^c` are the component 1-forms on `E` and `η = π(σ)`. The Lie
/// derivatives of the 1-forms come from the assembled algebroid.
pub fn affine_lie_derivative(
    pair: &FibredAlgebroidPair,
    sigma: &ProjectableSection,
    theta: &AffineDualSection,
    base_point: &[f64],
) -> Result<AffineDualValue> {
    let (r, mu, mk) = (pair.r, pair.m_u, pair.m_k);
    let n = r + mu;
    let k = r + mk;
    check_len("base point", n, base_point.len())?;
    let full = pair.full_algebroid();
    let s = sigma.as_section_of_e(pair);

    let mut horizontal = vec![0.0; r * r];
    let mut vertical = vec![0.0; mk * r];
    for c in 0..r {
        let (th, tv) = (theta.horizontal.clone(), theta.vertical.clone());
        let form = PFormOnE::new(
            k,
            1,
            SmoothField::new(n, k, move |m| {
                let h = th.eval(m);
                let v = tv.eval(m);
                let mut out: Vec<f64> = (0..r).map(|b| h[b * r + c]).collect();
                out.extend((0..mk).map(|al| v[al * r + c]));
                out
            }),
        )?;
        let d = lie_derivative(&full, &s, &form, base_point)?;
        for b in 0..r {
            horizontal[b * r + c] += d[b];
        }
        for al in 0..mk {
            vertical[al * r + c] += d[r + al];
        }
    }

    if let Some(base) = &sigma.base {
        // θ^c ⊗ [η, ē_c], with [η, ē_c] = −(ρ_c^i ∂_i σ^b + σ^d C_{cd}^b) ē_b
        let x = &base_point[..r];
        let ra = pair.base_anchor_at(x);
        let cb = pair.base_bracket_at(x);
        let sb = base.eval(x);
        let jac = base.jacobian(x, pair.fd_step);
        let th = theta.horizontal.eval(base_point);
        let tv = theta.vertical.eval(base_point);
        for c in 0..r {
            for b in 0..r {
                let mut coef = 0.0;
                for i in 0..r {
                    coef += ra[c * r + i] * jac[b * r + i];
                }
                for d in 0..r {
                    coef += sb[d] * cb[(c * r + d) * r + b];
                }
                let coef = -coef;
                for bb in 0..r {
                    horizontal[bb * r + b] += th[bb * r + c] * coef;
                }
                for al in 0..mk {
                    vertical[al * r + b] += tv[al * r + c] * coef;
                }
            }
        }
    }
    Ok(AffineDualValue {
        horizontal,
        vertical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abelian_pair(r: usize, m: usize) -> FibredAlgebroidPair {
        let mut id = vec![0.0; m * m];
        for i in 0..m {
            id[i * m + i] = 1.0;
        }
        FibredAlgebroidPair::builder(r, m, m)
            .anchor_vertical(SmoothField::constant(r + m, id))
            .build()
            .unwrap()
    }

    #[test]
    fn builder_checks_shapes() {
        let err = FibredAlgebroidPair::builder(2, 1, 1)
            .anchor_vertical(SmoothField::zero(3, 2))
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn affine_eval_of_coordinate_and_trace() {
        let (r, mk) = (2, 3);
        let mut tv = vec![0.0; mk * r];
        tv[2 * r + 1] = 1.0;
        let theta = AffineDualSection {
            horizontal: SmoothField::zero(r, r * r),
            vertical: SmoothField::constant(r, tv),
        };
        let y: Vec<f64> = (0..mk * r).map(|i| i as f64 + 0.5).collect();
        let p = JetPoint::new(vec![0.1, 0.2], vec![], y.clone());
        assert_eq!(affine_eval(&theta, &p), y[2 * r + 1]);

        let theta = AffineDualSection {
            horizontal: SmoothField::constant(r, vec![1.0, 0.0, 0.0, 1.0]),
            vertical: SmoothField::zero(r, mk * r),
        };
        assert_eq!(affine_eval(&theta, &p), 2.0);
    }

    #[test]
    fn total_derivative_of_fibre_coordinate() {
        let pair = FibredAlgebroidPair::builder(2, 1, 2)
            .anchor_horizontal(SmoothField::constant(3, vec![0.5, -1.0]))
            .anchor_vertical(SmoothField::constant(3, vec![2.0, 3.0]))
            .build()
            .unwrap();
        let u = SmoothField::new(3, 1, |m| vec![m[2]]);
        let p = JetPoint::new(vec![0.0, 0.0], vec![1.0], vec![1.0, 2.0, 3.0, 4.0]);
        // a = 0: 0.5 + 2·y_0^0 + 3·y_0^1 = 0.5 + 2 + 9
        assert!((total_derivative(&pair, &u, &p, 0).unwrap() - 11.5).abs() < 1e-9);
        // a = 1: -1 + 2·2 + 3·4
        assert!((total_derivative(&pair, &u, &p, 1).unwrap() - 15.0).abs() < 1e-9);
    }

    #[test]
    fn z_functions_at_zero_jet_are_bracket_coefficients() {
        let (r, mk) = (2, 2);
        let hh: Vec<f64> = (0..r * r * mk).map(|i| i as f64).collect();
        let hv: Vec<f64> = (0..r * mk * mk).map(|i| 0.5 * i as f64 - 1.0).collect();
        let pair = FibredAlgebroidPair::builder(r, 0, mk)
            .bracket_horizontal(SmoothField::constant(r, hh))
            .bracket_mixed(SmoothField::constant(r, hv.clone()))
            .bracket_vertical(SmoothField::constant(r, vec![1.0; mk * mk * mk]))
            .build()
            .unwrap();
        let p = JetPoint::new(vec![0.0; r], vec![], vec![0.0; mk * r]);
        let z = z_functions(&pair, &p).unwrap();
        assert_eq!(z.mixed, hv);
        assert_eq!(z.horizontal, pair.bracket_horizontal_at(&[0.0, 0.0]));
    }

    #[test]
    fn complete_lift_of_zero_section_is_zero() {
        let pair = abelian_pair(2, 2);
        let sigma = ProjectableSection::vertical(SmoothField::zero(4, 2));
        let p = JetPoint::new(vec![0.3, 0.1], vec![1.0, 2.0], vec![0.5; 4]);
        let t = complete_lift(&pair, &sigma, &p).unwrap();
        assert!(t.dx.iter().chain(&t.du).chain(&t.dy).all(|v| *v == 0.0));
    }

    #[test]
    fn complete_lift_of_constant_vertical_on_abelian_kernel() {
        let pair = abelian_pair(2, 2);
        let sigma = ProjectableSection::vertical(SmoothField::constant(4, vec![0.7, -0.2]));
        let p = JetPoint::new(vec![0.3, 0.1], vec![1.0, 2.0], vec![0.5; 4]);
        let t = complete_lift(&pair, &sigma, &p).unwrap();
        assert_eq!(t.du, vec![0.7, -0.2]);
        assert!(t.dy.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn non_vertical_section_detected() {
        let s = ProjectableSection::projectable(
            SmoothField::constant(1, vec![0.5]),
            SmoothField::zero(1, 1),
        );
        assert!(matches!(
            s.ensure_vertical_at(&[0.0]),
            Err(Error::NotVertical { component: 0, .. })
        ));
    }
}
