//! Time-dependent mechanics: the `r = 1` case with `x⁰ = t` and `y^α = y_0^α`.
//!
//! The Euler-Lagrange system is
//!
//! * `du^A/dt = ρ_0^A + ρ_α^A y^α`,
//! * `d/dt(∂L/∂y^α) = ∂L/∂y^γ (C_{0α}^γ + C_{βα}^γ y^β) + ∂L/∂u^A ρ_α^A`,
//!
//! integrated with classical RK4 after solving the second line for `ẏ`
//! through the Hessian `∂²L/∂y∂y`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::check_len;
use crate::fields::{Boundary, DiscretizedSection, GridSpec};
use crate::jet::{FibredAlgebroidPair, JetPoint, ProjectableSection};
use crate::linalg::{condition_number, Lu};
use crate::variational::Lagrangian;
use crate::{Error, Result, SmoothField};

use super::levi_civita;

/// Largest Hessian condition number accepted by [`integrate_mechanics`].
pub const MAX_HESSIAN_CONDITION: f64 = 1e12;

/// The pair for mechanics on `M = ℝ × U` with `F = Tℝ`.
///
/// * `constants`: `C_{αβ}^γ`, `m_k³` entries;
/// * `rho0`: `ρ_0^A(t, u)`, `1 + m_u → m_u`;
/// * `rho`: `ρ_α^A(t, u)`, `1 + m_u → m_k · m_u`, layout `[α * m_u + A]`;
/// * `c0`: `C_{0β}^γ(t, u)`, `1 + m_u → m_k²`, layout `[β * m_k + γ]`.
pub fn builder_time_dependent(
    constants: Vec<f64>,
    rho0: SmoothField,
    rho: SmoothField,
    c0: SmoothField,
) -> Result<FibredAlgebroidPair> {
    let m_u = rho0.out_dim();
    let n = 1 + m_u;
    let mk = c0.out_dim();
    let m_k = (0..=mk)
        .find(|k| k * k == mk)
        .ok_or(Error::DimensionMismatch {
            what: "C_0 coefficients (square)",
            expected: 0,
            got: mk,
        })?;
    check_len("structure constants", m_k * m_k * m_k, constants.len())?;
    check_len("rho0 domain", n, rho0.in_dim())?;
    check_len("rho domain", n, rho.in_dim())?;
    check_len("C_0 domain", n, c0.in_dim())?;
    FibredAlgebroidPair::builder(1, m_u, m_k)
        .anchor_horizontal(rho0)
        .anchor_vertical(rho)
        .bracket_mixed(c0)
        .bracket_vertical(SmoothField::constant(n, constants))
        .build()
}

/// `so(3)` over time, no `u`.
pub fn rigid_body_pair() -> FibredAlgebroidPair {
    builder_time_dependent(
        levi_civita(),
        SmoothField::zero(1, 0),
        SmoothField::zero(1, 0),
        SmoothField::zero(1, 9),
    )
    .expect("consistent dimensions")
}

/// `so(3)` acting on `u ∈ ℝ³` by `ρ_α^A = ε_{αAB} u^B`, so that
/// `du/dt = u × y`: `u` is a body-frame vector that is fixed in space.
pub fn heavy_top_pair() -> FibredAlgebroidPair {
    let eps = levi_civita();
    let e1 = eps.clone();
    let rho = SmoothField::new(4, 9, move |m| {
        let mut out = vec![0.0; 9];
        for a in 0..3 {
            for big in 0..3 {
                for b in 0..3 {
                    out[a * 3 + big] += e1[(a * 3 + big) * 3 + b] * m[1 + b];
                }
            }
        }
        out
    })
    .with_jacobian(move |_| {
        let mut out = vec![0.0; 36];
        for a in 0..3 {
            for big in 0..3 {
                for b in 0..3 {
                    out[(a * 3 + big) * 4 + 1 + b] = eps[(a * 3 + big) * 3 + b];
                }
            }
        }
        out
    });
    builder_time_dependent(
        levi_civita(),
        SmoothField::zero(4, 3),
        rho,
        SmoothField::zero(4, 9),
    )
    .expect("consistent dimensions")
}

/// Abelian kernel of rank `n` translating `u ∈ ℝⁿ`.
pub fn free_particle_pair(n: usize) -> FibredAlgebroidPair {
    let mut id = vec![0.0; n * n];
    for a in 0..n {
        id[a * n + a] = 1.0;
    }
    builder_time_dependent(
        vec![0.0; n * n * n],
        SmoothField::zero(1 + n, n),
        SmoothField::constant(1 + n, id),
        SmoothField::zero(1 + n, n * n),
    )
    .expect("consistent dimensions")
}

#[derive(Debug, Clone, PartialEq)]
pub struct MechanicsState {
    pub t: f64,
    pub u: Vec<f64>,
    pub y: Vec<f64>,
}

impl MechanicsState {
    pub fn new(t: f64, u: Vec<f64>, y: Vec<f64>) -> Self {
        Self { t, u, y }
    }

    pub fn jet_point(&self) -> JetPoint {
        JetPoint::new(vec![self.t], self.u.clone(), self.y.clone())
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.u.iter().chain(&self.y).all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub states: Vec<MechanicsState>,
    /// `max_α |δL_α|` at each state, with `d/dt` taken by fourth-order
    /// differences of the momentum along the trajectory.
    pub el_residual: Vec<f64>,
}

impl Trajectory {
    pub fn max_el_residual(&self) -> f64 {
        self.el_residual.iter().cloned().fold(0.0, f64::max)
    }

    /// The trajectory as a section over a one-sided time grid.
    pub fn to_section(&self) -> Result<DiscretizedSection> {
        let n = self.states.len();
        let first = &self.states[0];
        let grid = GridSpec::new(vec![n], vec![self.dt], vec![first.t], Boundary::OneSided)?;
        let m_u = first.u.len();
        let m_k = first.y.len();
        let mut u = Vec::with_capacity(n * m_u);
        let mut y = Vec::with_capacity(n * m_k);
        for s in &self.states {
            u.extend_from_slice(&s.u);
            y.extend_from_slice(&s.y);
        }
        DiscretizedSection::new(grid, m_u, m_k, u, y)
    }

    /// `L` along the trajectory.
    pub fn values<F: Fn(&MechanicsState) -> f64>(&self, f: F) -> Vec<f64> {
        self.states.iter().map(f).collect()
    }
}

/// Energy `∂L/∂y^α y^α − L`.
pub fn energy(l: &Lagrangian, s: &MechanicsState) -> f64 {
    let p = s.jet_point();
    l.partial_y(&p)
        .iter()
        .zip(&s.y)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        - l.eval(&p)
}

/// `J = σ^α ∂L/∂y^α` for a vertical `σ`.
pub fn noether_charge(
    l: &Lagrangian,
    sigma: &ProjectableSection,
    s: &MechanicsState,
) -> Result<f64> {
    sigma.ensure_vertical_at(&[s.t])?;
    let p = s.jet_point();
    let sv = sigma.vertical.eval(&p.base_point());
    Ok(l.partial_y(&p).iter().zip(&sv).map(|(a, b)| a * b).sum())
}

struct Coefficients {
    /// `ρ_0^A + ρ_α^A y^α`
    udot: Vec<f64>,
    /// `∂L/∂y^γ Z_{0α}^γ + ∂L/∂u^A ρ_α^A`
    force: Vec<f64>,
}

fn coefficients(pair: &FibredAlgebroidPair, l: &Lagrangian, p: &JetPoint) -> Coefficients {
    let (mu, mk) = (pair.m_u(), pair.m_k());
    let m = p.base_point();
    let rh = pair.anchor_horizontal_at(&m);
    let rv = pair.anchor_vertical_at(&m);
    let c0 = pair.bracket_mixed_at(&m);
    let cv = pair.bracket_vertical_at(&m);
    let py = l.partial_y(p);
    let pu = l.partial_u(p);
    let udot = (0..mu)
        .map(|big| rh[big] + (0..mk).map(|al| rv[al * mu + big] * p.y[al]).sum::<f64>())
        .collect();
    let force = (0..mk)
        .map(|al| {
            let mut v = 0.0;
            for g in 0..mk {
                let mut z = c0[al * mk + g];
                for be in 0..mk {
                    z += cv[(be * mk + al) * mk + g] * p.y[be];
                }
                v += py[g] * z;
            }
            v + (0..mu).map(|big| pu[big] * rv[al * mu + big]).sum::<f64>()
        })
        .collect();
    Coefficients { udot, force }
}

fn vector_field(
    pair: &FibredAlgebroidPair,
    l: &Lagrangian,
    t: f64,
    state: &[f64],
) -> Result<Vec<f64>> {
    let (mu, mk) = (pair.m_u(), pair.m_k());
    let p = JetPoint::new(vec![t], state[..mu].to_vec(), state[mu..].to_vec());
    let c = coefficients(pair, l, &p);
    let w = l.hessian_yy(&p);
    let cond = condition_number(&w, mk).unwrap_or(f64::INFINITY);
    if !(cond <= MAX_HESSIAN_CONDITION) {
        return Err(Error::SingularHessian { condition: cond });
    }
    let hyu = l.hessian_yu(&p);
    let hyt = l.hessian_yx(&p);
    let rhs: Vec<f64> = (0..mk)
        .map(|al| {
            c.force[al]
                - (0..mu)
                    .map(|big| hyu[al * mu + big] * c.udot[big])
                    .sum::<f64>()
                - hyt[al]
        })
        .collect();
    let ydot = Lu::new(&w, mk)
        .map_err(|_| Error::SingularHessian { condition: cond })?
        .solve(&rhs);
    let mut out = c.udot;
    out.extend(ydot);
    Ok(out)
}

/// Integrates the Euler-Lagrange system from `s0` to `t_end` with RK4.
///
/// The step count is `round((t_end − t₀)/dt)` and the step is adjusted to
/// land exactly on `t_end`.
pub fn integrate_mechanics(
    pair: &FibredAlgebroidPair,
    l: &Lagrangian,
    s0: &MechanicsState,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    if pair.r() != 1 {
        return Err(Error::DimensionMismatch {
            what: "mechanics base dimension",
            expected: 1,
            got: pair.r(),
        });
    }
    l.check_pair(pair)?;
    check_len("initial u", pair.m_u(), s0.u.len())?;
    check_len("initial y", pair.m_k(), s0.y.len())?;
    if !(dt > 0.0) || !dt.is_finite() || !(t_end > s0.t) {
        return Err(Error::InvalidParameter("need dt > 0 and t_end > t0"));
    }
    if !pair.base_is_coordinate(&[s0.t], 0.0) {
        return Err(Error::NonCoordinateBase);
    }
    let steps = libm::round((t_end - s0.t) / dt) as usize;
    if steps == 0 {
        return Err(Error::ZeroSteps);
    }
    let h = (t_end - s0.t) / steps as f64;
    let mu = pair.m_u();
    let mut state: Vec<f64> = s0.u.iter().chain(&s0.y).cloned().collect();
    let mut states = Vec::with_capacity(steps + 1);
    states.push(s0.clone());
    let len = state.len();
    let mut tmp = vec![0.0; len];
    for step in 0..steps {
        let t = s0.t + step as f64 * h;
        let k1 = vector_field(pair, l, t, &state)?;
        for i in 0..len {
            tmp[i] = state[i] + 0.5 * h * k1[i];
        }
        let k2 = vector_field(pair, l, t + 0.5 * h, &tmp)?;
        for i in 0..len {
            tmp[i] = state[i] + 0.5 * h * k2[i];
        }
        let k3 = vector_field(pair, l, t + 0.5 * h, &tmp)?;
        for i in 0..len {
            tmp[i] = state[i] + h * k3[i];
        }
        let k4 = vector_field(pair, l, t + h, &tmp)?;
        for i in 0..len {
            state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if state.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step });
        }
        states.push(MechanicsState::new(
            s0.t + (step + 1) as f64 * h,
            state[..mu].to_vec(),
            state[mu..].to_vec(),
        ));
    }
    let el_residual = trajectory_el_residual(pair, l, &states, h);
    Ok(Trajectory {
        dt: h,
        states,
        el_residual,
    })
}

/// Fourth-order first derivative of a sampled sequence at index `i`.
fn derivative4(f: &[Vec<f64>], i: usize, h: f64) -> Vec<f64> {
    let n = f.len();
    let w = f[0].len();
    let comb = |idx: [usize; 5], c: [f64; 5], den: f64| -> Vec<f64> {
        (0..w)
            .map(|k| idx.iter().zip(&c).map(|(&j, c)| c * f[j][k]).sum::<f64>() / (den * h))
            .collect()
    };
    if i >= 2 && i + 2 < n {
        comb(
            [i - 2, i - 1, i, i + 1, i + 2],
            [1.0, -8.0, 0.0, 8.0, -1.0],
            12.0,
        )
    } else if i < 2 {
        let s = i; // 0 or 1
        if s == 0 {
            comb([0, 1, 2, 3, 4], [-25.0, 48.0, -36.0, 16.0, -3.0], 12.0)
        } else {
            comb([0, 1, 2, 3, 4], [-3.0, -10.0, 18.0, -6.0, 1.0], 12.0)
        }
    } else if i == n - 1 {
        comb(
            [n - 1, n - 2, n - 3, n - 4, n - 5],
            [25.0, -48.0, 36.0, -16.0, 3.0],
            12.0,
        )
    } else {
        comb(
            [n - 1, n - 2, n - 3, n - 4, n - 5],
            [3.0, 10.0, -18.0, 6.0, -1.0],
            12.0,
        )
    }
}

fn trajectory_el_residual(
    pair: &FibredAlgebroidPair,
    l: &Lagrangian,
    states: &[MechanicsState],
    h: f64,
) -> Vec<f64> {
    if states.len() < 5 {
        return Vec::new();
    }
    let momenta: Vec<Vec<f64>> = states.iter().map(|s| l.partial_y(&s.jet_point())).collect();
    states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let dp = derivative4(&momenta, i, h);
            let c = coefficients(pair, l, &s.jet_point());
            dp.iter()
                .zip(&c.force)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .collect()
}
