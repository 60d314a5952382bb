use liefield_core::scenarios::{
    energy, free_particle_pair, heavy_top_pair, integrate_mechanics, noether_charge,
    rigid_body_pair, MechanicsState, Trajectory,
};
use liefield_core::{Lagrangian, ProjectableSection, SmoothField};
use serde::Deserialize;

use super::{max_abs, require, rms, structure, wants};
use crate::config::Config;
use crate::error::Result;
use crate::report::{ConvergenceTable, Measurement, RunOutput, Table};

fn default_samples() -> usize {
    100
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidBodyParams {
    pub inertia: [f64; 3],
    pub y0: [f64; 3],
    pub t_end: f64,
    pub dt: f64,
    #[serde(default = "default_ratio_dt")]
    pub ratio_dt: [f64; 2],
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_ratio_dt() -> [f64; 2] {
    [0.0125, 0.00625]
}

fn check_times(t_end: f64, dt: f64) -> Result<()> {
    require(
        t_end > 0.0 && t_end.is_finite(),
        "params.t_end must be positive",
    )?;
    require(dt > 0.0 && dt <= t_end, "params.dt must be in (0, t_end]")
}

pub fn validate_rigid_body(cfg: &Config) -> Result<()> {
    let p: RigidBodyParams = cfg.params()?;
    check_times(p.t_end, p.dt)?;
    require(
        p.inertia.iter().all(|i| *i > 0.0),
        "params.inertia must be positive",
    )?;
    require(
        p.ratio_dt.iter().all(|d| *d > 0.0),
        "params.ratio_dt must be positive",
    )
}

/// Max and RMS of `|q(s) − q(s₀)| / |q(s₀)|` (absolute when `q(s₀) = 0`).
fn drift<F: Fn(&MechanicsState) -> f64>(tr: &Trajectory, q: F, relative: bool) -> (f64, f64) {
    let v = tr.values(q);
    let scale = if relative && v[0] != 0.0 {
        v[0].abs()
    } else {
        1.0
    };
    let d: Vec<f64> = v.iter().map(|x| (x - v[0]).abs() / scale).collect();
    (max_abs(&d), rms(&d))
}

fn trajectory_table(tr: &Trajectory, extra: &[(&str, Vec<f64>)]) -> Table {
    let s0 = &tr.states[0];
    let mut header = vec!["t".to_string()];
    header.extend((0..s0.u.len()).map(|a| format!("u{a}")));
    header.extend((0..s0.y.len()).map(|a| format!("y{a}")));
    header.extend(extra.iter().map(|(n, _)| n.to_string()));
    header.push("el_residual".to_string());
    let rows = tr
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut row = vec![s.t];
            row.extend_from_slice(&s.u);
            row.extend_from_slice(&s.y);
            row.extend(extra.iter().map(|(_, v)| v[i]));
            row.push(tr.el_residual[i]);
            row
        })
        .collect();
    Table { header, rows }
}

pub fn run_rigid_body(cfg: &Config) -> Result<RunOutput> {
    let p: RigidBodyParams = cfg.params()?;
    let pair = rigid_body_pair();
    let l = Lagrangian::rigid_body(p.inertia, 0);
    let s0 = MechanicsState::new(0.0, vec![], p.y0.to_vec());
    let inertia = p.inertia;
    let casimir =
        move |s: &MechanicsState| -> f64 { (0..3).map(|a| (inertia[a] * s.y[a]).powi(2)).sum() };
    let integrate = |dt: f64| integrate_mechanics(&pair, &l, &s0, p.t_end, dt);
    let tr = integrate(p.dt)?;
    let mut out = RunOutput::default();
    if wants(cfg, "structure") {
        out.measurements
            .insert("structure".into(), structure(cfg, &pair, p.samples)?);
    }
    let (e_max, e_rms) = drift(&tr, |s| energy(&l, s), true);
    let (c_max, c_rms) = drift(&tr, casimir, true);
    out.measurements.insert(
        "energy_drift".into(),
        Measurement::bounded(e_max, Some(e_rms), 1e-8),
    );
    out.measurements.insert(
        "casimir_drift".into(),
        Measurement::bounded(c_max, Some(c_rms), 1e-8),
    );
    out.measurements.insert(
        "el_residual".into(),
        Measurement::bounded(tr.max_el_residual(), Some(rms(&tr.el_residual)), 1e-6),
    );
    if wants(cfg, "drift_ratio") {
        let mut energy_rows = Vec::new();
        let mut casimir_rows = Vec::new();
        for dt in p.ratio_dt {
            let t = integrate(dt)?;
            energy_rows.push((dt, drift(&t, |s| energy(&l, s), true).0));
            casimir_rows.push((dt, drift(&t, casimir, true).0));
        }
        let e = ConvergenceTable::new("drift_ratio", "dt", energy_rows);
        out.measurements.insert(
            "drift_ratio".into(),
            Measurement::ratio(e.last_ratio(), [10.0, 24.0]),
        );
        out.convergence.push(e);
        out.convergence.push(ConvergenceTable::new(
            "casimir_drift_ratio",
            "dt",
            casimir_rows,
        ));
        // the nominal step and its half, usually at the roundoff floor
        let half = drift(&integrate(p.dt / 2.0)?, |s| energy(&l, s), true).0;
        out.convergence.push(ConvergenceTable::new(
            "energy_drift_nominal",
            "dt",
            vec![(p.dt, e_max), (p.dt / 2.0, half)],
        ));
    }
    let e = tr.values(|s| energy(&l, s));
    let c = tr.values(casimir);
    out.tables.push((
        "trajectory.csv".into(),
        trajectory_table(&tr, &[("energy", e), ("casimir", c)]),
    ));
    Ok(out)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeavyTopParams {
    pub inertia: [f64; 3],
    pub mgl: f64,
    pub chi: [f64; 3],
    pub u0: [f64; 3],
    pub y0: [f64; 3],
    pub t_end: f64,
    pub dt: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

pub fn validate_heavy_top(cfg: &Config) -> Result<()> {
    let p: HeavyTopParams = cfg.params()?;
    check_times(p.t_end, p.dt)?;
    require(
        p.inertia.iter().all(|i| *i > 0.0),
        "params.inertia must be positive",
    )
}

pub fn run_heavy_top(cfg: &Config) -> Result<RunOutput> {
    let p: HeavyTopParams = cfg.params()?;
    let pair = heavy_top_pair();
    let l = Lagrangian::heavy_top(p.inertia, p.mgl, p.chi);
    let s0 = MechanicsState::new(0.0, p.u0.to_vec(), p.y0.to_vec());
    let tr = integrate_mechanics(&pair, &l, &s0, p.t_end, p.dt)?;
    let axis = ProjectableSection::vertical(SmoothField::constant(4, vec![0.0, 0.0, 1.0]));
    let spatial = ProjectableSection::vertical(SmoothField::new(4, 3, |m| m[1..4].to_vec()));
    let mut out = RunOutput::default();
    if wants(cfg, "structure") {
        out.measurements
            .insert("structure".into(), structure(cfg, &pair, p.samples)?);
    }
    let charge = |sigma: &ProjectableSection| -> Result<Vec<f64>> {
        tr.states
            .iter()
            .map(|s| Ok(noether_charge(&l, sigma, s)?))
            .collect()
    };
    let qa = charge(&axis)?;
    let qs = charge(&spatial)?;
    let abs_drift = |v: &[f64]| {
        let d: Vec<f64> = v.iter().map(|x| (x - v[0]).abs()).collect();
        (max_abs(&d), rms(&d))
    };
    let (e_max, e_rms) = drift(&tr, |s| energy(&l, s), true);
    let (s_max, s_rms) = drift(&tr, |s| s.u.iter().map(|x| x * x).sum(), true);
    let (a_max, a_rms) = abs_drift(&qa);
    let (p_max, p_rms) = abs_drift(&qs);
    let m = &mut out.measurements;
    m.insert(
        "energy_drift".into(),
        Measurement::bounded(e_max, Some(e_rms), 1e-8),
    );
    m.insert(
        "sphere_drift".into(),
        Measurement::bounded(s_max, Some(s_rms), 1e-8),
    );
    m.insert(
        "axis_charge_drift".into(),
        Measurement::bounded(a_max, Some(a_rms), 1e-6),
    );
    m.insert(
        "spatial_charge_drift".into(),
        Measurement::bounded(p_max, Some(p_rms), 1e-6),
    );
    m.insert(
        "el_residual".into(),
        Measurement::bounded(tr.max_el_residual(), Some(rms(&tr.el_residual)), 1e-5),
    );
    let e = tr.values(|s| energy(&l, s));
    out.tables.push((
        "trajectory.csv".into(),
        trajectory_table(
            &tr,
            &[("energy", e), ("axis_charge", qa), ("spatial_charge", qs)],
        ),
    ));
    Ok(out)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeParticleParams {
    pub u0: Vec<f64>,
    pub y0: Vec<f64>,
    pub t_end: f64,
    pub dt: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

pub fn validate_free_particle(cfg: &Config) -> Result<()> {
    let p: FreeParticleParams = cfg.params()?;
    check_times(p.t_end, p.dt)?;
    require(!p.u0.is_empty(), "params.u0 must not be empty")?;
    require(
        p.u0.len() == p.y0.len(),
        "params.u0 and params.y0 must have equal length",
    )
}

pub fn run_free_particle(cfg: &Config) -> Result<RunOutput> {
    let p: FreeParticleParams = cfg.params()?;
    let n = p.u0.len();
    let pair = free_particle_pair(n);
    let l = Lagrangian::free_field(1, n, n);
    let s0 = MechanicsState::new(0.0, p.u0.clone(), p.y0.clone());
    let tr = integrate_mechanics(&pair, &l, &s0, p.t_end, p.dt)?;
    let mut out = RunOutput::default();
    if wants(cfg, "structure") {
        out.measurements
            .insert("structure".into(), structure(cfg, &pair, p.samples)?);
    }
    let err: Vec<f64> = tr
        .states
        .iter()
        .map(|s| {
            let du = (0..n).map(|a| (s.u[a] - p.u0[a] - p.y0[a] * s.t).abs());
            let dy = (0..n).map(|a| (s.y[a] - p.y0[a]).abs());
            du.chain(dy).fold(0.0, f64::max)
        })
        .collect();
    out.measurements.insert(
        "exact_solution".into(),
        Measurement::bounded(max_abs(&err), Some(rms(&err)), 1e-10),
    );
    out.measurements.insert(
        "el_residual".into(),
        Measurement::bounded(tr.max_el_residual(), Some(rms(&tr.el_residual)), 1e-10),
    );
    out.tables.push((
        "trajectory.csv".into(),
        trajectory_table(&tr, &[("error", err)]),
    ));
    Ok(out)
}
