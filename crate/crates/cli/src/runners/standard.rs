use liefield_core::scenarios::{builder_standard, StandardCaseData};
use liefield_core::variational::first_variation_terms;
use liefield_core::{
    DiscretizedSection, FibredAlgebroidPair, Lagrangian, ProjectableSection, SmoothField,
};
use serde::Deserialize;

use super::{fd_tol, fourier, max_abs, require, residual_table, rms, stream, structure, wants};
use crate::config::{BoundaryConfig, Config, FieldConfig, GridConfig};
use crate::error::Result;
use crate::report::{ConvergenceTable, Measurement, RunOutput};

#[derive(Debug, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConnectionConfig {
    Trivial,
    Fourier {
        #[serde(default = "two")]
        modes: usize,
        #[serde(default = "half")]
        amplitude: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    /// `V = ½ k |u|²`
    Harmonic { strength: f64 },
    /// `V = k Σ (1 − cos u^A)`
    Cosine { strength: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum LagrangianConfig {
    FreeField,
    KineticMinusPotential { potential: PotentialConfig },
}

fn two() -> usize {
    2
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandardParams {
    pub r: usize,
    pub m_u: usize,
    pub connection: ConnectionConfig,
    pub lagrangian: LagrangianConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub field: FieldConfig,
    #[serde(default = "hundred")]
    pub samples: usize,
}

fn hundred() -> usize {
    100
}

pub fn validate(cfg: &Config) -> Result<()> {
    let p: StandardParams = cfg.params()?;
    require(
        p.r >= 1 && p.m_u >= 1,
        "params.r and params.m_u must be at least 1",
    )?;
    p.grid.spacing()?;
    Ok(())
}

fn potential(m_u: usize, cfg: &PotentialConfig) -> SmoothField {
    match *cfg {
        PotentialConfig::Harmonic { strength: k } => SmoothField::new(m_u, 1, move |u| {
            vec![0.5 * k * u.iter().map(|v| v * v).sum::<f64>()]
        })
        .with_jacobian(move |u| u.iter().map(|v| k * v).collect()),
        PotentialConfig::Cosine { strength: k } => SmoothField::new(m_u, 1, move |u| {
            vec![k * u.iter().map(|v| 1.0 - v.cos()).sum::<f64>()]
        })
        .with_jacobian(move |u| u.iter().map(|v| k * v.sin()).collect()),
    }
}

pub(crate) fn lagrangian(r: usize, m_u: usize, cfg: &LagrangianConfig) -> Result<Lagrangian> {
    Ok(match cfg {
        LagrangianConfig::FreeField => Lagrangian::free_field(r, m_u, m_u),
        LagrangianConfig::KineticMinusPotential { potential: v } => {
            Lagrangian::kinetic_minus_potential(r, m_u, potential(m_u, v))?
        }
    })
}

struct Setup {
    pair: FibredAlgebroidPair,
    data: StandardCaseData,
    u: liefield_core::scenarios::FourierField,
    sigma: ProjectableSection,
}

fn period(grid: &GridConfig, r: usize) -> Result<Option<(usize, f64)>> {
    Ok(match grid.boundary {
        BoundaryConfig::Periodic => Some((r, grid.spacing()? * grid.n as f64)),
        BoundaryConfig::OneSided => None,
    })
}

fn setup(cfg: &Config, p: &StandardParams) -> Result<Setup> {
    let (r, mu) = (p.r, p.m_u);
    let per = period(&p.grid, r)?;
    let data = match p.connection {
        ConnectionConfig::Trivial => StandardCaseData::trivial(r, mu),
        ConnectionConfig::Fourier { modes, amplitude } => {
            let gamma = fourier(&mut stream(cfg, 2), r + mu, r * mu, modes, amplitude, per);
            let h = gamma.clone();
            StandardCaseData::new(r, mu, gamma.to_field())?.with_hessian(move |m| h.hessian(m))
        }
    };
    let pair = builder_standard(&data)?;
    let u = fourier(
        &mut stream(cfg, 3),
        r,
        mu,
        p.field.modes,
        p.field.amplitude,
        per,
    );
    let sigma = ProjectableSection::vertical(
        fourier(
            &mut stream(cfg, 4),
            r + mu,
            mu,
            p.field.modes,
            p.field.amplitude,
            per,
        )
        .to_field(),
    );
    Ok(Setup {
        pair,
        data,
        u,
        sigma,
    })
}

/// The holonomic field `u = f(x)`, `y_a = ∂_a f − Γ_a(x, f(x))`.
fn holonomic(s: &Setup, grid: &GridConfig, r: usize, mu: usize) -> Result<DiscretizedSection> {
    let g = grid.build(r)?;
    Ok(DiscretizedSection::from_fn(g, mu, mu, |x| {
        let u = s.u.eval(x);
        let du = s.u.jacobian(x);
        let mut m = x.to_vec();
        m.extend_from_slice(&u);
        let gamma = s.data.gamma_at(&m);
        let mut y = vec![0.0; mu * r];
        for big in 0..mu {
            for a in 0..r {
                y[big * r + a] = du[big * r + a] - gamma[a * mu + big];
            }
        }
        (u, y)
    })?)
}

fn first_variation(s: &Setup, l: &Lagrangian, phi: &DiscretizedSection) -> Result<Vec<f64>> {
    (0..phi.grid().len())
        .map(|node| Ok(first_variation_terms(&s.pair, l, &s.sigma, phi, node)?.defect()))
        .collect()
}

pub fn run(cfg: &Config) -> Result<RunOutput> {
    let p: StandardParams = cfg.params()?;
    let (r, mu) = (p.r, p.m_u);
    let s = setup(cfg, &p)?;
    let l = lagrangian(r, mu, &p.lagrangian)?;
    let h = p.grid.spacing()?;
    let phi = holonomic(&s, &p.grid, r, mu)?;
    let tol = fd_tol(h, &phi);
    let mut out = RunOutput::default();
    if wants(cfg, "structure") {
        out.measurements
            .insert("structure".into(), structure(cfg, &s.pair, p.samples)?);
    }
    let (table, field) = residual_table(&s.pair, &phi)?;
    out.measurements.insert(
        "admissibility".into(),
        Measurement::bounded(
            field.max_admissibility(),
            Some(field.rms_admissibility()),
            tol,
        ),
    );
    out.measurements.insert(
        "morphism".into(),
        Measurement::bounded(field.max_morphism(), Some(field.rms_morphism()), tol),
    );
    if wants(cfg, "first_variation") || wants(cfg, "first_variation_ratio") {
        let fv = first_variation(&s, &l, &phi)?;
        let coarse = max_abs(&fv);
        out.measurements.insert(
            "first_variation".into(),
            Measurement::bounded(coarse, Some(rms(&fv)), tol),
        );
        if wants(cfg, "first_variation_ratio") {
            let fine_grid = p.grid.refined()?;
            let fine = max_abs(&first_variation(
                &s,
                &l,
                &holonomic(&s, &fine_grid, r, mu)?,
            )?);
            let t = ConvergenceTable::new(
                "first_variation_ratio",
                "h",
                vec![(h, coarse), (h / 2.0, fine)],
            );
            out.measurements.insert(
                "first_variation_ratio".into(),
                Measurement::ratio(t.last_ratio(), [3.5, 4.5]),
            );
            out.convergence.push(t);
        }
    }
    out.tables.push(("residuals.csv".into(), table));
    out.sections.push(("section.lfs".into(), phi));
    Ok(out)
}
