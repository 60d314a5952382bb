use liefield_core::scenarios::{
    builder_atiyah, flat_connection_generator, levi_civita, su2_basis, su2_gauge, AtiyahData,
};
use liefield_core::{DiscretizedSection, FibredAlgebroidPair, SmoothField};
use serde::Deserialize;

use super::{fd_tol, fourier, require, residual_table, stream, structure, wants};
use crate::config::{BoundaryConfig, Config, FieldConfig, GridConfig};
use crate::error::Result;
use crate::report::{ConvergenceTable, Measurement, RunOutput};

#[derive(Debug, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraConfig {
    Abelian { dim: usize },
    So3,
}

fn hundred() -> usize {
    100
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtiyahParams {
    pub r: usize,
    pub algebra: AlgebraConfig,
    /// Constant curvature `Ω_{ab}^α` at `[(a * r + b) * m_k + α]`; zero when absent.
    #[serde(default)]
    pub omega: Option<Vec<f64>>,
    pub grid: GridConfig,
    #[serde(default)]
    pub field: FieldConfig,
    #[serde(default = "hundred")]
    pub samples: usize,
}

impl AtiyahParams {
    fn m_k(&self) -> usize {
        match self.algebra {
            AlgebraConfig::Abelian { dim } => dim,
            AlgebraConfig::So3 => 3,
        }
    }

    fn omega(&self) -> Vec<f64> {
        let n = self.r * self.r * self.m_k();
        self.omega.clone().unwrap_or_else(|| vec![0.0; n])
    }
}

pub fn validate(cfg: &Config) -> Result<()> {
    let p: AtiyahParams = cfg.params()?;
    require(p.r >= 1, "params.r must be at least 1")?;
    require(p.m_k() >= 1, "params.algebra.dim must be at least 1")?;
    p.grid.spacing()?;
    let (r, mk) = (p.r, p.m_k());
    let omega = p.omega();
    require(
        omega.len() == r * r * mk,
        "params.omega must have r*r*m_k entries",
    )?;
    for a in 0..r {
        for b in 0..r {
            for al in 0..mk {
                let (ab, ba) = (omega[(a * r + b) * mk + al], omega[(b * r + a) * mk + al]);
                require(
                    ab == -ba,
                    "params.omega must be antisymmetric in its first two indices",
                )?;
            }
        }
    }
    let flat = omega.iter().all(|v| *v == 0.0);
    if !flat {
        require(
            matches!(p.algebra, AlgebraConfig::Abelian { .. }),
            "nonzero params.omega requires an abelian algebra (closed, central curvature)",
        )?;
        require(
            p.grid.boundary == BoundaryConfig::OneSided,
            "nonzero params.omega is incompatible with a periodic grid",
        )?;
    }
    Ok(())
}

fn pair(p: &AtiyahParams) -> Result<FibredAlgebroidPair> {
    let constants = match p.algebra {
        AlgebraConfig::Abelian { dim } => vec![0.0; dim * dim * dim],
        AlgebraConfig::So3 => levi_civita(),
    };
    let data = AtiyahData::new(p.r, constants, SmoothField::constant(p.r, p.omega()))?;
    Ok(builder_atiyah(&data)?)
}

/// Abelian: `y_b = ½ Ω_{ab} x^a + ∂_b f`. so(3): `A = g⁻¹ dg` for a seeded
/// SU(2) gauge.
fn generated(cfg: &Config, p: &AtiyahParams, grid: &GridConfig) -> Result<DiscretizedSection> {
    let (r, mk) = (p.r, p.m_k());
    let period = match grid.boundary {
        BoundaryConfig::Periodic => Some((r, grid.spacing()? * grid.n as f64)),
        BoundaryConfig::OneSided => None,
    };
    let g = grid.build(r)?;
    match p.algebra {
        AlgebraConfig::Abelian { .. } => {
            let f = fourier(
                &mut stream(cfg, 7),
                r,
                mk,
                p.field.modes,
                p.field.amplitude,
                period,
            );
            let omega = p.omega();
            Ok(DiscretizedSection::from_fn(g, 0, mk, |x| {
                let df = f.jacobian(x);
                let mut y = vec![0.0; mk * r];
                for al in 0..mk {
                    for b in 0..r {
                        let lin: f64 = (0..r).map(|a| omega[(a * r + b) * mk + al] * x[a]).sum();
                        y[al * r + b] = 0.5 * lin + df[al * r + b];
                    }
                }
                (Vec::new(), y)
            })?)
        }
        AlgebraConfig::So3 => {
            let f = fourier(
                &mut stream(cfg, 7),
                r,
                3,
                p.field.modes,
                p.field.amplitude,
                period,
            );
            Ok(flat_connection_generator(&su2_gauge(f), &su2_basis(), &g)?)
        }
    }
}

pub fn run(cfg: &Config) -> Result<RunOutput> {
    let p: AtiyahParams = cfg.params()?;
    let pair = pair(&p)?;
    let h = p.grid.spacing()?;
    let phi = generated(cfg, &p, &p.grid)?;
    let mut out = RunOutput::default();
    if wants(cfg, "structure") {
        out.measurements
            .insert("structure".into(), structure(cfg, &pair, p.samples)?);
    }
    let (table, field) = residual_table(&pair, &phi)?;
    let coarse = field.max_morphism();
    out.measurements.insert(
        "morphism".into(),
        Measurement::bounded(coarse, Some(field.rms_morphism()), fd_tol(h, &phi)),
    );
    if wants(cfg, "morphism_ratio") {
        let fine_grid = p.grid.refined()?;
        let fine_phi = generated(cfg, &p, &fine_grid)?;
        let (_, fine) = residual_table(&pair, &fine_phi)?;
        let t = ConvergenceTable::new(
            "morphism_ratio",
            "h",
            vec![(h, coarse), (h / 2.0, fine.max_morphism())],
        );
        out.measurements.insert(
            "morphism_ratio".into(),
            Measurement::ratio(t.last_ratio(), [3.5, 4.5]),
        );
        out.convergence.push(t);
    }
    out.tables.push(("residuals.csv".into(), table));
    out.sections.push(("section.lfs".into(), phi));
    Ok(out)
}
