use liefield_core::fields::morphism_residual;
use liefield_core::scenarios::{
    builder_chern_simons, chern_simons_lagrangian_difference, flat_connection_generator,
    levi_civita, su2_basis, su2_gauge, ChernSimonsData,
};
use liefield_core::variational::el_residual_norms;
use liefield_core::{DiscretizedSection, FibredAlgebroidPair, GridSpec};
use serde::Deserialize;

use super::{
    fd_tol, field_scale, fourier, max_abs, require, residual_table, rms, stream, structure, wants,
};
use crate::config::{Config, FieldConfig};
use crate::error::Result;
use crate::report::{ConvergenceTable, Measurement, RunOutput};

#[derive(Debug, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraConfig {
    /// `[τ_a, τ_b] = ε_{abc} τ_c` with the identity metric.
    Su2,
    Custom {
        constants: Vec<f64>,
        metric: Vec<f64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum GaugeConfig {
    Identity,
    Su2Fourier {
        #[serde(default = "two")]
        modes: usize,
        #[serde(default = "half")]
        amplitude: f64,
    },
}

fn two() -> usize {
    2
}

fn half() -> f64 {
    0.5
}

fn sixteen() -> usize {
    16
}

fn tau() -> f64 {
    std::f64::consts::TAU
}

fn hundred() -> usize {
    100
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChernSimonsParams {
    pub algebra: AlgebraConfig,
    #[serde(default = "sixteen")]
    pub n: usize,
    #[serde(default = "tau")]
    pub length: f64,
    pub gauge: GaugeConfig,
    #[serde(default)]
    pub field: FieldConfig,
    #[serde(default = "hundred")]
    pub samples: usize,
}

fn data(p: &ChernSimonsParams) -> Result<ChernSimonsData> {
    Ok(match &p.algebra {
        AlgebraConfig::Su2 => {
            ChernSimonsData::new(levi_civita(), liefield_core::linalg::identity(3))?
        }
        AlgebraConfig::Custom { constants, metric } => {
            ChernSimonsData::new(constants.clone(), metric.clone())?
        }
    })
}

pub fn validate(cfg: &Config) -> Result<()> {
    let p: ChernSimonsParams = cfg.params()?;
    require(p.n >= 3, "params.n must be at least 3")?;
    require(p.length > 0.0, "params.length must be positive")?;
    if let GaugeConfig::Su2Fourier { .. } = p.gauge {
        require(
            matches!(p.algebra, AlgebraConfig::Su2),
            "gauge su2_fourier requires algebra su2",
        )?;
    }
    data(&p)?;
    Ok(())
}

fn pure_gauge(
    cfg: &Config,
    p: &ChernSimonsParams,
    m: usize,
    grid: &GridSpec,
) -> Result<DiscretizedSection> {
    Ok(match p.gauge {
        GaugeConfig::Identity => DiscretizedSection::zero(grid.clone(), 0, m),
        GaugeConfig::Su2Fourier { modes, amplitude } => {
            let f = fourier(
                &mut stream(cfg, 5),
                3,
                3,
                modes,
                amplitude,
                Some((3, p.length)),
            );
            flat_connection_generator(&su2_gauge(f), &su2_basis(), grid)?
        }
    })
}

fn max_morphism(pair: &FibredAlgebroidPair, phi: &DiscretizedSection) -> Result<f64> {
    let mut worst = 0.0f64;
    for node in 0..phi.grid().len() {
        worst = worst.max(max_abs(&morphism_residual(pair, phi, node)?));
    }
    Ok(worst)
}

pub fn run(cfg: &Config) -> Result<RunOutput> {
    let p: ChernSimonsParams = cfg.params()?;
    let d = data(&p)?;
    let m = d.dim();
    let grid = GridSpec::periodic_cube(3, p.n, p.length)?;
    let h = p.length / p.n as f64;
    let (pair, l) = builder_chern_simons(&d, &grid)?;
    let phi = pure_gauge(cfg, &p, m, &grid)?;
    let tol = fd_tol(h, &phi);
    let mut out = RunOutput::default();
    if wants(cfg, "structure") {
        out.measurements
            .insert("structure".into(), structure(cfg, &pair, p.samples)?);
    }
    let (table, field) = residual_table(&pair, &phi)?;
    let morph = field.max_morphism();
    out.measurements.insert(
        "morphism".into(),
        Measurement::bounded(morph, Some(field.rms_morphism()), tol),
    );
    if wants(cfg, "morphism_ratio") {
        let fine_grid = GridSpec::periodic_cube(3, 2 * p.n, p.length)?;
        let fine = max_morphism(&pair, &pure_gauge(cfg, &p, m, &fine_grid)?)?;
        let t = ConvergenceTable::new("morphism_ratio", "h", vec![(h, morph), (h / 2.0, fine)]);
        out.measurements.insert(
            "morphism_ratio".into(),
            Measurement::ratio(t.last_ratio(), [3.5, 4.5]),
        );
        out.convergence.push(t);
    }
    if wants(cfg, "el_bound") {
        let (el, el_rms) = el_residual_norms(&pair, &l, &phi)?;
        let bound = d.kappa(max_abs(phi.y_values())) * morph;
        let value = if el == 0.0 { 0.0 } else { el / bound };
        out.measurements.insert(
            "el_bound".into(),
            Measurement::bounded(value, Some(el_rms / bound.max(f64::MIN_POSITIVE)), 1.0),
        );
    }
    if wants(cfg, "identity_defect") {
        let f = fourier(
            &mut stream(cfg, 6),
            3,
            3 * m,
            p.field.modes,
            p.field.amplitude,
            Some((3, p.length)),
        );
        let psi = DiscretizedSection::from_fn(grid.clone(), 0, m, |x| (Vec::new(), f.eval(x)))?;
        let defects: Vec<f64> = (0..grid.len())
            .map(|node| chern_simons_lagrangian_difference(&d, &pair, &psi, node))
            .collect::<liefield_core::Result<_>>()?;
        let s = field_scale(&psi);
        out.measurements.insert(
            "identity_defect".into(),
            Measurement::bounded(
                max_abs(&defects),
                Some(rms(&defects)),
                50.0 * h * h * s * s * s,
            ),
        );
        out.sections.push(("probe.lfs".into(), psi));
    }
    out.tables.push(("residuals.csv".into(), table));
    out.sections.push(("section.lfs".into(), phi));
    Ok(out)
}
