//! One runner per scenario kind.

pub mod atiyah;
pub mod chern_simons;
pub mod mechanics;
pub mod standard;

use liefield_core::algebroid::structure_equation_residuals;
use liefield_core::fields::residual_report;
use liefield_core::scenarios::FourierField;
use liefield_core::{DiscretizedSection, FibredAlgebroidPair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::error::{CliError, Result};
use crate::report::{Measurement, Table};

pub(crate) fn wants(cfg: &Config, check: &str) -> bool {
    cfg.checks.contains_key(check)
}

/// An independent random stream per purpose, all derived from the seed.
pub(crate) fn stream(cfg: &Config, purpose: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    r.set_stream(purpose);
    r
}

/// Seeded sine modes. With `period = Some((p, L))` the first `p` inputs get
/// wavevectors that are integer multiples of `2π/L`.
pub(crate) fn fourier(
    rng: &mut ChaCha8Rng,
    in_dim: usize,
    out_dim: usize,
    modes: usize,
    amplitude: f64,
    period: Option<(usize, f64)>,
) -> FourierField {
    let mut f = FourierField::new(in_dim, out_dim);
    for o in 0..out_dim {
        for _ in 0..modes {
            let k: Vec<f64> = (0..in_dim)
                .map(|i| match period {
                    Some((p, l)) if i < p => {
                        rng.gen_range(-1i32..=1) as f64 * std::f64::consts::TAU / l
                    }
                    _ => rng.gen_range(-1.5..1.5),
                })
                .collect();
            let amp = amplitude * rng.gen_range(-1.0..1.0);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            f = f.with_mode(o, amp, k, phase);
        }
    }
    f
}

pub(crate) fn rms(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Structure-equation residuals of the assembled algebroid at seeded points
/// of `[-2, 2]^{r + m_u}`.
pub(crate) fn structure(
    cfg: &Config,
    pair: &FibredAlgebroidPair,
    samples: usize,
) -> Result<Measurement> {
    let full = pair.full_algebroid();
    let mut rng = stream(cfg, 1);
    let mut worst = Vec::with_capacity(samples);
    for _ in 0..samples {
        let m: Vec<f64> = (0..full.base_dim())
            .map(|_| rng.gen_range(-2.0..2.0))
            .collect();
        worst.push(structure_equation_residuals(&full, &m)?.max());
    }
    Ok(Measurement::bounded(
        max_abs(&worst),
        Some(rms(&worst)),
        1e-8,
    ))
}

/// `50 h² · s`, the default tolerance for second-order finite-difference
/// checks, with `s = max(1, max|u|, max|y|)`.
pub(crate) fn fd_tol(h: f64, phi: &DiscretizedSection) -> f64 {
    50.0 * h * h * field_scale(phi)
}

pub(crate) fn field_scale(phi: &DiscretizedSection) -> f64 {
    max_abs(phi.u_values())
        .max(max_abs(phi.y_values()))
        .max(1.0)
}

/// Per-node admissibility and morphism residuals (`a < b` only).
pub(crate) fn residual_table(
    pair: &FibredAlgebroidPair,
    phi: &DiscretizedSection,
) -> Result<(Table, liefield_core::ResidualField)> {
    let field = residual_report(pair, phi, 0.0)?.field;
    let grid = phi.grid();
    let (r, mu, mk) = (pair.r(), pair.m_u(), pair.m_k());
    let mut header = vec!["node".to_string()];
    header.extend((0..r).map(|a| format!("x{a}")));
    for big in 0..mu {
        for a in 0..r {
            header.push(format!("adm_{big}_{a}"));
        }
    }
    for a in 0..r {
        for b in a + 1..r {
            for al in 0..mk {
                header.push(format!("morph_{a}_{b}_{al}"));
            }
        }
    }
    let mut rows = Vec::with_capacity(grid.len());
    for node in 0..grid.len() {
        let mut row = vec![node as f64];
        row.extend(grid.coords(node));
        row.extend_from_slice(&field.admissibility[node * mu * r..(node + 1) * mu * r]);
        let m = field.morphism_at(node);
        for a in 0..r {
            for b in a + 1..r {
                row.extend_from_slice(&m[(a * r + b) * mk..(a * r + b + 1) * mk]);
            }
        }
        rows.push(row);
    }
    Ok((Table { header, rows }, field))
}

pub(crate) fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::schema(msg))
    }
}
