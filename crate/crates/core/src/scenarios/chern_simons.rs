//! Chern-Simons theory on a periodic 3-lattice: `E = TN × 𝔤`, fields are
//! 1-forms `A^α = y_a^α dx^a`, and `L = C_{αβγ} y_1^α y_2^β y_3^γ`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::check_len;
use crate::fields::{morphism_residual, Boundary, DiscretizedSection, GridSpec};
use crate::jet::FibredAlgebroidPair;
use crate::linalg::Lu;
use crate::variational::Lagrangian;
use crate::{Error, Result, SmoothField};

/// Tolerance for symmetry of `k` and total antisymmetry of `C_{αβγ}`.
pub const AD_INVARIANCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ChernSimonsData {
    m: usize,
    /// `C_{βγ}^α` at `[(β * m + γ) * m + α]`.
    constants: Vec<f64>,
    /// `k_{αβ}` at `[α * m + β]`.
    metric: Vec<f64>,
    /// `C_{αβγ} = k_{αμ} C_{βγ}^μ` at `[(α * m + β) * m + γ]`.
    lowered: Vec<f64>,
    positive_definite: bool,
}

impl ChernSimonsData {
    pub fn new(constants: Vec<f64>, metric: Vec<f64>) -> Result<Self> {
        let m = (0..=metric.len())
            .find(|k| k * k >= metric.len())
            .unwrap_or(0);
        check_len("metric (square)", m * m, metric.len())?;
        check_len("structure constants", m * m * m, constants.len())?;
        for a in 0..m {
            for b in 0..m {
                if (metric[a * m + b] - metric[b * m + a]).abs() > AD_INVARIANCE_TOL {
                    return Err(Error::InvalidMetric("metric is not symmetric"));
                }
                for g in 0..m {
                    if constants[(a * m + b) * m + g] != -constants[(b * m + a) * m + g] {
                        return Err(Error::NotAntisymmetric {
                            alpha: a,
                            beta: b,
                            gamma: g,
                        });
                    }
                }
            }
        }
        if m > 0 && Lu::new(&metric, m).is_err() {
            return Err(Error::InvalidMetric("metric is degenerate"));
        }
        let mut lowered = vec![0.0; m * m * m];
        for a in 0..m {
            for b in 0..m {
                for g in 0..m {
                    lowered[(a * m + b) * m + g] = (0..m)
                        .map(|mu| metric[a * m + mu] * constants[(b * m + g) * m + mu])
                        .sum();
                }
            }
        }
        let mut defect: f64 = 0.0;
        for a in 0..m {
            for b in 0..m {
                for g in 0..m {
                    let v = lowered[(a * m + b) * m + g];
                    defect = defect
                        .max((v + lowered[(b * m + a) * m + g]).abs())
                        .max((v + lowered[(a * m + g) * m + b]).abs());
                }
            }
        }
        if defect > AD_INVARIANCE_TOL {
            return Err(Error::NotAdInvariant { defect });
        }
        let positive_definite = cholesky_ok(&metric, m);
        Ok(Self {
            m,
            constants,
            metric,
            lowered,
            positive_definite,
        })
    }

    pub fn dim(&self) -> usize {
        self.m
    }
    pub fn constants(&self) -> &[f64] {
        &self.constants
    }
    pub fn metric(&self) -> &[f64] {
        &self.metric
    }
    pub fn lowered(&self) -> &[f64] {
        &self.lowered
    }
    /// `false` flags a nondegenerate but indefinite metric.
    pub fn positive_definite(&self) -> bool {
        self.positive_definite
    }

    /// `κ` in `max|δL| ≤ κ · max|ℳ|` for fields with `max|y| ≤ y_max`:
    /// `3 · max_α Σ_{β,γ} |C_{αβγ}| · y_max`.
    pub fn kappa(&self, y_max: f64) -> f64 {
        let m = self.m;
        let row = (0..m)
            .map(|a| {
                (0..m * m)
                    .map(|i| self.lowered[a * m * m + i].abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        3.0 * row * y_max
    }
}

fn cholesky_ok(a: &[f64], n: usize) -> bool {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return false;
                }
                l[i * n + i] = libm::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    true
}

/// The pair `TN × 𝔤` over a periodic 3-lattice and the Lagrangian
/// `L = C_{αβγ} y_1^α y_2^β y_3^γ` with analytic partials.
pub fn builder_chern_simons(
    data: &ChernSimonsData,
    grid: &GridSpec,
) -> Result<(FibredAlgebroidPair, Lagrangian)> {
    if grid.r() != 3 {
        return Err(Error::DimensionMismatch {
            what: "Chern-Simons lattice dimension",
            expected: 3,
            got: grid.r(),
        });
    }
    if grid.boundary() != Boundary::Periodic {
        return Err(Error::InvalidGrid(
            "the Chern-Simons lattice must be periodic",
        ));
    }
    let m = data.m;
    let pair = FibredAlgebroidPair::builder(3, 0, m)
        .bracket_vertical(SmoothField::constant(3, data.constants.clone()))
        .build()?;
    Ok((pair, chern_simons_lagrangian(data)))
}

pub fn chern_simons_lagrangian(data: &ChernSimonsData) -> Lagrangian {
    let m = data.m;
    let w = 3 * m;
    let (c1, c2, c3) = (
        data.lowered.clone(),
        data.lowered.clone(),
        data.lowered.clone(),
    );
    // y_a^α at [α * 3 + a]
    Lagrangian::new(3, 0, m, move |p| {
        let y = |al: usize, a: usize| p.y[al * 3 + a];
        let mut v = 0.0;
        for a in 0..m {
            for b in 0..m {
                for g in 0..m {
                    v += c1[(a * m + b) * m + g] * y(a, 0) * y(b, 1) * y(g, 2);
                }
            }
        }
        v
    })
    .with_du(|_| Vec::new())
    .with_dy(move |p| {
        let y = |al: usize, a: usize| p.y[al * 3 + a];
        let c = |a: usize, b: usize, g: usize| c2[(a * m + b) * m + g];
        let mut out = vec![0.0; w];
        for al in 0..m {
            for b in 0..m {
                for g in 0..m {
                    out[al * 3] += c(al, b, g) * y(b, 1) * y(g, 2);
                    out[al * 3 + 1] += c(b, al, g) * y(b, 0) * y(g, 2);
                    out[al * 3 + 2] += c(b, g, al) * y(b, 0) * y(g, 1);
                }
            }
        }
        out
    })
    .with_hessian_yy(move |p| {
        // ∂²L/∂y_a^α ∂y_b^β = C with the remaining slot filled by y_c, c ≠ a, b
        let y = |al: usize, a: usize| p.y[al * 3 + a];
        let mut out = vec![0.0; w * w];
        for a in 0..3 {
            for b in 0..3 {
                if a == b {
                    continue;
                }
                let c = 3 - a - b;
                for al in 0..m {
                    for be in 0..m {
                        let mut v = 0.0;
                        for g in 0..m {
                            let mut idx = [0usize; 3];
                            idx[a] = al;
                            idx[b] = be;
                            idx[c] = g;
                            v += c3[(idx[0] * m + idx[1]) * m + idx[2]] * y(g, c);
                        }
                        out[(al * 3 + a) * w + be * 3 + b] = v;
                    }
                }
            }
        }
        out
    })
    .with_hessian_yu(|_| Vec::new())
    .with_hessian_yx(move |_| vec![0.0; w * 3])
}

/// The top-form coefficients entering the comparison of `L` with the
/// conventional density `L′ω = k_{αβ}(A^α ∧ dA^β + ⅓ C_{μν}^β A^α ∧ A^μ ∧ A^ν)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernSimonsTerms {
    pub l: f64,
    pub l_prime: f64,
    /// `k_{αμ} A^μ ∧ F^α` with `F = dA + ½ C A ∧ A`.
    pub a_wedge_f: f64,
}

impl ChernSimonsTerms {
    /// `L′ + L − k_{αμ} A^μ ∧ F^α`, which vanishes identically.
    pub fn defect(&self) -> f64 {
        self.l_prime + self.l - self.a_wedge_f
    }
}

/// Evaluates the three densities at `node`, with `dA` from grid derivatives
/// and `F` read off the morphism residual (`F_{bc}^α = ℳ_{cb}^α`).
pub fn chern_simons_terms(
    data: &ChernSimonsData,
    pair: &FibredAlgebroidPair,
    phi: &DiscretizedSection,
    node: usize,
) -> Result<ChernSimonsTerms> {
    let m = data.m;
    check_len("Chern-Simons base dimension", 3, pair.r())?;
    check_len("Chern-Simons algebra dimension", m, pair.m_k())?;
    let p = phi.jet_point(node)?;
    let grid = phi.grid();
    let partial: Vec<Vec<f64>> = (0..3)
        .map(|b| grid.derivative(node, b, |n| phi.y_at(n).to_vec()))
        .collect();
    // dA^α_{bc} = ∂_b y_c^α − ∂_c y_b^α
    let da = |al: usize, b: usize, c: usize| partial[b][al * 3 + c] - partial[c][al * 3 + b];
    let mres = morphism_residual(pair, phi, node)?;
    let f = |al: usize, b: usize, c: usize| mres[(c * 3 + b) * m + al];
    let y = |al: usize, a: usize| p.y[al * 3 + a];
    let k = |a: usize, b: usize| data.metric[a * m + b];

    // (A ∧ B)_{123} = A_1 B_{23} + A_2 B_{31} + A_3 B_{12}
    let cyc = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];
    let mut a_da = 0.0;
    let mut a_f = 0.0;
    for al in 0..m {
        for be in 0..m {
            let kab = k(al, be);
            if kab == 0.0 {
                continue;
            }
            for &(a, b, c) in &cyc {
                a_da += kab * y(al, a) * da(be, b, c);
                a_f += kab * y(be, a) * f(al, b, c);
            }
        }
    }
    let l = chern_simons_lagrangian(data).eval(&p);
    // ⅓ C_{αμν} A^α ∧ A^μ ∧ A^ν = 2 C_{αβγ} y_1^α y_2^β y_3^γ
    Ok(ChernSimonsTerms {
        l,
        l_prime: a_da + 2.0 * l,
        a_wedge_f: a_f,
    })
}

/// `|L′ + L − k_{αμ} A^μ ∧ F^α|` at `node`.
pub fn chern_simons_lagrangian_difference(
    data: &ChernSimonsData,
    pair: &FibredAlgebroidPair,
    phi: &DiscretizedSection,
    node: usize,
) -> Result<f64> {
    Ok(chern_simons_terms(data, pair, phi, node)?.defect().abs())
}
