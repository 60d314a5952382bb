//! Scenario kinds, their checks, and the named Lagrangian and gauge catalogs.

use crate::config::Config;
use crate::error::Result;
use crate::report::RunOutput;
use crate::runners;

pub struct CheckInfo {
    pub name: &'static str,
    pub doc: &'static str,
}

pub struct KindInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static str,
    pub checks: &'static [CheckInfo],
    pub validate: fn(&Config) -> Result<()>,
    pub run: fn(&Config) -> Result<RunOutput>,
}

const fn check(name: &'static str, doc: &'static str) -> CheckInfo {
    CheckInfo { name, doc }
}

const STRUCTURE: CheckInfo = check(
    "structure",
    "max anchor/Jacobi residual of the assembled algebroid at `samples` seeded points (tol 1e-8)",
);

pub static KINDS: &[KindInfo] = &[
    KindInfo {
        name: "rigid_body",
        summary: "free rigid body on so(3), r = 1, integrated with RK4",
        params: "inertia [3], y0 [3], t_end, dt, ratio_dt [2] (default [0.0125, 0.00625])",
        checks: &[
            STRUCTURE,
            check("energy_drift", "max relative energy drift (tol 1e-8)"),
            check("casimir_drift", "max relative drift of sum (I_a y^a)^2 (tol 1e-8)"),
            check("el_residual", "max Euler-Lagrange residual along the trajectory (tol 1e-6)"),
            check("drift_ratio", "energy drift at ratio_dt[0] over ratio_dt[1] (range [10, 24])"),
        ],
        validate: runners::mechanics::validate_rigid_body,
        run: runners::mechanics::run_rigid_body,
    },
    KindInfo {
        name: "heavy_top",
        summary: "heavy top: so(3) acting on the body-frame gravity direction u",
        params: "inertia [3], mgl, chi [3], u0 [3], y0 [3], t_end, dt",
        checks: &[
            STRUCTURE,
            check("energy_drift", "max relative energy drift (tol 1e-8)"),
            check("sphere_drift", "max relative drift of |u|^2 (tol 1e-8)"),
            check("axis_charge_drift", "drift of the Noether charge of e_3 (tol 1e-6)"),
            check("spatial_charge_drift", "drift of the Noether charge of u (tol 1e-6)"),
            check("el_residual", "max Euler-Lagrange residual along the trajectory (tol 1e-5)"),
        ],
        validate: runners::mechanics::validate_heavy_top,
        run: runners::mechanics::run_heavy_top,
    },
    KindInfo {
        name: "free_particle",
        summary: "free particle in R^n, abelian kernel",
        params: "u0 [n], y0 [n], t_end, dt",
        checks: &[
            STRUCTURE,
            check("exact_solution", "max deviation from u0 + y0 t, y = y0 (tol 1e-10)"),
            check("el_residual", "max Euler-Lagrange residual along the trajectory (tol 1e-10)"),
        ],
        validate: runners::mechanics::validate_free_particle,
        run: runners::mechanics::run_free_particle,
    },
    KindInfo {
        name: "standard",
        summary: "first-order field theory on a trivial bundle with an Ehresmann connection",
        params: "r, m_u, connection {name: trivial|fourier, modes, amplitude}, lagrangian \
                 {name, potential}, grid {n, h|length, origin, boundary}, field {modes, amplitude}, \
                 samples",
        checks: &[
            STRUCTURE,
            check("admissibility", "max admissibility residual of the holonomic field (tol 50 h^2 s)"),
            check("morphism", "max morphism residual of the holonomic field (tol 50 h^2 s)"),
            check("first_variation", "max first-variation identity defect (tol 50 h^2 s)"),
            check("first_variation_ratio", "defect at h over defect at h/2 (range [3.5, 4.5])"),
        ],
        validate: runners::standard::validate,
        run: runners::standard::run,
    },
    KindInfo {
        name: "chern_simons",
        summary: "Chern-Simons on a periodic 3-lattice, pure-gauge connections",
        params: "algebra {name: su2 | custom, constants, metric}, n, length, gauge {name, modes, \
                 amplitude}, field {modes, amplitude}, samples",
        checks: &[
            STRUCTURE,
            check("morphism", "max morphism residual of the pure-gauge field (tol 50 h^2 s)"),
            check("morphism_ratio", "morphism residual at n over 2n (range [3.5, 4.5])"),
            check("el_bound", "max|dL| / (kappa max|M|) on the pure-gauge field (tol 1)"),
            check("identity_defect", "max |L' + L - k A^F| on a seeded non-flat field (tol 50 h^2 s^3)"),
        ],
        validate: runners::chern_simons::validate,
        run: runners::chern_simons::run,
    },
    KindInfo {
        name: "atiyah",
        summary: "Atiyah algebroid of a trivial principal bundle (covariant Euler-Poincare)",
        params: "r, algebra {name: abelian, dim | so3}, omega [r*r*m_k] (constant), grid, field, \
                 samples",
        checks: &[
            STRUCTURE,
            check("morphism", "max morphism residual of the generated field (tol 50 h^2 s)"),
            check("morphism_ratio", "morphism residual at h over h/2 (range [3.5, 4.5])"),
        ],
        validate: runners::atiyah::validate,
        run: runners::atiyah::run,
    },
];

pub static LAGRANGIANS: &[(&str, &str)] = &[
    ("free_field", "1/2 sum (y_a^alpha)^2"),
    (
        "kinetic_minus_potential",
        "1/2 sum (y_a^alpha)^2 - V(u); potential {name: harmonic|cosine, strength}",
    ),
    (
        "rigid_body",
        "1/2 sum I_alpha (y^alpha)^2 (kind rigid_body)",
    ),
    (
        "heavy_top",
        "1/2 sum I_alpha (y^alpha)^2 - mgl <u, chi> (kind heavy_top)",
    ),
    (
        "chern_simons",
        "C_{abc} y_1^a y_2^b y_3^c (kind chern_simons)",
    ),
];

pub static GAUGES: &[(&str, &str)] = &[
    ("identity", "g = 1, A = 0"),
    (
        "su2_fourier",
        "g = exp(f^a tau_a), f seeded with integer wavevectors; modes, amplitude",
    ),
];

pub fn kind_info(name: &str) -> Option<&'static KindInfo> {
    KINDS.iter().find(|k| k.name == name)
}

pub fn listing() -> String {
    let mut s = String::from("scenario kinds:\n");
    for k in KINDS {
        s.push_str(&format!(
            "  {}\n    {}\n    params: {}\n    checks:\n",
            k.name, k.summary, k.params
        ));
        for c in k.checks {
            s.push_str(&format!("      {:<22} {}\n", c.name, c.doc));
        }
    }
    s.push_str("lagrangians:\n");
    for (n, d) in LAGRANGIANS {
        s.push_str(&format!("  {n:<24} {d}\n"));
    }
    s.push_str("gauge functions:\n");
    for (n, d) in GAUGES {
        s.push_str(&format!("  {n:<24} {d}\n"));
    }
    s
}
