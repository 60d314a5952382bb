//! Builders for the worked examples: standard first-order field theory,
//! time-dependent mechanics, Chern-Simons and Atiyah (Euler-Poincaré).

pub mod atiyah;
pub mod chern_simons;
pub mod fourier;
pub mod gauge;
pub mod mechanics;
pub mod standard;

pub use atiyah::{builder_atiyah, AtiyahData};
pub use chern_simons::{
    builder_chern_simons, chern_simons_lagrangian_difference, chern_simons_terms, ChernSimonsData,
};
pub use fourier::{FourierField, FourierMode};
pub use gauge::{flat_connection_generator, su2_basis, su2_exp, su2_gauge};
pub use mechanics::{
    builder_time_dependent, energy, free_particle_pair, heavy_top_pair, integrate_mechanics,
    noether_charge, rigid_body_pair, MechanicsState, Trajectory,
};
pub use standard::{builder_standard, StandardCaseData};

use alloc::vec;
use alloc::vec::Vec;

/// `ε_{αβγ}` as a flat `3×3×3` array: the structure constants of `so(3)`.
pub fn levi_civita() -> Vec<f64> {
    let mut c = vec![0.0; 27];
    for (a, b, g, s) in [
        (0, 1, 2, 1.0),
        (1, 2, 0, 1.0),
        (2, 0, 1, 1.0),
        (1, 0, 2, -1.0),
        (2, 1, 0, -1.0),
        (0, 2, 1, -1.0),
    ] {
        c[(a * 3 + b) * 3 + g] = s;
    }
    c
}
