//! Seeded random superpositions with geometrically decaying weights.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::EvolvingState;
use crate::error::{Error, Result};
use crate::spectrum::EnergyBasis;
use crate::C64;

pub const DECAY: f64 = 0.6;

/// `c_l = 0.6^l e^{i phi_l}` with uniform phases, normalized.
pub fn random_coefficients(modes: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coefs: Vec<C64> = (0..modes)
        .map(|l| {
            let phase = std::f64::consts::TAU * rng.random::<f64>();
            C64::from_polar(DECAY.powi(l as i32), phase)
        })
        .collect();
    let n: f64 = coefs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    coefs.iter_mut().for_each(|c| *c /= n);
    coefs
}

/// A random state over the lowest `modes` levels of `basis`, at `t = 0`.
pub fn random_state(basis: &EnergyBasis, modes: usize, seed: u64) -> Result<EvolvingState> {
    if modes == 0 || modes > basis.len() {
        return Err(Error::Parameter(format!(
            "{modes} modes requested from a basis of {} levels",
            basis.len()
        )));
    }
    EvolvingState::new(basis.clone(), random_coefficients(modes, seed), 0.0)
}
