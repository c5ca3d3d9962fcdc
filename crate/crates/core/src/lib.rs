//! Numerical engine for a free particle on `[-L/2, L/2]` with Robin boundary
//! conditions, using the two-component momentum `p_R + i p_I`.
//!
//! Units have `hbar = 1`. Boundary conditions are written as
//! `gamma_plus * psi(L/2) + psi'(L/2) = 0` and
//! `gamma_minus * psi(-L/2) - psi'(-L/2) = 0`.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod modes;
pub mod momentum;
pub mod quadrature;
pub mod random;
mod roots;
pub mod spectrum;
pub mod uncertainty;
pub mod wave;

pub use config::BoxConfig;
pub use error::{Error, Result};
pub use modes::{Mode, ModeSum};
pub use quadrature::Quadrature;
pub use wave::{derivative, inner_product, observables_of, Observables, WaveFunction};

pub use num_complex::Complex64 as C64;
