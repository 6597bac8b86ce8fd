//! Pseudo-spectral solver for 2D micropolar Rayleigh-Benard convection
//! without velocity dissipation, plus the diagnostics that track the
//! a-priori quantities behind its well-posedness theory: energy ledgers,
//! the combined vorticity quantity Z, the temperature-gradient blow-up
//! monitor, and Littlewood-Paley/Besov norms.

pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod ic;
pub mod io;
pub mod ops;
pub mod paley;
pub mod timestep;

pub use error::{Error, Result};
pub use field::{PhysicalField, SpectralField};
pub use grid::Grid;
