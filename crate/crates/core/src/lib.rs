pub mod ensemble;
pub mod error;
mod fft;
pub mod field;
pub mod grid;
pub mod lp;
pub mod monitor;
pub mod norms;
pub mod ops;
pub mod ratio;
pub mod solver;

pub use error::{Error, Result};
pub use field::{RealField, RealVector, SpectralField, SpectralVector, Vector3};
pub use grid::Grid;
