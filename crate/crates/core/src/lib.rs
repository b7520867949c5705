//! Simulation of chirped, multi-notch ("multi-NARP") optical driving of
//! spectrally distinct two-level emitters.

pub mod dynamics;
pub mod error;
pub mod io;
pub mod phonon;
pub mod pulseshape;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};

/// Tool version recorded in every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
