//! Discrete time-frequency analysis on the periodic grid.

pub mod dyadic;
pub mod error;
pub mod grid;
pub mod helicoid;
pub mod io;
pub mod leibniz;
pub mod operators;
pub mod rng;
pub mod vector_valued;
pub mod size_energy;
pub mod wavepacket;

pub use error::{Error, Result};
pub use grid::{GridSpec, Signal1D, Signal2D, SignalFamily, C64};
