//! Stochastic heat equation and KPZ temporal-process simulation, exact fractional
//! Brownian motion sampling, and sample-path statistics.

pub mod config;
pub mod ensemble;
pub mod error;
pub mod experiment;
pub mod fbm;
pub mod grid;
pub mod initial;
pub mod io;
pub mod kernel;
pub mod noise;
pub mod path;
pub mod solver;
pub mod stats;
pub mod suite;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{make_grid, GridSpec};
pub use initial::{make_initial_field, InitialDatum};
pub use noise::{sample_noise, NoiseRealization, NoiseSource};
pub use path::Path;
pub use solver::{solve, FieldState, Mode, SolveOptions, Trajectory};
