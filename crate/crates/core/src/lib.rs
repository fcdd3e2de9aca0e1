//! Supercritical oriented percolation on the even lattice.

mod band;
pub mod env;
pub mod error;
pub mod experiments;
pub mod genealogy;
pub mod kuczek;
pub mod lattice;
pub mod paths;
pub mod reach;
pub mod rows;
pub mod stats;

pub use env::{EdgeConfig, Environment, ExplicitConfig};
pub use error::{Error, Result};
pub use lattice::{Direction, EdgeRef, Side, Vertex, Window};
