//! Numerical workbench for Lefschetz-type fixed-point formulas: exterior
//! algebra, local fixed-point densities with brute-force oracles, Clifford
//! traces, and exact or spectral checks on flat and complex tori.

pub mod error;
pub mod exterior;
pub mod geometry;
pub mod invariants;
pub mod lattice;
pub mod linalg;
pub mod parametrix;
pub mod report;
pub mod sampling;
pub mod shells;
pub mod spin;
pub mod torus;

pub use error::{Error, Result};
pub use exterior::{ComplexFrame, ExteriorElement, ProductSplit, C64};
