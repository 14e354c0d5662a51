//! Numerical toolkit for Gaussian phase-space geometry.
//!
//! The crate is organised bottom-up:
//!
//! * [`symplectic`]: the standard form `J`, symplectic checks and sampling,
//!   Williamson diagonalization, symplectic spectrum and capacity.
//! * [`gaussian`]: mixed and pure Gaussian states, Wigner matrices,
//!   Robertson–Schrödinger reports and the quantum condition.
//! * [`purification`]: extraction of the inscribed quantum blob of a
//!   covariance ellipsoid and the pure state it determines.
//! * [`gromov`]: sections of linear symplectic balls by planes.
//! * [`fixtures`]: seeded generators of test inputs (random SPD matrices,
//!   partially saturated covariance matrices).
//!
//! Phase-space coordinates are always ordered `z = (x_1..x_n, p_1..p_n)`.

pub mod error;
pub mod fixtures;
pub mod gaussian;
pub mod gromov;
pub mod linalg;
pub mod purification;
pub mod rng;
pub mod symplectic;
pub mod tolerance;

pub use error::{Error, Result};
pub use gaussian::{GaussianMixedState, PureGaussian, RsReport, WignerGaussian};
pub use purification::{PurificationResult, QuantumBlob};
pub use symplectic::{PhaseDim, SymplecticMatrix, SymplecticSpectrum, WilliamsonDecomposition};
pub use tolerance::Tolerances;
