//! Spectral Galerkin truncation of the 1+1 dimensional nonlinear
//! Klein-Gordon equation with Dirichlet boundaries and a Mexican-hat
//! potential.
//!
//! Everything is expressed in dimensionless variables: `xi = pi x / ell`,
//! `tau = pi t / ell`, field `u = sqrt(ell) phi / a` and the single coupling
//! `lambda`. Numerical code is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

pub mod critical;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod num;
pub mod params;
pub mod residual;
pub mod spectral;
pub mod stationary;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use num::Real;

pub type PhysicalParams = params::PhysicalParams<f64>;
pub type DimensionlessParams = params::DimensionlessParams<f64>;
pub type EllipticModulus = elliptic::EllipticModulus<f64>;
pub type ModeCoefficients = spectral::ModeCoefficients<f64>;
pub type GridFunction = spectral::GridFunction<f64>;
pub type CouplingTable = spectral::CouplingTable<f64>;
pub type StationaryBranch = stationary::StationaryBranch<f64>;
pub type StationarySolution = stationary::StationarySolution<f64>;
pub type StateVector = dynamics::StateVector<f64>;
pub type Trajectory = dynamics::Trajectory<f64>;
pub type TruncatedSystem = dynamics::TruncatedSystem<f64>;
pub type ResidualReport = residual::ResidualReport<f64>;
pub type CriticalPoint = critical::CriticalPoint<f64>;
pub type CriticalSet = critical::CriticalSet<f64>;
pub type Landscape = critical::Landscape<f64>;
