//! Numerical laboratory for an integrable chiral model in 2+1 dimensions:
//! exact soliton constructors, field-equation and first-order residuals, the
//! spectral-parameter zero-curvature family, line-transport monodromy,
//! topological charge, far-field asymptotics, and an initial-value evolver.
//!
//! The public surface is organized by diagnostic:
//!
//! - [`field`]: grids, matrix fields, analytic and sampled sources, currents
//! - [`dynamics`]: field-equation residual, energy, leapfrog evolution
//! - [`gauge`]: the standard-gauge dictionary, first-order and
//!   zero-curvature residuals, the fibrewise del-bar operator
//! - [`monodromy`]: transport along the line family, sweeps, frame fields,
//!   Radon diagnostics for U(1) data
//! - [`solitons`]: one-pole constructors and the topological charge
//! - [`asymptotics`]: far-field exponents and the J1 profile
//! - [`io`]: WDF1 snapshots and trajectory indexes
//!
//! Sign and branch conventions are frozen in docs/conventions.md at the
//! repository root.

pub mod analytic;
pub mod asymptotics;
pub mod cmatrix;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod gauge;
pub mod grid;
pub mod io;
pub mod monodromy;
pub mod report;
pub mod scheme;
pub mod solitons;

#[cfg(test)]
pub(crate) mod testutil;

pub use cmatrix::{polar_unitary, C64, CMatrix};
pub use error::{Error, Result};
pub use field::{
    currents, unitarize, AnalyticField, CurrentSet, FieldJet, FieldSource, InterpOrder, MatrixField,
    PointCurrents, SampledField,
};
pub use grid::GridSpec;
pub use report::{EnergyReport, ResidualReport};
pub use scheme::Scheme;
