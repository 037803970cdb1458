//! Capillary Schwarz symmetrization in the half-space, at desk scale.
//!
//! The crate evaluates the capillary gauge and its dual in closed form,
//! measures grid-discretized regions (volume, relative perimeter, wetting
//! area, anisotropic perimeter), rearranges non-positive fields into their
//! convex/capillary symmetrizations, and verifies the inequalities tying
//! these together: the relative isoperimetric inequality, the
//! Polya-Szego principle, the sharp Sobolev inequality with its explicit
//! extremals, and the Talenti-type comparison for mixed Dirichlet/Neumann
//! problems.
//!
//! Everything is deterministic: random corpora are seeded, solvers use
//! fixed schedules, and parallel reductions run in a fixed order.

pub mod cone;
pub mod corpus;
pub mod energy;
pub mod error;
pub mod gauge;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod pde;
pub mod quadrature;
pub mod rearrange;
pub mod sublevel;
pub mod suite;

pub use cone::{ConeKind, ConeSpec};
pub use error::{Error, Result};
pub use gauge::{GaugeKind, GaugeSpec, SectorConstants, VolumeMethod};
pub use grid::{GridSpec, RegionSpec, ScalarField};
