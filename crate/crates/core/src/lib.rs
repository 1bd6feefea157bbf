//! Wall-crossing identities for BPS structures of quadratic differentials.
//!
//! The crate has three layers:
//!
//! * exact algebra: a charge lattice with a skew pairing ([`lattice`]),
//!   truncated rational series over its positive cone ([`series`]), and
//!   substitution automorphisms of the torus ([`torusmap`]);
//! * identities: BPS structures with their ray factors, sector products and
//!   cluster transition maps ([`wallcrossing`]), the surface combinatorics
//!   behind exchange matrices and flips ([`surface`]), and the refined
//!   quantum-torus version with its classical limit ([`quantum`]);
//! * measurement: a numerical scanner extracting saddle data, periods, WKB
//!   triangulations and BPS counts from polynomial differentials
//!   ([`scanner`]).

pub mod conventions;
pub mod lattice;
pub mod matrix;
pub mod quantum;
pub mod scanner;
pub mod series;
pub mod surface;
pub mod torusmap;
pub mod wallcrossing;

pub use lattice::{CentralCharge, ClassLattice, ClassVector, QuadraticRefinement, Ray};
pub use series::ConeSeries;
pub use surface::{ExchangeMatrix, MarkedBorderedSurface, TaggedTriangulation};
pub use torusmap::BirationalTorusMap;
pub use wallcrossing::{BpsStructure, SectorSpec};
