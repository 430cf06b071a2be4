//! Degeneracy of dispersion relations for Z^n-periodic weighted graphs.
//!
//! Three independent routes are provided: Gröbner-basis certificates over Q
//! and prime fields, Bernstein mixed-volume bounds on Newton polytopes, and
//! numerical band analysis on the Brillouin zone. The [`sweep`] module runs
//! the exact test over every edge subset of a graph.

pub mod graph;
pub mod groebner;
pub mod poly;
pub mod symbol;
pub mod critical;
pub mod polytope;
pub mod bands;
pub mod sweep;

pub use bands::{BandGrid, BandModel, BandOptions, CriticalReport, SpectralSummary};
pub use critical::{
    build_system, degeneracy_test, DegeneracyVerdict, DispersionSystem, FieldChoice, SampleReport, Status,
};
pub use graph::{builtin, graphene, mother, EdgeClass, GraphSpec, PeriodicGraph};
pub use groebner::{GroebnerOptions, QuotientDim};
pub use poly::{FieldTag, Poly, Rationals, Vars};
pub use polytope::{LatticePolytope, Point};
pub use sweep::{run_sweep, SweepOptions, SweepResult};
pub use symbol::{build_symbol, ClearedSymbol, Convention, SymbolMatrix};
