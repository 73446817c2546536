//! Analysis of finitely sampled multivalued operators on `Rⁿ`.
//!
//! [`classify`] decides whether a sampled graph is monotone, bimonotone,
//! paramonotone or constant on its domain. For bimonotone graphs,
//! [`decompose`] recovers the representation `Qᵀx* = ÂQᵀx + v̂*` with `Â`
//! skew-symmetric on the span of the (translated) domain. [`generate`]
//! builds seeded fixtures with a known answer.

pub mod classify;
pub mod cli;
pub mod decompose;
pub mod generate;
pub mod graph;
pub mod io;
pub mod rng;
pub mod tolerance;

pub use classify::{
    bimonotone_check, constant_on_domain_check, monotone_check, paramonotone_check, skew_form_check,
    ClassificationReport, ClassifyError, Paramonotonicity,
};
pub use decompose::{
    build_skew_operator, decompose, reduce, single_valued_check, span_basis, verify_reconstruction, DecomposeError,
    DecomposeOptions, OrthonormalBasis, ReducedGraph, ResidualReport, SkewDecomposition,
};
pub use generate::{make_fixture, perturb, random_skew, Fixture, FixtureSpec, PerturbDirection};
pub use graph::{inverse_graph, GraphError, GraphPoint, OperatorGraph};
pub use io::{load_graph, save_graph, GraphFormat, IoError};
pub use tolerance::ToleranceConfig;
