//! Finite cylindric set algebras built from colored blocked models, their
//! quantifier-free interpretation into products of relativized Boolean
//! algebras, bounded-rank elementary equivalence, and bounded searches for
//! neat-reduct witnesses.

pub mod abstract_ca;
pub mod axioms;
pub mod elementarity;
pub mod error;
pub mod interpretation;
pub mod json;
pub mod neat;
pub mod region;
pub mod setca;
pub mod witness;

pub use abstract_ca::AbstractCA;
pub use axioms::{check_ca_axioms, check_set_algebra, Axiom, AxiomReport, CylindricOps};
pub use error::{Error, Result};
pub use region::{cylindrify, diagonal, full_space, Base, Region};
pub use setca::{generate_subalgebra, generate_subalgebra_capped, neat_reduct, relativize, SetCA, DEFAULT_CARRIER_CAP};
pub use elementarity::{ef_winner, replay, GameCertificate, RelStructure, Winner};
pub use interpretation::{verify_interpretation, ProductBA, ProductElem};
pub use neat::{dilation_search, dilation_search_with_hints, dilation_witness_defect, verify_dilation_witness, DilationWitness, NeatOutcome};
