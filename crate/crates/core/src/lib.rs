//! Finite relation-algebra atom structures.
//!
//! Atom structures come in two signatures: the `{f, T, I}` form
//! ([`AtomStructure`]) and the symmetric-integral `{f, e, T}` form
//! ([`EStructure`]). Both store their ternary relation as an `n³`-slot
//! bit-vector indexed by `a·n² + b·n + c`.
//!
//! The crate covers the Peircean cycle machinery, axiom checking,
//! isomorphism and canonical forms, complex algebras, exhaustive
//! enumeration and exact counting, uniform samplers, a small first-order
//! language with extension axioms, and free amalgamation.

pub mod algebra;
pub mod axioms;
pub mod config;
pub mod cycle;
pub mod enumerate;
mod error;
pub mod fol;
pub mod fraisse;
pub mod iso;
pub mod json;
pub mod oracle;
pub mod predicate;
pub mod probability;
pub mod rng;
pub mod structure;
pub mod triple;

pub use algebra::{ComplexAlgebra, NAReport};
pub use axioms::{check_axioms, AxiomReport, Witness};
pub use config::Guards;
pub use cycle::{cycle_of, Cycle, CycleKind, CycleTable, IdentityData, SizeCensus};
pub use enumerate::{Class, CountMethod, CountReport, CycleCensus};
pub use predicate::Predicate;
pub use error::{Error, Result};
pub use fol::{ExtensionAxiom, Sentence, Signature};
pub use fraisse::{Embedding, Homogeneity};
pub use probability::{EstimateOptions, Mode, ProbabilityEstimate};
pub use structure::{convert_from_e_form, convert_to_e_form, AtomStructure, EStructure, Model};
pub use triple::{Triple, TripleSet};
