//! Exact solvers and verification tools for promise valued constraint
//! satisfaction problems over finite templates.
//!
//! * [`arith`], [`structure`], [`measure`], [`oracle`]: exact values, valued
//!   structures, instances, measures, and brute-force ground truth.
//! * [`exactlp`]: rational simplex and relative-interior points.
//! * [`lattice`]: Hermite normal form and affine integer programs.
//! * [`relax`]: the BLP and AIP relaxations and the decision procedures.
//! * [`theory`]: fractional homomorphisms and polymorphisms, multiset
//!   structures, and witness searches.
//! * [`format`], [`gen`], [`compare`]: file formats, seeded generators and the
//!   differential harness behind the `pvcsp` binary.

pub mod arith;
pub mod compare;
pub mod error;
pub mod exactlp;
pub mod format;
pub mod gen;
pub mod guard;
pub mod lattice;
pub mod measure;
pub mod oracle;
pub mod relax;
pub mod structure;
pub mod theory;

pub use arith::{ExtendedRational, ExtendedValue, Rational};
pub use error::{Error, Result};
pub use structure::{Instance, PromiseTemplate, Signature, Term, ValuedStructure};
