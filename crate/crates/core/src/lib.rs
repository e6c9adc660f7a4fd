//! Exact dimensions of subspace products `⟨AB⟩` in finite field extensions
//! `F_p ⊂ F_{p^n}`, the κ bound, stabilizer subfields, explicit optimal pairs,
//! and brute-force searches over subspaces and over subsets of finite groups.

pub mod error;
pub mod field;
pub mod kappa;
pub mod linalg;
pub mod product;
pub mod search;

pub use error::{Error, Result};
pub use field::{ExtensionField, FieldElement, FieldSpec};
pub use kappa::{AdmissibleDegreeSet, KappaQuery, KappaResult};
pub use linalg::Subspace;
