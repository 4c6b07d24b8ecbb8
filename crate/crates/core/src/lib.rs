//! Exact recognition of discrete subgroups of PSL₂(ℝ) defined over ℚ or a
//! real quadratic field.
//!
//! The crate decides whether a finitely generated group is discrete (and
//! torsion-free) by reducing its generating set until either a certificate
//! of discreteness or a witness of indiscreteness appears. Reduced sets then
//! answer constructive membership queries and describe Dirichlet domains.
//!
//! ```
//! use hypdisc::{FieldSpec, GroupElement, reduction::{recognize_torsion_free, Certificate}};
//!
//! let q = FieldSpec::RATIONALS;
//! let a = GroupElement::from_ints(q, [[1, 2], [0, 1]]).unwrap();
//! let b = GroupElement::from_ints(q, [[1, 0], [2, 1]]).unwrap();
//! let cert = recognize_torsion_free(&[a, b]).unwrap();
//! assert!(matches!(cert, Certificate::DiscreteTorsionFree { .. }));
//! ```

pub mod bench;
pub mod bounds;
pub mod domain;
pub mod error;
pub mod finiteindex;
pub mod hyperbolic;
pub mod membership;
pub mod moebius;
pub mod numberfield;
pub mod reduction;

#[cfg(doctest)]
mod book;

pub use error::{Error, Result};
pub use moebius::{GroupElement, IsometryClass, Letter, ProjectiveElement, Word};
pub use numberfield::{FieldElement, FieldSpec, Rational};
