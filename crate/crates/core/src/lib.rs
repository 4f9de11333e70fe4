//! Machine certification of anisotropic maximal tori and characters in
//! general position for the classical finite groups of Lie type.
//!
//! The pipeline for one case `(family, rank, q)`:
//!
//! 1. [`torus::build_family`] fixes the character lattice and the Frobenius
//!    action of the quasi-split form.
//! 2. [`torus::twist`] twists by a Weyl element `w`.
//! 3. [`genpos::rational_weyl_group`] computes the twisted centralizer of `w`.
//! 4. [`genpos::is_general_position`] checks that a witness character has
//!    trivial stabilizer, with [`genpos::orbit_oracle`] as an independent
//!    cross-check.
//!
//! [`caselib`] holds the witness table and assembles [`caselib::Certificate`]s.

#![allow(clippy::needless_range_loop)]

pub mod caselib;
pub mod error;
pub mod genpos;
pub mod intlinalg;
pub mod report;
pub mod torus;
pub mod weyl;

pub use caselib::{certify_case, certify_range, paper_witness, Certificate, TwistChoice};
pub use error::{Error, Result};
pub use genpos::{is_general_position, orbit_oracle, rational_weyl_group, RationalWeylAction};
pub use intlinalg::{IntMatrix, Lattice, SmithDecomposition};
pub use torus::{build_family, twist, Family, FamilySpec, TwistedTorus};
pub use weyl::{SignedPermutation, WeylGroup, WeylType};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
