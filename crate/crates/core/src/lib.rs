//! Self-force on a classical charge in circular superluminal motion, and
//! the kinematics of tachyons crossing potential barriers.
//!
//! Units throughout: orbit radius, `c` and the charge are one unless a
//! function says otherwise. High-precision quantities are [`BigReal`]s.

pub mod error;
pub mod numerics;
pub mod fields;
pub mod nullcone;
pub mod scan;
pub mod selfforce;
pub mod tunnel;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::{BigReal, PrecisionPolicy};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
pub mod book_introduction {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/precision.md")]
pub mod book_precision {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/null-cone.md")]
pub mod book_null_cone {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/fields.md")]
pub mod book_fields {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/self-force.md")]
pub mod book_self_force {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/scans.md")]
pub mod book_scans {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/tunneling.md")]
pub mod book_tunneling {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
pub mod book_cli {}
