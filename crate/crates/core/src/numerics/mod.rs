//! Arbitrary-precision scalars and the precision-escalation protocol.
//!
//! Every high-precision quantity in the crate is a [`BigReal`]: an MPFR float
//! tagged with the decimal precision it was computed at. Near the singular
//! velocities the self-force is a small difference of huge terms, so a result
//! is only trusted once it survives [`escalate`]: recomputation at growing
//! precision until two successive rungs agree.

mod bigreal;
mod ladder;
mod sum;
mod vector;

pub use bigreal::{bits_for_digits, BigReal, MIN_DIGITS};
pub use ladder::{escalate, escalate_with, Escalation, PrecisionPolicy};
pub use sum::{CompensatedSum, CompensatedVecSum};
pub use vector::Vec3;
