//! Exact decision procedures for ergodicity and distality of finitely
//! generated commuting automorphism groups of compact abelian groups:
//! tori `T^r`, solenoids dual to `Q^r`, and duals of cyclic Laurent
//! polynomial modules `F_p[u1^±1, .., ud^±1] / (g)`.
//!
//! Every decision is made on the dual side, where a group acts ergodically
//! iff every nonzero character has an infinite orbit. Verdicts carry
//! certificates that can be replayed with the [`exact`] layer alone, and
//! the [`oracle`] module enumerates dual orbits by brute force to
//! cross-check the analytic engines.

pub mod action;
pub mod exact;
pub mod laurent_engine;
pub mod oracle;
pub mod toral;

mod error;

pub use error::{ExactError, ExactResult};
