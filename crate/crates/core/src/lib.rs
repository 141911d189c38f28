//! Certified evaluation of the error term
//!
//! ```text
//! E_n(x) = ϑ(p_n) − (n − π(n) + π(n)/π(log n) − x π(π(n))) log p_{n+1}
//! ```
//!
//! and of the threshold `Ψ(x)` past which it stays positive.
//!
//! The crate is `no_std` with `alloc`. Everything that touches files,
//! clocks or the command line lives in `bonse-lab`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod certified;
pub mod counters;
pub mod error;
pub mod error_term;
pub mod hp;
pub mod rational;
pub mod scan;
pub mod sieve;

pub use bounds::EffectiveConstants;
pub use certified::{CertifiedReal, Sign, ThetaAccumulator};
pub use counters::PrimeCounts;
pub use error::{Error, Result};
pub use error_term::AlphaRecord;
pub use rational::Rational;
