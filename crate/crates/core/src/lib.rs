//! Homomorphism testing over finite groups under online erasure and
//! corruption adversaries.
//!
//! The crate is split bottom-up:
//!
//! * [`group`]: concrete finite groups, signed sums, closures, partial sums;
//! * [`function`]: functions between groups, homomorphism enumeration, exact
//!   distances and instance generators;
//! * [`oracle`]: the online query channel and adversary strategies;
//! * [`testers`]: the testers and the two top-level dispatchers;
//! * [`analysis`]: exact enumerations, the plurality corrector, flatness
//!   probes and closed-form helpers;
//! * [`harness`]: reproducible Monte-Carlo experiments.

pub mod analysis;
pub mod epsilon;
mod error;
pub mod function;
pub mod group;
pub mod harness;
pub mod oracle;
pub mod rng;
pub mod testers;

pub use epsilon::Epsilon;
pub use error::{Error, Result};
pub use group::{GroupElement, GroupSpec};
