//! Coined discrete-time quantum walks on a ring with quantum-chaotic coins.
//!
//! The walk is evolved exactly in its momentum-sector decomposition
//! ([`walk`]), with coins built by [`coin`]. [`observables`] holds the
//! derived quantities and the analytic reference curves, [`classical`] the
//! classical random-walk oracle, and [`runner`] the declarative experiment
//! driver behind the `chaoswalk` binary.

pub mod classical;
pub mod coin;
pub mod error;
pub mod matkernel;
pub mod observables;
pub mod par;
pub mod runner;
pub mod walk;

pub use error::{Error, Result};
