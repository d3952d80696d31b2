//! Property checks shared by the proptest suites and the acceptance gate.
//!
//! Each check takes plain parameters and returns `Err` with a description of
//! the first violated bound. [`suites`] wires them to seeded proptest runners.

pub mod checks;
pub mod suites;

pub use checks::Check;
