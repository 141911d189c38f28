//! Command line front end for `bonse-core`: checkpoint files, report
//! formats and the verification suites.

pub mod checkpoint;
pub mod cli;
pub mod conjecture;
pub mod driver;
pub mod lemmas;
pub mod report;
