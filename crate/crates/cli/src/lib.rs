//! Command-line front end for the `nestrix` library: reproduction and
//! comparison commands, property suites and machine-readable reports.

pub mod commands;
pub mod error;
pub mod report;
pub mod scenario;
pub mod suites;
