//! Argument parsing, benchmark records and the experiment runner behind the
//! `matfrechet` binary.

pub mod experiments;
pub mod inputs;
pub mod record;
