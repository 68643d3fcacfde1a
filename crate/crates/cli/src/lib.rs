//! Support code for the `lucasian` command-line tool.

pub mod checkpoint;
pub mod record;
pub mod scan;
