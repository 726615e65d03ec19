//! CLI frontend for the switchmax solver: argument parsing, seeded
//! instance generation, and the benchmark harness.

pub mod app;
pub mod bench;
pub mod gen;
pub mod rng;
