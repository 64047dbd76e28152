//! Library surface of the benchmark CLI: experiment configuration, the run
//! and sweep engines, theorem verification, and SVG plotting. The binary in
//! `main.rs` is a thin shell over these.

pub mod config;
pub mod plot;
pub mod runner;
pub mod sweep;
pub mod verifycmd;
