//! Brute-force oracles, random corpora and the benchmark harness.

pub mod bench;
pub mod gen;
pub mod oracle;
