//! Benchmark-only crate; see `benches/steppers.rs`.
