//! Criterion benchmarks for the `fracbal` crate; see `benches/core.rs`.
