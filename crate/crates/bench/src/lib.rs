//! Criterion benchmarks for the `dostbc` crate; see `benches/`.
