//! Benchmarks for the `crnreal` solver; see `benches/`.
