//! Criterion benchmarks for the attention pipeline; see `benches/`.
