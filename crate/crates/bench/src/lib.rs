//! Criterion benchmarks for the transform and pipeline hot paths; see `benches/`.
