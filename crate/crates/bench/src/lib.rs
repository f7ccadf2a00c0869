//! Criterion benchmarks for the squeezing pipeline; see `benches/pipeline.rs`.
