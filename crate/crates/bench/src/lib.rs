//! Benchmarks for the depth-forge engines live in `benches/`.
