//! Benchmarks for slopekit live under `benches/`.
