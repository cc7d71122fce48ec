//! Criterion benchmarks for `twophase-core`; see `benches/`.
