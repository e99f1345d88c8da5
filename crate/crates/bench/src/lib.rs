//! Criterion benchmarks for `cox-core`; see `benches/`.
