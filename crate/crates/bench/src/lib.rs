//! Criterion benchmarks for `dehn-core`; see `benches/`.
