//! Criterion benchmarks for matfrechet; see `benches/`.
