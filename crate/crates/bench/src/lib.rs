//! Criterion benchmarks for `normcoh`; the benchmarks live in `benches/`.
