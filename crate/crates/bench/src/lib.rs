//! Criterion benchmarks for the cover search and the certified prime finder; see `benches/`.
