//! Criterion benchmarks for the search engine and the structure finders;
//! see `benches/`.
