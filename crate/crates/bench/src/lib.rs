//! Benchmarks for `msl-core`; see `benches/`.
