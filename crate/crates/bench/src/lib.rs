//! Criterion benchmarks for the nilcorr kernels; see `benches/kernels.rs`.
