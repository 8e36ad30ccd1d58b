//! Benchmarks for the solvers live in `benches/`; this crate exports nothing.
