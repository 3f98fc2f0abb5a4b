//! Criterion benchmarks for contraction planning and poset queries; see `benches/`.
