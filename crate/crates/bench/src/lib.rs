//! Criterion benchmarks of the `cxheat-core` kernels; run `cargo bench -p cxheat-bench`.
