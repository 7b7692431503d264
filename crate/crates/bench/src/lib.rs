//! Criterion benchmarks for the hot kernels: brute-force densities, dual
//! lattice mode sums and Smith normal form. Run with `cargo bench -p lefschetz-bench`.
