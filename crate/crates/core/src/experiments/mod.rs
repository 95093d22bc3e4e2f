//! Random pairs, the diagonal-example sweeps, and tightness benchmarks.
//!
//! Random generation is reproducible: sample `i` of a spec with seed `s`
//! uses a ChaCha8 generator seeded from `s` on stream `i`, so parallel and
//! serial runs draw identical matrices.

mod bench;
mod ensemble;
mod suites;
mod sweep;

pub use bench::{relative_gap, tightness_benchmark, BenchReport, GapStats, Violation, WinRate, TIE_TOL};
pub use ensemble::{
    gaussian_matrix, gen_matrices, gen_pair, gen_pair_at, haar_unitary, sample_rng, EnsembleSpec, SvProfile,
};
pub use suites::{
    equal_rank_suite_pair, equal_rank_suite_spec, hermitian_suite_pair, mixed_suite_pair, mixed_suite_spec,
    random_hermitian, NEAR_DEFICIENT_SIGMA, SUITE_MAX_SHAPE,
};
pub use sweep::{
    combined_targets, default_epsilon_grid, example_41_pair, example_41_references, example_41_sweep, example_42_pair,
    example_42_references, example_42_sweep, intro_examples, intro_pair, linspace, parse_grid, Check, Reference,
    SweepMetadata, SweepReport, SweepRow, DEFAULT_GRID_POINTS,
};
