//! Exact deviations and perturbation bounds for orthogonal projectors.
//!
//! Given a matrix `A` and a perturbed matrix `B` of the same shape, this
//! crate computes the squared Frobenius deviations
//!
//! ```text
//! primal = ||P_B - P_A||_F^2        (column spaces)
//! dual   = ||P_{B*} - P_{A*}||_F^2  (row spaces)
//! ```
//!
//! and evaluates a catalog of upper, lower and combined bounds on them, each
//! expressed through `E = B - A` and `E~ = B^+ - A^+`. Every bound comes back
//! as a [`BoundRecord`](bounds::BoundRecord) that can be checked against the
//! exact values.
//!
//! ```
//! use projbound::{linalg::ComplexMatrix, pair::PerturbationPair, bounds, identities};
//!
//! let a = ComplexMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]])?;
//! let b = ComplexMatrix::from_rows(&[&[0.5, 1.0], &[0.0, 1.0]])?;
//! let pair = PerturbationPair::new(a, b)?;
//!
//! let exact = identities::deviation_exact(&pair);
//! for record in bounds::classical_bounds(&pair) {
//!     assert!(!record.applicable || record.holds(&exact, 1e-9));
//! }
//! # Ok::<(), projbound::Error>(())
//! ```

pub mod bounds;
mod error;
pub mod experiments;
pub mod identities;
pub mod linalg;
pub mod matrix_file;
pub mod pair;

pub use error::{Error, Result};
