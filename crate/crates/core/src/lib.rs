//! Numerical laboratory for non-Hermitian random matrix ensembles and their
//! eigenvector overlap statistics.
//!
//! The crate samples three matrix ensembles (complex Ginibre, spherical,
//! truncated unitary), computes left/right eigenvector overlap matrices, and
//! checks closed-form predictions for the overlaps against Monte Carlo:
//! quenched (fixed-spectrum) expectations, product-of-independent-factors
//! decompositions, radial eigenvalue identities, and the heavy-tail limit law
//! of the scaled diagonal overlap at the origin.
//!
//! Layout:
//! - [`linalg`]: dense complex matrices, QR, Schur decomposition, solves.
//! - [`distributions`]: seeded RNG streams and the scalar/vector laws used by
//!   the conditional samplers.
//! - [`stats`]: mergeable moment accumulators and Kolmogorov-Smirnov tests.
//! - [`ensembles`]: direct matrix samplers, radial reference samplers,
//!   stereographic projection.
//! - [`overlaps`]: overlap matrices and the triangular recurrence.
//! - [`conditional`]: Schur sampling conditioned on a prescribed spectrum and
//!   the factor-product samplers it is tested against.
//! - [`formulas`]: closed-form evaluators for the quenched expectations and
//!   the limit-law CDF.
//! - [`experiments`]: the named verification suites behind `verify`.

pub mod conditional;
pub mod distributions;
pub mod ensembles;
mod error;
pub mod experiments;
pub mod formulas;
pub mod linalg;
pub mod overlaps;
pub mod stats;

pub use error::{Error, Result};
