//! Exact-arithmetic chain-level toolkit for rigid and syntomic cohomology
//! computations over the rationals.
//!
//! Everything here is computed exactly: matrices over arbitrary-precision
//! rationals, bounded cochain complexes, cones and homotopy limits of fence
//! diagrams, cosimplicial machinery (simple complex, normalization,
//! Alexander-Whitney products), polynomial differential forms on standard
//! simplices with exact integration, Thom-Sullivan normalization, Godement
//! resolutions over finite poset sites, Frobenius-equipped complexes with
//! their absolute-rigid cones, syntomic assembly (cone, zigzag homotopy
//! limit, localization, hypercovers), and a checker for graded-monoid ring
//! axioms on finite data models.
//!
//! All operations are deterministic: identical inputs produce identical
//! outputs, bit for bit. No floating point anywhere.

pub mod complex;
pub mod cosimplicial;
pub mod double;
pub mod error;
pub mod fence;
pub mod fisoc;
pub mod forms;
pub mod gen;
pub mod godement;
pub mod linalg;
pub mod matrix;
pub mod report;
pub mod ring_axioms;
pub mod scalar;
pub mod suites;
pub mod syntomic;
pub mod ts;

pub use error::Error;
pub use matrix::Matrix;
pub use scalar::Scalar;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
