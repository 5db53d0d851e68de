//! Exact symbolic computation of Cech cocycle invariants of vector bundles.
//!
//! A bundle is presented combinatorially: an ordered cover with rational
//! coordinate changes between charts, and a transition cocycle `{g_ij}` of
//! invertible matrices whose entries are rational functions over an exact
//! coefficient field (the rationals or a prime field `F_p`). From that data
//! the crate evaluates the permutation-sum trace cocycles `t_{i_1..i_{k+1}}`
//! of degree `k`, assembles them into Cech cochains, and machine-verifies
//! the algebraic identities they satisfy: antisymmetry in the tuple indices,
//! closedness under the coboundary operator, gauge independence up to an
//! explicitly constructed coboundary witness, the line-bundle collapse to
//! wedge products of `dlog g`, flag additivity, and d-closedness of the
//! refined variants.
//!
//! Everything is exact: rational functions are kept in canonical reduced
//! form, so every identity check is a decidable equality in the fraction
//! field. There is no floating point anywhere.
//!
//! The usual entry points are [`eval`] (ready-made presentations such as
//! `O(d)` on the two-chart projective line), [`invariants`] (the cocycle
//! formulas), and [`geometry`] (loading presentations from JSON files).
//! Runnable demonstrations live in the crate's `examples/` directory, and
//! the `tcech` binary exposes the same operations as subcommands.

pub mod cech;
pub mod error;
pub mod eval;
pub mod field;
pub mod forms;
pub mod geometry;
pub mod invariants;
pub mod matrix;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod report;
pub mod synth;

pub use error::{Error, Result};
pub use field::{FieldId, Scalar};
pub use forms::DifferentialForm;
pub use geometry::{BundlePresentation, Chart, CoordinateChange, Cover, GaugeTransformation};
pub use matrix::{FormMatrix, FuncMatrix};
pub use poly::{Polynomial, VarSet};
pub use ratfunc::RationalFunction;
