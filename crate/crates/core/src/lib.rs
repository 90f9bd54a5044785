//! Exact combinatorics behind the expansion of products of Lie derivatives.
//!
//! The crate enumerates the discrete structures that index the expansion
//! (Dyck vectors, compositions, set partitions, strictly decreasing forests)
//! and computes every coefficient two ways: once through a closed formula and
//! once by brute-force enumeration. All arithmetic is exact.
//!
//! Modules, bottom-up:
//!
//! * [`dyck`]: Dyck vectors, deficits, the coefficient `C_P` and the lattice
//!   path encoding.
//! * [`compositions`]: compositions, pull-back coefficients `C_λ` and the
//!   derivation operator on formal sums of compositions.
//! * [`partitions`]: set partitions in normal ordering, shapes, shrinking and
//!   the bijection with paths in the composition graph.
//! * [`forests`]: strictly decreasing labeled forests, grafting, pruning,
//!   forest monomials and fibers.
//! * [`polynomial`]: sparse integer polynomials in `B, X_1..X_k`.
//! * [`operator`]: formal operator expansions indexed by partitions and
//!   forests, the left-multiplication oracle, Leibniz splittings and the
//!   estimate certificate.
//! * [`verify`]: the property suites used by the command-line `verify`.

pub mod arith;
pub mod compositions;
pub mod dyck;
mod error;
pub mod forests;
pub mod operator;
pub mod partitions;
pub mod polynomial;
pub mod verify;

pub use compositions::{Composition, CompositionSum};
pub use dyck::{DyckPath, DyckVector, Step};
pub use error::{Error, Result};
pub use forests::{Forest, Label, Monomial};
pub use operator::{CertificateRow, OperatorSum};
pub use partitions::SetPartition;
pub use polynomial::{MultiPolynomial, PolyComparison, Term};
