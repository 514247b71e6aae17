//! Exact combinatorics of the group generated by GL₂(Z) and the cluster
//! transformation E acting on P² and on log Calabi–Yau surfaces with explicit
//! toric models.
//!
//! Modules, bottom up:
//! - [`lattice`]: Z² vectors, unimodular matrices, piecewise-linear maps.
//! - [`polyrat`]: exact bivariate polynomials and rational functions over Q.
//! - [`birmap`]: words in the generators, their birational realizations,
//!   volume character, tropicalization and boundary limits.
//! - [`cy2`]: surfaces (fan + blow-up multiplicities), intersection numbers,
//!   pushforward along words and resolution of indeterminacy.
//! - [`atf`]: almost-toric base diagrams, nodal slides and cut transfers.
//! - [`hmsbook`]: exceptional collection / vanishing cycle bookkeeping.

pub mod atf;
pub mod birmap;
pub mod cy2;
pub mod hmsbook;
pub mod lattice;
pub mod polyrat;

pub use atf::{BaseDiagram, Node};
pub use birmap::{BirationalMap, Generator, Letter, Word};
pub use cy2::{Fan, Surface};
pub use lattice::{complement_matrix, LatticeVector, PLMap, UnimodularMatrix};
pub use polyrat::{Poly2, RatFunc2};
