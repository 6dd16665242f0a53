//! Desk-scale numerics for stable systolic inequalities.
//!
//! The crate is split along the objects that appear in the inequality chain:
//!
//! - [`exterior`]: constant-coefficient forms on `R^m`, wedge and Hodge star,
//!   comass and mass norms, and the wedge-comass bound `n!`.
//! - [`normspace`]: norms on `R^b`, their duals, and John ellipsoids in the plane.
//! - [`lattice`]: dual lattices, exhaustive enumeration and successive minima.
//! - [`torus`]: stable 2-systoles of flat tori `T^{2n}` and the full bound chain.
//!
//! Every random experiment draws from [`rng::stream`], so results are a pure
//! function of `(seed, sample index)`.

pub mod error;
pub mod exterior;
pub mod lattice;
pub mod normspace;
pub mod rng;
pub mod tolerances;
pub mod torus;

pub use error::{Error, Result};
pub use exterior::{ComassResult, KForm};
pub use lattice::{Lattice, MinimaResult};
pub use normspace::{JohnResult, NormSpec};
pub use torus::{FlatTorus, SystoleReport};
