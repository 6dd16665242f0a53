//! Tolerances shared by the checks and reported alongside every suite.

/// Relative slack for inequalities whose two sides are computed in closed form.
pub const BOUND_REL: f64 = 1e-9;

/// Slack for the sampled two-dimensional gamma search against `3/2`.
pub const SPEYER_ABS: f64 = 1e-6;

/// Agreement between two optimizer outputs (numeric comass on both sides).
pub const OPTIMIZER_REL: f64 = 1e-4;

/// Involution and reconstruction identities.
pub const IDENTITY_ABS: f64 = 1e-12;

/// Orthogonality of the canonical-form change of basis.
pub const ORTHOGONALITY_ABS: f64 = 1e-10;

/// Pullback of a 2-form to its block form.
pub const CANONICAL_ABS: f64 = 1e-9;

/// John-ellipsoid sandwich checks on sampled directions.
pub const SANDWICH_ABS: f64 = 1e-6;

/// Stopping tolerance of the John-ellipsoid solver.
pub const JOHN_TOL: f64 = 1e-10;

/// Lattice points and minima.
pub const MINIMA_ABS: f64 = 1e-9;

/// `|det|` below which a basis counts as singular.
pub const SINGULAR_DET: f64 = 1e-12;

/// Hard cap on points produced by a single enumeration.
pub const ENUMERATION_CAP: usize = 10_000_000;
