//! Stair-convexity machinery for bounding how many simplices spanned by the
//! stretched grid and the stretched diagonal a single line can stab.
//!
//! * [`stair`]: stair-paths, point types, hull membership and hull intersection.
//! * [`grid`]: the stretched-grid stabbing measure, stair-path types and
//!   per-type objectives.
//! * [`diagonal`]: the stretched-diagonal measure, the explicit long path and
//!   the dimension-3 objective catalog.
//! * [`optimize`]: seeded box-constrained global maximizers.
//! * [`transfer`]: explicit stretched point sets with exact integer
//!   coordinates, an exact convex stabbing oracle, exhaustive censuses and
//!   Monte Carlo estimators.

pub mod diagonal;
pub mod error;
pub mod grid;
pub mod optimize;
pub mod stair;
pub mod transfer;

pub(crate) mod rng;

pub use error::{Error, Result};
pub use stair::{Coords, Point, TypeIndex};

/// Exact rational scalar used throughout.
pub type Rational = num_rational::BigRational;

/// Shared numeric bound for routines evaluated both in `f64` and in exact
/// rational arithmetic.
pub trait Scalar:
    Clone + PartialOrd + std::fmt::Display + num_traits::Num + num_traits::FromPrimitive
{
}

impl<T> Scalar for T where
    T: Clone + PartialOrd + std::fmt::Display + num_traits::Num + num_traits::FromPrimitive
{
}
