//! Exact divisor theory on graphs, metric graphs and tropical curves:
//! reduced divisors, permutation divisors, ranks and Riemann-Roch checks.
//!
//! All lengths and offsets are exact rationals. Ranks on metric graphs are
//! computed either by unit subdivision (the default) or by the spanning-tree
//! enumeration over rational functions and point orderings.

pub mod corpus;
pub mod divisor;
pub mod error;
pub mod io;
pub mod permutation;
pub mod plfunc;
pub mod rank;
pub mod rational;
pub mod reduction;
pub mod topology;

pub use divisor::Divisor;
pub use error::{Error, Result};
pub use plfunc::PlFunction;
pub use rational::Rational;
pub use topology::{AnyHost, Graph, Host, MetricGraph, Point, TropicalCurve};
