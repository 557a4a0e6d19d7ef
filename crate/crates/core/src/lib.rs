// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod curvature;
pub mod graph;
pub mod indicators;
pub mod market;
pub mod measures;
pub mod pipeline;
pub mod synthetic;

pub use error::{Error, Result};
