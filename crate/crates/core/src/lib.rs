//! Exact lattice toolkit for greedy exponential sieves over families of
//! axis-parallel boxes in R³, with the measure and maximal-function checks
//! that go with them.
//!
//! Every measure is an exact integer on an integer lattice; the only
//! floating-point step is the evaluation of `e^{ck}` on exact depth histograms.

mod arith;
pub mod error;
pub mod geometry;
pub mod lab;
pub mod maximal;
pub mod measure;
pub mod selection;

pub use error::{Error, Result};
pub use geometry::{Axis, Box3, BoxFamily, Interval, Measure, ZygmundProfile};
