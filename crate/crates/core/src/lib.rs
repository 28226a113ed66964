//! Convex hull construction, cache-friendly hull layouts, and fast support
//! point queries for collision detection.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fxtrig;
pub mod geom;
pub mod gjk;
pub mod hull;
pub mod layouts;
pub mod support;

pub use error::{Error, Result};
pub use geom::{Mat3, Vec3};
