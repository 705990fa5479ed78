//! Online traveling repairperson on a line, with location predictions.
//!
//! All arithmetic is exact: inputs are rationals and strategy geometry lives
//! in ℚ(√3).

#![allow(clippy::result_large_err)]

pub mod adversary;
pub mod format;
pub mod generate;
pub mod instance;
pub mod offline;
pub mod online;
pub mod scalar;
pub mod simulator;
pub mod trajectory;

pub use instance::{Instance, InstanceError, LineSegment, Model, Request, Side};
pub use scalar::{QuadraticScalar, Scalar};
pub use trajectory::{PathBuilder, Trajectory, Waypoint};
