//! Lightweight autonomous exploration on 2D occupancy grids.
//!
//! The per-tick pipeline thresholds the occupancy map, cuts a fixed-size local
//! window around the robot, computes its signed distance field, picks an
//! end-point from the range scan and plans a clearance-aware grid path to it.
//! [`sim`] closes the loop with a ray-cast range sensor and a hit/miss mapper,
//! and [`harness`] drives everything from the command line.

pub mod config;
pub mod endpoint;
pub mod error;
pub mod grid;
pub mod harness;
pub mod planner;
pub mod sim;

pub use config::PlannerConfig;
pub use error::{DeadEndKind, Error, Result};
