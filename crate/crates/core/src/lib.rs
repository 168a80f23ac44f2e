//! Executable environment for oblivious mobile robots on the plane.
//!
//! Robots are anonymous, silent and disoriented points that repeat
//! Look-Compute-Move cycles under an adversarial scheduler. The crate provides
//! the geometric primitives, the world model, activation and movement
//! adversaries, the robot programs, a deterministic round engine with epoch
//! accounting, and an HTTP session service where a human plays the scheduler.

pub mod algorithms;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod model;
pub mod scenario;
pub mod schedulers;
pub mod server;
pub mod session;

pub use error::{Error, Result};
pub use geometry::{Circle, Point, Tolerance};
