//! Exact solver for convex maximization over switched linear systems.
//!
//! Given a finite set of `n x n` matrices and an initial vector, pick a
//! sequence of `K` matrices to maximize a convex function of the final
//! state. The solver propagates only the extreme points of the convex
//! hull of the reachable set, layer by layer, so the work per step is
//! governed by the hull size rather than the `m^K` sequence count.
//!
//! Modules:
//! - [`num`]: scalar domains (exact rationals and binary64 floats)
//! - [`linalg`]: dense matrices and vectors over a scalar domain
//! - [`instance`]: problem instances and the JSON instance file format
//! - [`hull`]: extreme-point engines (2-D scan and LP separation)
//! - [`lp`]: rational/float simplex with Bland's anti-cycling rule
//! - [`solver`]: the layered dynamic program and the brute-force oracle
//! - [`analysis`]: hull-growth instrumentation and vertex classification
//! - [`reductions`]: 3-SAT reduction, mortality check, JSR bound, MINLP export

pub mod analysis;
pub mod error;
pub mod hull;
pub mod instance;
pub mod linalg;
pub mod lp;
pub mod num;
pub mod reductions;
pub mod solver;

pub use error::{Error, Result};
pub use instance::{AnyInstance, Arithmetic, Instance, Objective};
pub use linalg::{Matrix, Vector};
pub use num::{Num, Rational};
pub use solver::{SolveResult, SolverOptions};
