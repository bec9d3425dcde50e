//! Optimal set-motion strategies for eradicating a contaminated set inside a
//! planar domain: isoperimetric profiles, feasibility verdicts, explicit
//! strategies, admissibility checks and the adjoint optimality conditions.

#![no_std]
// `!(x > 0.0)` is used on purpose so NaN inputs are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adjoint;
pub mod corner;
pub mod dido;
pub mod evolution;
pub mod freearc;
pub mod geometry;
mod math;
pub mod mintime;
pub mod numeric;
