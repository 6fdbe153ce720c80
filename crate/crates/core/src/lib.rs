//! Barycenters in Hadamard spaces via inductive means along ergodic orbits.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`]: the [`HadamardSpace`] interface and checkers for the CAT(0)
//!   comparison inequalities.
//! * [`spaces`]: Euclidean space, SPD matrices with the affine-invariant
//!   metric, and the hyperboloid model of hyperbolic space.
//! * [`means`]: inductive means `S_n = S_{n-1} #_{1/n} a_n`, Karcher
//!   barycenters of finite measures and the inequalities linking them.
//! * [`ergodic`]: Kronecker systems (torus rotations, cyclic shifts) and the
//!   ergodic driver that averages a function along an orbit.
//! * [`mollify`]: metric mollifiers and L¹ estimates.
//! * [`functions`]: named test functions for experiments.
//! * [`suite`]: seeded batteries of the inequality checkers.
//! * [`cli`]: the experiment runner behind the `hadamard` binary.
//!
//! ```
//! use hadamard_ergodic::{means::inductive_mean, spaces::{Spd, SpdPoint}, HadamardSpace};
//!
//! let spd = Spd::new(2);
//! let seq = [SpdPoint::from_diagonal(&[1.0, 1.0])?, SpdPoint::from_diagonal(&[4.0, 4.0])?];
//! let mean = inductive_mean(&spd, &seq)?;
//! assert!(spd.distance(&mean, &SpdPoint::from_diagonal(&[2.0, 2.0])?)? < 1e-12);
//! # Ok::<(), hadamard_ergodic::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod ergodic;
pub mod error;
pub mod functions;
pub mod geometry;
pub mod means;
pub mod mollify;
pub mod spaces;
pub mod suite;

pub use error::{Error, Result};
pub use geometry::{HadamardSpace, InequalitySlack, TangentSpace, Tolerance};
