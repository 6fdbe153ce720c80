//! Kronecker systems and ergodic averaging with inductive means.
//!
//! For an ergodic translation `τ(h) = h + g` of a compact abelian group and a
//! map `A: G → M` into a Hadamard space, the inductive means of the orbit
//! sequence `A(h), A(τh), A(τ²h), …` converge to the barycenter of the
//! pushforward of Haar measure: uniformly in `h` when `A` is continuous, for
//! almost every `h` when `A` is only integrable.

mod function;
mod run;
mod system;

pub use function::{OrbitFunction, Regularity};
pub use run::{
    birkhoff_average, check_orbit_contraction, checkpoints, ergodic_inductive_run, estimate_pushforward_barycenter,
    trace_against, ConvergenceTrace, ReferenceOptions, TraceEntry,
};
pub use system::{golden_alpha, Group, GroupElement, KroneckerSystem, Neighborhood, OrbitIter};
