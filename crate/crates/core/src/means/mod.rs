//! Inductive means, Karcher barycenters and the inequalities relating them.

mod barycenter;
mod checks;
mod inductive;

pub use barycenter::{karcher_mean, BarycenterResult, EmpiricalMeasure, KarcherOptions};
pub use checks::{
    check_contraction, check_diameter_bound, check_variance_inequality, check_weighted_inequality,
    diameter_remainder, sequence_diameter,
};
pub use inductive::{inductive_mean, inductive_prefixes, inductive_step, InductiveState};
