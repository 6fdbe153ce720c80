//! Inequalities satisfied by barycenters and inductive means.

use super::barycenter::EmpiricalMeasure;
use super::inductive::inductive_prefixes;
use crate::error::{argument, Result};
use crate::geometry::{HadamardSpace, InequalitySlack};

/// Variance inequality: `Σ wⱼ [δ²(z,xⱼ) − δ²(b,xⱼ)] ≥ δ²(z,b)`.
pub fn check_variance_inequality<S: HadamardSpace>(
    measure: &EmpiricalMeasure<S::Point>,
    space: &S,
    z: &S::Point,
    bary: &S::Point,
) -> Result<InequalitySlack> {
    let lhs = space.distance(z, bary)?.powi(2);
    let mut rhs = 0.0;
    for (x, w) in measure.iter() {
        rhs += w * (space.distance(z, x)?.powi(2) - space.distance(bary, x)?.powi(2));
    }
    Ok(InequalitySlack::new(lhs, rhs))
}

/// `δ(S_n(a), S_n(b)) ≤ (1/n) Σ δ(aᵢ, bᵢ)`.
pub fn check_contraction<S: HadamardSpace>(
    seq_a: &[S::Point],
    seq_b: &[S::Point],
    space: &S,
) -> Result<InequalitySlack> {
    if seq_a.len() != seq_b.len() {
        return Err(argument(format!("sequence lengths differ: {} vs {}", seq_a.len(), seq_b.len())));
    }
    let sa = super::inductive_mean(space, seq_a)?;
    let sb = super::inductive_mean(space, seq_b)?;
    let lhs = space.distance(&sa, &sb)?;
    let mut sum = 0.0;
    for (a, b) in seq_a.iter().zip(seq_b) {
        sum += space.distance(a, b)?;
    }
    Ok(InequalitySlack::new(lhs, sum / seq_a.len() as f64))
}

fn check_window(len: usize, k: usize, m: usize) -> Result<()> {
    if k == 0 || m == 0 {
        return Err(argument("k and m must both be at least 1"));
    }
    if k + m > len {
        return Err(argument(format!("k + m = {} exceeds the sequence length {len}", k + m)));
    }
    Ok(())
}

/// Three-term bound on `δ²(S_{k+m}, z)`:
///
/// ```text
/// δ²(S_{k+m}, z) ≤ k/(k+m) δ²(S_k, z) + 1/(k+m) Σ_{j<m} δ²(a_{k+j+1}, z)
///                 − k/(k+m)² Σ_{j<m} δ²(S_{k+j}, a_{k+j+1})
/// ```
///
/// Sequence indices are 1-based as in the formula: `seq[0]` is `a₁`.
pub fn check_weighted_inequality<S: HadamardSpace>(
    seq: &[S::Point],
    z: &S::Point,
    k: usize,
    m: usize,
    space: &S,
) -> Result<InequalitySlack> {
    check_window(seq.len(), k, m)?;
    let s = inductive_prefixes(space, &seq[..k + m])?;
    let a = |i: usize| &seq[i - 1];
    let sn = |i: usize| &s[i - 1];
    let (kf, total) = (k as f64, (k + m) as f64);
    let lhs = space.distance(sn(k + m), z)?.powi(2);
    let mut to_z = 0.0;
    let mut gaps = 0.0;
    for j in 0..m {
        to_z += space.distance(a(k + j + 1), z)?.powi(2);
        gaps += space.distance(sn(k + j), a(k + j + 1))?.powi(2);
    }
    let rhs = kf / total * space.distance(sn(k), z)?.powi(2) + to_z / total - kf / (total * total) * gaps;
    Ok(InequalitySlack::new(lhs, rhs))
}

/// Largest pairwise distance in a finite sequence.
pub fn sequence_diameter<S: HadamardSpace>(seq: &[S::Point], space: &S) -> Result<f64> {
    let mut d: f64 = 0.0;
    for (i, a) in seq.iter().enumerate() {
        for b in &seq[i + 1..] {
            d = d.max(space.distance(a, b)?);
        }
    }
    Ok(d)
}

/// Remainder `R̃_{m,k} = (m²/(k+1)² + 2m/(k+1)) Δ²`.
pub fn diameter_remainder(k: usize, m: usize, diameter: f64) -> f64 {
    let r = m as f64 / (k as f64 + 1.0);
    (r * r + 2.0 * r) * diameter * diameter
}

/// `(1/m) Σ_{j<m} δ²(S_k, a_{k+j+1}) ≤ R̃_{m,k} + (1/m) Σ_{j<m} δ²(S_{k+j}, a_{k+j+1})`
/// with Δ the diameter of the whole finite sequence.
pub fn check_diameter_bound<S: HadamardSpace>(
    seq: &[S::Point],
    k: usize,
    m: usize,
    space: &S,
) -> Result<InequalitySlack> {
    check_window(seq.len(), k, m)?;
    let s = inductive_prefixes(space, &seq[..k + m])?;
    let a = |i: usize| &seq[i - 1];
    let sn = |i: usize| &s[i - 1];
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for j in 0..m {
        lhs += space.distance(sn(k), a(k + j + 1))?.powi(2);
        rhs += space.distance(sn(k + j), a(k + j + 1))?.powi(2);
    }
    let mf = m as f64;
    let delta = sequence_diameter(seq, space)?;
    Ok(InequalitySlack::new(lhs / mf, diameter_remainder(k, m, delta) + rhs / mf))
}
