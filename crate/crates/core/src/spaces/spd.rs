//! Symmetric positive definite matrices with the affine-invariant metric.
//!
//! All matrix functions (square root, logarithm, real powers) go through the
//! symmetric eigendecomposition. A point whose smallest eigenvalue is at or
//! below [`EIGEN_FLOOR`] is rejected rather than regularized.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::Value;

use super::{json_matrix, ModelSpace, SampleSpace};
use crate::error::{argument, domain, Error, Result};
use crate::geometry::{check_unit_interval, HadamardSpace, TangentSpace};

const EIGEN_FLOOR: f64 = 1e-300;

/// Upper bound on the condition number of randomly generated SPD points.
pub const MAX_SAMPLE_CONDITION: f64 = 1e4;

#[derive(Debug, Clone)]
struct Eigen {
    vectors: DMatrix<f64>,
    values: DVector<f64>,
    sqrt: DMatrix<f64>,
    inv_sqrt: DMatrix<f64>,
}

impl Eigen {
    fn from_parts(vectors: DMatrix<f64>, values: DVector<f64>) -> Result<Self> {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min > EIGEN_FLOOR) || values.iter().any(|v| !v.is_finite()) {
            return Err(domain(format!("matrix is not positive definite (min eigenvalue {min:e})")));
        }
        let sqrt = spectral(&vectors, &values, f64::sqrt);
        let inv_sqrt = spectral(&vectors, &values, |x| 1.0 / x.sqrt());
        Ok(Self { vectors, values, sqrt, inv_sqrt })
    }
}

fn sym_eigen(m: DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numeric("symmetric eigendecomposition did not converge".into()))?;
    Ok(jacobi_polish(&m, eig.eigenvectors))
}

/// Cyclic Jacobi sweeps on `Vᵀ M V`. nalgebra's QR iteration leaves residuals
/// near 1e-8 when two eigenvalues almost coincide; a few rotations fix that.
fn jacobi_polish(m: &DMatrix<f64>, mut v: DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let n = m.nrows();
    let mut a = symmetrize(v.transpose() * m * &v);
    let scale = m.norm().max(f64::MIN_POSITIVE);
    for _ in 0..20 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = DVector::from_fn(n, |i, _| a[(i, i)]);
    (v, values)
}

/// `V diag(f(λ)) Vᵀ`
fn spectral(vectors: &DMatrix<f64>, values: &DVector<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let mut scaled = vectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= f(values[j]);
    }
    symmetrize(scaled * vectors.transpose())
}

fn symmetrize(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// A strictly positive definite real symmetric matrix.
///
/// The eigendecomposition (and with it `A^{1/2}`, `A^{-1/2}`) is computed on
/// first use and cached.
#[derive(Debug, Clone)]
pub struct SpdPoint {
    matrix: DMatrix<f64>,
    eigen: OnceLock<Eigen>,
}

impl SpdPoint {
    /// Symmetrizes `m` and checks positive definiteness.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(domain(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(domain("matrix has non-finite entries"));
        }
        let m = symmetrize(m);
        if m.clone().cholesky().is_none() {
            return Err(domain("matrix is not positive definite"));
        }
        Ok(Self { matrix: m, eigen: OnceLock::new() })
    }

    pub fn identity(n: usize) -> Self {
        let eigen = Eigen::from_parts(DMatrix::identity(n, n), DVector::from_element(n, 1.0))
            .expect("identity is SPD");
        Self { matrix: DMatrix::identity(n, n), eigen: OnceLock::from(eigen) }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let values = DVector::from_column_slice(diag);
        let eigen = Eigen::from_parts(DMatrix::identity(n, n), values.clone())?;
        Ok(Self { matrix: DMatrix::from_diagonal(&values), eigen: OnceLock::from(eigen) })
    }

    /// `V diag(values) Vᵀ` for an orthogonal `V`; the decomposition is kept as the cache.
    pub fn from_eigen(vectors: DMatrix<f64>, values: DVector<f64>) -> Result<Self> {
        let eigen = Eigen::from_parts(vectors, values)?;
        let matrix = spectral(&eigen.vectors, &eigen.values, |x| x);
        Ok(Self { matrix, eigen: OnceLock::from(eigen) })
    }

    /// Builds from row-major rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(domain("SPD point rows must form a square matrix"));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn eigen(&self) -> Result<&Eigen> {
        if let Some(e) = self.eigen.get() {
            return Ok(e);
        }
        let (vectors, values) = sym_eigen(self.matrix.clone())?;
        let _ = self.eigen.set(Eigen::from_parts(vectors, values)?);
        Ok(self.eigen.get().expect("eigen cache was just set"))
    }

    pub fn eigenvalues(&self) -> Result<DVector<f64>> {
        Ok(self.eigen()?.values.clone())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigen()?.values.min())
    }

    pub fn condition_number(&self) -> Result<f64> {
        let v = &self.eigen()?.values;
        Ok(v.max() / v.min())
    }

    pub fn sqrt(&self) -> Result<&DMatrix<f64>> {
        Ok(&self.eigen()?.sqrt)
    }

    pub fn inv_sqrt(&self) -> Result<&DMatrix<f64>> {
        Ok(&self.eigen()?.inv_sqrt)
    }

    /// Symmetric matrix logarithm.
    pub fn log(&self) -> Result<DMatrix<f64>> {
        let e = self.eigen()?;
        Ok(spectral(&e.vectors, &e.values, f64::ln))
    }

    /// `A^{-1/2} B A^{-1/2}` decomposed; its eigenvalues drive distance, log and geodesic.
    fn whiten(&self, other: &SpdPoint) -> Result<(DMatrix<f64>, DVector<f64>)> {
        let s = self.inv_sqrt()?;
        sym_eigen(symmetrize(s * &other.matrix * s))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.matrix.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

/// Matrix exponential of a symmetric matrix as an SPD point.
pub fn sym_exp(w: &DMatrix<f64>) -> Result<SpdPoint> {
    let (vectors, values) = sym_eigen(symmetrize(w.clone()))?;
    SpdPoint::from_eigen(vectors, values.map(f64::exp))
}

/// SPD(n) with `δ(A,B) = ‖log(A^{-1/2} B A^{-1/2})‖_F` and geodesic
/// `A #_t B = A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}`.
///
/// Tangent vectors at `A` are stored whitened: the symmetric matrix
/// `W = A^{-1/2} V A^{-1/2}`, so that the Riemannian norm is `‖W‖_F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spd {
    pub n: usize,
    sample_condition: f64,
}

impl Spd {
    pub fn new(n: usize) -> Self {
        Self { n, sample_condition: 100.0 }
    }

    /// Sets the condition-number cap of [`SampleSpace::sample_point`]; must lie in `[1, 1e4]`.
    pub fn with_sample_condition(mut self, cond: f64) -> Result<Self> {
        if !(1.0..=MAX_SAMPLE_CONDITION).contains(&cond) {
            return Err(argument(format!(
                "sample condition number {cond} outside [1, {MAX_SAMPLE_CONDITION}]"
            )));
        }
        self.sample_condition = cond;
        Ok(self)
    }

    pub fn sample_condition(&self) -> f64 {
        self.sample_condition
    }

    fn check_dim(&self, p: &SpdPoint) -> Result<()> {
        if p.dim() != self.n {
            return Err(domain(format!("expected a {0}x{0} matrix, got {1}x{1}", self.n, p.dim())));
        }
        Ok(())
    }
}

fn log_norm(values: &DVector<f64>) -> Result<f64> {
    let mut acc = 0.0;
    for &l in values.iter() {
        if !(l > EIGEN_FLOOR) {
            return Err(domain(format!("whitened matrix has eigenvalue {l:e}")));
        }
        acc += l.ln().powi(2);
    }
    Ok(acc.sqrt())
}

impl HadamardSpace for Spd {
    type Point = SpdPoint;

    fn descriptor(&self) -> String {
        format!("spd:{}", self.n)
    }

    fn validate(&self, p: &SpdPoint) -> Result<()> {
        self.check_dim(p)?;
        p.eigen().map(|_| ())
    }

    fn distance(&self, a: &SpdPoint, b: &SpdPoint) -> Result<f64> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        let (_, values) = a.whiten(b)?;
        log_norm(&values)
    }

    fn geodesic(&self, a: &SpdPoint, b: &SpdPoint, t: f64) -> Result<SpdPoint> {
        check_unit_interval(t)?;
        if t == 0.0 {
            self.validate(a)?;
            return Ok(a.clone());
        }
        if t == 1.0 {
            self.validate(b)?;
            return Ok(b.clone());
        }
        self.geodesic_with_distance(a, b, t).map(|(p, _)| p)
    }

    fn geodesic_with_distance(&self, a: &SpdPoint, b: &SpdPoint, t: f64) -> Result<(SpdPoint, f64)> {
        check_unit_interval(t)?;
        self.check_dim(a)?;
        self.check_dim(b)?;
        let (vectors, values) = a.whiten(b)?;
        let dist = log_norm(&values)?;
        let point = if t == 0.0 {
            a.clone()
        } else if t == 1.0 {
            b.clone()
        } else {
            let root = a.sqrt()?;
            let power = spectral(&vectors, &values, |x| x.powf(t));
            SpdPoint::new(root * power * root)?
        };
        Ok((point, dist))
    }
}

impl TangentSpace for Spd {
    type Tangent = DMatrix<f64>;

    fn log(&self, base: &SpdPoint, p: &SpdPoint) -> Result<DMatrix<f64>> {
        self.check_dim(base)?;
        self.check_dim(p)?;
        let (vectors, values) = base.whiten(p)?;
        log_norm(&values)?;
        Ok(spectral(&vectors, &values, f64::ln))
    }

    fn exp(&self, base: &SpdPoint, w: &DMatrix<f64>) -> Result<SpdPoint> {
        self.check_dim(base)?;
        if w.nrows() != self.n || w.ncols() != self.n {
            return Err(domain("tangent matrix has the wrong shape"));
        }
        let e = sym_exp(w)?;
        if base.matrix == DMatrix::identity(self.n, self.n) {
            return Ok(e);
        }
        let root = base.sqrt()?;
        SpdPoint::new(root * e.matrix() * root)
    }

    fn norm(&self, _base: &SpdPoint, w: &DMatrix<f64>) -> f64 {
        w.norm()
    }

    fn zero_tangent(&self, _base: &SpdPoint) -> DMatrix<f64> {
        DMatrix::zeros(self.n, self.n)
    }

    fn add_scaled(&self, acc: &mut DMatrix<f64>, w: f64, v: &DMatrix<f64>) {
        *acc += v * w;
    }

    fn scale(&self, v: &DMatrix<f64>, s: f64) -> DMatrix<f64> {
        v * s
    }
}

/// Haar-distributed orthogonal matrix via QR of a Gaussian matrix with sign correction.
pub(crate) fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let mut col = q.column_mut(j);
            col *= -1.0;
        }
    }
    q
}

impl SampleSpace for Spd {
    /// Random orthogonal eigenbasis with log-uniform eigenvalues in
    /// `[cond^{-1/2}, cond^{1/2}]`, so the condition number never exceeds the cap.
    fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> SpdPoint {
        let q = random_orthogonal(self.n, rng);
        let half = 0.5 * self.sample_condition.ln();
        let values = DVector::from_fn(self.n, |_, _| rng.gen_range(-half..=half).exp());
        SpdPoint::new(spectral(&q, &values, |x| x)).expect("sampled matrix is SPD")
    }
}

impl ModelSpace for Spd {
    fn base_point(&self) -> SpdPoint {
        SpdPoint::identity(self.n)
    }

    fn default_direction(&self) -> DMatrix<f64> {
        let mut e = DMatrix::zeros(self.n, self.n);
        e[(0, 0)] = 1.0;
        e
    }

    fn sample_unit_tangent<R: Rng + ?Sized>(&self, rng: &mut R) -> DMatrix<f64> {
        loop {
            let g = DMatrix::from_fn(self.n, self.n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let s = symmetrize(g);
            let n = s.norm();
            if n > 1e-6 {
                return s / n;
            }
        }
    }

    fn point_to_json(&self, p: &SpdPoint) -> Value {
        Value::from(p.to_rows())
    }

    fn point_from_json(&self, v: &Value) -> Result<SpdPoint> {
        let p = SpdPoint::from_rows(&json_matrix(v, "SPD point")?)?;
        self.validate(&p)?;
        Ok(p)
    }

    fn tangent_from_json(&self, v: &Value) -> Result<DMatrix<f64>> {
        let rows = json_matrix(v, "SPD direction")?;
        if rows.len() != self.n || rows.iter().any(|r| r.len() != self.n) {
            return Err(domain(format!("SPD direction must be {0}x{0}", self.n)));
        }
        let m = DMatrix::from_fn(self.n, self.n, |i, j| rows[i][j]);
        if (&m - m.transpose()).norm() > 1e-12 * (1.0 + m.norm()) {
            return Err(domain("SPD direction must be symmetric"));
        }
        Ok(symmetrize(m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Distance between commuting diagonal matrices via scalar logs.
    fn diag_distance(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x.ln() - y.ln()).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn identity_distance_is_zero() {
        let s = Spd::new(3);
        let i = SpdPoint::identity(3);
        assert_eq!(s.distance(&i, &i).unwrap(), 0.0);
    }

    #[test]
    fn scaled_identity_distance() {
        let s = Spd::new(3);
        let e2 = (2.0f64).exp();
        let a = SpdPoint::identity(3);
        let b = SpdPoint::from_diagonal(&[e2, e2, e2]).unwrap();
        let d = s.distance(&a, &b).unwrap();
        assert!((d - diag_distance(&[1.0; 3], &[e2; 3])).abs() < 1e-12);
        assert!((d - 2.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn diagonal_midpoint_is_elementwise_geometric_mean() {
        let s = Spd::new(2);
        let a = SpdPoint::from_diagonal(&[1.0, 1.0]).unwrap();
        let b = SpdPoint::from_diagonal(&[4.0, 4.0]).unwrap();
        let m = s.geodesic(&a, &b, 0.5).unwrap();
        let want = SpdPoint::from_diagonal(&[2.0, 2.0]).unwrap();
        assert!(s.distance(&m, &want).unwrap() < 1e-12);

        let c = SpdPoint::from_diagonal(&[0.5, 9.0]).unwrap();
        let t = 0.3;
        let p = s.geodesic(&a, &c, t).unwrap();
        let want = SpdPoint::from_diagonal(&[0.5f64.powf(t), 9f64.powf(t)]).unwrap();
        assert!(s.distance(&p, &want).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_indefinite_and_bad_shapes() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(SpdPoint::new(m), Err(Error::Domain(_))));
        assert!(SpdPoint::new(DMatrix::zeros(2, 3)).is_err());
        assert!(SpdPoint::from_diagonal(&[1.0, 0.0]).is_err());
        assert!(SpdPoint::from_diagonal(&[1.0, 1e-301]).is_err());
        let s = Spd::new(3);
        assert!(s.validate(&SpdPoint::identity(2)).is_err());
        let i = SpdPoint::identity(3);
        assert!(s.geodesic(&i, &i, 1.2).is_err());
    }

    #[test]
    fn symmetrizes_on_construction() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0 + 1e-13, 1.0, 2.0]);
        let p = SpdPoint::new(m).unwrap();
        assert_eq!(p.matrix()[(0, 1)], p.matrix()[(1, 0)]);
    }

    #[test]
    fn log_exp_round_trip() {
        let s = Spd::new(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = s.sample_point(&mut rng);
            let b = s.sample_point(&mut rng);
            let w = s.log(&a, &b).unwrap();
            assert!((s.norm(&a, &w) - s.distance(&a, &b).unwrap()).abs() < 1e-10);
            let back = s.exp(&a, &w).unwrap();
            assert!(s.distance(&back, &b).unwrap() < 1e-9);
        }
    }

    #[test]
    fn sampled_points_respect_condition_cap() {
        let s = Spd::new(4).with_sample_condition(50.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let p = s.sample_point(&mut rng);
            assert!(p.condition_number().unwrap() <= 50.0 * (1.0 + 1e-9));
        }
        assert!(Spd::new(2).with_sample_condition(1e5).is_err());
    }

    #[test]
    fn json_is_row_major() {
        let s = Spd::new(2);
        let p = SpdPoint::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let v = s.point_to_json(&p);
        assert_eq!(v, serde_json::json!([[2.0, 0.5], [0.5, 1.0]]));
        let q = s.point_from_json(&v).unwrap();
        assert_eq!(q.matrix(), p.matrix());
    }
}
