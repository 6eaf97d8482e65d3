//! Dense complex linear algebra on small Hilbert spaces.
//!
//! Everything here is immutable once built. Equality of projections is
//! Frobenius distance within [`epsilon`].

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::epsilon;

pub type C64 = Complex64;

/// Grid used to round entries when building canonical keys.
const KEY_GRID: f64 = 1e6;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

impl ComplexMatrix {
    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::MalformedMatrix);
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::MalformedMatrix);
        }
        Ok(Self(m))
    }

    /// Row-major construction from complex rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::MalformedMatrix);
        }
        Self::from_dmatrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Row-major construction from `[re, im]` pairs, the configuration format.
    pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|p| C64::new(p[0], p[1])).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    /// `|v⟩⟨v|` for the given (not necessarily normalized) vector.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        Self(DMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.0 - &other.0)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.distance(other) <= epsilon()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.distance(&self.adjoint())
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= epsilon()
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.dim() == other.dim() && (self * other).distance(&(other * self)) <= epsilon()
    }

    /// Hermitian part `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    /// Anti-Hermitian part divided by `i`: `(A − A†)/(2i)`, itself Hermitian.
    pub fn skew_part(&self) -> Self {
        Self((&self.0 - self.0.adjoint()) * C64::new(0.0, -0.5))
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Orthogonal projection. Equality is Frobenius distance within epsilon.
#[derive(Clone)]
pub struct Projection {
    matrix: ComplexMatrix,
    rank: usize,
}

impl fmt::Debug for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Projection(rank {}){}", self.rank, self.matrix.0)
    }
}

impl PartialEq for Projection {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.matrix.approx_eq(&other.matrix)
    }
}

impl Projection {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dev = matrix.hermitian_deviation();
        if dev > epsilon() {
            return Err(Error::NotAProjection(format!(
                "not Hermitian (deviation {dev:.3e})"
            )));
        }
        let idem = (&matrix * &matrix).distance(&matrix);
        if idem > epsilon() {
            return Err(Error::NotAProjection(format!(
                "not idempotent (deviation {idem:.3e})"
            )));
        }
        let rank = matrix.trace().re.round().max(0.0) as usize;
        Ok(Self { matrix, rank })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim),
            rank: 0,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
            rank: dim,
        }
    }

    /// Rank-one projection onto the span of `v`.
    pub fn onto_vector(v: &[C64]) -> Result<Self> {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= epsilon() {
            return Err(Error::NotAProjection("zero vector".into()));
        }
        let m = ComplexMatrix::outer(v).scale(C64::new(1.0 / norm2, 0.0));
        Ok(Self { matrix: m, rank: 1 })
    }

    /// Nearest orthogonal projection to the Hermitian part of `m`: eigenvalues
    /// above one half are sent to one, the rest to zero.
    pub fn nearest(m: &ComplexMatrix) -> Self {
        let h = m.hermitian_part();
        let eig = h.0.clone().symmetric_eigen();
        let n = h.dim();
        let mut acc = DMatrix::<C64>::zeros(n, n);
        let mut rank = 0;
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda > 0.5 {
                let v = eig.eigenvectors.column(k);
                acc += v * v.adjoint();
                rank += 1;
            }
        }
        Self {
            matrix: ComplexMatrix(acc),
            rank,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0
    }

    pub fn is_identity(&self) -> bool {
        self.rank == self.dim()
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.matrix.commutes_with(&other.matrix)
    }

    /// `P ⪯ Q` iff `‖PQ − P‖ ≤ ε`.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        self.matrix.check_dim(&other.matrix)?;
        Ok((&self.matrix * &other.matrix).distance(&self.matrix) <= epsilon())
    }

    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.matrix.check_dim(&other.matrix)?;
        if !self.commutes_with(other) {
            return Err(Error::NonCommuting);
        }
        Ok(Self::nearest(&(&self.matrix * &other.matrix)))
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.matrix.check_dim(&other.matrix)?;
        if !self.commutes_with(other) {
            return Err(Error::NonCommuting);
        }
        let pq = &self.matrix * &other.matrix;
        let sum = &self.matrix + &other.matrix;
        Ok(Self::nearest(&(&sum - &pq)))
    }

    pub fn complement(&self) -> Self {
        let n = self.dim();
        Self {
            matrix: &ComplexMatrix::identity(n) - &self.matrix,
            rank: n - self.rank,
        }
    }

    /// Sum of pairwise orthogonal projections.
    pub fn orthogonal_sum<'a>(dim: usize, parts: impl IntoIterator<Item = &'a Projection>) -> Self {
        let mut acc = ComplexMatrix::zeros(dim);
        let mut rank = 0;
        for p in parts {
            acc = &acc + &p.matrix;
            rank += p.rank;
        }
        Self { matrix: acc, rank }
    }

    /// Frobenius norm of `self · other`; zero iff the ranges are orthogonal.
    pub fn overlap(&self, other: &Self) -> f64 {
        (&self.matrix * &other.matrix).frobenius_norm()
    }

    /// Deterministic ordering key: rank, then entries rounded to a 1e-6 grid.
    pub fn canonical_key(&self) -> (usize, Vec<i64>) {
        let entries = self
            .matrix
            .0
            .iter()
            .flat_map(|z| {
                [
                    (z.re * KEY_GRID).round() as i64,
                    (z.im * KEY_GRID).round() as i64,
                ]
            })
            .collect();
        (self.rank, entries)
    }

    /// A unit vector in the range of a nonzero projection: the normalized
    /// column of largest norm.
    pub fn range_vector(&self) -> Option<Vec<C64>> {
        if self.is_zero() {
            return None;
        }
        let m = self.matrix.inner();
        let (best, _) = (0..m.ncols())
            .map(|j| (j, m.column(j).norm()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let col = m.column(best);
        let norm = col.norm();
        Some(col.iter().map(|z| z / norm).collect())
    }
}

/// Density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dev = matrix.hermitian_deviation();
        if dev > epsilon() {
            return Err(Error::NotADensityMatrix(format!(
                "not Hermitian (deviation {dev:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > epsilon() || tr.im.abs() > epsilon() {
            return Err(Error::NotADensityMatrix(format!("trace {tr} ≠ 1")));
        }
        let min = matrix.hermitian_part().0.symmetric_eigenvalues().min();
        if min < -epsilon() {
            return Err(Error::NotADensityMatrix(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Vector state `|φ⟩⟨φ|`; the vector is normalized here.
    pub fn pure(v: &[C64]) -> Result<Self> {
        let p = Projection::onto_vector(v)
            .map_err(|_| Error::NotADensityMatrix("zero state vector".into()))?;
        Ok(Self { matrix: p.matrix })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Eigenvalues ascending, one eigenprojection per cluster of eigenvalues that
/// lie within epsilon of each other.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub projections: Vec<Projection>,
}

pub fn spectral_decompose(a: &ComplexMatrix) -> Result<SpectralDecomposition> {
    let dev = a.hermitian_deviation();
    if dev > epsilon() {
        return Err(Error::NotHermitian(dev));
    }
    let n = a.dim();
    let eig = a.hermitian_part().0.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &k in &order {
        match clusters.last_mut() {
            Some(c) if eig.eigenvalues[k] - eig.eigenvalues[*c.last().unwrap()] <= epsilon() => {
                c.push(k)
            }
            _ => clusters.push(vec![k]),
        }
    }

    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut projections = Vec::with_capacity(clusters.len());
    for c in clusters {
        let mean = c.iter().map(|&k| eig.eigenvalues[k]).sum::<f64>() / c.len() as f64;
        let mut acc = DMatrix::<C64>::zeros(n, n);
        for &k in &c {
            let v: DVector<C64> = eig.eigenvectors.column(k).into_owned();
            acc += &v * v.adjoint();
        }
        eigenvalues.push(mean);
        projections.push(Projection {
            matrix: ComplexMatrix(acc),
            rank: c.len(),
        });
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        projections,
    })
}

/// Borel set used to select part of a spectrum.
#[derive(Clone, Debug, PartialEq)]
pub enum BorelSelection {
    Values(Vec<f64>),
    Interval { lo: f64, hi: f64 },
}

impl BorelSelection {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !matches!(
            lo.partial_cmp(&hi),
            Some(std::cmp::Ordering::Less | std::cmp::Ordering::Equal)
        ) {
            return Err(Error::MalformedInterval { lo, hi });
        }
        Ok(Self::Interval { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        let eps = epsilon();
        match self {
            Self::Values(vs) => vs.iter().any(|v| (v - x).abs() <= eps),
            Self::Interval { lo, hi } => *lo - eps <= x && x <= *hi + eps,
        }
    }
}

/// `Ê[A ∈ Δ]`: sum of eigenprojections of `A` whose eigenvalue lies in `Δ`.
pub fn spectral_projection(a: &ComplexMatrix, delta: &BorelSelection) -> Result<Projection> {
    if let BorelSelection::Interval { lo, hi } = delta {
        if !matches!(
            lo.partial_cmp(hi),
            Some(std::cmp::Ordering::Less | std::cmp::Ordering::Equal)
        ) {
            return Err(Error::MalformedInterval { lo: *lo, hi: *hi });
        }
    }
    let sd = spectral_decompose(a)?;
    let parts = sd
        .eigenvalues
        .iter()
        .zip(&sd.projections)
        .filter(|(l, _)| delta.contains(**l))
        .map(|(_, p)| p);
    Ok(Projection::orthogonal_sum(a.dim(), parts))
}

/// `Re tr(ρP)`, snapped onto `[0,1]` when within epsilon of either end.
pub fn trace_pairing(rho: &DensityMatrix, p: &Projection) -> Result<f64> {
    rho.matrix.check_dim(&p.matrix)?;
    let t = (&rho.matrix * &p.matrix).trace().re;
    let eps = epsilon();
    Ok(if t.abs() <= eps {
        0.0
    } else if (t - 1.0).abs() <= eps {
        1.0
    } else {
        t
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::diag(&[1.0, -1.0])
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    fn half_ones() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap()
    }

    #[test]
    fn decompose_diagonal() {
        let sd = spectral_decompose(&ComplexMatrix::diag(&[1.0, 0.0])).unwrap();
        assert_eq!(sd.eigenvalues.len(), 2);
        assert!((sd.eigenvalues[0] - 0.0).abs() < 1e-12);
        assert!((sd.eigenvalues[1] - 1.0).abs() < 1e-12);
        assert!(sd.projections[0]
            .matrix()
            .approx_eq(&ComplexMatrix::diag(&[0.0, 1.0])));
        assert!(sd.projections[1]
            .matrix()
            .approx_eq(&ComplexMatrix::diag(&[1.0, 0.0])));
    }

    #[test]
    fn degenerate_spectrum_merges() {
        let sd = spectral_decompose(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(sd.eigenvalues.len(), 1);
        assert!((sd.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!(sd.projections[0].is_identity());
    }

    #[test]
    fn rank_one_hermitian() {
        // hand eigensolve: ½[[1,1],[1,1]] has eigenvectors (1,1)/√2 ↦ 1 and (1,−1)/√2 ↦ 0
        let sd = spectral_decompose(&half_ones()).unwrap();
        assert!((sd.eigenvalues[0]).abs() < 1e-12);
        assert!((sd.eigenvalues[1] - 1.0).abs() < 1e-12);
        assert!(sd.projections[1].matrix().approx_eq(&half_ones()));
    }

    #[test]
    fn non_hermitian_rejected() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(
            spectral_decompose(&a),
            Err(Error::NotHermitian(_))
        ));
        assert!(matches!(
            spectral_projection(&a, &BorelSelection::Values(vec![0.0])),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn spectral_projection_examples() {
        let up = spectral_projection(&sigma_z(), &BorelSelection::Values(vec![1.0])).unwrap();
        assert!(up.matrix().approx_eq(&ComplexMatrix::diag(&[1.0, 0.0])));
        let all =
            spectral_projection(&sigma_z(), &BorelSelection::interval(-2.0, 2.0).unwrap()).unwrap();
        assert!(all.is_identity());
        let plus = spectral_projection(&sigma_x(), &BorelSelection::Values(vec![1.0])).unwrap();
        assert!(plus.matrix().approx_eq(&half_ones()));
        let none = spectral_projection(&sigma_x(), &BorelSelection::Values(vec![])).unwrap();
        assert!(none.is_zero());
    }

    #[test]
    fn malformed_interval() {
        assert!(matches!(
            BorelSelection::interval(1.0, 0.0),
            Err(Error::MalformedInterval { .. })
        ));
    }

    #[test]
    fn lattice_examples() {
        let p0 = Projection::new(ComplexMatrix::diag(&[1.0, 0.0])).unwrap();
        let p1 = Projection::new(ComplexMatrix::diag(&[0.0, 1.0])).unwrap();
        assert!(Projection::zero(2).leq(&p0).unwrap());
        assert!(p0.meet(&p1).unwrap().is_zero());
        assert!(p0.join(&p1).unwrap().is_identity());
        assert_eq!(p0.complement(), p1);
        let px = Projection::new(half_ones()).unwrap();
        assert_eq!(p0.meet(&px), Err(Error::NonCommuting));
        assert_eq!(p0.join(&px), Err(Error::NonCommuting));
        let p3 = Projection::identity(3);
        assert!(matches!(p0.leq(&p3), Err(Error::DimMismatch { .. })));
    }

    #[test]
    fn trace_examples() {
        let rho0 = DensityMatrix::pure(&[c(1.0), c(0.0)]).unwrap();
        let mix = DensityMatrix::maximally_mixed(2);
        let p0 = Projection::new(ComplexMatrix::diag(&[1.0, 0.0])).unwrap();
        let px = Projection::new(half_ones()).unwrap();
        assert_eq!(trace_pairing(&rho0, &p0).unwrap(), 1.0);
        assert!((trace_pairing(&mix, &p0).unwrap() - 0.5).abs() < 1e-15);
        // tr(|0⟩⟨0| · ½[[1,1],[1,1]]) = ½ by direct multiplication
        assert!((trace_pairing(&rho0, &px).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            trace_pairing(&rho0, &Projection::identity(3)),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::diag(&[0.5, 0.6])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::diag(&[1.5, -0.5])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::diag(&[0.25, 0.75])).is_ok());
    }

    #[test]
    fn projection_validation() {
        assert!(Projection::new(ComplexMatrix::diag(&[0.5, 1.0])).is_err());
        let p = Projection::new(half_ones()).unwrap();
        assert_eq!(p.rank(), 1);
    }
}
