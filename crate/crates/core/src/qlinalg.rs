//! Dense complex Hermitian linear algebra.
//!
//! [`HermitianOperator`] is the carrier for states, free operators and dual
//! witnesses. Every operator optionally records the local dimensions of the
//! subsystems it acts on, which drives [`HermitianOperator::tensor`],
//! [`HermitianOperator::partial_trace`] and
//! [`HermitianOperator::partial_transpose`].

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
pub use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Asymmetry above this is rejected rather than symmetrized away.
pub const HERMITICITY_TOL: f64 = 1e-8;
/// Default cap on the total Hilbert-space dimension.
pub const DEFAULT_DIM_CAP: usize = 256;
const EIGH_MAX_ITER: usize = 10_000;

/// Total dimension cap, overridable through `PROJENT_DIM_CAP`.
pub fn dim_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("PROJENT_DIM_CAP")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&v: &usize| v > 0)
            .unwrap_or(DEFAULT_DIM_CAP)
    })
}

#[inline]
pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Dense Hermitian matrix with optional subsystem structure.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: CMatrix,
    dims: Vec<usize>,
}

/// Spectral decomposition with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors, in the order of `values`.
    pub vectors: CMatrix,
}

impl Eigh {
    /// Rebuilds `V f(diag(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let s = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap_or(&0.0)
    }

    pub fn min(&self) -> f64 {
        *self.values.first().unwrap_or(&0.0)
    }
}

impl HermitianOperator {
    /// Builds an operator, symmetrizing away round-off. `dims` may be empty.
    pub fn new(mat: CMatrix, dims: Vec<usize>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "expected a non-empty square matrix, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let n = mat.nrows();
        if !dims.is_empty() && dims.iter().product::<usize>() != n {
            return Err(Error::InvalidArgument(format!(
                "subsystem dims {dims:?} do not multiply to {n}"
            )));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidArgument("zero subsystem dimension".into()));
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite matrix entry".into()));
        }
        let adj = mat.adjoint();
        let asym = (&mat - &adj).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let scale = mat.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if asym > HERMITICITY_TOL * scale {
            return Err(Error::NotHermitian(asym));
        }
        let mat = (mat + adj) * c(0.5);
        Ok(Self { mat, dims })
    }

    /// Wraps a matrix that is Hermitian by construction; symmetrizes without checks.
    pub(crate) fn from_hermitian_unchecked(mat: CMatrix, dims: Vec<usize>) -> Self {
        let adj = mat.adjoint();
        Self {
            mat: (mat + adj) * c(0.5),
            dims,
        }
    }

    pub fn from_real(rows: &[Vec<f64>], dims: Vec<usize>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("ragged matrix rows".into()));
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| c(rows[i][j])), dims)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self {
            mat: CMatrix::from_fn(n, n, |i, j| if i == j { c(values[i]) } else { c(0.0) }),
            dims: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mat: CMatrix::identity(n, n),
            dims: Vec::new(),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            mat: CMatrix::zeros(n, n),
            dims: Vec::new(),
        }
    }

    /// `|v⟩⟨v|` (not normalized).
    pub fn projector_onto(v: &CVector) -> Self {
        Self {
            mat: v * v.adjoint(),
            dims: Vec::new(),
        }
    }

    pub fn with_dims(mut self, dims: Vec<usize>) -> Result<Self> {
        if !dims.is_empty() && dims.iter().product::<usize>() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "subsystem dims {dims:?} do not multiply to {}",
                self.dim()
            )));
        }
        self.dims = dims;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn subsystem_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.diagonal().iter().map(|z| z.re).sum()
    }

    /// `Re Tr(self · other)`, which is the real inner product on Hermitian matrices.
    pub fn inner(&self, other: &HermitianOperator) -> f64 {
        hs_inner(&self.mat, &other.mat)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            mat: &self.mat * c(s),
            dims: self.dims.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat + &other.mat,
            dims: merge_dims(&self.dims, &other.dims),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat - &other.mat,
            dims: merge_dims(&self.dims, &other.dims),
        }
    }

    /// Eigen-decomposition, eigenvalues ascending.
    pub fn eigh(&self) -> Result<Eigh> {
        eigh_matrix(&self.mat)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigh()?.values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigh()?.min())
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigh()?.max())
    }

    /// Kronecker product under the global dimension cap.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.tensor_with_cap(other, dim_cap())
    }

    pub fn tensor_with_cap(&self, other: &Self, cap: usize) -> Result<Self> {
        let requested = self.dim().saturating_mul(other.dim());
        if requested > cap {
            return Err(Error::CapacityExceeded {
                requested,
                cap,
                largest_feasible_n: None,
            });
        }
        let dims_a = if self.dims.is_empty() { vec![self.dim()] } else { self.dims.clone() };
        let dims_b = if other.dims.is_empty() { vec![other.dim()] } else { other.dims.clone() };
        Ok(Self {
            mat: self.mat.kronecker(&other.mat),
            dims: dims_a.into_iter().chain(dims_b).collect(),
        })
    }

    /// `self^{⊗n}`.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("tensor power needs n >= 1".into()));
        }
        let requested = (self.dim() as f64).powi(n as i32);
        if requested > dim_cap() as f64 {
            let largest = largest_power_within(self.dim(), dim_cap());
            return Err(Error::CapacityExceeded {
                requested: requested.min(usize::MAX as f64) as usize,
                cap: dim_cap(),
                largest_feasible_n: Some(largest),
            });
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = out.tensor(self)?;
        }
        Ok(out)
    }

    /// Traces out every subsystem not listed in `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if self.dims.is_empty() {
            return Err(Error::InvalidArgument("operator has no subsystem structure".into()));
        }
        if keep.is_empty() {
            return Err(Error::InvalidArgument("keep set is empty".into()));
        }
        let nsys = self.dims.len();
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if let Some(&bad) = kept.iter().find(|&&k| k >= nsys) {
            return Err(Error::InvalidArgument(format!(
                "subsystem {bad} out of range for {nsys} subsystems"
            )));
        }
        let out_dims: Vec<usize> = kept.iter().map(|&k| self.dims[k]).collect();
        let out_dim: usize = out_dims.iter().product();
        let n = self.dim();
        let strides = strides(&self.dims);
        let split: Vec<(usize, usize)> = (0..n)
            .map(|idx| {
                let (mut kidx, mut tidx) = (0, 0);
                for (s, (&stride, &dim)) in strides.iter().zip(&self.dims).enumerate() {
                    let digit = (idx / stride) % dim;
                    if kept.binary_search(&s).is_ok() {
                        kidx = kidx * dim + digit;
                    } else {
                        tidx = tidx * dim + digit;
                    }
                }
                (kidx, tidx)
            })
            .collect();
        let mut out = CMatrix::zeros(out_dim, out_dim);
        for i in 0..n {
            for j in 0..n {
                if split[i].1 == split[j].1 {
                    out[(split[i].0, split[j].0)] += self.mat[(i, j)];
                }
            }
        }
        Ok(Self::from_hermitian_unchecked(out, out_dims))
    }

    /// Transposes subsystem `subsystem` (an involution, exact in floating point).
    pub fn partial_transpose(&self, subsystem: usize) -> Result<Self> {
        self.partial_transpose_many(&[subsystem])
    }

    /// Transposes every listed subsystem at once.
    pub fn partial_transpose_many(&self, systems: &[usize]) -> Result<Self> {
        if self.dims.is_empty() {
            return Err(Error::InvalidArgument("operator has no subsystem structure".into()));
        }
        let map = TransposeMap::new(&self.dims, systems)?;
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = map.apply(i, j);
                out[(a, b)] = self.mat[(i, j)];
            }
        }
        Ok(Self {
            mat: out,
            dims: self.dims.clone(),
        })
    }

    /// Projector onto the span of eigenvectors with eigenvalue above `tol`.
    pub fn support_projector(&self, tol: f64) -> Result<Self> {
        let basis = self.support_basis(tol)?;
        Ok(Self {
            mat: &basis * basis.adjoint(),
            dims: self.dims.clone(),
        })
    }

    /// Orthonormal basis (as columns) of the eigenspaces above `tol`.
    pub fn support_basis(&self, tol: f64) -> Result<CMatrix> {
        let eig = self.eigh()?;
        let cols: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] > tol).collect();
        let n = self.dim();
        Ok(CMatrix::from_fn(n, cols.len(), |i, j| eig.vectors[(i, cols[j])]))
    }

    /// `K† self K` for an `n×r` matrix `K`; drops subsystem structure.
    pub fn compress(&self, k: &CMatrix) -> Self {
        Self::from_hermitian_unchecked(k.adjoint() * &self.mat * k, Vec::new())
    }

    /// `K self K†` for an `r×n`-shaped map given as the `n×r` isometry `K`.
    pub fn expand(&self, k: &CMatrix, dims: Vec<usize>) -> Self {
        Self::from_hermitian_unchecked(k * &self.mat * k.adjoint(), dims)
    }

    /// Applies `f` to the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let eig = self.eigh()?;
        Ok(Self::from_hermitian_unchecked(eig.map(f), self.dims.clone()))
    }

    /// Conjugation by a unitary, `U self U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self::from_hermitian_unchecked(u * &self.mat * u.adjoint(), self.dims.clone())
    }
}

/// Index permutation implementing a partial transpose on a set of subsystems.
#[derive(Debug, Clone)]
pub struct TransposeMap {
    dims: Vec<usize>,
    strides: Vec<usize>,
    systems: Vec<usize>,
}

impl TransposeMap {
    pub fn new(dims: &[usize], systems: &[usize]) -> Result<Self> {
        if let Some(&bad) = systems.iter().find(|&&s| s >= dims.len()) {
            return Err(Error::InvalidArgument(format!(
                "subsystem {bad} out of range for {} subsystems",
                dims.len()
            )));
        }
        let mut systems = systems.to_vec();
        systems.sort_unstable();
        systems.dedup();
        Ok(Self {
            dims: dims.to_vec(),
            strides: strides(dims),
            systems,
        })
    }

    /// Image of the matrix position `(i, j)`.
    #[inline]
    pub fn apply(&self, i: usize, j: usize) -> (usize, usize) {
        let (mut a, mut b) = (i, j);
        for &s in &self.systems {
            let st = self.strides[s];
            let di = (i / st) % self.dims[s];
            let dj = (j / st) % self.dims[s];
            a = a - di * st + dj * st;
            b = b - dj * st + di * st;
        }
        (a, b)
    }
}

/// A validated density operator: PSD within 1e-9 and unit trace within 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

pub const DENSITY_TOL: f64 = 1e-9;

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NotDensity(format!("trace {tr}")));
        }
        let min = op.min_eigenvalue()?;
        if min < -DENSITY_TOL {
            return Err(Error::NotDensity(format!("min eigenvalue {min:.3e}")));
        }
        Ok(Self { op })
    }

    /// Normalizes a PSD operator to unit trace first.
    pub fn from_unnormalized(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if tr <= 0.0 {
            return Err(Error::NotDensity(format!("trace {tr}")));
        }
        Self::new(op.scale(1.0 / tr))
    }

    pub fn pure(v: &CVector) -> Result<Self> {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotDensity("zero vector".into()));
        }
        let u = v / c(norm);
        Ok(Self {
            op: HermitianOperator::projector_onto(&u),
        })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            op: HermitianOperator::identity(n).scale(1.0 / n as f64),
        }
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_op(self) -> HermitianOperator {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        Ok(Self {
            op: self.op.with_dims(dims)?,
        })
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            op: self.op.tensor(&other.op)?,
        })
    }

    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        Ok(Self {
            op: self.op.tensor_power(n)?,
        })
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        Ok(Self {
            op: self.op.partial_trace(keep)?,
        })
    }

    /// Rank-one test used by the pure-state entry points.
    pub fn is_pure(&self, tol: f64) -> Result<bool> {
        let eig = self.op.eigh()?;
        Ok(eig.values.iter().rev().skip(1).all(|&l| l.abs() <= tol) && (eig.max() - 1.0).abs() <= tol)
    }

    /// Leading eigenvector, the pure-state vector when `is_pure`.
    pub fn leading_vector(&self) -> Result<CVector> {
        let eig = self.op.eigh()?;
        let k = eig.values.len() - 1;
        Ok(eig.vectors.column(k).into_owned())
    }

    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        Self {
            op: self.op.conjugate_by(u),
        }
    }
}

impl AsRef<HermitianOperator> for DensityMatrix {
    fn as_ref(&self) -> &HermitianOperator {
        &self.op
    }
}

/// Half the trace norm of `a - b`, clamped to `[0, 1]`.
pub fn trace_norm_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let diff = HermitianOperator::from_hermitian_unchecked(a.op.matrix() - b.op.matrix(), Vec::new());
    let s: f64 = diff.eigenvalues()?.iter().map(|l| l.abs()).sum();
    Ok((0.5 * s).clamp(0.0, 1.0))
}

pub fn eigh_matrix(m: &CMatrix) -> Result<Eigh> {
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, EIGH_MAX_ITER)
        .ok_or_else(|| Error::SolverFailure("Hermitian eigensolver did not converge".into()))?;
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Eigh { values, vectors })
}

/// `Re Tr(a b)` for Hermitian `a`, `b`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = a[(i, j)];
            let y = b[(j, i)];
            s += x.re * y.re - x.im * y.im;
        }
    }
    s
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut st = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        st[k] = st[k + 1] * dims[k + 1];
    }
    st
}

fn merge_dims(a: &[usize], b: &[usize]) -> Vec<usize> {
    if a == b || b.is_empty() {
        a.to_vec()
    } else if a.is_empty() {
        b.to_vec()
    } else {
        Vec::new()
    }
}

pub(crate) fn largest_power_within(base: usize, cap: usize) -> usize {
    let mut n = 0;
    let mut d = 1usize;
    while let Some(next) = d.checked_mul(base) {
        if next > cap {
            break;
        }
        d = next;
        n += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> HermitianOperator {
        let s = 0.5f64.sqrt();
        let v = CVector::from_vec(vec![c(s), c(0.0), c(0.0), c(s)]);
        HermitianOperator::projector_onto(&v).with_dims(vec![2, 2]).unwrap()
    }

    #[test]
    fn eigh_identity_and_diagonal() {
        assert_eq!(HermitianOperator::identity(2).eigenvalues().unwrap(), vec![1.0, 1.0]);
        let v = HermitianOperator::diagonal(&[0.75, 0.25]).eigenvalues().unwrap();
        assert!((v[0] - 0.25).abs() < 1e-15 && (v[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn eigh_bell_projector() {
        // characteristic polynomial of a rank-one projector is λ³(λ - 1)
        let v = bell().eigenvalues().unwrap();
        for (got, want) in v.iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.1), c(0.0), c(1.0)]);
        assert!(matches!(HermitianOperator::new(m, vec![]), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn tensor_basis_states() {
        let a = HermitianOperator::diagonal(&[1.0, 0.0]);
        let b = HermitianOperator::diagonal(&[0.0, 1.0]);
        let t = a.tensor(&b).unwrap();
        assert_eq!(t.matrix(), HermitianOperator::diagonal(&[0.0, 1.0, 0.0, 0.0]).matrix());
        assert_eq!(t.subsystem_dims(), &[2, 2]);
        let id = HermitianOperator::identity(2).tensor(&HermitianOperator::identity(2)).unwrap();
        assert_eq!(id.matrix(), HermitianOperator::identity(4).matrix());
    }

    #[test]
    fn tensor_respects_cap() {
        let a = HermitianOperator::identity(16);
        assert!(matches!(
            a.tensor_with_cap(&a, 255),
            Err(Error::CapacityExceeded { requested: 256, .. })
        ));
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        let r = bell().partial_trace(&[0]).unwrap();
        let want = HermitianOperator::identity(2).scale(0.5);
        assert!((r.matrix() - want.matrix()).norm() < 1e-15);
        assert!(matches!(bell().partial_trace(&[]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn partial_trace_of_product() {
        let s = HermitianOperator::from_real(&[vec![0.7, 0.2], vec![0.2, 0.3]], vec![]).unwrap();
        let t = HermitianOperator::diagonal(&[0.5, 1.5]);
        let r = s.tensor(&t).unwrap().partial_trace(&[0]).unwrap();
        assert!((r.matrix() - s.scale(2.0).matrix()).norm() < 1e-14);
        let mixed = HermitianOperator::identity(4).scale(0.25).with_dims(vec![2, 2]).unwrap();
        let r = mixed.partial_trace(&[1]).unwrap();
        assert!((r.matrix() - HermitianOperator::identity(2).scale(0.5).matrix()).norm() < 1e-15);
    }

    #[test]
    fn partial_transpose_of_bell_is_half_swap() {
        let pt = bell().partial_transpose(1).unwrap();
        let v = pt.eigenvalues().unwrap();
        for (got, want) in v.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(matches!(bell().partial_transpose(2), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn partial_transpose_of_product_and_identity() {
        let s = HermitianOperator::new(
            CMatrix::from_row_slice(2, 2, &[c(0.6), Complex64::new(0.1, 0.2), Complex64::new(0.1, -0.2), c(0.4)]),
            vec![],
        )
        .unwrap();
        let t = HermitianOperator::new(
            CMatrix::from_row_slice(2, 2, &[c(0.3), Complex64::new(0.0, 0.4), Complex64::new(0.0, -0.4), c(0.7)]),
            vec![],
        )
        .unwrap();
        let pt = s.tensor(&t).unwrap().partial_transpose(1).unwrap();
        let tt = HermitianOperator::new(t.matrix().transpose(), vec![]).unwrap();
        assert_eq!(pt.matrix(), s.tensor(&tt).unwrap().matrix());
        let id = HermitianOperator::identity(4).with_dims(vec![2, 2]).unwrap();
        assert_eq!(id.partial_transpose(0).unwrap(), id);
    }

    #[test]
    fn trace_distance_examples() {
        let a = DensityMatrix::new(HermitianOperator::diagonal(&[1.0, 0.0])).unwrap();
        let b = DensityMatrix::new(HermitianOperator::diagonal(&[0.0, 1.0])).unwrap();
        assert_eq!(trace_norm_distance(&a, &a).unwrap(), 0.0);
        assert!((trace_norm_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn support_projector_examples() {
        let p = HermitianOperator::diagonal(&[0.5, 0.5, 0.0, 0.0]).support_projector(1e-9).unwrap();
        assert!((p.matrix() - HermitianOperator::diagonal(&[1.0, 1.0, 0.0, 0.0]).matrix()).norm() < 1e-14);
        let b = bell();
        assert!((b.support_projector(1e-9).unwrap().matrix() - b.matrix()).norm() < 1e-12);
        let full = HermitianOperator::diagonal(&[0.2, 0.8]).support_projector(1e-9).unwrap();
        assert!((full.matrix() - HermitianOperator::identity(2).matrix()).norm() < 1e-14);
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(HermitianOperator::diagonal(&[0.5, 0.6])).is_err());
        assert!(DensityMatrix::new(HermitianOperator::diagonal(&[1.5, -0.5])).is_err());
    }

    #[test]
    fn transpose_map_matches_dense_partial_transpose() {
        let dims = [2, 3, 2];
        let map = TransposeMap::new(&dims, &[1, 2]).unwrap();
        let n = 12;
        for i in 0..n {
            for j in 0..n {
                let (a, b) = map.apply(i, j);
                assert_eq!(map.apply(a, b), (i, j));
            }
        }
    }
}
