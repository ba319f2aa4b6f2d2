//! Closed-form state families and analytic reference values.

use crate::divergences::{DivergenceValue, Provenance};
use crate::error::{Error, Result};
use crate::qlinalg::{c, CMatrix, CVector, DensityMatrix, HermitianOperator};

/// Parameters of the two-qudit isotropic family
/// `ρ_p = p Φ_d + (1 − p)(I − Φ_d)/(d² − 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropicParams {
    pub d: usize,
    pub p: f64,
}

impl IsotropicParams {
    pub fn new(d: usize, p: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument(format!("isotropic dimension must be ≥ 2, got {d}")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("isotropic weight must lie in [0,1], got {p}")));
        }
        Ok(Self { d, p })
    }

    /// Separable (equivalently PPT) exactly when `p ≤ 1/d`.
    pub fn is_separable(&self) -> bool {
        self.p <= 1.0 / self.d as f64
    }
}

fn max_entangled_vector(d: usize) -> CVector {
    let mut v = CVector::zeros(d * d);
    let a = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        v[i * d + i] = c(a);
    }
    v
}

/// `Φ_d = |Φ⟩⟨Φ|` with `|Φ⟩ = d^{-1/2} Σ |ii⟩`, tagged with dims `[d, d]`.
pub fn max_entangled(d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension must be ≥ 2, got {d}")));
    }
    DensityMatrix::pure(&max_entangled_vector(d))?.with_dims(vec![d, d])
}

pub fn isotropic(params: IsotropicParams) -> Result<DensityMatrix> {
    let IsotropicParams { d, p } = params;
    let n = d * d;
    let phi = HermitianOperator::projector_onto(&max_entangled_vector(d));
    let rest = HermitianOperator::identity(n).sub(&phi);
    let op = phi.scale(p).add(&rest.scale((1.0 - p) / (n as f64 - 1.0)));
    DensityMatrix::new(op.with_dims(vec![d, d])?)
}

/// Swap operator on `C^d ⊗ C^d`.
pub fn swap(d: usize) -> HermitianOperator {
    let n = d * d;
    let mut m = CMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, j * d + i)] = c(1.0);
        }
    }
    HermitianOperator::from_hermitian_unchecked(m, vec![d, d])
}

/// `h₂(p)` in bits with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    -xlog2x(p) - xlog2x(1.0 - p)
}

pub(crate) fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(-rho.op().eigenvalues()?.into_iter().map(xlog2x).sum::<f64>())
}

/// Relative entropy of coherence `S(Δρ) − S(ρ)`.
pub fn coherence_rel_entropy(rho: &DensityMatrix) -> Result<DivergenceValue> {
    let diag: f64 = -(0..rho.dim()).map(|i| xlog2x(rho.op().matrix()[(i, i)].re)).sum::<f64>();
    let bits = (diag - von_neumann_entropy(rho)?).max(0.0);
    Ok(DivergenceValue::finite(bits, Provenance::ClosedForm))
}

/// Optimal dual operators for the isotropic projective divergence:
/// `A = (d−1)/(1−p)·Φ_d`, `B = (I − Φ_d)/(1−p)`.
pub fn isotropic_witnesses(params: IsotropicParams) -> Result<(HermitianOperator, HermitianOperator)> {
    let IsotropicParams { d, p } = params;
    let df = d as f64;
    if p <= 1.0 / df || p >= 1.0 {
        return Err(Error::WrongRegime(format!("isotropic witnesses need p in (1/d, 1), got p = {p} at d = {d}")));
    }
    let phi = HermitianOperator::projector_onto(&max_entangled_vector(d)).with_dims(vec![d, d])?;
    let a = phi.scale((df - 1.0) / (1.0 - p));
    let b = HermitianOperator::identity(d * d).with_dims(vec![d, d])?.sub(&phi).scale(1.0 / (1.0 - p));
    Ok((a, b))
}

/// `log₂(p(d−1)/(1−p))` above the separability threshold, else 0; `+∞` at `p = 1`.
pub fn isotropic_dproj_bits(params: IsotropicParams) -> f64 {
    let IsotropicParams { d, p } = params;
    if params.is_separable() {
        0.0
    } else if p >= 1.0 {
        f64::INFINITY
    } else {
        (p * (d as f64 - 1.0) / (1.0 - p)).log2()
    }
}

/// Regularized relative entropy of entanglement of `ρ_p`:
/// `p log d + (1−p) log(d/(d−1)) − h₂(p)` above threshold, else 0.
pub fn isotropic_dsep_inf_bits(params: IsotropicParams) -> f64 {
    let IsotropicParams { d, p } = params;
    if params.is_separable() {
        return 0.0;
    }
    let df = d as f64;
    (p * df.log2() + (1.0 - p) * (df / (df - 1.0)).log2() - binary_entropy(p)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_spectrum() {
        let rho = isotropic(IsotropicParams::new(3, 0.5).unwrap()).unwrap();
        let ev = rho.op().eigenvalues().unwrap();
        assert!((ev[8] - 0.5).abs() < 1e-12);
        assert!(ev[..8].iter().all(|&x| (x - 0.0625).abs() < 1e-12));
        let quarter = isotropic(IsotropicParams::new(2, 0.25).unwrap()).unwrap();
        assert!(quarter.op().sub(&HermitianOperator::identity(4).scale(0.25)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn max_entangled_marginal_and_overlap() {
        let phi = max_entangled(2).unwrap();
        let red = phi.partial_trace(&[0]).unwrap();
        assert!(red.op().sub(&HermitianOperator::identity(2).scale(0.5)).frobenius_norm() < 1e-12);
        let rho = isotropic(IsotropicParams::new(2, 0.3).unwrap()).unwrap();
        assert!((rho.op().inner(phi.op()) - 0.3).abs() < 1e-12);
        assert_eq!(isotropic(IsotropicParams::new(2, 1.0).unwrap()).unwrap(), phi);
    }

    #[test]
    fn entropies() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert!((binary_entropy(0.9) - 0.468_995_593_589_281).abs() < 1e-12);
        let plus = DensityMatrix::pure(&CVector::from_vec(vec![c(0.5f64.sqrt()), c(0.5f64.sqrt())])).unwrap();
        assert!((coherence_rel_entropy(&plus).unwrap().bits - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherence_is_additive() {
        let rho = DensityMatrix::new(HermitianOperator::from_real(&[vec![0.7, 0.2], vec![0.2, 0.3]], vec![]).unwrap()).unwrap();
        let one = coherence_rel_entropy(&rho).unwrap().bits;
        let two = coherence_rel_entropy(&rho.tensor(&rho).unwrap()).unwrap().bits;
        assert!((two - 2.0 * one).abs() < 1e-9);
    }

    #[test]
    fn witness_traces() {
        let params = IsotropicParams::new(2, 0.75).unwrap();
        let (a, b) = isotropic_witnesses(params).unwrap();
        let rho = isotropic(params).unwrap();
        assert!((a.inner(rho.op()) - 3.0).abs() < 1e-12);
        assert!((b.inner(rho.op()) - 1.0).abs() < 1e-12);
        assert!(matches!(isotropic_witnesses(IsotropicParams::new(2, 0.5).unwrap()), Err(Error::WrongRegime(_))));
    }

    #[test]
    fn closed_forms() {
        let p9 = IsotropicParams::new(2, 0.9).unwrap();
        assert!((isotropic_dproj_bits(p9) - 9f64.log2()).abs() < 1e-12);
        assert!((isotropic_dsep_inf_bits(p9) - 0.531_004_406_410_719).abs() < 1e-9);
        assert_eq!(isotropic_dproj_bits(IsotropicParams::new(2, 0.5).unwrap()), 0.0);
        assert_eq!(swap(2).matrix()[(1, 2)], c(1.0));
    }
}
