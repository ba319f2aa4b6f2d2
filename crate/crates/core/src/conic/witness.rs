//! Checking dual witnesses `(A, B)` for the projective-divergence program.
//!
//! A pair of PSD operators with `B − A` in the dual of the free cone gives
//! `Tr(Aρ)/Tr(Bρ) ≤ Ω(ρ)` for every `ρ`.

use serde::Serialize;

use crate::conic::SolverConfig;
use crate::error::{Error, Result};
use crate::freesets::{ConeKind, FreeCone};
use crate::qlinalg::{DensityMatrix, HermitianOperator};

/// How dual-cone membership of `B − A` was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessRoute {
    /// `λ_max(A^Γ) ≤ λ_min(B^Γ)`, sufficient for PPT cones.
    PartialTransposeSpectra,
    /// Closed-form check for diagonal or singleton cones.
    Direct,
    /// Minimization of `Tr((B − A)σ)` over the cone.
    ConicSolve,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessCheck {
    pub feasible: bool,
    pub lower_bound: f64,
    pub route: WitnessRoute,
    /// Smallest value of `Tr((B − A)σ)` over unit-trace free `σ` found by
    /// the check (a lower estimate for the spectral route).
    pub dual_margin: f64,
}

/// Verifies a dual witness and returns the certified ratio `Tr(Aρ)/Tr(Bρ)`.
///
/// `tol` is a relative tolerance on PSD-ness and dual-cone membership,
/// scaled by the norms of `A` and `B`.
pub fn verify_dual_witness(
    cone: &FreeCone,
    rho: &DensityMatrix,
    a: &HermitianOperator,
    b: &HermitianOperator,
    tol: f64,
) -> Result<WitnessCheck> {
    let n = cone.dim();
    if a.dim() != n || b.dim() != n || rho.dim() != n {
        return Err(Error::InvalidArgument("witness, state and cone dimensions differ".into()));
    }
    let denom = b.inner(rho.op());
    if denom <= tol {
        return Err(Error::DegenerateWitness(denom));
    }
    let lower_bound = a.inner(rho.op()) / denom;
    let scale = a.frobenius_norm().max(b.frobenius_norm()).max(1.0);
    let abs_tol = tol * scale;
    let psd = a.min_eigenvalue()? >= -abs_tol && b.min_eigenvalue()? >= -abs_tol;
    let diff = b.sub(a);

    let (route, margin) = match cone.kind() {
        ConeKind::Ppt { dims, transposed } => {
            let at = a.clone().with_dims(dims.clone())?.partial_transpose_many(transposed)?;
            let bt = b.clone().with_dims(dims.clone())?.partial_transpose_many(transposed)?;
            let spectral = bt.min_eigenvalue()? - at.max_eigenvalue()?;
            if spectral >= -abs_tol {
                (WitnessRoute::PartialTransposeSpectra, spectral)
            } else {
                (WitnessRoute::ConicSolve, cone.dual_margin(&diff, &SolverConfig::default())?)
            }
        }
        ConeKind::Diagonal { .. } | ConeKind::Singleton { .. } => {
            (WitnessRoute::Direct, cone.dual_margin(&diff, &SolverConfig::default())?)
        }
        ConeKind::Custom { .. } => (WitnessRoute::ConicSolve, cone.dual_margin(&diff, &SolverConfig::default())?),
    };
    Ok(WitnessCheck {
        feasible: psd && margin >= -abs_tol,
        lower_bound,
        route,
        dual_margin: margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{isotropic, isotropic_witnesses, IsotropicParams};

    const TOL: f64 = 1e-9;

    #[test]
    fn isotropic_witness_is_feasible() {
        let params = IsotropicParams::new(2, 0.75).unwrap();
        let (a, b) = isotropic_witnesses(params).unwrap();
        let rho = isotropic(params).unwrap();
        let check = verify_dual_witness(&FreeCone::ppt(2, 2).unwrap(), &rho, &a, &b, TOL).unwrap();
        assert!(check.feasible);
        assert!((check.lower_bound - 3.0).abs() < 1e-12);
        assert_eq!(check.route, WitnessRoute::PartialTransposeSpectra);
    }

    #[test]
    fn trivial_witness() {
        let rho = isotropic(IsotropicParams::new(2, 0.6).unwrap()).unwrap();
        let check = verify_dual_witness(
            &FreeCone::ppt(2, 2).unwrap(),
            &rho,
            &HermitianOperator::zeros(4),
            &HermitianOperator::identity(4),
            TOL,
        )
        .unwrap();
        assert!(check.feasible);
        assert_eq!(check.lower_bound, 0.0);
    }

    #[test]
    fn two_copy_witness() {
        let params = IsotropicParams::new(2, 0.75).unwrap();
        let (a, b) = isotropic_witnesses(params).unwrap();
        let rho = isotropic(params).unwrap().tensor_power(2).unwrap();
        let cone = FreeCone::ppt_multi(vec![2, 2, 2, 2], vec![1, 3]).unwrap();
        let a2 = a.tensor(&a).unwrap();
        let b2 = b.tensor(&b).unwrap();
        let check = verify_dual_witness(&cone, &rho, &a2, &b2, TOL).unwrap();
        assert!(check.feasible);
        assert!((check.lower_bound - 9.0).abs() < 1e-10);
    }

    #[test]
    fn infeasible_witness_is_rejected() {
        // B − A = −I is not in any dual cone
        let rho = isotropic(IsotropicParams::new(2, 0.6).unwrap()).unwrap();
        let check = verify_dual_witness(
            &FreeCone::ppt(2, 2).unwrap(),
            &rho,
            &HermitianOperator::identity(4).scale(2.0),
            &HermitianOperator::identity(4),
            TOL,
        )
        .unwrap();
        assert!(!check.feasible);
        assert_eq!(check.route, WitnessRoute::ConicSolve);
    }

    #[test]
    fn degenerate_denominator() {
        let rho = isotropic(IsotropicParams::new(2, 0.6).unwrap()).unwrap();
        let err = verify_dual_witness(
            &FreeCone::ppt(2, 2).unwrap(),
            &rho,
            &HermitianOperator::zeros(4),
            &HermitianOperator::zeros(4),
            TOL,
        );
        assert!(matches!(err, Err(Error::DegenerateWitness(_))));
    }
}
