//! Pairwise and free-set-optimized divergences, in bits.
//!
//! Pairwise quantities use closed eigenvalue forms. Set-optimized quantities
//! are linear conic programs over the free cone, except the smoothed
//! projective variants, which bisect on the ratio `γ` with a minimal
//! smoothing radius as the feasibility oracle.

use std::f64::consts::LN_2;

use serde::{Serialize, Serializer};

use crate::conic::{
    bisect_threshold, verify_dual_witness, ConicProblem, ConicSolution, HermExpr, Multiplier, ScalarExpr,
    SolverConfig, Status, WitnessCheck, INFINITY_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::freesets::{ConeKind, FreeCone};
use crate::models::{coherence_rel_entropy, von_neumann_entropy};
use crate::qlinalg::{c, eigh_matrix, CMatrix, DensityMatrix, HermitianOperator};

/// Eigenvalues below this fraction of the largest one count as zero.
pub const SUPPORT_TOL: f64 = 1e-9;

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    /// Conic optimum with its relative duality gap.
    Conic { gap: f64 },
    /// Certified bracket `[lo, hi]` in bits; the reported value is `hi`.
    WitnessBracket {
        #[serde(serialize_with = "serialize_bits")]
        lo: f64,
        #[serde(serialize_with = "serialize_bits")]
        hi: f64,
    },
}

/// Extended-real divergence value in bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceValue {
    #[serde(serialize_with = "serialize_bits")]
    pub bits: f64,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

pub(crate) fn serialize_bits<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str(if *v > 0.0 { "+inf" } else { "-inf" })
    } else {
        s.serialize_f64(*v)
    }
}

impl DivergenceValue {
    pub fn finite(bits: f64, provenance: Provenance) -> Self {
        Self {
            bits,
            provenance,
            reason: None,
        }
    }

    pub fn infinite(provenance: Provenance, reason: impl Into<String>) -> Self {
        Self {
            bits: f64::INFINITY,
            provenance,
            reason: Some(reason.into()),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.bits.is_finite()
    }

    /// Certified lower end: the bracket's `lo` when present, else `bits`.
    pub fn lower(&self) -> f64 {
        match self.provenance {
            Provenance::WitnessBracket { lo, .. } => lo,
            _ => self.bits,
        }
    }

    fn conic(bits: f64, sol: &ConicSolution) -> Self {
        Self::finite(bits, Provenance::Conic { gap: sol.gap })
    }
}

/// The set-optimized measures that admit smoothing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetMeasure {
    DmaxSet,
    DprojSet,
    RobustnessStandard,
    DprojSSet,
}

/// Radius of the trace-distance ball `½‖ρ′ − ρ‖₁ ≤ ε`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct SmoothingRadius(f64);

impl SmoothingRadius {
    pub fn new(eps: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::InvalidArgument(format!("smoothing radius must lie in [0,1), got {eps}")));
        }
        Ok(Self(eps))
    }

    pub fn zero() -> Self {
        Self(0.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

// ---------------------------------------------------------------------------
// pairwise

struct Support {
    /// Orthonormal columns spanning the support.
    basis: CMatrix,
    rank: usize,
}

fn support(op: &HermitianOperator) -> Result<Support> {
    let eig = op.eigh()?;
    let tol = SUPPORT_TOL * eig.max().max(0.0);
    let cols: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] > tol).collect();
    let n = op.dim();
    let real = op.matrix().iter().all(|z| z.im == 0.0);
    let basis = CMatrix::from_fn(n, cols.len(), |i, j| {
        let z = eig.vectors[(i, cols[j])];
        if real {
            c(z.re)
        } else {
            z
        }
    });
    Ok(Support {
        rank: cols.len(),
        basis,
    })
}

/// Whether the support of `a` lies inside the support of `b`.
fn support_within(a: &HermitianOperator, b: &HermitianOperator) -> Result<bool> {
    let sb = support(b)?;
    if sb.rank == b.dim() {
        return Ok(true);
    }
    let proj = &sb.basis * sb.basis.adjoint();
    let outside = a.matrix() - &proj * a.matrix() * &proj;
    let leak = outside.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(leak <= 1e-7 * a.max_eigenvalue()?.max(1e-300))
}

/// Umegaki relative entropy `Tr ρ (log ρ − log σ)`.
pub fn rel_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DivergenceValue> {
    check_dims(rho.op(), sigma.op())?;
    if !support_within(rho.op(), sigma.op())? {
        return Ok(DivergenceValue::infinite(Provenance::ClosedForm, "support of ρ not contained in support of σ"));
    }
    let eig = sigma.op().eigh()?;
    let tol = SUPPORT_TOL * eig.max();
    let log_sigma = eig.map(|l| if l > tol { l.log2() } else { 0.0 });
    let cross = crate::qlinalg::hs_inner(rho.op().matrix(), &log_sigma);
    let bits = -von_neumann_entropy(rho)? - cross;
    Ok(DivergenceValue::finite(bits.max(0.0), Provenance::ClosedForm))
}

/// `log₂ λ_max(b^{-1/2} a b^{-1/2})` on the support of `b`, for PSD operators.
fn dmax_ops(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    if !support_within(a, b)? {
        return Ok(f64::INFINITY);
    }
    let sb = support(b)?;
    let ar = a.compress(&sb.basis);
    let br = b.compress(&sb.basis);
    let eb = br.eigh()?;
    let inv_sqrt = eb.map(|l| 1.0 / l.max(f64::MIN_POSITIVE).sqrt());
    let m = &inv_sqrt * ar.matrix() * &inv_sqrt;
    let lam = eigh_matrix(&((&m + m.adjoint()) * c(0.5)))?.max();
    Ok(if lam <= 0.0 { f64::NEG_INFINITY } else { lam.log2() })
}

/// Max-relative entropy `min{log λ : ρ ≤ λσ}`.
pub fn dmax(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DivergenceValue> {
    check_dims(rho.op(), sigma.op())?;
    let v = dmax_ops(rho.op(), sigma.op())?;
    Ok(if v.is_finite() {
        DivergenceValue::finite(v, Provenance::ClosedForm)
    } else {
        DivergenceValue::infinite(Provenance::ClosedForm, "support of ρ not contained in support of σ")
    })
}

/// Min-relative entropy `−log Tr(Π_ρ σ)`; equals `−log⟨ψ|σ|ψ⟩` for pure inputs.
pub fn dmin(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DivergenceValue> {
    check_dims(rho.op(), sigma.op())?;
    let proj = rho.op().support_projector(SUPPORT_TOL * rho.op().max_eigenvalue()?)?;
    let overlap = proj.inner(sigma.op());
    if overlap <= SUPPORT_TOL {
        return Ok(DivergenceValue::infinite(Provenance::ClosedForm, "σ has no weight on the support of ρ"));
    }
    Ok(DivergenceValue::finite((-overlap.log2()).max(0.0), Provenance::ClosedForm))
}

/// Projective relative entropy `D_max(ρ‖σ) + D_max(σ‖ρ)`.
pub fn dproj(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<DivergenceValue> {
    check_dims(rho.op(), sigma.op())?;
    let bits = dproj_operators(rho.op(), sigma.op())?;
    Ok(if bits.is_finite() {
        DivergenceValue::finite(bits.max(0.0), Provenance::ClosedForm)
    } else {
        DivergenceValue::infinite(Provenance::ClosedForm, "supports of ρ and σ differ")
    })
}

/// Hilbert projective metric between two PSD operators; invariant under
/// positive rescaling of either argument.
pub fn dproj_operators(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    check_dims(a, b)?;
    Ok(dmax_ops(a, b)? + dmax_ops(b, a)?)
}

fn check_dims(a: &HermitianOperator, b: &HermitianOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidArgument(format!("dimension mismatch {} vs {}", a.dim(), b.dim())));
    }
    Ok(())
}

fn check_cone(rho: &DensityMatrix, cone: &FreeCone) -> Result<()> {
    if rho.dim() != cone.dim() {
        return Err(Error::InvalidArgument(format!(
            "state dimension {} does not match cone dimension {}",
            rho.dim(),
            cone.dim()
        )));
    }
    Ok(())
}

fn is_real(rho: &DensityMatrix, cone: &FreeCone) -> bool {
    cone.is_real() && rho.op().matrix().iter().all(|z| z.im == 0.0)
}

// ---------------------------------------------------------------------------
// set-optimized, unsmoothed

fn default_cfg() -> SolverConfig {
    SolverConfig::default()
}

/// Turns a solved minimization of a ratio `t ≥ 1` into bits.
fn from_ratio(sol: &ConicSolution, infeasible_reason: &str) -> Result<DivergenceValue> {
    match sol.status {
        Status::Optimal => Ok(DivergenceValue::conic(sol.primal_value.max(1.0).log2(), sol)),
        Status::Infeasible => Ok(DivergenceValue::infinite(Provenance::Conic { gap: 0.0 }, infeasible_reason)),
        s => Err(Error::SolverFailure(format!("{s:?} after {} iterations", sol.iterations))),
    }
}

/// Max-relative entropy of resource: `min log Tr σ̃` over `σ̃ ⪰ ρ` in the cone.
pub fn dmax_set(rho: &DensityMatrix, cone: &FreeCone) -> Result<DivergenceValue> {
    check_cone(rho, cone)?;
    if let ConeKind::Singleton { state } = cone.kind() {
        return dmax(rho, state);
    }
    let mut pb = ConicProblem::new();
    let s = cone.new_member(&mut pb, "σ̃", is_real(rho, cone))?;
    pb.add_psd("σ̃ ⪰ ρ", s.plus_constant(&(-rho.op().matrix())));
    pb.minimize(s.trace());
    from_ratio(&pb.solve(&default_cfg())?, "no free operator dominates ρ")
}

/// Min-relative entropy of resource: `−log max Tr(Π_ρ σ)` over free states.
pub fn dmin_set(rho: &DensityMatrix, cone: &FreeCone) -> Result<DivergenceValue> {
    check_cone(rho, cone)?;
    if let ConeKind::Singleton { state } = cone.kind() {
        return dmin(rho, state);
    }
    let proj = rho.op().support_projector(SUPPORT_TOL * rho.op().max_eigenvalue()?)?;
    let mut pb = ConicProblem::new();
    let s = cone.new_member(&mut pb, "σ̃", is_real(rho, cone))?;
    let mut overlap = s.inner(proj.matrix());
    overlap.constant -= 1.0;
    pb.add_nonneg("Tr Πσ̃ ≥ 1", overlap);
    pb.minimize(s.trace());
    from_ratio(&pb.solve(&default_cfg())?, "no free state overlaps the support of ρ")
}

/// Logarithmic standard robustness `log(1 + R_s)`.
pub fn robustness_standard(rho: &DensityMatrix, cone: &FreeCone) -> Result<DivergenceValue> {
    check_cone(rho, cone)?;
    if let ConeKind::Singleton { state } = cone.kind() {
        return Ok(if rho.op().sub(state.op()).frobenius_norm() <= 1e-9 {
            DivergenceValue::finite(0.0, Provenance::ClosedForm)
        } else {
            DivergenceValue::infinite(Provenance::ClosedForm, "ρ is not the free state")
        });
    }
    let mut pb = ConicProblem::new();
    let m = cone.new_member(&mut pb, "M", is_real(rho, cone))?;
    cone.constrain_member(&mut pb, &m.plus_constant(rho.op().matrix()), "ρ+M")?;
    pb.minimize(m.trace());
    let sol = pb.solve(&default_cfg())?;
    match sol.status {
        Status::Optimal => Ok(DivergenceValue::conic((1.0 + sol.primal_value.max(0.0)).log2(), &sol)),
        Status::Infeasible => Ok(DivergenceValue::infinite(
            Provenance::Conic { gap: 0.0 },
            "no free mixture makes ρ free",
        )),
        s => Err(Error::SolverFailure(format!("{s:?}"))),
    }
}

/// Dual operators `(A, B)` recovered from the projective program, with their check.
#[derive(Debug, Clone)]
pub struct DualWitness {
    pub a: HermitianOperator,
    pub b: HermitianOperator,
    pub check: WitnessCheck,
}

/// Projective divergence of resource plus, when finite, the dual witness it
/// certifies. The value's provenance is a bracket `[witness bound, primal]`.
#[derive(Debug, Clone)]
pub struct CertifiedValue {
    pub value: DivergenceValue,
    pub witness: Option<DualWitness>,
}

/// `log Ω(ρ)` with `Ω(ρ) = min{γ : ρ ≤ σ̃ ≤ γρ, σ̃ ∈ cone}`.
pub fn dproj_set(rho: &DensityMatrix, cone: &FreeCone) -> Result<DivergenceValue> {
    Ok(dproj_set_impl(rho, cone, false, false)?.value)
}

/// [`dproj_set`] with the dual witness extracted, repaired into the dual
/// cone if needed, and checked.
pub fn dproj_set_certified(rho: &DensityMatrix, cone: &FreeCone) -> Result<CertifiedValue> {
    dproj_set_impl(rho, cone, false, true)
}

/// `log Ω_s(ρ)` with the cone ordering `σ̃ − ρ ∈ cone` in place of `σ̃ ⪰ ρ`.
pub fn dproj_s_set(rho: &DensityMatrix, cone: &FreeCone) -> Result<DivergenceValue> {
    Ok(dproj_set_impl(rho, cone, true, false)?.value)
}

fn dproj_set_impl(rho: &DensityMatrix, cone: &FreeCone, cone_order: bool, certify: bool) -> Result<CertifiedValue> {
    check_cone(rho, cone)?;
    if let ConeKind::Singleton { state } = cone.kind() {
        let value = if cone_order {
            robustness_standard(rho, cone)?
        } else {
            dproj(rho, state)?
        };
        return Ok(CertifiedValue { value, witness: None });
    }
    let real = is_real(rho, cone);
    let sup = support(rho.op())?;
    let n = rho.dim();
    let mut pb = ConicProblem::new();
    // σ̃ ≤ γρ forces σ̃ onto the support of ρ
    let s = if sup.rank == n {
        cone.new_member(&mut pb, "σ̃", real)?
    } else {
        cone.new_member_on_support(&mut pb, "σ̃", &sup.basis, real)?
    };
    let g = pb.scalar_var("γ");
    let rho_m = rho.op().matrix();
    let (lower_id, upper_id, basis) = if sup.rank == n {
        let lower = if cone_order {
            cone.constrain_member(&mut pb, &s.plus_constant(&(-rho_m)), "σ̃−ρ")?;
            None
        } else {
            Some(pb.add_psd("σ̃ − ρ ⪰ 0", s.plus_constant(&(-rho_m))))
        };
        let upper = pb.add_psd(
            "γρ − σ̃ ⪰ 0",
            HermExpr::scalar_times(&ScalarExpr::var(g), rho_m).minus(&s),
        );
        (lower, upper, None)
    } else {
        let rho_r = rho.op().compress(&sup.basis);
        let s_r = s.compress(&sup.basis);
        let lower = if cone_order {
            cone.constrain_member(&mut pb, &s.plus_constant(&(-rho_m)), "σ̃−ρ")?;
            None
        } else {
            Some(pb.add_psd("σ̃ − ρ ⪰ 0", s_r.plus_constant(&(-rho_r.matrix()))))
        };
        let upper = pb.add_psd(
            "γρ − σ̃ ⪰ 0",
            HermExpr::scalar_times(&ScalarExpr::var(g), rho_r.matrix()).minus(&s_r),
        );
        (lower, upper, Some(sup.basis.clone()))
    };
    pb.minimize(ScalarExpr::var(g));
    let sol = pb.solve(&default_cfg())?;
    let value = match sol.status {
        Status::Optimal => DivergenceValue::conic(sol.primal_value.max(1.0).log2(), &sol),
        Status::Infeasible => {
            return Ok(CertifiedValue {
                value: DivergenceValue::infinite(
                    Provenance::Conic { gap: 0.0 },
                    "no free operator has the same support as ρ",
                ),
                witness: None,
            })
        }
        s => return Err(Error::SolverFailure(format!("{s:?} after {} iterations", sol.iterations))),
    };
    if !certify {
        return Ok(CertifiedValue { value, witness: None });
    }
    let Some(lower_id) = lower_id else {
        return Ok(CertifiedValue { value, witness: None });
    };
    let lift = |w: &Multiplier| -> HermitianOperator {
        let m = match w {
            Multiplier::Psd(m) => m.clone(),
            Multiplier::Scalar(_) => CMatrix::zeros(1, 1),
        };
        let m = match &basis {
            Some(v) => v * m * v.adjoint(),
            None => m,
        };
        HermitianOperator::from_hermitian_unchecked((&m + m.adjoint()) * c(0.5), rho.op().subsystem_dims().to_vec())
    };
    let a = clip_psd(&lift(&sol.dual_certificate[lower_id.0]))?;
    let b = clip_psd(&lift(&sol.dual_certificate[upper_id.0]))?;
    let witness = repaired_witness(cone, rho, a, b)?;
    let value = match &witness {
        Some(w) if w.check.feasible && w.check.lower_bound > 0.0 => {
            let lo = w.check.lower_bound.log2().max(0.0).min(value.bits);
            DivergenceValue::finite(value.bits, Provenance::WitnessBracket { lo, hi: value.bits })
        }
        _ => value,
    };
    Ok(CertifiedValue { value, witness })
}

fn clip_psd(op: &HermitianOperator) -> Result<HermitianOperator> {
    op.map_spectrum(|l| l.max(0.0))?.with_dims(op.subsystem_dims().to_vec())
}

/// Shifts `B` by `δI` so that `B − A` lies in the dual cone, then checks.
fn repaired_witness(
    cone: &FreeCone,
    rho: &DensityMatrix,
    a: HermitianOperator,
    b: HermitianOperator,
) -> Result<Option<DualWitness>> {
    const TOL: f64 = 1e-9;
    if b.inner(rho.op()) <= TOL {
        return Ok(None);
    }
    let mut b = b;
    let mut check = verify_dual_witness(cone, rho, &a, &b, TOL)?;
    if !check.feasible {
        let margin = cone.dual_margin(&b.sub(&a), &default_cfg())?;
        let shift = (-margin).max(0.0) * (1.0 + 1e-9) + 1e-12;
        b = b.add(&HermitianOperator::identity(b.dim()).scale(shift));
        check = verify_dual_witness(cone, rho, &a, &b, TOL)?;
    }
    Ok(Some(DualWitness { a, b, check }))
}

// ---------------------------------------------------------------------------
// smoothing

/// Tolerances used inside the smoothing oracles; tighter than the defaults
/// because feasibility is decided by comparing a radius with `ε`.
fn smoothing_cfg() -> SolverConfig {
    SolverConfig {
        feas_tol: 1e-9,
        gap_tol: 1e-9,
        max_iter: 200,
    }
}

/// Bits resolution of the smoothed projective bisection.
pub const BISECTION_TOL_BITS: f64 = 1e-7;

/// Adds `ρ′` (a state) and `P ⪰ 0` with `P ⪰ ρ′ − ρ`; then `Tr P` bounds
/// `½‖ρ′ − ρ‖₁` from above and equals it at the optimum.
fn smoothing_ball(pb: &mut ConicProblem, rho: &DensityMatrix, real: bool) -> (HermExpr, HermExpr) {
    let n = rho.dim();
    let rp = pb.psd_var("ρ′", n, real);
    let mut tr = rp.trace();
    tr.constant -= 1.0;
    pb.add_zero("Tr ρ′ = 1", tr);
    let p = pb.psd_var("P", n, real);
    pb.add_psd("P − ρ′ + ρ ⪰ 0", p.minus(&rp).plus_constant(rho.op().matrix()));
    (rp, p)
}

fn with_radius(pb: &mut ConicProblem, p: &HermExpr, eps: f64) {
    let mut e = p.trace().scaled(-1.0);
    e.constant += eps;
    pb.add_nonneg("Tr P ≤ ε", e);
}

/// `min measure(ρ′)` over states `ρ′` with `½‖ρ′ − ρ‖₁ ≤ ε`.
pub fn smoothed(measure: SetMeasure, rho: &DensityMatrix, cone: &FreeCone, eps: SmoothingRadius) -> Result<DivergenceValue> {
    check_cone(rho, cone)?;
    if eps.value() == 0.0 {
        return match measure {
            SetMeasure::DmaxSet => dmax_set(rho, cone),
            SetMeasure::DprojSet => dproj_set(rho, cone),
            SetMeasure::RobustnessStandard => robustness_standard(rho, cone),
            SetMeasure::DprojSSet => dproj_s_set(rho, cone),
        };
    }
    let real = is_real(rho, cone);
    let cfg = smoothing_cfg();
    match measure {
        SetMeasure::DmaxSet => {
            let mut pb = ConicProblem::new();
            let (rp, p) = smoothing_ball(&mut pb, rho, real);
            with_radius(&mut pb, &p, eps.value());
            let s = cone.new_member(&mut pb, "σ̃", real)?;
            pb.add_psd("σ̃ ⪰ ρ′", s.minus(&rp));
            pb.minimize(s.trace());
            from_ratio(&pb.solve(&cfg)?, "no free operator dominates any state in the ball")
        }
        SetMeasure::RobustnessStandard => {
            let mut pb = ConicProblem::new();
            let (rp, p) = smoothing_ball(&mut pb, rho, real);
            with_radius(&mut pb, &p, eps.value());
            let m = cone.new_member(&mut pb, "M", real)?;
            cone.constrain_member(&mut pb, &m.plus(&rp), "ρ′+M")?;
            pb.minimize(m.trace());
            let sol = pb.solve(&cfg)?;
            match sol.status {
                Status::Optimal => Ok(DivergenceValue::conic((1.0 + sol.primal_value.max(0.0)).log2(), &sol)),
                Status::Infeasible => Ok(DivergenceValue::infinite(
                    Provenance::Conic { gap: 0.0 },
                    "no state in the ball has finite robustness",
                )),
                s => Err(Error::SolverFailure(format!("{s:?}"))),
            }
        }
        SetMeasure::DprojSet | SetMeasure::DprojSSet => {
            let cone_order = measure == SetMeasure::DprojSSet;
            let unsmoothed = if cone_order {
                dproj_s_set(rho, cone)?
            } else {
                dproj_set(rho, cone)?
            };
            smoothed_projective(rho, cone, eps.value(), cone_order, unsmoothed.bits)
        }
    }
}

/// Smallest smoothing radius at which ratio `γ` is attainable.
fn min_radius(rho: &DensityMatrix, cone: &FreeCone, gamma: f64, cone_order: bool) -> Result<ConicSolution> {
    let real = is_real(rho, cone);
    let mut pb = ConicProblem::new();
    let (rp, p) = smoothing_ball(&mut pb, rho, real);
    let s = cone.new_member(&mut pb, "σ̃", real)?;
    if cone_order {
        cone.constrain_member(&mut pb, &s.minus(&rp), "σ̃−ρ′")?;
    } else {
        pb.add_psd("σ̃ − ρ′ ⪰ 0", s.minus(&rp));
    }
    pb.add_psd("γρ′ − σ̃ ⪰ 0", rp.scaled(gamma).minus(&s));
    pb.minimize(p.trace());
    pb.solve(&smoothing_cfg())
}

fn smoothed_projective(
    rho: &DensityMatrix,
    cone: &FreeCone,
    eps: f64,
    cone_order: bool,
    unsmoothed_bits: f64,
) -> Result<DivergenceValue> {
    let feasible = |bits: f64| -> Result<(bool, ConicSolution)> {
        let sol = min_radius(rho, cone, bits.exp2(), cone_order)?;
        match sol.status {
            Status::Optimal => Ok((sol.primal_value <= eps, sol)),
            Status::Infeasible => Ok((false, sol)),
            s => Err(Error::SolverFailure(format!("smoothing radius oracle: {s:?}"))),
        }
    };
    // upper end of the bracket, in bits
    let mut hi = if unsmoothed_bits.is_finite() {
        unsmoothed_bits + 1e-6
    } else {
        1.0
    };
    let max_bits = INFINITY_THRESHOLD.log2();
    while !feasible(hi)?.0 {
        hi *= 2.0;
        if hi > max_bits {
            return Ok(DivergenceValue::infinite(
                Provenance::Conic { gap: 0.0 },
                "bisection bracket exceeds 2^60",
            ));
        }
    }
    let r = bisect_threshold(feasible, 0.0, hi, BISECTION_TOL_BITS)?;
    let (lo, hi) = r.bracket;
    Ok(DivergenceValue::finite(
        hi.max(0.0),
        Provenance::WitnessBracket { lo: lo.max(0.0), hi: hi.max(0.0) },
    ))
}

// ---------------------------------------------------------------------------
// relative entropy of resource

/// Iteration limit and target bracket width (bits) for the conditional
/// gradient iteration.
const FW_MAX_ITER: usize = 300;
const FW_TARGET_GAP: f64 = 1e-6;

/// `min_{σ ∈ 𝓕} D(ρ‖σ)`.
///
/// Closed forms for diagonal and singleton cones. Otherwise the bracket
/// `D_min,𝓕 ≤ D_𝓕 ≤ D_max,𝓕` is refined by a conditional-gradient iteration
/// whose linear step is a conic program; the duality gap of that step
/// certifies the lower end.
pub fn rel_entropy_set(rho: &DensityMatrix, cone: &FreeCone) -> Result<DivergenceValue> {
    check_cone(rho, cone)?;
    match cone.kind() {
        ConeKind::Diagonal { .. } => return coherence_rel_entropy(rho),
        ConeKind::Singleton { state } => return rel_entropy(rho, state),
        _ => {}
    }
    if cone.is_member(rho.op(), 1e-10)? {
        return Ok(DivergenceValue::finite(0.0, Provenance::ClosedForm));
    }
    let lo0 = dmin_set(rho, cone)?;
    let hi0 = dmax_set(rho, cone)?;
    if !hi0.is_finite() {
        return Ok(DivergenceValue::infinite(
            Provenance::WitnessBracket { lo: lo0.bits, hi: f64::INFINITY },
            "no free state contains the support of ρ",
        ));
    }
    let mut lower = lo0.bits.min(hi0.bits);
    if hi0.bits - lower <= FW_TARGET_GAP {
        return Ok(DivergenceValue::finite(hi0.bits, Provenance::WitnessBracket { lo: lower, hi: hi0.bits }));
    }

    let n = rho.dim();
    let real = is_real(rho, cone);
    let entropy = von_neumann_entropy(rho)?;
    let f = |sigma: &CMatrix| -> Result<f64> {
        let eig = eigh_matrix(sigma)?;
        let log_s = eig.map(|l| if l > 0.0 { l.log2() } else { -1e300 });
        Ok((-entropy - crate::qlinalg::hs_inner(rho.op().matrix(), &log_s)).max(0.0))
    };

    // start from the normalized D_max minimizer, nudged into the interior
    let mut pb = ConicProblem::new();
    let s = cone.new_member(&mut pb, "σ̃", real)?;
    pb.add_psd("σ̃ ⪰ ρ", s.plus_constant(&(-rho.op().matrix())));
    pb.minimize(s.trace());
    let sol = pb.solve(&default_cfg())?;
    let interior = cone
        .interior_state()
        .map(|s| s.op().matrix().clone())
        .unwrap_or_else(|| CMatrix::identity(n, n) * c(1.0 / n as f64));
    let start = sol.matrix_of(&s);
    let mut sigma = start.clone() * c(1.0 / start.trace().re) * c(0.999) + interior * c(0.001);
    let mut value = f(&sigma)?;

    // linear minimization over unit-trace cone members
    let mut lmo_pb = ConicProblem::new();
    let x = cone.new_member(&mut lmo_pb, "σ", real)?;
    let mut tr = x.trace();
    tr.constant -= 1.0;
    lmo_pb.add_zero("Tr σ = 1", tr);

    for _ in 0..FW_MAX_ITER {
        if value - lower <= FW_TARGET_GAP {
            break;
        }
        let grad = rel_entropy_gradient(rho.op().matrix(), &sigma)?;
        let mut pb = lmo_pb.clone();
        pb.minimize(x.inner(&grad));
        let sol = pb.solve(&default_cfg())?;
        if sol.status != Status::Optimal {
            break;
        }
        let at_sigma = crate::qlinalg::hs_inner(&grad, &sigma);
        let fw_gap = at_sigma - sol.dual_value.min(sol.primal_value);
        lower = lower.max(value - fw_gap);
        let target = sol.matrix_of(&x);
        let dir = &target - &sigma;
        let t = golden_section(|t| f(&(&sigma + &dir * c(t))).unwrap_or(f64::INFINITY), 0.0, 1.0, 60);
        let next = &sigma + &dir * c(t);
        let next_value = f(&next)?;
        if next_value >= value {
            break;
        }
        sigma = (&next + next.adjoint()) * c(0.5);
        value = next_value;
    }
    let lower = lower.min(value).max(0.0);
    Ok(DivergenceValue::finite(value, Provenance::WitnessBracket { lo: lower, hi: value }))
}

/// Gradient of `σ ↦ −Tr ρ log₂ σ`, via first divided differences of `log`
/// in the eigenbasis of `σ`.
fn rel_entropy_gradient(rho: &CMatrix, sigma: &CMatrix) -> Result<CMatrix> {
    let eig = eigh_matrix(sigma)?;
    let u = &eig.vectors;
    let rt = u.adjoint() * rho * u;
    let l = &eig.values;
    let n = l.len();
    let floor = 1e-300;
    let g = CMatrix::from_fn(n, n, |i, j| {
        let (a, b) = (l[i].max(floor), l[j].max(floor));
        let dd = if (a - b).abs() <= 1e-12 * a.max(b) {
            2.0 / (a + b)
        } else {
            (a.ln() - b.ln()) / (a - b)
        };
        rt[(i, j)] * c(-dd / LN_2)
    });
    Ok(u * g * u.adjoint())
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (a + b);
    // never step worse than not moving
    if f(mid) <= f(0.0) {
        mid
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{isotropic, max_entangled, IsotropicParams};
    use crate::qlinalg::CVector;

    fn iso(d: usize, p: f64) -> DensityMatrix {
        isotropic(IsotropicParams::new(d, p).unwrap()).unwrap()
    }

    fn diag(v: &[f64]) -> DensityMatrix {
        DensityMatrix::new(HermitianOperator::diagonal(v)).unwrap()
    }

    fn plus() -> DensityMatrix {
        let a = c(0.5f64.sqrt());
        DensityMatrix::pure(&CVector::from_vec(vec![a, a])).unwrap()
    }

    #[test]
    fn pairwise_examples() {
        let phi = max_entangled(2).unwrap();
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!((rel_entropy(&phi, &mixed).unwrap().bits - 2.0).abs() < 1e-10);
        assert!(!rel_entropy(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])).unwrap().is_finite());
        assert!((dmax(&phi, &mixed).unwrap().bits - 2.0).abs() < 1e-10);
        assert!((dmax(&iso(2, 0.75), &iso(2, 0.25)).unwrap().bits - 3f64.log2()).abs() < 1e-10);
        assert!((dmin(&phi, &mixed).unwrap().bits - 2.0).abs() < 1e-10);
        assert!((dmin(&phi, &iso(2, 0.5)).unwrap().bits - 1.0).abs() < 1e-10);
        assert!((dproj(&iso(2, 0.75), &iso(2, 0.5)).unwrap().bits - 3f64.log2()).abs() < 1e-10);
        assert!(!dproj(&phi, &mixed).unwrap().is_finite());
        let rho = iso(2, 0.6);
        assert!(dproj(&rho, &rho).unwrap().bits.abs() < 1e-10);
    }

    #[test]
    fn projective_metric_is_scale_invariant() {
        let a = iso(2, 0.7).into_op();
        let b = iso(2, 0.4).into_op();
        let base = dproj_operators(&a, &b).unwrap();
        let scaled = dproj_operators(&a.scale(3.5), &b.scale(0.2)).unwrap();
        assert!((base - scaled).abs() < 1e-10);
    }

    #[test]
    fn set_examples_ppt() {
        let ppt = FreeCone::ppt(2, 2).unwrap();
        let phi = max_entangled(2).unwrap();
        assert!((dmax_set(&phi, &ppt).unwrap().bits - 1.0).abs() < 1e-6);
        assert!((dmin_set(&phi, &ppt).unwrap().bits - 1.0).abs() < 1e-6);
        assert!((robustness_standard(&phi, &ppt).unwrap().bits - 1.0).abs() < 1e-6);
        assert!(!dproj_set(&phi, &ppt).unwrap().is_finite());
        let v = dproj_set(&iso(2, 0.75), &ppt).unwrap();
        assert!((v.bits - 3f64.log2()).abs() < 1e-6, "{v:?}");
        assert!(dproj_set(&iso(2, 0.3), &ppt).unwrap().bits < 1e-6);
        let s = dproj_s_set(&iso(2, 0.75), &ppt).unwrap();
        assert!(s.bits >= v.bits - 1e-6);
    }

    #[test]
    fn set_examples_diagonal() {
        let cone = FreeCone::diagonal(2).unwrap();
        assert!((dmin_set(&plus(), &cone).unwrap().bits - 1.0).abs() < 1e-6);
        assert!(!robustness_standard(&plus(), &cone).unwrap().is_finite());
        assert!(!dproj_s_set(&plus(), &cone).unwrap().is_finite());
        assert!(dproj_set(&diag(&[0.3, 0.7]), &cone).unwrap().bits < 1e-6);
    }

    #[test]
    fn certified_isotropic_bracket() {
        let ppt = FreeCone::ppt(2, 2).unwrap();
        let cv = dproj_set_certified(&iso(2, 0.9), &ppt).unwrap();
        let w = cv.witness.expect("witness");
        assert!(w.check.feasible);
        match cv.value.provenance {
            Provenance::WitnessBracket { lo, hi } => {
                assert!(hi - lo < 1e-5, "{lo} {hi}");
                assert!((hi - 9f64.log2()).abs() < 1e-6);
            }
            p => panic!("{p:?}"),
        }
    }

    #[test]
    fn smoothing_examples() {
        let ppt = FreeCone::ppt(2, 2).unwrap();
        let phi = max_entangled(2).unwrap();
        let v = smoothed(SetMeasure::DprojSet, &phi, &ppt, SmoothingRadius::new(0.1).unwrap()).unwrap();
        assert!(v.is_finite(), "{v:?}");
        let rho = iso(2, 0.8);
        let zero = smoothed(SetMeasure::DmaxSet, &rho, &ppt, SmoothingRadius::zero()).unwrap();
        assert_eq!(zero, dmax_set(&rho, &ppt).unwrap());
        let a = smoothed(SetMeasure::DmaxSet, &rho, &ppt, SmoothingRadius::new(0.1).unwrap()).unwrap();
        let b = smoothed(SetMeasure::DmaxSet, &rho, &ppt, SmoothingRadius::new(0.2).unwrap()).unwrap();
        assert!(b.bits <= a.bits + 1e-7 && a.bits <= zero.bits + 1e-7);
    }

    #[test]
    fn rel_entropy_of_resource() {
        let ppt = FreeCone::ppt(2, 2).unwrap();
        let phi = max_entangled(2).unwrap();
        let v = rel_entropy_set(&phi, &ppt).unwrap();
        assert!((v.bits - 1.0).abs() < 1e-6, "{v:?}");
        // isotropic closed form 1 − h₂(p) at d = 2
        let v = rel_entropy_set(&iso(2, 0.9), &ppt).unwrap();
        let expect = 1.0 - crate::models::binary_entropy(0.9);
        assert!(v.lower() <= expect + 1e-6 && v.bits >= expect - 1e-6, "{v:?}");
        assert!(v.bits - v.lower() < 1e-3, "{v:?}");
        let coh = rel_entropy_set(&plus(), &FreeCone::diagonal(2).unwrap()).unwrap();
        assert!((coh.bits - 1.0).abs() < 1e-10);
    }

    #[test]
    fn infinite_values_serialize_as_strings() {
        let v = DivergenceValue::infinite(Provenance::ClosedForm, "x");
        assert!(serde_json::to_string(&v).unwrap().contains("\"+inf\""));
    }
}
