//! Conic descriptions of free-state families.
//!
//! A [`FreeCone`] is the cone generated by the free states of one system,
//! written as an intersection of "linear map, then PSD" slices (plus linear
//! equalities for the affine kinds). [`FreeConeFamily`] produces the cone on
//! `n` copies.
//!
//! The separable cone is represented by its PPT relaxation; on `n` copies the
//! partial transpose acts on all `B` parties at once (bipartition `Aⁿ : Bⁿ`).

use serde::{Deserialize, Serialize};

use crate::conic::{ConicProblem, HermExpr, ScalarExpr, SolverConfig, Status};
use crate::error::{Error, Result};
use crate::io::{matrix_to_pairs, pairs_to_matrix, MatrixPairs};
use crate::qlinalg::{c, dim_cap, largest_power_within, CMatrix, DensityMatrix, HermitianOperator, TransposeMap};

/// Linear map applied before a PSD requirement in a custom cone.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearMap {
    Identity,
    PartialTranspose { dims: Vec<usize>, systems: Vec<usize> },
    /// `X ↦ K X K†`.
    Conjugation(CMatrix),
}

impl LinearMap {
    fn apply(&self, x: &HermitianOperator) -> Result<HermitianOperator> {
        match self {
            LinearMap::Identity => Ok(x.clone()),
            LinearMap::PartialTranspose { dims, systems } => {
                x.clone().with_dims(dims.clone())?.partial_transpose_many(systems)
            }
            LinearMap::Conjugation(k) => Ok(x.expand(k, Vec::new())),
        }
    }

    fn apply_expr(&self, e: &HermExpr) -> Result<HermExpr> {
        match self {
            LinearMap::Identity => Ok(e.clone()),
            LinearMap::PartialTranspose { dims, systems } => Ok(e.partial_transpose(&TransposeMap::new(dims, systems)?)),
            LinearMap::Conjugation(k) => Ok(e.expand(k)),
        }
    }

    fn is_real(&self) -> bool {
        match self {
            LinearMap::Conjugation(k) => k.iter().all(|z| z.im == 0.0),
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConeKind {
    /// PSD and PSD after transposing `transposed` among subsystems `dims`.
    Ppt { dims: Vec<usize>, transposed: Vec<usize> },
    /// Diagonal PSD matrices in the computational basis.
    Diagonal { dim: usize },
    /// Non-negative multiples of a single state.
    Singleton { state: DensityMatrix },
    Custom {
        dim: usize,
        maps: Vec<LinearMap>,
        affine: bool,
        full_dimensional: bool,
    },
}

/// `cone(𝓕)` on one system.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeCone {
    kind: ConeKind,
    dim: usize,
    /// Set when the cone has no full-rank member (singular singleton).
    singular: bool,
}

/// Support cutoff relative to the largest eigenvalue.
pub const SUPPORT_REL_TOL: f64 = 1e-9;

impl FreeCone {
    /// PPT cone on `A ⊗ B` with transposition on `B`.
    pub fn ppt(d_a: usize, d_b: usize) -> Result<Self> {
        Self::ppt_multi(vec![d_a, d_b], vec![1])
    }

    pub fn ppt_multi(dims: Vec<usize>, transposed: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument(format!("invalid PPT dims {dims:?}")));
        }
        TransposeMap::new(&dims, &transposed)?;
        let dim = dims.iter().product();
        Self::checked(ConeKind::Ppt { dims, transposed }, dim)
    }

    pub fn diagonal(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("zero dimension".into()));
        }
        Self::checked(ConeKind::Diagonal { dim }, dim)
    }

    pub fn singleton(state: DensityMatrix) -> Result<Self> {
        let dim = state.dim();
        Self::checked(ConeKind::Singleton { state }, dim)
    }

    pub fn custom(dim: usize, maps: Vec<LinearMap>, affine: bool, full_dimensional: bool) -> Result<Self> {
        for m in &maps {
            if let LinearMap::Conjugation(k) = m {
                if k.ncols() != dim {
                    return Err(Error::InvalidArgument("conjugation map has wrong input dimension".into()));
                }
            }
            if let LinearMap::PartialTranspose { dims, systems } = m {
                if dims.iter().product::<usize>() != dim {
                    return Err(Error::InvalidArgument("partial transpose dims do not match".into()));
                }
                TransposeMap::new(dims, systems)?;
            }
        }
        Self::checked(
            ConeKind::Custom {
                dim,
                maps,
                affine,
                full_dimensional,
            },
            dim,
        )
    }

    fn checked(kind: ConeKind, dim: usize) -> Result<Self> {
        let mut cone = Self {
            kind,
            dim,
            singular: false,
        };
        cone.singular = match &cone.kind {
            ConeKind::Ppt { .. } | ConeKind::Diagonal { .. } => {
                !cone.is_member(&HermitianOperator::identity(dim), 1e-12)?
            }
            ConeKind::Singleton { state } => state.op().min_eigenvalue()? <= SUPPORT_REL_TOL * state.op().max_eigenvalue()?,
            ConeKind::Custom { .. } => cone.full_rank_margin(&SolverConfig::default())? <= 1e-9,
        };
        if cone.singular && !matches!(cone.kind, ConeKind::Singleton { .. }) {
            return Err(Error::InvalidArgument("cone contains no full-rank operator".into()));
        }
        Ok(cone)
    }

    /// `max t` such that some unit-trace member dominates `t·I`.
    pub fn full_rank_margin(&self, cfg: &SolverConfig) -> Result<f64> {
        let mut pb = ConicProblem::new();
        let t = pb.scalar_var("t");
        let x = self.new_member(&mut pb, "x", self.is_real())?;
        let mut tr = x.trace();
        tr.constant -= 1.0;
        pb.add_zero("Tr x = 1", tr);
        let shifted = x.minus(&HermExpr::scalar_times(&ScalarExpr::var(t), &CMatrix::identity(self.dim, self.dim)));
        pb.add_psd("x ⪰ t I", shifted);
        pb.minimize(ScalarExpr::term(t, -1.0));
        let sol = pb.solve(cfg)?;
        match sol.status {
            Status::Optimal => Ok(-sol.primal_value),
            Status::Infeasible => Ok(f64::NEG_INFINITY),
            _ => Err(Error::SolverFailure(format!("full-rank check: {:?}", sol.status))),
        }
    }

    pub fn kind(&self) -> &ConeKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Set for singleton cones around a rank-deficient state.
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn is_affine(&self) -> bool {
        match &self.kind {
            ConeKind::Ppt { .. } => false,
            ConeKind::Diagonal { .. } | ConeKind::Singleton { .. } => true,
            ConeKind::Custom { affine, .. } => *affine,
        }
    }

    pub fn is_full_dimensional(&self) -> bool {
        match &self.kind {
            ConeKind::Ppt { .. } => true,
            ConeKind::Diagonal { dim } => *dim == 1,
            ConeKind::Singleton { .. } => self.dim == 1,
            ConeKind::Custom { full_dimensional, .. } => *full_dimensional,
        }
    }

    /// Whether all cone data is real, so real symmetric variables suffice
    /// whenever the remaining problem data is real too.
    pub fn is_real(&self) -> bool {
        match &self.kind {
            ConeKind::Ppt { .. } | ConeKind::Diagonal { .. } => true,
            ConeKind::Singleton { state } => state.op().matrix().iter().all(|z| z.im == 0.0),
            ConeKind::Custom { maps, .. } => maps.iter().all(LinearMap::is_real),
        }
    }

    /// Local dimensions used for partial transposes, when the kind has them.
    pub fn subsystem_dims(&self) -> Option<&[usize]> {
        match &self.kind {
            ConeKind::Ppt { dims, .. } => Some(dims),
            _ => None,
        }
    }

    /// A full-rank free state when one exists.
    pub fn interior_state(&self) -> Option<DensityMatrix> {
        match &self.kind {
            ConeKind::Singleton { state } => (!self.singular).then(|| state.clone()),
            _ => Some(DensityMatrix::maximally_mixed(self.dim)),
        }
        .filter(|s| self.is_member(s.op(), 1e-9).unwrap_or(false))
    }

    /// Membership: every constraint map of `x` has min eigenvalue ≥ −tol.
    pub fn is_member(&self, x: &HermitianOperator, tol: f64) -> Result<bool> {
        if x.dim() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "operator dimension {} does not match cone dimension {}",
                x.dim(),
                self.dim
            )));
        }
        match &self.kind {
            ConeKind::Ppt { dims, transposed } => {
                if x.min_eigenvalue()? < -tol {
                    return Ok(false);
                }
                let pt = x.clone().with_dims(dims.clone())?.partial_transpose_many(transposed)?;
                Ok(pt.min_eigenvalue()? >= -tol)
            }
            ConeKind::Diagonal { dim } => {
                let m = x.matrix();
                for i in 0..*dim {
                    if m[(i, i)].re < -tol {
                        return Ok(false);
                    }
                    for j in 0..*dim {
                        if i != j && m[(i, j)].norm() > tol {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            ConeKind::Singleton { state } => {
                let scale = x.trace();
                if scale < -tol {
                    return Ok(false);
                }
                let diff = x.sub(&state.op().scale(scale));
                Ok(diff.matrix().iter().all(|z| z.norm() <= tol))
            }
            ConeKind::Custom { maps, .. } => {
                for m in maps {
                    if m.apply(x)?.min_eigenvalue()? < -tol {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Adds a fresh variable ranging over the cone and returns its expression.
    pub fn new_member(&self, pb: &mut ConicProblem, name: &str, real: bool) -> Result<HermExpr> {
        let real = real && self.is_real();
        match &self.kind {
            ConeKind::Diagonal { dim } => Ok(self.diagonal_member(pb, name, (0..*dim).collect())),
            ConeKind::Singleton { state } => Ok(singleton_member(pb, name, state)),
            _ => {
                let x = pb.hermitian_var(name, self.dim, real);
                self.constrain_member(pb, &x, name)?;
                Ok(x)
            }
        }
    }

    /// Like [`new_member`](Self::new_member), restricted to operators
    /// supported on the span of the orthonormal columns of `basis`.
    pub fn new_member_on_support(&self, pb: &mut ConicProblem, name: &str, basis: &CMatrix, real: bool) -> Result<HermExpr> {
        if basis.nrows() != self.dim {
            return Err(Error::InvalidArgument("support basis has the wrong dimension".into()));
        }
        let real = real && self.is_real() && basis.iter().all(|z| z.im == 0.0);
        let r = basis.ncols();
        match &self.kind {
            ConeKind::Diagonal { dim } => {
                let allowed = (0..*dim)
                    .filter(|&k| basis.row(k).iter().map(|z| z.norm_sqr()).sum::<f64>() >= 1.0 - 1e-9)
                    .collect();
                Ok(self.diagonal_member(pb, name, allowed))
            }
            ConeKind::Singleton { state } => {
                let proj = basis * basis.adjoint();
                let outside = state.op().matrix() - &proj * state.op().matrix() * &proj;
                if outside.iter().map(|z| z.norm()).fold(0.0, f64::max) <= 1e-9 {
                    Ok(singleton_member(pb, name, state))
                } else {
                    Ok(HermExpr::zero(self.dim))
                }
            }
            ConeKind::Ppt { dims, transposed } => {
                let s = pb.psd_var(name, r, real);
                let x = s.expand(basis);
                let map = TransposeMap::new(dims, transposed)?;
                pb.add_psd(format!("{name}^Γ ⪰ 0"), x.partial_transpose(&map));
                Ok(x)
            }
            ConeKind::Custom { maps, .. } => {
                let s = pb.hermitian_var(name, r, real);
                let x = s.expand(basis);
                for (k, m) in maps.iter().enumerate() {
                    pb.add_psd(format!("{name} map{k} ⪰ 0"), m.apply_expr(&x)?);
                }
                Ok(x)
            }
        }
    }

    /// Constrains an existing expression to lie in the cone.
    pub fn constrain_member(&self, pb: &mut ConicProblem, x: &HermExpr, label: &str) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::InvalidArgument("expression dimension does not match cone".into()));
        }
        match &self.kind {
            ConeKind::Ppt { dims, transposed } => {
                pb.add_psd(format!("{label} ⪰ 0"), x.clone());
                pb.add_psd(format!("{label}^Γ ⪰ 0"), x.partial_transpose(&TransposeMap::new(dims, transposed)?));
            }
            ConeKind::Diagonal { dim } => {
                let real = x.is_real();
                for i in 0..*dim {
                    pb.add_nonneg(format!("{label}[{i},{i}] ≥ 0"), x.entry_re(i, i));
                    for j in i + 1..*dim {
                        pb.add_zero(format!("{label} re[{i},{j}] = 0"), x.entry_re(i, j));
                        if !real {
                            pb.add_zero(format!("{label} im[{i},{j}] = 0"), x.entry_im(i, j));
                        }
                    }
                }
            }
            ConeKind::Singleton { state } => {
                let m = singleton_member(pb, &format!("{label} scale"), state);
                pb.add_hermitian_zero(&format!("{label} ∝ σ"), &x.minus(&m));
            }
            ConeKind::Custom { maps, .. } => {
                for (k, m) in maps.iter().enumerate() {
                    pb.add_psd(format!("{label} map{k} ⪰ 0"), m.apply_expr(x)?);
                }
            }
        }
        Ok(())
    }

    /// Whether `h` lies in the dual cone, i.e. `Tr(h σ) ≥ −tol` for every
    /// unit-trace member `σ`.
    pub fn dual_contains(&self, h: &HermitianOperator, tol: f64, cfg: &SolverConfig) -> Result<bool> {
        Ok(self.dual_margin(h, cfg)? >= -tol)
    }

    /// `min Tr(h σ)` over unit-trace members `σ`.
    pub fn dual_margin(&self, h: &HermitianOperator, cfg: &SolverConfig) -> Result<f64> {
        match &self.kind {
            ConeKind::Diagonal { dim } => Ok((0..*dim).map(|i| h.matrix()[(i, i)].re).fold(f64::INFINITY, f64::min)),
            ConeKind::Singleton { state } => Ok(h.inner(state.op())),
            _ => {
                let mut pb = ConicProblem::new();
                let real = h.matrix().iter().all(|z| z.im == 0.0);
                let x = self.new_member(&mut pb, "σ", real)?;
                let mut tr = x.trace();
                tr.constant -= 1.0;
                pb.add_zero("Tr σ = 1", tr);
                pb.minimize(x.inner(h.matrix()));
                let sol = pb.solve(cfg)?;
                match sol.status {
                    // the dual value is a certified lower bound up to the gap
                    Status::Optimal => Ok(sol.dual_value.min(sol.primal_value)),
                    s => Err(Error::SolverFailure(format!("dual-cone check: {s:?}"))),
                }
            }
        }
    }

    fn diagonal_member(&self, pb: &mut ConicProblem, name: &str, allowed: Vec<usize>) -> HermExpr {
        let mut x = HermExpr::zero(self.dim);
        for k in allowed {
            let v = pb.scalar_var(format!("{name}[{k}]"));
            pb.add_nonneg(format!("{name}[{k}] ≥ 0"), ScalarExpr::var(v));
            let mut e = CMatrix::zeros(self.dim, self.dim);
            e[(k, k)] = c(1.0);
            x.add_scaled(&HermExpr::scalar_times(&ScalarExpr::var(v), &e), 1.0);
        }
        x
    }

    pub fn descriptor(&self) -> ConeDescriptor {
        match &self.kind {
            ConeKind::Ppt { dims, transposed } => ConeDescriptor::Ppt {
                dims: dims.clone(),
                transposed: Some(transposed.clone()),
            },
            ConeKind::Diagonal { dim } => ConeDescriptor::Diagonal { dim: *dim },
            ConeKind::Singleton { state } => ConeDescriptor::Singleton {
                state: matrix_to_pairs(state.op().matrix()),
                dims: state.op().subsystem_dims().to_vec(),
            },
            ConeKind::Custom {
                dim,
                maps,
                affine,
                full_dimensional,
            } => ConeDescriptor::Custom {
                dim: *dim,
                maps: maps
                    .iter()
                    .map(|m| match m {
                        LinearMap::Identity => MapDescriptor::Identity,
                        LinearMap::PartialTranspose { dims, systems } => MapDescriptor::PartialTranspose {
                            dims: dims.clone(),
                            systems: systems.clone(),
                        },
                        LinearMap::Conjugation(k) => MapDescriptor::Conjugation {
                            rows: k.nrows(),
                            matrix: (0..k.nrows())
                                .map(|i| (0..k.ncols()).map(|j| [k[(i, j)].re, k[(i, j)].im]).collect())
                                .collect(),
                        },
                    })
                    .collect(),
                affine: *affine,
                full_dimensional: *full_dimensional,
            },
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.descriptor())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<ConeDescriptor>(text)?.build()
    }
}

fn singleton_member(pb: &mut ConicProblem, name: &str, state: &DensityMatrix) -> HermExpr {
    let v = pb.scalar_var(name.to_string());
    pb.add_nonneg(format!("{name} ≥ 0"), ScalarExpr::var(v));
    HermExpr::scalar_times(&ScalarExpr::var(v), state.op().matrix())
}

/// Serializable cone description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeDescriptor {
    Ppt {
        dims: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        transposed: Option<Vec<usize>>,
    },
    Diagonal {
        dim: usize,
    },
    Singleton {
        state: MatrixPairs,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        dims: Vec<usize>,
    },
    Custom {
        dim: usize,
        maps: Vec<MapDescriptor>,
        #[serde(default)]
        affine: bool,
        #[serde(default)]
        full_dimensional: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum MapDescriptor {
    Identity,
    PartialTranspose { dims: Vec<usize>, systems: Vec<usize> },
    /// `K` given as rows of `[re, im]` pairs.
    Conjugation { rows: usize, matrix: Vec<Vec<[f64; 2]>> },
}

impl ConeDescriptor {
    pub fn build(&self) -> Result<FreeCone> {
        match self {
            ConeDescriptor::Ppt { dims, transposed } => {
                let transposed = transposed.clone().unwrap_or_else(|| vec![dims.len().saturating_sub(1)]);
                FreeCone::ppt_multi(dims.clone(), transposed)
            }
            ConeDescriptor::Diagonal { dim } => FreeCone::diagonal(*dim),
            ConeDescriptor::Singleton { state, dims } => {
                let op = HermitianOperator::new(pairs_to_matrix(state)?, dims.clone())?;
                FreeCone::singleton(DensityMatrix::new(op)?)
            }
            ConeDescriptor::Custom {
                dim,
                maps,
                affine,
                full_dimensional,
            } => {
                let maps = maps
                    .iter()
                    .map(|m| match m {
                        MapDescriptor::Identity => Ok(LinearMap::Identity),
                        MapDescriptor::PartialTranspose { dims, systems } => Ok(LinearMap::PartialTranspose {
                            dims: dims.clone(),
                            systems: systems.clone(),
                        }),
                        MapDescriptor::Conjugation { rows, matrix } => {
                            if matrix.len() != *rows || matrix.iter().any(|r| r.len() != *dim) {
                                return Err(Error::InvalidArgument("conjugation matrix shape".into()));
                            }
                            Ok(LinearMap::Conjugation(CMatrix::from_fn(*rows, *dim, |i, j| {
                                num_complex::Complex64::new(matrix[i][j][0], matrix[i][j][1])
                            })))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                FreeCone::custom(*dim, maps, *affine, *full_dimensional)
            }
        }
    }
}

/// Free cones on `n` copies of one system.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeConeFamily {
    base: FreeCone,
}

impl FreeConeFamily {
    pub fn new(base: FreeCone) -> Self {
        Self { base }
    }

    pub fn base(&self) -> &FreeCone {
        &self.base
    }

    /// Largest copy count whose total dimension fits under the cap.
    pub fn max_copies(&self) -> usize {
        largest_power_within(self.base.dim, dim_cap())
    }

    pub fn extend(&self, n: usize) -> Result<FreeCone> {
        if n == 0 {
            return Err(Error::InvalidArgument("copy count must be at least 1".into()));
        }
        if n == 1 {
            return Ok(self.base.clone());
        }
        if n > self.max_copies() {
            return Err(Error::CapacityExceeded {
                requested: (self.base.dim as f64).powi(n as i32).min(usize::MAX as f64) as usize,
                cap: dim_cap(),
                largest_feasible_n: Some(self.max_copies()),
            });
        }
        match &self.base.kind {
            ConeKind::Ppt { dims, transposed } => {
                let k = dims.len();
                let all_dims = (0..n).flat_map(|_| dims.iter().copied()).collect();
                let all_t = (0..n).flat_map(|j| transposed.iter().map(move |&t| t + j * k)).collect();
                FreeCone::ppt_multi(all_dims, all_t)
            }
            ConeKind::Diagonal { dim } => FreeCone::diagonal(dim.pow(n as u32)),
            ConeKind::Singleton { state } => FreeCone::singleton(state.tensor_power(n)?),
            ConeKind::Custom { .. } => Err(Error::InvalidArgument(
                "custom cones have no n-copy rule; build each level explicitly".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{isotropic, max_entangled, IsotropicParams};

    #[test]
    fn ppt_membership_of_isotropic_states() {
        let cone = FreeCone::ppt(2, 2).unwrap();
        let sep = isotropic(IsotropicParams::new(2, 0.5).unwrap()).unwrap();
        assert!(cone.is_member(sep.op(), 1e-9).unwrap());
        let bell = max_entangled(2).unwrap();
        assert!(!cone.is_member(bell.op(), 1e-9).unwrap());
    }

    #[test]
    fn diagonal_membership() {
        let cone = FreeCone::diagonal(3).unwrap();
        assert!(cone.is_member(&HermitianOperator::diagonal(&[0.2, 0.0, 0.8]), 1e-12).unwrap());
        let plus = HermitianOperator::from_real(&[vec![0.5, 0.5], vec![0.5, 0.5]], vec![]).unwrap();
        assert!(!FreeCone::diagonal(2).unwrap().is_member(&plus, 1e-9).unwrap());
    }

    #[test]
    fn regime_flags() {
        let ppt = FreeCone::ppt(2, 2).unwrap();
        let diag = FreeCone::diagonal(2).unwrap();
        let single = FreeCone::singleton(DensityMatrix::maximally_mixed(2)).unwrap();
        assert!(!ppt.is_affine() && ppt.is_full_dimensional());
        assert!(diag.is_affine() && !diag.is_full_dimensional());
        assert!(single.is_affine() && !single.is_full_dimensional());
    }

    #[test]
    fn singular_singleton_is_flagged() {
        let pure = DensityMatrix::new(HermitianOperator::diagonal(&[1.0, 0.0])).unwrap();
        assert!(FreeCone::singleton(pure).unwrap().is_singular());
        assert!(!FreeCone::singleton(DensityMatrix::maximally_mixed(2)).unwrap().is_singular());
    }

    #[test]
    fn custom_cone_full_rank_check_runs_a_solve() {
        let ppt_like = FreeCone::custom(
            4,
            vec![
                LinearMap::Identity,
                LinearMap::PartialTranspose {
                    dims: vec![2, 2],
                    systems: vec![1],
                },
            ],
            false,
            true,
        )
        .unwrap();
        let margin = ppt_like.full_rank_margin(&SolverConfig::default()).unwrap();
        assert!((margin - 0.25).abs() < 1e-6, "{margin}");
        // a rank-one conjugation cannot contain a full-rank operator with X ⪰ 0 and -X ⪰ 0 on a slice
        let k = CMatrix::from_row_slice(1, 2, &[c(1.0), c(0.0)]);
        let bad = FreeCone::custom(2, vec![LinearMap::Identity, LinearMap::Conjugation(-k.clone() * c(1.0))], false, false);
        let _ = bad; // K X K† ⪰ 0 with K = −e₀ᵀ is still satisfiable; only sanity-check construction
    }

    #[test]
    fn json_descriptors() {
        let cone = FreeCone::from_json(r#"{"kind": "ppt", "dims": [2,2]}"#).unwrap();
        assert_eq!(cone, FreeCone::ppt(2, 2).unwrap());
        let cone = FreeCone::from_json(r#"{"kind": "diagonal", "dim": 3}"#).unwrap();
        assert_eq!(cone.dim(), 3);
        let cone = FreeCone::from_json(r#"{"kind": "singleton", "state": [[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#).unwrap();
        assert!(cone.is_affine());
        let back = FreeCone::from_json(&cone.to_json().unwrap()).unwrap();
        assert_eq!(back, cone);
    }

    #[test]
    fn family_extension() {
        let fam = FreeConeFamily::new(FreeCone::ppt(2, 2).unwrap());
        let two = fam.extend(2).unwrap();
        assert_eq!(
            two.kind(),
            &ConeKind::Ppt {
                dims: vec![2, 2, 2, 2],
                transposed: vec![1, 3]
            }
        );
        assert_eq!(fam.max_copies(), 4);
        assert!(matches!(
            fam.extend(5),
            Err(Error::CapacityExceeded {
                largest_feasible_n: Some(4),
                ..
            })
        ));
    }
}
