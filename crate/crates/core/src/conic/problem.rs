//! Problem builder, compilation to a real LMI and solution assembly.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::expr::{HermExpr, ScalarExpr, SparseHerm, VarId};
use super::ipm::{self, IpmOutcome, Lmi, LmiBlock, SparseSym};
use crate::error::{Error, Result};
use crate::qlinalg::{c, eigh_matrix, CMatrix};

/// Solver tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub feas_tol: f64,
    pub gap_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            feas_tol: 1e-8,
            gap_tol: 1e-7,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalTrouble,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ConstraintId(pub usize);

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstraintBody {
    /// Hermitian expression must be positive semidefinite.
    Psd {
        #[serde(serialize_with = "serialize_herm_expr")]
        expr: HermExpr,
    },
    /// Scalar expression must be non-negative.
    Nonneg {
        #[serde(serialize_with = "serialize_scalar_expr")]
        expr: ScalarExpr,
    },
    /// Scalar expression must vanish.
    Zero {
        #[serde(serialize_with = "serialize_scalar_expr")]
        expr: ScalarExpr,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct Constraint {
    pub label: String,
    #[serde(flatten)]
    pub body: ConstraintBody,
}

/// Linear objective over real variables subject to PSD, sign and equality
/// constraints on affine expressions of those variables.
#[derive(Debug, Clone, Serialize)]
pub struct ConicProblem {
    var_names: Vec<String>,
    #[serde(serialize_with = "serialize_scalar_expr")]
    objective: ScalarExpr,
    constraints: Vec<Constraint>,
}

/// Multiplier attached to one constraint.
#[derive(Debug, Clone, PartialEq)]
pub enum Multiplier {
    /// Hermitian PSD matrix `W` pairing as `Re Tr(W · expr)`.
    Psd(CMatrix),
    Scalar(f64),
}

impl Multiplier {
    fn pair_with(&self, body: &ConstraintBody) -> ScalarExpr {
        match (self, body) {
            (Multiplier::Psd(w), ConstraintBody::Psd { expr }) => expr.inner(w),
            (Multiplier::Scalar(s), ConstraintBody::Nonneg { expr } | ConstraintBody::Zero { expr }) => {
                expr.scaled(*s)
            }
            _ => ScalarExpr::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConicSolution {
    pub status: Status,
    /// Objective at `primal_point` (NaN unless Optimal or NumericalTrouble with a point).
    pub primal_value: f64,
    pub dual_value: f64,
    /// Indexed by `VarId`.
    pub primal_point: Vec<f64>,
    /// One multiplier per constraint. For `Infeasible` this is a Farkas ray
    /// normalized so that the aggregated constraints equal `−1` for every point.
    pub dual_certificate: Vec<Multiplier>,
    /// Relative duality gap `|p − d| / (1 + |p| + |d|)`.
    pub gap: f64,
    /// Largest constraint violation at `primal_point`.
    pub max_violation: f64,
    pub iterations: usize,
    /// Phase-one margin when infeasibility was decided by a phase-one solve.
    pub infeasibility_margin: Option<f64>,
}

impl ConicSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    pub fn value_of(&self, e: &ScalarExpr) -> f64 {
        e.eval(&self.primal_point)
    }

    pub fn matrix_of(&self, e: &HermExpr) -> CMatrix {
        e.eval(&self.primal_point)
    }

    fn failed(status: Status, n_vars: usize, n_cons: usize, iterations: usize) -> Self {
        Self {
            status,
            primal_value: f64::NAN,
            dual_value: f64::NAN,
            primal_point: vec![0.0; n_vars],
            dual_certificate: vec![Multiplier::Scalar(0.0); n_cons],
            gap: f64::NAN,
            max_violation: f64::NAN,
            iterations,
            infeasibility_margin: None,
        }
    }
}

/// Affine function `Σ_c ⟨m_c, expr_c(y)⟩ = constant + gradient·y` of a certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateCheck {
    pub constant: f64,
    pub gradient_norm: f64,
    /// Most negative eigenvalue among PSD multipliers (or sign violations).
    pub cone_violation: f64,
}

impl CertificateCheck {
    /// Amount by which the certificate rules out feasibility for points with
    /// `|y|∞ ≤ radius`.
    pub fn margin(&self, radius: f64) -> f64 {
        -self.constant - self.gradient_norm * radius
    }
}

impl Default for ConicProblem {
    fn default() -> Self {
        Self::new()
    }
}

impl ConicProblem {
    pub fn new() -> Self {
        Self {
            var_names: Vec::new(),
            objective: ScalarExpr::default(),
            constraints: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &ScalarExpr {
        &self.objective
    }

    pub fn scalar_var(&mut self, name: impl Into<String>) -> VarId {
        self.var_names.push(name.into());
        VarId(self.var_names.len() - 1)
    }

    /// Free Hermitian (or real symmetric when `real`) matrix variable.
    pub fn hermitian_var(&mut self, name: &str, n: usize, real: bool) -> HermExpr {
        let mut terms = BTreeMap::new();
        for k in 0..n {
            let v = self.scalar_var(format!("{name}[{k},{k}]"));
            let mut m = SparseHerm::default();
            m.add_entry(k, k, c(1.0));
            terms.insert(v, m);
        }
        for k in 0..n {
            for l in k + 1..n {
                let v = self.scalar_var(format!("re {name}[{k},{l}]"));
                let mut m = SparseHerm::default();
                m.add_entry(k, l, c(1.0));
                m.add_entry(l, k, c(1.0));
                terms.insert(v, m);
                if !real {
                    let v = self.scalar_var(format!("im {name}[{k},{l}]"));
                    let mut m = SparseHerm::default();
                    m.add_entry(k, l, Complex64::new(0.0, 1.0));
                    m.add_entry(l, k, Complex64::new(0.0, -1.0));
                    terms.insert(v, m);
                }
            }
        }
        HermExpr::from_parts(n, CMatrix::zeros(n, n), terms)
    }

    /// Hermitian variable constrained to be PSD.
    pub fn psd_var(&mut self, name: &str, n: usize, real: bool) -> HermExpr {
        let x = self.hermitian_var(name, n, real);
        self.add_psd(format!("{name} ⪰ 0"), x.clone());
        x
    }

    pub fn add_psd(&mut self, label: impl Into<String>, expr: HermExpr) -> ConstraintId {
        self.push(label.into(), ConstraintBody::Psd { expr })
    }

    pub fn add_nonneg(&mut self, label: impl Into<String>, expr: ScalarExpr) -> ConstraintId {
        self.push(label.into(), ConstraintBody::Nonneg { expr })
    }

    pub fn add_zero(&mut self, label: impl Into<String>, expr: ScalarExpr) -> ConstraintId {
        self.push(label.into(), ConstraintBody::Zero { expr })
    }

    /// Entry-wise equality `expr = 0` for a Hermitian expression.
    pub fn add_hermitian_zero(&mut self, label: &str, expr: &HermExpr) {
        let n = expr.dim();
        let real = expr.is_real();
        for i in 0..n {
            self.add_zero(format!("{label} re[{i},{i}]"), expr.entry_re(i, i));
            for j in i + 1..n {
                self.add_zero(format!("{label} re[{i},{j}]"), expr.entry_re(i, j));
                if !real {
                    self.add_zero(format!("{label} im[{i},{j}]"), expr.entry_im(i, j));
                }
            }
        }
    }

    pub fn minimize(&mut self, objective: ScalarExpr) {
        self.objective = objective;
    }

    fn push(&mut self, label: String, body: ConstraintBody) -> ConstraintId {
        self.constraints.push(Constraint { label, body });
        ConstraintId(self.constraints.len() - 1)
    }

    /// JSON debug dump of variables, constraints and objective.
    pub fn to_debug_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }

    /// Evaluates how strongly a multiplier set certifies infeasibility.
    pub fn check_certificate(&self, cert: &[Multiplier]) -> CertificateCheck {
        let mut agg = ScalarExpr::default();
        let mut cone_violation: f64 = 0.0;
        for (con, m) in self.constraints.iter().zip(cert) {
            agg.add_scaled(&m.pair_with(&con.body), 1.0);
            match (m, &con.body) {
                (Multiplier::Psd(w), _) => {
                    let min = eigh_matrix(w).map(|e| e.min()).unwrap_or(f64::NEG_INFINITY);
                    cone_violation = cone_violation.max(-min);
                }
                (Multiplier::Scalar(s), ConstraintBody::Nonneg { .. }) => cone_violation = cone_violation.max(-s),
                _ => {}
            }
        }
        CertificateCheck {
            constant: agg.constant,
            gradient_norm: agg.terms.values().map(|a| a * a).sum::<f64>().sqrt(),
            cone_violation,
        }
    }

    /// Largest violation of any constraint at `y`.
    pub fn violation_at(&self, y: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|con| match &con.body {
                ConstraintBody::Psd { expr } => {
                    let m = expr.eval(y);
                    eigh_matrix(&m).map(|e| (-e.min()).max(0.0)).unwrap_or(f64::INFINITY)
                }
                ConstraintBody::Nonneg { expr } => (-expr.eval(y)).max(0.0),
                ConstraintBody::Zero { expr } => expr.eval(y).abs(),
            })
            .fold(0.0, f64::max)
    }

    /// Solves the problem. Never returns `Optimal` without a verified point.
    pub fn solve(&self, cfg: &SolverConfig) -> Result<ConicSolution> {
        let compiled = match Compiled::build(self)? {
            Ok(c) => c,
            Err(cert) => return Ok(self.infeasible_from(cert, 0, None)),
        };
        if compiled.unbounded {
            return Ok(ConicSolution::failed(
                Status::Unbounded,
                self.n_vars(),
                self.constraints.len(),
                0,
            ));
        }
        if compiled.lmi.m == 0 {
            // Nothing left to optimize: every constraint is constant.
            let y = compiled.expand_point(&[]);
            let val = self.objective.eval(&y);
            let viol = self.violation_at(&y);
            let sol = ConicSolution {
                status: Status::Optimal,
                primal_value: val,
                dual_value: val,
                primal_point: y,
                dual_certificate: vec![Multiplier::Scalar(0.0); self.constraints.len()],
                gap: 0.0,
                max_violation: viol,
                iterations: 0,
                infeasibility_margin: None,
            };
            return Ok(sol);
        }
        match ipm::solve(&compiled.lmi, cfg) {
            IpmOutcome::Optimal(p) => {
                let y = compiled.expand_point(&p.y);
                let viol = self.violation_at(&y);
                let primal = self.objective.eval(&y);
                let dual = p.dobj + compiled.objective_constant;
                let gap = (primal - dual).abs() / (1.0 + primal.abs() + dual.abs());
                let mut cert = compiled.block_multipliers(self, &p.x);
                compiled.fill_equality_multipliers(self, &mut cert, &self.objective);
                let status = if viol <= cfg.feas_tol.max(1e-12) * 10.0 && gap <= cfg.gap_tol * 10.0 {
                    Status::Optimal
                } else {
                    Status::NumericalTrouble
                };
                Ok(ConicSolution {
                    status,
                    primal_value: primal,
                    dual_value: dual,
                    primal_point: y,
                    dual_certificate: cert,
                    gap,
                    max_violation: viol,
                    iterations: p.iterations,
                    infeasibility_margin: None,
                })
            }
            IpmOutcome::Infeasible { x, iterations } => {
                let mut cert = compiled.block_multipliers(self, &x);
                compiled.fill_equality_multipliers(self, &mut cert, &ScalarExpr::default());
                let sol = self.infeasible_from(cert, iterations, None);
                if sol.status == Status::Infeasible {
                    Ok(sol)
                } else {
                    self.phase_one(&compiled, cfg, iterations)
                }
            }
            IpmOutcome::Unbounded { iterations } => Ok(ConicSolution::failed(
                Status::Unbounded,
                self.n_vars(),
                self.constraints.len(),
                iterations,
            )),
            IpmOutcome::Stalled(p) => {
                let phase = self.phase_one(&compiled, cfg, p.iterations)?;
                if phase.status == Status::Infeasible {
                    return Ok(phase);
                }
                let y = compiled.expand_point(&p.y);
                let primal = self.objective.eval(&y);
                let dual = p.dobj + compiled.objective_constant;
                Ok(ConicSolution {
                    status: Status::NumericalTrouble,
                    primal_value: primal,
                    dual_value: dual,
                    primal_point: y.clone(),
                    dual_certificate: compiled.block_multipliers(self, &p.x),
                    gap: (primal - dual).abs() / (1.0 + primal.abs() + dual.abs()),
                    max_violation: self.violation_at(&y),
                    iterations: p.iterations,
                    infeasibility_margin: None,
                })
            }
        }
    }

    /// Decides feasibility through the phase-one problem
    /// `min t s.t. every constraint shifted by t·I holds`.
    /// Returns the phase-one optimum `t*` (≤ 0 means feasible) and its solution.
    pub fn feasibility_margin(&self, cfg: &SolverConfig) -> Result<(f64, ConicSolution)> {
        let compiled = match Compiled::build(self)? {
            Ok(c) => c,
            Err(cert) => {
                let sol = self.infeasible_from(cert, 0, None);
                return Ok((f64::INFINITY, sol));
            }
        };
        if compiled.lmi.m == 0 {
            let y = compiled.expand_point(&[]);
            let viol = self.violation_at(&y);
            let mut sol = ConicSolution::failed(Status::Optimal, self.n_vars(), self.constraints.len(), 0);
            sol.primal_point = y;
            sol.max_violation = viol;
            sol.primal_value = 0.0;
            return Ok((viol, sol));
        }
        let lmi = compiled.lmi.phase_one();
        match ipm::solve(&lmi, cfg) {
            IpmOutcome::Optimal(p) | IpmOutcome::Stalled(p) => {
                let t = p.y[compiled.lmi.m];
                let y = compiled.expand_point(&p.y[..compiled.lmi.m]);
                let viol = self.violation_at(&y);
                let mut sol = ConicSolution::failed(Status::Optimal, self.n_vars(), self.constraints.len(), p.iterations);
                sol.primal_point = y;
                sol.max_violation = viol;
                sol.primal_value = self.objective.eval(&sol.primal_point);
                sol.gap = (p.pobj - p.dobj).abs() / (1.0 + p.pobj.abs() + p.dobj.abs());
                Ok((t, sol))
            }
            _ => Err(Error::SolverFailure("phase-one problem failed".into())),
        }
    }

    fn phase_one(&self, compiled: &Compiled, cfg: &SolverConfig, iterations: usize) -> Result<ConicSolution> {
        let lmi = compiled.lmi.phase_one();
        let mut trouble = ConicSolution::failed(
            Status::NumericalTrouble,
            self.n_vars(),
            self.constraints.len(),
            iterations,
        );
        let p = match ipm::solve(&lmi, cfg) {
            IpmOutcome::Optimal(p) => p,
            _ => return Ok(trouble),
        };
        let t = p.y[compiled.lmi.m];
        if t <= cfg.feas_tol {
            trouble.infeasibility_margin = Some(t);
            return Ok(trouble);
        }
        // Drop the bound block and renormalize so that ⟨F₀, X⟩ = −1.
        let xs: Vec<DMatrix<f64>> = p.x[..compiled.lmi.blocks.len()].to_vec();
        let f0x: f64 = compiled
            .lmi
            .blocks
            .iter()
            .zip(&xs)
            .map(|(b, x)| b.f0.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<f64>())
            .sum();
        if f0x >= 0.0 {
            return Ok(trouble);
        }
        let xs: Vec<DMatrix<f64>> = xs.iter().map(|x| x / -f0x).collect();
        let mut cert = compiled.block_multipliers(self, &xs);
        compiled.fill_equality_multipliers(self, &mut cert, &ScalarExpr::default());
        Ok(self.infeasible_from(cert, iterations + p.iterations, Some(t)))
    }

    fn infeasible_from(&self, cert: Vec<Multiplier>, iterations: usize, margin: Option<f64>) -> ConicSolution {
        let check = self.check_certificate(&cert);
        let mut sol = ConicSolution::failed(Status::Infeasible, self.n_vars(), self.constraints.len(), iterations);
        sol.infeasibility_margin = margin;
        if check.constant < 0.0 && check.cone_violation <= 1e-9 {
            sol.dual_certificate = cert;
        } else {
            sol.status = Status::NumericalTrouble;
        }
        sol
    }
}

/// Problem after eliminating equalities, embedded into real symmetric blocks.
struct Compiled {
    lmi: Lmi,
    /// Reduced index → original variable.
    free: Vec<VarId>,
    /// Eliminated variables as affine expressions in free ones.
    subs: BTreeMap<VarId, ScalarExpr>,
    n_vars: usize,
    objective_constant: f64,
    /// For each LMI block: originating constraint and whether it is complex-embedded.
    origin: Vec<(usize, BlockKind)>,
    unbounded: bool,
}

#[derive(Debug, Clone, Copy)]
enum BlockKind {
    Real(usize),
    Complex(usize),
    Scalar,
}

/// Result of Gauss-Jordan elimination on the equality rows.
struct Elimination {
    subs: BTreeMap<VarId, ScalarExpr>,
}

type EqCert = Vec<Multiplier>;

impl Compiled {
    /// `Ok(Err(cert))` when the equality constraints are inconsistent or a
    /// constant block is infeasible.
    fn build(p: &ConicProblem) -> Result<std::result::Result<Self, EqCert>> {
        let elim = match eliminate(p) {
            Ok(e) => e,
            Err(cert) => return Ok(Err(cert)),
        };
        let mut objective = p.objective.clone();
        objective.substitute(&elim.subs);

        let mut reduced_psd: Vec<(usize, HermExpr)> = Vec::new();
        let mut reduced_nonneg: Vec<(usize, ScalarExpr)> = Vec::new();
        for (k, con) in p.constraints.iter().enumerate() {
            match &con.body {
                ConstraintBody::Psd { expr } => {
                    let mut e = expr.clone();
                    e.substitute(&elim.subs);
                    if e.terms().is_empty() {
                        let eig = eigh_matrix(e.constant_part())?;
                        if eig.min() < -1e-12 {
                            let v = eig.vectors.column(0).into_owned();
                            let w = &v * v.adjoint() / c(-eig.min());
                            let mut cert = vec![Multiplier::Scalar(0.0); p.constraints.len()];
                            for (j, other) in p.constraints.iter().enumerate() {
                                if let ConstraintBody::Psd { expr } = &other.body {
                                    cert[j] = Multiplier::Psd(CMatrix::zeros(expr.dim(), expr.dim()));
                                }
                            }
                            cert[k] = Multiplier::Psd(w);
                            fill_equalities_for(p, &elim, &mut cert, &ScalarExpr::default());
                            return Ok(Err(cert));
                        }
                        continue;
                    }
                    reduced_psd.push((k, e));
                }
                ConstraintBody::Nonneg { expr } => {
                    let mut e = expr.clone();
                    e.substitute(&elim.subs);
                    e.drop_small(1e-14);
                    if e.is_constant() {
                        if e.constant < -1e-12 {
                            let mut cert = zero_cert(p);
                            cert[k] = Multiplier::Scalar(1.0 / -e.constant);
                            fill_equalities_for(p, &elim, &mut cert, &ScalarExpr::default());
                            return Ok(Err(cert));
                        }
                        continue;
                    }
                    reduced_nonneg.push((k, e));
                }
                ConstraintBody::Zero { .. } => {}
            }
        }

        let mut used: BTreeSet<VarId> = BTreeSet::new();
        for (_, e) in &reduced_psd {
            used.extend(e.terms().keys().copied());
        }
        for (_, e) in &reduced_nonneg {
            used.extend(e.terms.keys().copied());
        }
        let unbounded = objective
            .terms
            .iter()
            .any(|(v, a)| !used.contains(v) && a.abs() > 1e-14);
        let free: Vec<VarId> = used.into_iter().collect();
        let index: BTreeMap<VarId, usize> = free.iter().enumerate().map(|(i, &v)| (v, i)).collect();

        let mut blocks = Vec::new();
        let mut origin = Vec::new();
        for (k, e) in &reduced_psd {
            let real = e.is_real();
            let n = e.dim();
            let bn = if real { n } else { 2 * n };
            let f0 = embed_dense(e.constant_part(), real);
            let coeffs = e
                .terms()
                .iter()
                .map(|(v, m)| (index[v], embed_sparse(m, n, real)))
                .collect();
            blocks.push(LmiBlock { n: bn, f0, coeffs });
            origin.push((*k, if real { BlockKind::Real(n) } else { BlockKind::Complex(n) }));
        }
        for (k, e) in &reduced_nonneg {
            let coeffs = e
                .terms
                .iter()
                .map(|(v, &a)| {
                    (
                        index[v],
                        SparseSym {
                            entries: vec![(0, 0, a)],
                        },
                    )
                })
                .collect();
            blocks.push(LmiBlock {
                n: 1,
                f0: DMatrix::from_element(1, 1, e.constant),
                coeffs,
            });
            origin.push((*k, BlockKind::Scalar));
        }
        let cvec = free.iter().map(|v| *objective.terms.get(v).unwrap_or(&0.0)).collect();
        Ok(Ok(Self {
            lmi: Lmi {
                m: free.len(),
                c: cvec,
                blocks,
            },
            free,
            subs: elim.subs,
            n_vars: p.n_vars(),
            objective_constant: objective.constant,
            origin,
            unbounded,
        }))
    }

    fn expand_point(&self, z: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_vars];
        for (i, v) in self.free.iter().enumerate() {
            y[v.0] = z[i];
        }
        for (v, e) in &self.subs {
            y[v.0] = e.eval(&y);
        }
        y
    }

    fn block_multipliers(&self, p: &ConicProblem, x: &[DMatrix<f64>]) -> Vec<Multiplier> {
        let mut cert = zero_cert(p);
        for ((k, kind), xk) in self.origin.iter().zip(x) {
            cert[*k] = match *kind {
                BlockKind::Scalar => Multiplier::Scalar(xk[(0, 0)]),
                BlockKind::Real(n) => Multiplier::Psd(CMatrix::from_fn(n, n, |i, j| c(0.5 * (xk[(i, j)] + xk[(j, i)])))),
                BlockKind::Complex(n) => Multiplier::Psd(CMatrix::from_fn(n, n, |i, j| {
                    // twice the complex compression of the real embedding
                    Complex64::new(
                        xk[(i, j)] + xk[(i + n, j + n)],
                        xk[(i + n, j)] - xk[(i, j + n)],
                    )
                })),
            };
        }
        cert
    }

    /// Chooses equality multipliers so the Lagrangian gradient matches `target`.
    fn fill_equality_multipliers(&self, p: &ConicProblem, cert: &mut [Multiplier], target: &ScalarExpr) {
        fill_equalities_for_subs(p, &self.subs, cert, target);
    }
}

fn zero_cert(p: &ConicProblem) -> Vec<Multiplier> {
    p.constraints
        .iter()
        .map(|con| match &con.body {
            ConstraintBody::Psd { expr } => Multiplier::Psd(CMatrix::zeros(expr.dim(), expr.dim())),
            _ => Multiplier::Scalar(0.0),
        })
        .collect()
}

fn fill_equalities_for(p: &ConicProblem, elim: &Elimination, cert: &mut [Multiplier], target: &ScalarExpr) {
    fill_equalities_for_subs(p, &elim.subs, cert, target);
}

/// Least-squares multipliers λ on the equality rows such that
/// `Σ_{ineq} ∇⟨m, expr⟩ + Σ λ_e ∇row_e = ∇target`.
fn fill_equalities_for_subs(
    p: &ConicProblem,
    subs: &BTreeMap<VarId, ScalarExpr>,
    cert: &mut [Multiplier],
    target: &ScalarExpr,
) {
    let eq_rows: Vec<usize> = p
        .constraints
        .iter()
        .enumerate()
        .filter(|(_, con)| matches!(con.body, ConstraintBody::Zero { .. }))
        .map(|(k, _)| k)
        .collect();
    if eq_rows.is_empty() || subs.is_empty() {
        return;
    }
    let mut residual = target.clone();
    for (con, m) in p.constraints.iter().zip(cert.iter()) {
        if !matches!(con.body, ConstraintBody::Zero { .. }) {
            residual.add_scaled(&m.pair_with(&con.body), -1.0);
        }
    }
    // Only the eliminated variables' gradient components need to be matched;
    // free components are already balanced by the reduced solve.
    let cols: Vec<VarId> = subs.keys().copied().collect();
    let col_index: BTreeMap<VarId, usize> = cols.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut a = DMatrix::<f64>::zeros(cols.len(), eq_rows.len());
    for (r, &k) in eq_rows.iter().enumerate() {
        if let ConstraintBody::Zero { expr } = &p.constraints[k].body {
            for (v, &coef) in &expr.terms {
                if let Some(&i) = col_index.get(v) {
                    a[(i, r)] = coef;
                }
            }
        }
    }
    let rhs = DVector::from_iterator(cols.len(), cols.iter().map(|v| *residual.terms.get(v).unwrap_or(&0.0)));
    let svd = a.svd(true, true);
    if let Ok(lambda) = svd.solve(&rhs, 1e-12) {
        for (r, &k) in eq_rows.iter().enumerate() {
            cert[k] = Multiplier::Scalar(lambda[r]);
        }
    }
}

/// Gauss-Jordan elimination of the `Zero` constraints. On inconsistency
/// returns a certificate with the aggregated constant normalized to `−1`.
fn eliminate(p: &ConicProblem) -> std::result::Result<Elimination, EqCert> {
    // pivot variable → (normalized row with unit pivot coefficient, row combination)
    let mut pivots: BTreeMap<VarId, (ScalarExpr, BTreeMap<usize, f64>)> = BTreeMap::new();
    for (k, con) in p.constraints.iter().enumerate() {
        let ConstraintBody::Zero { expr } = &con.body else {
            continue;
        };
        let mut row = expr.clone();
        let mut combo: BTreeMap<usize, f64> = BTreeMap::new();
        combo.insert(k, 1.0);
        let scale = row.terms.values().fold(row.constant.abs(), |m, a| m.max(a.abs())).max(1.0);
        let hits: Vec<(VarId, f64)> = row
            .terms
            .iter()
            .filter(|(v, _)| pivots.contains_key(v))
            .map(|(&v, &a)| (v, a))
            .collect();
        for (v, a) in hits {
            let (prow, pcombo) = &pivots[&v];
            row.add_scaled(prow, -a);
            row.terms.remove(&v);
            for (&r, &w) in pcombo {
                *combo.entry(r).or_insert(0.0) -= a * w;
            }
        }
        row.drop_small(1e-12 * scale);
        if row.terms.is_empty() {
            if row.constant.abs() > 1e-10 * scale {
                let mut cert = zero_cert(p);
                let s = -1.0 / row.constant;
                for (r, w) in combo {
                    cert[r] = Multiplier::Scalar(w * s);
                }
                return Err(cert);
            }
            continue;
        }
        let (&pv, &pa) = row
            .terms
            .iter()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.cmp(a.0)))
            .expect("non-empty");
        let row = row.scaled(1.0 / pa);
        let combo: BTreeMap<usize, f64> = combo.into_iter().map(|(r, w)| (r, w / pa)).collect();
        // keep existing pivot rows free of the new pivot variable
        for (prow, pcombo) in pivots.values_mut() {
            if let Some(a) = prow.terms.get(&pv).copied() {
                prow.add_scaled(&row, -a);
                prow.terms.remove(&pv);
                for (&r, &w) in &combo {
                    *pcombo.entry(r).or_insert(0.0) -= a * w;
                }
            }
        }
        pivots.insert(pv, (row, combo));
    }
    let subs = pivots
        .into_iter()
        .map(|(v, (row, _))| {
            // v + rest = 0  ⇒  v = −rest
            let mut e = row.scaled(-1.0);
            e.terms.remove(&v);
            (v, e)
        })
        .collect();
    Ok(Elimination { subs })
}

/// Real embedding `[[Re, −Im], [Im, Re]]`, or the real part when `real`.
fn embed_dense(m: &CMatrix, real: bool) -> DMatrix<f64> {
    let n = m.nrows();
    if real {
        return DMatrix::from_fn(n, n, |i, j| m[(i, j)].re);
    }
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

fn embed_sparse(m: &SparseHerm, n: usize, real: bool) -> SparseSym {
    let mut entries = Vec::with_capacity(if real { m.entries.len() } else { 4 * m.entries.len() });
    for (&(i, j), &z) in &m.entries {
        if z.re != 0.0 {
            entries.push((i, j, z.re));
            if !real {
                entries.push((i + n, j + n, z.re));
            }
        }
        if !real && z.im != 0.0 {
            entries.push((i, j + n, -z.im));
            entries.push((i + n, j, z.im));
        }
    }
    SparseSym { entries }
}

fn serialize_scalar_expr<S: serde::Serializer>(e: &ScalarExpr, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(2))?;
    map.serialize_entry("constant", &e.constant)?;
    let terms: Vec<(usize, f64)> = e.terms.iter().map(|(v, a)| (v.0, *a)).collect();
    map.serialize_entry("terms", &terms)?;
    map.end()
}

fn serialize_herm_expr<S: serde::Serializer>(e: &HermExpr, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(3))?;
    map.serialize_entry("dim", &e.dim())?;
    map.serialize_entry("constant", &crate::io::matrix_to_pairs(e.constant_part()))?;
    type Entry = (usize, usize, [f64; 2]);
    let terms: Vec<(usize, Vec<Entry>)> = e
        .terms()
        .iter()
        .map(|(v, m)| (v.0, m.entries.iter().map(|(&(i, j), z)| (i, j, [z.re, z.im])).collect()))
        .collect();
    map.serialize_entry("terms", &terms)?;
    map.end()
}
