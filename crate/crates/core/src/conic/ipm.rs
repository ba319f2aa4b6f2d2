//! Primal-dual path-following solver for real block-diagonal linear matrix
//! inequalities.
//!
//! Solves
//!
//! ```text
//!   minimize    cᵀy
//!   subject to  S = F₀ + Σ yᵢ Fᵢ ⪰ 0
//! ```
//!
//! together with its dual `maximize −⟨F₀, X⟩ s.t. ⟨Fᵢ, X⟩ = cᵢ, X ⪰ 0`,
//! using the HKM search direction with a Mehrotra predictor-corrector step
//! from an infeasible starting point.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use super::SolverConfig;

/// Symmetric sparse matrix, both triangles stored.
#[derive(Debug, Clone, Default)]
pub(crate) struct SparseSym {
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    /// `Tr(self · k)`.
    fn trace_with(&self, k: &DMatrix<f64>) -> f64 {
        self.entries.iter().map(|&(p, q, v)| v * k[(q, p)]).sum()
    }

    fn add_to(&self, out: &mut DMatrix<f64>, s: f64) {
        for &(p, q, v) in &self.entries {
            out[(p, q)] += s * v;
        }
    }

    fn frobenius(&self) -> f64 {
        self.entries.iter().map(|e| e.2 * e.2).sum::<f64>().sqrt()
    }

    fn to_dense(&self, n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        self.add_to(&mut m, 1.0);
        m
    }
}

#[derive(Debug, Clone)]
pub(crate) struct LmiBlock {
    pub n: usize,
    pub f0: DMatrix<f64>,
    /// `(variable index, coefficient)`, sorted by variable.
    pub coeffs: Vec<(usize, SparseSym)>,
}

#[derive(Debug, Clone)]
pub(crate) struct Lmi {
    pub m: usize,
    pub c: Vec<f64>,
    pub blocks: Vec<LmiBlock>,
}

#[derive(Debug, Clone)]
pub(crate) enum IpmOutcome {
    Optimal(IpmPoint),
    /// `x` is normalized so that `⟨F₀, X⟩ = −1` and `⟨Fᵢ, X⟩ ≈ 0`.
    Infeasible { x: Vec<DMatrix<f64>>, iterations: usize },
    Unbounded { iterations: usize },
    Stalled(IpmPoint),
}

#[derive(Debug, Clone)]
pub(crate) struct IpmPoint {
    pub y: Vec<f64>,
    pub x: Vec<DMatrix<f64>>,
    pub pobj: f64,
    pub dobj: f64,
    pub iterations: usize,
}

impl Lmi {
    fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.n).sum()
    }

    fn eval(&self, y: &[f64]) -> Vec<DMatrix<f64>> {
        self.blocks
            .iter()
            .map(|b| {
                let mut s = b.f0.clone();
                for (i, f) in &b.coeffs {
                    if y[*i] != 0.0 {
                        f.add_to(&mut s, y[*i]);
                    }
                }
                s
            })
            .collect()
    }

    fn apply_adjoint(&self, x: &[DMatrix<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for (b, xk) in self.blocks.iter().zip(x) {
            for (i, f) in &b.coeffs {
                out[*i] += f.trace_with(xk);
            }
        }
        out
    }

    fn direction(&self, dy: &[f64], base: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
        self.blocks
            .iter()
            .zip(base)
            .map(|(b, r)| {
                let mut s = r.clone();
                for (i, f) in &b.coeffs {
                    if dy[*i] != 0.0 {
                        f.add_to(&mut s, dy[*i]);
                    }
                }
                s
            })
            .collect()
    }

    /// Phase-one problem: minimize t s.t. F(y) + t·I ⪰ 0, t ≥ −1.
    pub fn phase_one(&self) -> Lmi {
        let t = self.m;
        let mut blocks: Vec<LmiBlock> = self
            .blocks
            .iter()
            .map(|b| {
                let mut coeffs = b.coeffs.clone();
                coeffs.push((
                    t,
                    SparseSym {
                        entries: (0..b.n).map(|k| (k, k, 1.0)).collect(),
                    },
                ));
                LmiBlock {
                    n: b.n,
                    f0: b.f0.clone(),
                    coeffs,
                }
            })
            .collect();
        blocks.push(LmiBlock {
            n: 1,
            f0: DMatrix::from_element(1, 1, 1.0),
            coeffs: vec![(t, SparseSym { entries: vec![(0, 0, 1.0)] })],
        });
        let mut c = vec![0.0; self.m + 1];
        c[t] = 1.0;
        Lmi { m: self.m + 1, c, blocks }
    }
}

fn min_eig(s: &DMatrix<f64>) -> f64 {
    if s.nrows() == 1 {
        return s[(0, 0)];
    }
    SymmetricEigen::new(s.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn fro(a: &DMatrix<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest `α` with `p + α d ⪰ 0` for positive definite `p`.
fn max_step(chol: &Cholesky<f64, Dyn>, d: &DMatrix<f64>) -> f64 {
    let l = chol.l();
    let n = d.nrows();
    if n == 1 {
        let p = l[(0, 0)] * l[(0, 0)];
        return if d[(0, 0)] >= 0.0 { f64::INFINITY } else { -p / d[(0, 0)] };
    }
    // L⁻¹ D L⁻ᵀ
    let linv_d = match l.solve_lower_triangular(d) {
        Some(m) => m,
        None => return 0.0,
    };
    let t = match l.solve_lower_triangular(&linv_d.transpose()) {
        Some(m) => m,
        None => return 0.0,
    };
    let lam = min_eig(&sym(&t));
    if lam >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lam
    }
}

fn cholesky(m: &DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    Cholesky::new(sym(m))
}

struct Schur {
    chol: Cholesky<f64, Dyn>,
}

impl Schur {
    fn build(lmi: &Lmi, x: &[DMatrix<f64>], sinv: &[DMatrix<f64>]) -> Option<Self> {
        let m = lmi.m;
        let mut mat = DMatrix::<f64>::zeros(m, m);
        for ((b, xk), sk) in lmi.blocks.iter().zip(x).zip(sinv) {
            let n = b.n;
            // H_a = S⁻¹ F_a X
            let hs: Vec<DMatrix<f64>> = b
                .coeffs
                .iter()
                .map(|(_, f)| {
                    if f.entries.len() > 2 * n {
                        sk * f.to_dense(n) * xk
                    } else {
                        let mut h = DMatrix::zeros(n, n);
                        for &(p, q, v) in &f.entries {
                            for r in 0..n {
                                let xr = v * xk[(q, r)];
                                if xr != 0.0 {
                                    for s in 0..n {
                                        h[(s, r)] += sk[(s, p)] * xr;
                                    }
                                }
                            }
                        }
                        h
                    }
                })
                .collect();
            for (a, (ia, _)) in b.coeffs.iter().enumerate() {
                for (ib, fb) in b.coeffs.iter().skip(a) {
                    // Tr(F_a X F_b S⁻¹) = Σ_{(r,s)} F_b[r,s] H_a[s,r]
                    let v = fb.trace_with(&hs[a]);
                    mat[(*ia, *ib)] += v;
                    if ia != ib {
                        mat[(*ib, *ia)] += v;
                    }
                }
            }
        }
        let mat = sym(&mat);
        if let Some(chol) = Cholesky::new(mat.clone()) {
            return Some(Self { chol });
        }
        let scale = (0..m).map(|i| mat[(i, i)].abs()).fold(0.0, f64::max).max(1.0);
        for k in [1e-14, 1e-12, 1e-10] {
            let mut reg = mat.clone();
            for i in 0..m {
                reg[(i, i)] += k * scale;
            }
            if let Some(chol) = Cholesky::new(reg) {
                return Some(Self { chol });
            }
        }
        None
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        self.chol.solve(&DVector::from_column_slice(rhs)).iter().copied().collect()
    }
}

pub(crate) fn solve(lmi: &Lmi, cfg: &SolverConfig) -> IpmOutcome {
    let n_total = lmi.total_dim().max(1) as f64;
    let norm_c = lmi.c.iter().map(|v| v * v).sum::<f64>().sqrt();
    let norm_f0 = lmi.blocks.iter().map(|b| fro(&b.f0)).sum::<f64>();
    let max_fi = lmi
        .blocks
        .iter()
        .flat_map(|b| b.coeffs.iter().map(|(_, f)| f.frobenius()))
        .fold(0.0, f64::max);

    // starting point
    let mut xi: f64 = 10f64.max(n_total.sqrt());
    for b in &lmi.blocks {
        for (i, f) in &b.coeffs {
            xi = xi.max((1.0 + lmi.c[*i].abs()) / (1.0 + f.frobenius()));
        }
    }
    let eta = 10f64.max(n_total.sqrt()).max(norm_f0).max(max_fi);
    let mut x: Vec<DMatrix<f64>> = lmi.blocks.iter().map(|b| DMatrix::identity(b.n, b.n) * xi).collect();
    let mut s: Vec<DMatrix<f64>> = lmi.blocks.iter().map(|b| DMatrix::identity(b.n, b.n) * eta).collect();
    let mut y = vec![0.0; lmi.m];

    let mut last = None;
    let mut slow_steps = 0;
    for iter in 0..cfg.max_iter {
        let fy = lmi.eval(&y);
        let rd: Vec<DMatrix<f64>> = fy.iter().zip(&s).map(|(f, sk)| f - sk).collect();
        let ax = lmi.apply_adjoint(&x);
        let rp: Vec<f64> = lmi.c.iter().zip(&ax).map(|(ci, ai)| ci - ai).collect();
        let pobj: f64 = lmi.c.iter().zip(&y).map(|(a, b)| a * b).sum();
        let dobj: f64 = -lmi.blocks.iter().zip(&x).map(|(b, xk)| dot(&b.f0, xk)).sum::<f64>();
        let mu = x.iter().zip(&s).map(|(a, b)| dot(a, b)).sum::<f64>() / n_total;
        let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let pinf = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + norm_c);
        let dinf = rd.iter().map(fro).sum::<f64>() / (1.0 + norm_f0);

        let point = IpmPoint {
            y: y.clone(),
            x: x.clone(),
            pobj,
            dobj,
            iterations: iter,
        };
        if pinf <= cfg.feas_tol && dinf <= cfg.feas_tol && rel_gap <= cfg.gap_tol {
            let viol = (-fy.iter().map(min_eig).fold(f64::INFINITY, f64::min)).max(0.0);
            if viol <= cfg.feas_tol {
                return IpmOutcome::Optimal(point);
            }
        }
        // X grows along a ray with ⟨Fᵢ, X⟩ → 0 relative to −⟨F₀, X⟩
        if dobj > 1.0 {
            let ax_norm = ax.iter().map(|v| v * v).sum::<f64>().sqrt();
            if ax_norm / dobj < cfg.feas_tol * 1e-1 && dobj > 1e8 * (1.0 + pobj.abs()) {
                let xs = x.iter().map(|xk| xk / dobj).collect();
                return IpmOutcome::Infeasible { x: xs, iterations: iter };
            }
        }
        if pobj < -1e12 && dinf <= cfg.feas_tol {
            return IpmOutcome::Unbounded { iterations: iter };
        }
        last = Some(point);

        let (Some(schol), Some(xchol)) = (
            s.iter().map(cholesky).collect::<Option<Vec<_>>>(),
            x.iter().map(cholesky).collect::<Option<Vec<_>>>(),
        ) else {
            break;
        };
        let sinv: Vec<DMatrix<f64>> = schol.iter().map(|ch| ch.inverse()).collect();
        let Some(schur) = Schur::build(lmi, &x, &sinv) else {
            break;
        };

        let step = |q: &[DMatrix<f64>]| -> (Vec<f64>, Vec<DMatrix<f64>>, Vec<DMatrix<f64>>) {
            // G = Q S⁻¹ − X Rd S⁻¹
            let g: Vec<DMatrix<f64>> = q
                .iter()
                .zip(&sinv)
                .zip(&x)
                .zip(&rd)
                .map(|(((qk, si), xk), rk)| qk * si - xk * rk * si)
                .collect();
            let ag = lmi.apply_adjoint(&g);
            let rhs: Vec<f64> = ag.iter().zip(&lmi.c).map(|(a, ci)| a - ci).collect();
            let dy = schur.solve(&rhs);
            let ds = lmi.direction(&dy, &rd);
            let dx = q
                .iter()
                .zip(&sinv)
                .zip(&x)
                .zip(&ds)
                .map(|(((qk, si), xk), dsk)| sym(&(qk * si - xk - xk * dsk * si)))
                .collect();
            (dy, dx, ds)
        };
        let lengths = |dx: &[DMatrix<f64>], ds: &[DMatrix<f64>]| -> (f64, f64) {
            let ap = xchol.iter().zip(dx).map(|(ch, d)| max_step(ch, d)).fold(f64::INFINITY, f64::min);
            let ad = schol.iter().zip(ds).map(|(ch, d)| max_step(ch, d)).fold(f64::INFINITY, f64::min);
            (ap, ad)
        };

        // predictor
        let zero_q: Vec<DMatrix<f64>> = lmi.blocks.iter().map(|b| DMatrix::zeros(b.n, b.n)).collect();
        let (_, dxa, dsa) = step(&zero_q);
        let (apa, ada) = lengths(&dxa, &dsa);
        let (apa, ada) = (apa.min(1.0), ada.min(1.0));
        let mu_aff = x
            .iter()
            .zip(&dxa)
            .zip(s.iter().zip(&dsa))
            .map(|((xk, dxk), (sk, dsk))| dot(&(xk + dxk * apa), &(sk + dsk * ada)))
            .sum::<f64>()
            / n_total;
        let sigma = if mu > 0.0 { (mu_aff / mu).max(0.0).powi(3).min(1.0) } else { 0.0 };

        // corrector
        let q: Vec<DMatrix<f64>> = lmi
            .blocks
            .iter()
            .zip(dxa.iter().zip(&dsa))
            .map(|(b, (dxk, dsk))| DMatrix::identity(b.n, b.n) * (sigma * mu) - dxk * dsk)
            .collect();
        let (dy, dx, ds) = step(&q);
        let (ap, ad) = lengths(&dx, &ds);
        let tau = 0.9 + 0.09 * apa.min(ada);
        let ap = (tau * ap).min(1.0);
        let ad = (tau * ad).min(1.0);
        if ap < 1e-10 && ad < 1e-10 {
            slow_steps += 1;
            if slow_steps > 3 {
                break;
            }
        } else {
            slow_steps = 0;
        }
        for (xk, dxk) in x.iter_mut().zip(&dx) {
            *xk += dxk * ap;
        }
        for (yi, dyi) in y.iter_mut().zip(&dy) {
            *yi += ad * dyi;
        }
        for (sk, dsk) in s.iter_mut().zip(&ds) {
            *sk += dsk * ad;
        }
    }
    match last {
        Some(p) => IpmOutcome::Stalled(p),
        None => IpmOutcome::Stalled(IpmPoint {
            y,
            x,
            pobj: f64::NAN,
            dobj: f64::NAN,
            iterations: cfg.max_iter,
        }),
    }
}
