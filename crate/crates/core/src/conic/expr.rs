//! Affine expressions over the real decision variables of a [`ConicProblem`].
//!
//! [`ConicProblem`]: super::ConicProblem

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::qlinalg::{c, CMatrix, TransposeMap};

const DROP_TOL: f64 = 1e-15;

/// Index of a real scalar decision variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

/// `constant + Σ coef·var`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScalarExpr {
    pub constant: f64,
    pub terms: BTreeMap<VarId, f64>,
}

impl ScalarExpr {
    pub fn constant(v: f64) -> Self {
        Self {
            constant: v,
            terms: BTreeMap::new(),
        }
    }

    pub fn var(v: VarId) -> Self {
        Self::term(v, 1.0)
    }

    pub fn term(v: VarId, coef: f64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(v, coef);
        Self { constant: 0.0, terms }
    }

    pub fn add_term(&mut self, v: VarId, coef: f64) {
        if coef == 0.0 {
            return;
        }
        let e = self.terms.entry(v).or_insert(0.0);
        *e += coef;
        if *e == 0.0 {
            self.terms.remove(&v);
        }
    }

    pub fn add_scaled(&mut self, other: &ScalarExpr, s: f64) {
        self.constant += s * other.constant;
        for (&v, &a) in &other.terms {
            self.add_term(v, s * a);
        }
    }

    pub fn plus(&self, other: &ScalarExpr) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, 1.0);
        out
    }

    pub fn minus(&self, other: &ScalarExpr) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, -1.0);
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = Self::default();
        out.add_scaled(self, s);
        out
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|(v, a)| a * y[v.0]).sum::<f64>()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn drop_small(&mut self, tol: f64) {
        self.terms.retain(|_, a| a.abs() > tol);
    }
}

/// Sparse complex Hermitian coefficient, both triangles stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseHerm {
    pub entries: BTreeMap<(usize, usize), Complex64>,
}

impl SparseHerm {
    pub fn from_dense(m: &CMatrix) -> Self {
        let mut entries = BTreeMap::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                if z.norm() > DROP_TOL {
                    entries.insert((i, j), z);
                }
            }
        }
        Self { entries }
    }

    pub fn add_entry(&mut self, i: usize, j: usize, z: Complex64) {
        let e = self.entries.entry((i, j)).or_insert(c(0.0));
        *e += z;
        if e.norm() <= DROP_TOL {
            self.entries.remove(&(i, j));
        }
    }

    pub fn add_scaled(&mut self, other: &SparseHerm, s: f64) {
        for (&(i, j), &z) in &other.entries {
            self.add_entry(i, j, z * s);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.entries.values().all(|z| z.im == 0.0)
    }

    pub fn to_dense(&self, n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for (&(i, j), &z) in &self.entries {
            m[(i, j)] = z;
        }
        m
    }
}

/// `constant + Σ var·coefficient` with Hermitian matrix values.
#[derive(Debug, Clone, PartialEq)]
pub struct HermExpr {
    n: usize,
    constant: CMatrix,
    terms: BTreeMap<VarId, SparseHerm>,
}

impl HermExpr {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            constant: CMatrix::zeros(n, n),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(m: &CMatrix) -> Self {
        Self {
            n: m.nrows(),
            constant: m.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// `s · m` for a scalar expression `s` and a fixed Hermitian `m`.
    pub fn scalar_times(s: &ScalarExpr, m: &CMatrix) -> Self {
        let sparse = SparseHerm::from_dense(m);
        let mut terms = BTreeMap::new();
        for (&v, &a) in &s.terms {
            let mut t = SparseHerm::default();
            t.add_scaled(&sparse, a);
            if !t.is_empty() {
                terms.insert(v, t);
            }
        }
        Self {
            n: m.nrows(),
            constant: m * c(s.constant),
            terms,
        }
    }

    pub(crate) fn from_parts(n: usize, constant: CMatrix, terms: BTreeMap<VarId, SparseHerm>) -> Self {
        Self { n, constant, terms }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn constant_part(&self) -> &CMatrix {
        &self.constant
    }

    pub fn terms(&self) -> &BTreeMap<VarId, SparseHerm> {
        &self.terms
    }

    pub fn is_real(&self) -> bool {
        self.constant.iter().all(|z| z.im == 0.0) && self.terms.values().all(SparseHerm::is_real)
    }

    pub fn add_scaled(&mut self, other: &HermExpr, s: f64) {
        assert_eq!(self.n, other.n, "expression dimension mismatch");
        self.constant += &other.constant * c(s);
        for (&v, m) in &other.terms {
            let e = self.terms.entry(v).or_default();
            e.add_scaled(m, s);
            if e.is_empty() {
                self.terms.remove(&v);
            }
        }
    }

    pub fn plus(&self, other: &HermExpr) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, 1.0);
        out
    }

    pub fn minus(&self, other: &HermExpr) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, -1.0);
        out
    }

    pub fn plus_constant(&self, m: &CMatrix) -> Self {
        let mut out = self.clone();
        out.constant += m;
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = Self::zero(self.n);
        out.add_scaled(self, s);
        out
    }

    /// Partial transpose on `systems` of a space with local dimensions `dims`.
    pub fn partial_transpose(&self, map: &TransposeMap) -> Self {
        let n = self.n;
        let mut constant = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = map.apply(i, j);
                constant[(a, b)] = self.constant[(i, j)];
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|(&v, m)| {
                let entries = m
                    .entries
                    .iter()
                    .map(|(&(i, j), &z)| (map.apply(i, j), z))
                    .collect();
                (v, SparseHerm { entries })
            })
            .collect();
        Self { n, constant, terms }
    }

    /// `K† X K` for an `n×r` matrix `K`.
    pub fn compress(&self, k: &CMatrix) -> Self {
        let kh = k.adjoint();
        self.map_dense(k.ncols(), |m| &kh * m * k)
    }

    /// `K X K†` for an `n×r` matrix `K` acting on an `r`-dimensional expression.
    pub fn expand(&self, k: &CMatrix) -> Self {
        let kh = k.adjoint();
        self.map_dense(k.nrows(), |m| k * m * &kh)
    }

    /// Keeps only the diagonal.
    pub fn dephase(&self) -> Self {
        let n = self.n;
        let constant = CMatrix::from_fn(n, n, |i, j| if i == j { self.constant[(i, j)] } else { c(0.0) });
        let terms = self
            .terms
            .iter()
            .filter_map(|(&v, m)| {
                let entries: BTreeMap<_, _> =
                    m.entries.iter().filter(|((i, j), _)| i == j).map(|(&k, &z)| (k, z)).collect();
                (!entries.is_empty()).then_some((v, SparseHerm { entries }))
            })
            .collect();
        Self { n, constant, terms }
    }

    fn map_dense(&self, out_n: usize, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        let constant = f(&self.constant);
        let terms = self
            .terms
            .iter()
            .filter_map(|(&v, m)| {
                let s = SparseHerm::from_dense(&f(&m.to_dense(self.n)));
                (!s.is_empty()).then_some((v, s))
            })
            .collect();
        Self {
            n: out_n,
            constant,
            terms,
        }
    }

    pub fn trace(&self) -> ScalarExpr {
        let mut out = ScalarExpr::constant(self.constant.diagonal().iter().map(|z| z.re).sum());
        for (&v, m) in &self.terms {
            let t: f64 = m.entries.iter().filter(|((i, j), _)| i == j).map(|(_, z)| z.re).sum();
            out.add_term(v, t);
        }
        out
    }

    /// `Re Tr(h X)`.
    pub fn inner(&self, h: &CMatrix) -> ScalarExpr {
        let dot = |i: usize, j: usize, z: Complex64| {
            let w = h[(j, i)];
            w.re * z.re - w.im * z.im
        };
        let n = self.n;
        let mut constant = 0.0;
        for i in 0..n {
            for j in 0..n {
                constant += dot(i, j, self.constant[(i, j)]);
            }
        }
        let mut out = ScalarExpr::constant(constant);
        for (&v, m) in &self.terms {
            let t: f64 = m.entries.iter().map(|(&(i, j), &z)| dot(i, j, z)).sum();
            out.add_term(v, t);
        }
        out
    }

    /// Real part of entry `(i, j)`.
    pub fn entry_re(&self, i: usize, j: usize) -> ScalarExpr {
        self.entry_part(i, j, |z| z.re)
    }

    /// Imaginary part of entry `(i, j)`.
    pub fn entry_im(&self, i: usize, j: usize) -> ScalarExpr {
        self.entry_part(i, j, |z| z.im)
    }

    fn entry_part(&self, i: usize, j: usize, part: impl Fn(Complex64) -> f64) -> ScalarExpr {
        let mut out = ScalarExpr::constant(part(self.constant[(i, j)]));
        for (&v, m) in &self.terms {
            if let Some(&z) = m.entries.get(&(i, j)) {
                out.add_term(v, part(z));
            }
        }
        out
    }

    pub fn eval(&self, y: &[f64]) -> CMatrix {
        let mut out = self.constant.clone();
        for (&v, m) in &self.terms {
            let s = y[v.0];
            if s != 0.0 {
                for (&(i, j), &z) in &m.entries {
                    out[(i, j)] += z * s;
                }
            }
        }
        out
    }

    /// Replaces variables by affine expressions in other variables.
    pub(crate) fn substitute(&mut self, subs: &BTreeMap<VarId, ScalarExpr>) {
        let hit: Vec<VarId> = self.terms.keys().copied().filter(|v| subs.contains_key(v)).collect();
        for v in hit {
            let m = self.terms.remove(&v).expect("present");
            let e = &subs[&v];
            if e.constant != 0.0 {
                for (&(i, j), &z) in &m.entries {
                    self.constant[(i, j)] += z * e.constant;
                }
            }
            for (&w, &a) in &e.terms {
                let t = self.terms.entry(w).or_default();
                t.add_scaled(&m, a);
                if t.is_empty() {
                    self.terms.remove(&w);
                }
            }
        }
    }
}

impl ScalarExpr {
    pub(crate) fn substitute(&mut self, subs: &BTreeMap<VarId, ScalarExpr>) {
        let hit: Vec<VarId> = self.terms.keys().copied().filter(|v| subs.contains_key(v)).collect();
        for v in hit {
            let a = self.terms.remove(&v).expect("present");
            self.add_scaled(&subs[&v], a);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_matches_dense_trace() {
        let h = CMatrix::from_row_slice(2, 2, &[c(1.0), Complex64::new(0.5, 0.25), Complex64::new(0.5, -0.25), c(2.0)]);
        let x = CMatrix::from_row_slice(2, 2, &[c(0.3), Complex64::new(-0.1, 0.7), Complex64::new(-0.1, -0.7), c(0.9)]);
        let e = HermExpr::constant(&x);
        let want = (&h * &x).trace().re;
        assert!((e.inner(&h).constant - want).abs() < 1e-14);
    }

    #[test]
    fn substitution_is_affine() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(0.0)]);
        let mut e = HermExpr::scalar_times(&ScalarExpr::var(VarId(0)), &m);
        let mut subs = BTreeMap::new();
        let mut s = ScalarExpr::constant(3.0);
        s.add_term(VarId(1), -1.0);
        subs.insert(VarId(0), s);
        e.substitute(&subs);
        let got = e.eval(&[0.0, 1.0]);
        assert!((got - &m * c(2.0)).norm() < 1e-15);
    }
}
