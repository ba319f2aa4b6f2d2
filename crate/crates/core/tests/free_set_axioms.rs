//! Tensor-closure and partial-trace contracts of the shipped cone families,
//! checked on random members.

use num_complex::Complex64;
use proptest::prelude::*;

use projent::freesets::{FreeCone, FreeConeFamily};
use projent::qlinalg::{CMatrix, DensityMatrix, HermitianOperator};

const TOL: f64 = 1e-8;

fn density_from_entries(entries: &[(f64, f64)], n: usize) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |i, j| {
        let (re, im) = entries[(i * n + j) % entries.len()];
        Complex64::new(re, im)
    });
    let m = &g * g.adjoint() + CMatrix::identity(n, n) * Complex64::new(1e-6, 0.0);
    let t = m.trace();
    m / t
}

/// `(1−t)·I/N + t·τ` with `t ≤ 2/(N+2)` has a PSD partial transpose for
/// any state `τ`, so it is a member of every PPT cone on `N` dimensions.
fn ppt_member(entries: &[(f64, f64)], t: f64, dims: Vec<usize>) -> HermitianOperator {
    let n: usize = dims.iter().product();
    let tau = density_from_entries(entries, n);
    let t = t * 2.0 / (n as f64 + 2.0);
    let m = CMatrix::identity(n, n) * Complex64::new((1.0 - t) / n as f64, 0.0) + tau * Complex64::new(t, 0.0);
    HermitianOperator::new(m, dims).unwrap()
}

fn entries() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 16..64)
}

fn ppt_dims(copies: usize) -> Vec<usize> {
    std::iter::repeat_n([2usize, 2], copies).flatten().collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn ppt_tensor_closure(e1 in entries(), e2 in entries(), t1 in 0.0..1.0f64, t2 in 0.0..1.0f64, n in 1usize..=2, m in 1usize..=2) {
        let fam = FreeConeFamily::new(FreeCone::ppt(2, 2).unwrap());
        let x = ppt_member(&e1, t1, ppt_dims(n));
        let y = ppt_member(&e2, t2, ppt_dims(m));
        prop_assert!(fam.extend(n).unwrap().is_member(&x, TOL).unwrap());
        prop_assert!(fam.extend(m).unwrap().is_member(&y, TOL).unwrap());
        let xy = x.tensor(&y).unwrap();
        prop_assert!(fam.extend(n + m).unwrap().is_member(&xy, TOL).unwrap());
    }

    #[test]
    fn ppt_partial_trace(e in entries(), t in 0.0..1.0f64) {
        let fam = FreeConeFamily::new(FreeCone::ppt(2, 2).unwrap());
        let x = ppt_member(&e, t, ppt_dims(2));
        prop_assert!(fam.extend(2).unwrap().is_member(&x, TOL).unwrap());
        for keep in [[0usize, 1], [2, 3]] {
            let reduced = x.partial_trace(&keep).unwrap();
            prop_assert!(fam.base().is_member(&reduced, TOL).unwrap());
        }
    }

    #[test]
    fn diagonal_tensor_and_trace(p in prop::collection::vec(0.0..1.0f64, 3), q in prop::collection::vec(0.0..1.0f64, 3)) {
        let fam = FreeConeFamily::new(FreeCone::diagonal(3).unwrap());
        let x = HermitianOperator::diagonal(&p).with_dims(vec![3]).unwrap();
        let y = HermitianOperator::diagonal(&q).with_dims(vec![3]).unwrap();
        let xy = x.tensor(&y).unwrap();
        let two = fam.extend(2).unwrap();
        prop_assert!(two.is_member(&xy, TOL).unwrap());
        prop_assert!(fam.base().is_member(&xy.partial_trace(&[1]).unwrap(), TOL).unwrap());
    }

    #[test]
    fn singleton_tensor_and_trace(e in entries(), s in 0.1..3.0f64) {
        let sigma = DensityMatrix::from_unnormalized(
            HermitianOperator::new(density_from_entries(&e, 2), vec![2]).unwrap(),
        ).unwrap();
        let fam = FreeConeFamily::new(FreeCone::singleton(sigma.clone()).unwrap());
        let member = sigma.op().scale(s);
        let pair = member.tensor(sigma.op()).unwrap();
        prop_assert!(fam.extend(2).unwrap().is_member(&pair, 1e-7).unwrap());
        prop_assert!(fam.base().is_member(&pair.partial_trace(&[0]).unwrap(), 1e-7).unwrap());
    }
}

#[test]
fn bell_state_breaks_membership_after_tensoring() {
    // a non-member stays a non-member when tensored with a free state
    let fam = FreeConeFamily::new(FreeCone::ppt(2, 2).unwrap());
    let bell = projent::models::max_entangled(2).unwrap();
    let mixed = HermitianOperator::identity(4).scale(0.25).with_dims(vec![2, 2]).unwrap();
    let joint = bell.op().tensor(&mixed).unwrap();
    assert!(!fam.extend(2).unwrap().is_member(&joint, TOL).unwrap());
}
