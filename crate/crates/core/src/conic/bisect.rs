//! Bisection over a scalar parameter for quasiconvex problems whose
//! sublevel sets are conic feasibility problems.

use super::{ConicProblem, ConicSolution, SolverConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BisectionResult {
    pub gamma: f64,
    /// Feasible solution at `gamma`.
    pub witness: ConicSolution,
    /// Final bracket `[lo, hi]` with `hi = gamma`.
    pub bracket: (f64, f64),
    pub solves: usize,
}

/// Smallest `γ ∈ [lo, hi]` (to relative accuracy `tol`) at which
/// `feasible_at(γ)` is feasible. A problem counts as feasible when its
/// phase-one margin is at most `cfg.feas_tol`.
///
/// If `lo` itself is feasible it is returned directly, so a known lower
/// bound can be passed as `lo`.
pub fn bisect_quasiconvex<F>(feasible_at: F, lo: f64, hi: f64, tol: f64, cfg: &SolverConfig) -> Result<BisectionResult>
where
    F: Fn(f64) -> Result<ConicProblem>,
{
    bisect_threshold(
        |g| {
            let (margin, sol) = feasible_at(g)?.feasibility_margin(cfg)?;
            Ok((margin <= cfg.feas_tol, sol))
        },
        lo,
        hi,
        tol,
    )
}

/// Bisection driven by an arbitrary monotone feasibility oracle returning
/// `(feasible, solution)`; same contract as [`bisect_quasiconvex`].
pub fn bisect_threshold<F>(mut test: F, lo: f64, hi: f64, tol: f64) -> Result<BisectionResult>
where
    F: FnMut(f64) -> Result<(bool, ConicSolution)>,
{
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::BracketError(format!("invalid bracket [{lo}, {hi}]")));
    }
    let mut solves = 1;
    let (ok_hi, mut witness) = test(hi)?;
    if !ok_hi {
        return Err(Error::BracketError(format!("upper end {hi} is infeasible")));
    }
    let (mut lo, mut hi) = (lo, hi);
    if lo < hi {
        solves += 1;
        let (ok_lo, sol) = test(lo)?;
        if ok_lo {
            return Ok(BisectionResult {
                gamma: lo,
                witness: sol,
                bracket: (lo, lo),
                solves,
            });
        }
    }
    while hi - lo > tol * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        solves += 1;
        let (ok, sol) = test(mid)?;
        if ok {
            hi = mid;
            witness = sol;
        } else {
            lo = mid;
        }
    }
    Ok(BisectionResult {
        gamma: hi,
        witness,
        bracket: (lo, hi),
        solves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conic::ScalarExpr;

    fn at_least(g: f64, threshold: f64) -> Result<ConicProblem> {
        // find x with x ≤ g and x ≥ threshold
        let mut p = ConicProblem::new();
        let x = p.scalar_var("x");
        let mut up = ScalarExpr::var(x).scaled(-1.0);
        up.constant = g;
        p.add_nonneg("x ≤ g", up);
        let mut down = ScalarExpr::var(x);
        down.constant = -threshold;
        p.add_nonneg("x ≥ t", down);
        Ok(p)
    }

    #[test]
    fn finds_scalar_threshold() {
        let r = bisect_quasiconvex(|g| at_least(g, 2.5), 0.0, 10.0, 1e-7, &SolverConfig::default()).unwrap();
        assert!((r.gamma - 2.5).abs() <= 1e-6 * 2.5, "{}", r.gamma);
    }

    #[test]
    fn infeasible_upper_end_is_bracket_error() {
        let r = bisect_quasiconvex(|g| at_least(g, 2.5), 0.0, 2.0, 1e-7, &SolverConfig::default());
        assert!(matches!(r, Err(Error::BracketError(_))));
    }
}
