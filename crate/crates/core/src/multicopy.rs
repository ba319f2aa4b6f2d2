//! Finite-copy regularization: per-copy sequences, Fekete upper bounds and
//! smoothing tables.
//!
//! Regularized quantities are limits in `n`; only brackets at the computed
//! copy counts are ever reported.

use std::fmt::Write as _;

use serde::Serialize;

use crate::divergences::{
    dmax_set, dmin_set, dproj_set, dproj_set_certified, dproj_s_set, rel_entropy_set, robustness_standard,
    serialize_bits, smoothed, DivergenceValue, Provenance, SetMeasure, SmoothingRadius,
};
use crate::error::{Error, Result};
use crate::freesets::{FreeCone, FreeConeFamily};
use crate::qlinalg::DensityMatrix;

/// Quantities that can be regularized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    RelEntropySet,
    DminSet,
    DmaxSet,
    DprojSet,
    RobustnessStandard,
    DprojSSet,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::RelEntropySet => "rel_entropy_set",
            Measure::DminSet => "dmin_set",
            Measure::DmaxSet => "dmax_set",
            Measure::DprojSet => "dproj_set",
            Measure::RobustnessStandard => "robustness_standard",
            Measure::DprojSSet => "dproj_s_set",
        }
    }

    fn smoothable(self) -> Option<SetMeasure> {
        match self {
            Measure::DmaxSet => Some(SetMeasure::DmaxSet),
            Measure::DprojSet => Some(SetMeasure::DprojSet),
            Measure::RobustnessStandard => Some(SetMeasure::RobustnessStandard),
            Measure::DprojSSet => Some(SetMeasure::DprojSSet),
            Measure::RelEntropySet | Measure::DminSet => None,
        }
    }

    /// Evaluates the measure once, with smoothing when `eps > 0`.
    pub fn evaluate(self, rho: &DensityMatrix, cone: &FreeCone, eps: SmoothingRadius) -> Result<DivergenceValue> {
        if eps.value() > 0.0 {
            let m = self
                .smoothable()
                .ok_or_else(|| Error::InvalidArgument(format!("{} has no smoothed variant", self.name())))?;
            return smoothed(m, rho, cone, eps);
        }
        match self {
            Measure::RelEntropySet => rel_entropy_set(rho, cone),
            Measure::DminSet => dmin_set(rho, cone),
            Measure::DmaxSet => dmax_set(rho, cone),
            Measure::DprojSet => Ok(dproj_set_certified(rho, cone)?.value),
            Measure::RobustnessStandard => robustness_standard(rho, cone),
            Measure::DprojSSet => dproj_s_set(rho, cone),
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rel_entropy_set" | "dsep" | "d" => Measure::RelEntropySet,
            "dmin_set" | "dmin" => Measure::DminSet,
            "dmax_set" | "dmax" => Measure::DmaxSet,
            "dproj_set" | "dproj" => Measure::DprojSet,
            "robustness_standard" | "rs" => Measure::RobustnessStandard,
            "dproj_s_set" | "dproj_s" => Measure::DprojSSet,
            other => return Err(Error::InvalidArgument(format!("unknown measure '{other}'"))),
        })
    }
}

/// One entry of a per-copy sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CopyValue {
    pub n: usize,
    /// `value(n)/n`.
    #[serde(serialize_with = "serialize_bits")]
    pub per_copy_bits: f64,
    /// Certified lower end of `value(n)/n`.
    #[serde(serialize_with = "serialize_bits")]
    pub lower_per_copy_bits: f64,
    pub value: DivergenceValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizationReport {
    pub measure: Measure,
    pub values: Vec<CopyValue>,
    /// `min_n value(n)/n`: an upper bound on the regularization for
    /// sub-additive measures.
    #[serde(serialize_with = "serialize_bits")]
    pub fekete_upper: f64,
    /// `min_n lower(n)/n`. Bounds the computed terms from below; it is not
    /// a bound on the limit itself.
    #[serde(serialize_with = "serialize_bits")]
    pub witness_lower: f64,
    pub eps_used: f64,
}

impl RegularizationReport {
    /// CSV rows `measure,n,eps,per_copy_bits,provenance`, with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("measure,n,eps,per_copy_bits,provenance\n");
        for v in &self.values {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                self.measure.name(),
                v.n,
                fmt_num(self.eps_used),
                fmt_num(v.per_copy_bits),
                provenance_tag(&v.value.provenance, v.n)
            );
        }
        out
    }
}

/// Fixed-precision formatting so outputs are byte-stable.
pub fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "+inf".into() } else { "-inf".into() }
    } else if x.is_nan() {
        "nan".into()
    } else {
        let s = format!("{x:.9}");
        if s == "-0.000000000" { "0.000000000".into() } else { s }
    }
}

/// Compact provenance tag; bracket ends are reported per copy.
pub fn provenance_tag(p: &Provenance, n: usize) -> String {
    match p {
        Provenance::ClosedForm => "closed_form".into(),
        Provenance::Conic { gap } => format!("conic(gap={gap:.1e})"),
        Provenance::WitnessBracket { lo, hi } => format!(
            "witness_bracket(lo={};hi={})",
            fmt_num(lo / n as f64),
            fmt_num(hi / n as f64)
        ),
    }
}

/// Copy state and cone for `n` copies.
fn copies(rho: &DensityMatrix, family: &FreeConeFamily, n: usize) -> Result<(DensityMatrix, FreeCone)> {
    let cone = family.extend(n)?;
    let rho_n = if n == 1 { rho.clone() } else { rho.tensor_power(n)? };
    Ok((rho_n, cone))
}

fn check_capacity(family: &FreeConeFamily, n_max: usize) -> Result<()> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let largest = family.max_copies();
    if n_max > largest {
        return Err(Error::CapacityExceeded {
            requested: family.base().dim().saturating_pow(n_max as u32),
            cap: crate::qlinalg::dim_cap(),
            largest_feasible_n: Some(largest),
        });
    }
    Ok(())
}

/// Evaluates `measure(ρ^{⊗n})/n` for `n = 1..=n_max`.
pub fn regularize(
    measure: Measure,
    rho: &DensityMatrix,
    family: &FreeConeFamily,
    n_max: usize,
    eps: SmoothingRadius,
) -> Result<RegularizationReport> {
    check_capacity(family, n_max)?;
    let mut values = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let (rho_n, cone) = copies(rho, family, n)?;
        let value = measure.evaluate(&rho_n, &cone, eps)?;
        let k = n as f64;
        values.push(CopyValue {
            n,
            per_copy_bits: value.bits / k,
            lower_per_copy_bits: value.lower() / k,
            value,
        });
    }
    let fekete_upper = values.iter().map(|v| v.per_copy_bits).fold(f64::INFINITY, f64::min);
    let witness_lower = values.iter().map(|v| v.lower_per_copy_bits).fold(f64::INFINITY, f64::min);
    Ok(RegularizationReport {
        measure,
        values,
        fekete_upper,
        witness_lower,
        eps_used: eps.value(),
    })
}

/// One `(n, ε)` row of the smoothing table; all values per copy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AepRow {
    pub n: usize,
    pub eps: f64,
    #[serde(serialize_with = "serialize_bits")]
    pub smoothed_dmax: f64,
    #[serde(serialize_with = "serialize_bits")]
    pub smoothed_dproj: f64,
    /// Unsmoothed single-copy projective divergence.
    #[serde(serialize_with = "serialize_bits")]
    pub unsmoothed_dproj: f64,
    /// `D_𝓕(ρ^{⊗n})/n` (upper end of its bracket).
    #[serde(serialize_with = "serialize_bits")]
    pub rel_entropy: f64,
}

impl AepRow {
    /// `smoothed D_max ≤ smoothed D_Ω ≤ unsmoothed D_Ω`, within `slack`.
    pub fn sandwich_holds(&self, slack: f64) -> bool {
        self.smoothed_dmax <= self.smoothed_dproj + slack && self.smoothed_dproj <= self.unsmoothed_dproj + slack
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AepTable {
    pub rows: Vec<AepRow>,
}

impl AepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,eps,smoothed_dmax,smoothed_dproj,unsmoothed_dproj,rel_entropy\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.n,
                fmt_num(r.eps),
                fmt_num(r.smoothed_dmax),
                fmt_num(r.smoothed_dproj),
                fmt_num(r.unsmoothed_dproj),
                fmt_num(r.rel_entropy)
            );
        }
        out
    }

    pub fn row(&self, n: usize, eps: f64) -> Option<&AepRow> {
        self.rows.iter().find(|r| r.n == n && r.eps == eps)
    }
}

/// Smoothed `D_max` and `D_Ω` per copy on the `(n, ε)` grid.
pub fn aep_sandwich(
    rho: &DensityMatrix,
    family: &FreeConeFamily,
    n_max: usize,
    eps_list: &[SmoothingRadius],
) -> Result<AepTable> {
    check_capacity(family, n_max)?;
    let unsmoothed = dproj_set(rho, family.base())?.bits;
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let (rho_n, cone) = copies(rho, family, n)?;
        let k = n as f64;
        let rel = rel_entropy_set(&rho_n, &cone)?.bits / k;
        for &eps in eps_list {
            rows.push(AepRow {
                n,
                eps: eps.value(),
                smoothed_dmax: smoothed(SetMeasure::DmaxSet, &rho_n, &cone, eps)?.bits / k,
                smoothed_dproj: smoothed(SetMeasure::DprojSet, &rho_n, &cone, eps)?.bits / k,
                unsmoothed_dproj: unsmoothed,
                rel_entropy: rel,
            });
        }
    }
    Ok(AepTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{coherence_rel_entropy, isotropic, IsotropicParams};
    use crate::qlinalg::HermitianOperator;

    #[test]
    fn isotropic_two_copies() {
        let rho = isotropic(IsotropicParams::new(2, 0.75).unwrap()).unwrap();
        let fam = FreeConeFamily::new(FreeCone::ppt(2, 2).unwrap());
        let rep = regularize(Measure::DprojSet, &rho, &fam, 2, SmoothingRadius::zero()).unwrap();
        let l3 = 3f64.log2();
        for v in &rep.values {
            assert!((v.per_copy_bits - l3).abs() < 1e-5, "{v:?}");
        }
        assert!(rep.fekete_upper >= rep.witness_lower - 1e-5);
        assert!(rep.to_csv().starts_with("measure,n,eps,per_copy_bits,provenance\ndproj_set,1,"));
    }

    #[test]
    fn free_state_gives_zeros() {
        let rho = DensityMatrix::new(HermitianOperator::diagonal(&[0.6, 0.4])).unwrap();
        let fam = FreeConeFamily::new(FreeCone::diagonal(2).unwrap());
        for m in [Measure::DmaxSet, Measure::DprojSet, Measure::RobustnessStandard, Measure::RelEntropySet] {
            let rep = regularize(m, &rho, &fam, 2, SmoothingRadius::zero()).unwrap();
            assert!(rep.values.iter().all(|v| v.per_copy_bits.abs() < 1e-6), "{m:?} {rep:?}");
        }
    }

    #[test]
    fn coherence_sequence_is_flat() {
        let rho =
            DensityMatrix::new(HermitianOperator::from_real(&[vec![0.7, 0.3], vec![0.3, 0.3]], vec![]).unwrap()).unwrap();
        let fam = FreeConeFamily::new(FreeCone::diagonal(2).unwrap());
        let rep = regularize(Measure::RelEntropySet, &rho, &fam, 2, SmoothingRadius::zero()).unwrap();
        let single = coherence_rel_entropy(&rho).unwrap().bits;
        assert!((rep.values[1].per_copy_bits - single).abs() < 1e-9);
    }

    #[test]
    fn capacity_is_reported() {
        let rho = isotropic(IsotropicParams::new(2, 0.75).unwrap()).unwrap();
        let fam = FreeConeFamily::new(FreeCone::ppt(2, 2).unwrap());
        let err = regularize(Measure::DprojSet, &rho, &fam, 5, SmoothingRadius::zero()).unwrap_err();
        assert!(matches!(err, Error::CapacityExceeded { largest_feasible_n: Some(4), .. }));
    }

    #[test]
    fn sandwich_on_commuting_singleton() {
        let rho = DensityMatrix::new(HermitianOperator::diagonal(&[0.9, 0.1])).unwrap();
        let fam = FreeConeFamily::new(FreeCone::singleton(DensityMatrix::maximally_mixed(2)).unwrap());
        let eps: Vec<_> = [0.0, 0.05].iter().map(|&e| SmoothingRadius::new(e).unwrap()).collect();
        let table = aep_sandwich(&rho, &fam, 2, &eps).unwrap();
        for r in &table.rows {
            assert!(r.sandwich_holds(1e-6), "{r:?}");
        }
        assert!((table.row(1, 0.0).unwrap().smoothed_dproj - 9f64.log2()).abs() < 1e-9);
    }
}
