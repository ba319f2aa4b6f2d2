//! Asymptotic transformation-rate bounds assembled from divergence brackets.
//!
//! Each bound takes the free-cone family of the source system and of the
//! target system separately; for most theories the two coincide, but
//! singleton theories pair different reference states.

use serde::{Deserialize, Serialize};

use crate::divergences::{dproj, rel_entropy, rel_entropy_set, DivergenceValue, Provenance, SmoothingRadius};
use crate::error::{Error, Result};
use crate::freesets::{ConeKind, FreeConeFamily};
use crate::models::{isotropic_dproj_bits, isotropic_dsep_inf_bits, IsotropicParams};
use crate::multicopy::{fmt_num, regularize, Measure, RegularizationReport};
use crate::qlinalg::DensityMatrix;

/// Denominators below this (in bits) are treated as zero; solver-derived
/// values are only resolved to about this level.
pub const DENOMINATOR_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateKind {
    Converse,
    StrongConverse,
    Achievable,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: DivergenceValue,
}

/// A rate bound in bits per copy with the inputs that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub value: DivergenceValue,
    pub kind: RateKind,
    /// Set when the bound is also the strong-converse rate.
    pub strong_converse: bool,
    pub formula: String,
    pub inputs: Vec<NamedValue>,
    pub caveats: Vec<String>,
    /// Deterministic-rate comparator, when one is defined.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparator: Option<DivergenceValue>,
}

/// How the transformation error `ε_n` decays with the copy number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorSequence {
    /// `ε_n = ε`.
    Constant { eps: f64 },
    /// `ε_n = 2^{−cn}`.
    Exponential { c: f64 },
    /// `ε_n = 2^{−n²}`.
    Superexponential,
}

impl ErrorSequence {
    pub fn constant(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidArgument(format!("constant error must lie in (0,1), got {eps}")));
        }
        Ok(Self::Constant { eps })
    }

    pub fn exponential(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!("exponential rate must be positive, got {c}")));
        }
        Ok(Self::Exponential { c })
    }

    /// `limsup (1/n) log₂ ε_n^{-1}`.
    pub fn decay_exponent(self) -> f64 {
        match self {
            Self::Constant { .. } => 0.0,
            Self::Exponential { c } => c,
            Self::Superexponential => f64::INFINITY,
        }
    }
}

/// Bracket `[lo, hi]` of a regularized quantity, as an input record.
fn bracket_input(name: &str, rep: &RegularizationReport) -> NamedValue {
    let n_max = rep.values.len();
    let (lo, hi) = (rep.witness_lower, rep.fekete_upper);
    let value = if hi.is_finite() {
        DivergenceValue::finite(hi, Provenance::WitnessBracket { lo: lo.min(hi), hi })
    } else {
        let reason = rep
            .values
            .iter()
            .find_map(|v| v.value.reason.clone())
            .unwrap_or_else(|| "divergent".into());
        DivergenceValue::infinite(Provenance::WitnessBracket { lo, hi }, reason)
    };
    NamedValue {
        name: format!("{name} (n ≤ {n_max})"),
        value,
    }
}

fn cone_caveats(families: &[&FreeConeFamily], n_max: usize, caveats: &mut Vec<String>) {
    if families.iter().any(|f| matches!(f.base().kind(), ConeKind::Ppt { .. })) {
        push_unique(caveats, "PPT relaxation of SEP");
    }
    if n_max > 0 {
        push_unique(caveats, &format!("finite-n bracket (n ≤ {n_max})"));
    }
}

fn push_unique(caveats: &mut Vec<String>, c: &str) {
    if !caveats.iter().any(|x| x == c) {
        caveats.push(c.to_string());
    }
}

fn ratio_value(num: f64, num_lo: f64, den_lo: f64, den_hi: f64, reason: Option<String>) -> DivergenceValue {
    if num.is_infinite() {
        return DivergenceValue::infinite(
            Provenance::WitnessBracket { lo: f64::INFINITY, hi: f64::INFINITY },
            reason.unwrap_or_else(|| "numerator diverges".into()),
        );
    }
    let hi = num / den_lo;
    let lo = if den_hi.is_finite() { (num_lo / den_hi).min(hi) } else { 0.0 };
    DivergenceValue::finite(hi, Provenance::WitnessBracket { lo, hi })
}

/// Lower end of a regularized denominator, or `DenominatorUnresolved`.
fn resolved_denominator(rep: &RegularizationReport) -> Result<(f64, f64)> {
    let (lo, hi) = (rep.witness_lower, rep.fekete_upper);
    if !(lo > DENOMINATOR_FLOOR) {
        return Err(Error::DenominatorUnresolved { lo, hi });
    }
    Ok((lo, hi))
}

/// Probabilistic converse `r_prob ≤ 𝔻^∞_Ω(ρ) / D^∞_𝓕(ω)`.
pub fn converse_prob(
    rho: &DensityMatrix,
    omega: &DensityMatrix,
    source: &FreeConeFamily,
    target: &FreeConeFamily,
    n_max: usize,
) -> Result<RateReport> {
    let den = regularize(Measure::RelEntropySet, omega, target, n_max, SmoothingRadius::zero())?;
    let (den_lo, den_hi) = resolved_denominator(&den)?;
    let num = regularize(Measure::DprojSet, rho, source, n_max, SmoothingRadius::zero())?;
    let num_in = bracket_input("numerator: regularized projective divergence of ρ", &num);
    let value = ratio_value(num.fekete_upper, num.witness_lower, den_lo, den_hi, num_in.value.reason.clone());
    let mut caveats = Vec::new();
    cone_caveats(&[source, target], n_max, &mut caveats);
    Ok(RateReport {
        value,
        kind: RateKind::Converse,
        strong_converse: false,
        formula: "converse_prob: D_Omega^inf(rho) / D_F^inf(omega)".into(),
        inputs: vec![
            num_in,
            bracket_input("denominator: regularized relative entropy of resource of ω", &den),
        ],
        caveats,
        comparator: None,
    })
}

/// Deterministic converse `r ≤ D^∞_𝓕(ρ) / D^∞_𝓕(ω)`.
pub fn converse_det(
    rho: &DensityMatrix,
    omega: &DensityMatrix,
    source: &FreeConeFamily,
    target: &FreeConeFamily,
    n_max: usize,
) -> Result<RateReport> {
    let den = regularize(Measure::RelEntropySet, omega, target, n_max, SmoothingRadius::zero())?;
    let (den_lo, den_hi) = resolved_denominator(&den)?;
    let num = regularize(Measure::RelEntropySet, rho, source, n_max, SmoothingRadius::zero())?;
    let num_in = bracket_input("numerator: regularized relative entropy of resource of ρ", &num);
    let value = ratio_value(num.fekete_upper, num.witness_lower, den_lo, den_hi, num_in.value.reason.clone());
    let mut caveats = Vec::new();
    cone_caveats(&[source, target], n_max, &mut caveats);
    Ok(RateReport {
        value,
        kind: RateKind::Converse,
        strong_converse: false,
        formula: "converse_det: D_F^inf(rho) / D_F^inf(omega)".into(),
        inputs: vec![
            num_in,
            bracket_input("denominator: regularized relative entropy of resource of ω", &den),
        ],
        caveats,
        comparator: None,
    })
}

/// Exact probabilistic rate for affine theories, `𝔻^∞_Ω(ρ) / D^∞_𝓕(ω)`.
///
/// For diagonal and singleton target cones the denominator is additive and
/// is evaluated at one copy.
pub fn exact_affine(
    rho: &DensityMatrix,
    omega: &DensityMatrix,
    source: &FreeConeFamily,
    target: &FreeConeFamily,
    n_max: usize,
) -> Result<RateReport> {
    for fam in [source, target] {
        if !fam.base().is_affine() {
            return Err(Error::WrongRegime("exact probabilistic rates need an affine free set".into()));
        }
    }
    let mut caveats = Vec::new();
    let additive = matches!(
        target.base().kind(),
        ConeKind::Diagonal { .. } | ConeKind::Singleton { .. }
    );
    let (den_in, den_lo, den_hi) = if additive {
        let v = rel_entropy_set(omega, target.base())?;
        if !(v.bits > DENOMINATOR_FLOOR) {
            return Err(Error::DenominatorUnresolved { lo: v.lower(), hi: v.bits });
        }
        let (lo, hi) = (v.lower(), v.bits);
        (
            NamedValue {
                name: "denominator: relative entropy of resource of ω (additive)".into(),
                value: v,
            },
            lo,
            hi,
        )
    } else {
        let den = regularize(Measure::RelEntropySet, omega, target, n_max, SmoothingRadius::zero())?;
        let (lo, hi) = resolved_denominator(&den)?;
        (
            bracket_input("denominator: regularized relative entropy of resource of ω", &den),
            lo,
            hi,
        )
    };
    let singleton = matches!(source.base().kind(), ConeKind::Singleton { .. })
        && matches!(target.base().kind(), ConeKind::Singleton { .. });
    let num = regularize(Measure::DprojSet, rho, source, if singleton { 1 } else { n_max }, SmoothingRadius::zero())?;
    let num_in = if singleton {
        NamedValue {
            name: "numerator: projective divergence of ρ (additive)".into(),
            value: num.values[0].value.clone(),
        }
    } else {
        push_unique(&mut caveats, &format!("finite-n bracket (n ≤ {n_max})"));
        bracket_input("numerator: regularized projective divergence of ρ", &num)
    };
    if num.fekete_upper.is_finite() && num.fekete_upper - num.witness_lower > 1e-5 {
        push_unique(&mut caveats, "numerator bracket wider than 1e-5");
    }
    let value = ratio_value(num.fekete_upper, num.witness_lower, den_lo, den_hi, num_in.value.reason.clone());
    Ok(RateReport {
        value,
        kind: RateKind::Exact,
        strong_converse: singleton,
        formula: "exact_affine: D_Omega^inf(rho) / D_F^inf(omega)".into(),
        inputs: vec![num_in, den_in],
        caveats,
        comparator: None,
    })
}

/// Achievable probabilistic rate for full-dimensional theories,
/// `𝔻^∞_Ω(ρ) / (smoothed regularized log(1+R_s))(ω)`.
///
/// The denominator uses the unsmoothed Fekete upper bound
/// `min_n log(1+R_s(ω^{⊗n}))/n`, which dominates the smoothed limit, so the
/// quotient stays a lower bound. Smoothed per-copy values for `eps_list` at
/// `n_max` copies are attached for inspection.
pub fn achievable_standard(
    rho: &DensityMatrix,
    omega: &DensityMatrix,
    source: &FreeConeFamily,
    target: &FreeConeFamily,
    n_max: usize,
    eps_list: &[SmoothingRadius],
) -> Result<RateReport> {
    for fam in [source, target] {
        if !fam.base().is_full_dimensional() {
            return Err(Error::WrongRegime(
                "achievability via standard robustness needs a full-dimensional free set".into(),
            ));
        }
    }
    let den = regularize(Measure::RobustnessStandard, omega, target, n_max, SmoothingRadius::zero())?;
    let den_hi = den.fekete_upper;
    if !(den_hi > DENOMINATOR_FLOOR) || !den_hi.is_finite() {
        return Err(Error::DenominatorUnresolved {
            lo: den.witness_lower,
            hi: den_hi,
        });
    }
    let num = regularize(Measure::DprojSet, rho, source, n_max, SmoothingRadius::zero())?;
    let num_in = bracket_input("numerator: regularized projective divergence of ρ", &num);
    let value = if num.witness_lower.is_infinite() {
        DivergenceValue::infinite(
            Provenance::WitnessBracket { lo: f64::INFINITY, hi: f64::INFINITY },
            num_in.value.reason.clone().unwrap_or_default(),
        )
    } else {
        let v = num.witness_lower.max(0.0) / den_hi;
        DivergenceValue::finite(v, Provenance::WitnessBracket { lo: v, hi: num.fekete_upper / den_hi })
    };
    let mut inputs = vec![
        num_in,
        bracket_input("denominator: log(1+R_s) per copy, unsmoothed", &den),
    ];
    for &eps in eps_list.iter().filter(|e| e.value() > 0.0) {
        let rep = regularize(Measure::RobustnessStandard, omega, target, n_max, eps)?;
        inputs.push(NamedValue {
            name: format!("smoothed log(1+R_s) per copy at n = {n_max}, eps = {}", fmt_num(eps.value())),
            value: rep.values[n_max - 1].value.clone(),
        });
    }
    let mut caveats = Vec::new();
    cone_caveats(&[source, target], n_max, &mut caveats);
    push_unique(
        &mut caveats,
        "denominator is the unsmoothed finite-n upper bracket of the smoothed regularized robustness",
    );
    Ok(RateReport {
        value,
        kind: RateKind::Achievable,
        strong_converse: false,
        formula: "achievable_standard: D_Omega^inf(rho) / log(1+R_s)^{smooth,inf}(omega)".into(),
        inputs,
        caveats,
        comparator: None,
    })
}

/// Rate–error trade-off for distilling the pure state `ψ`:
/// `r ≤ (𝔻^∞_Ω(ρ) − limsup (1/n) log ε_n^{-1}) / D^∞_min,𝓕(ψ)`, clamped at 0.
pub fn distillation_tradeoff(
    rho: &DensityMatrix,
    psi: &DensityMatrix,
    source: &FreeConeFamily,
    target: &FreeConeFamily,
    errors: ErrorSequence,
    n_max: usize,
) -> Result<RateReport> {
    if !psi.is_pure(1e-9)? {
        return Err(Error::InvalidArgument("distillation target must be a pure state".into()));
    }
    let den = regularize(Measure::DminSet, psi, target, n_max, SmoothingRadius::zero())?;
    let (den_lo, den_hi) = resolved_denominator(&den)?;
    let num = regularize(Measure::DprojSet, rho, source, n_max, SmoothingRadius::zero())?;
    let num_in = bracket_input("numerator: regularized projective divergence of ρ", &num);
    let decay = errors.decay_exponent();
    let mut caveats = Vec::new();
    cone_caveats(&[source, target], n_max, &mut caveats);
    let (value, kind) = if decay.is_infinite() {
        push_unique(
            &mut caveats,
            "errors decaying faster than exponentially admit no positive rate; bound clamped at 0",
        );
        (DivergenceValue::finite(0.0, Provenance::ClosedForm), RateKind::Converse)
    } else if num.fekete_upper.is_infinite() {
        (
            DivergenceValue::infinite(
                Provenance::WitnessBracket { lo: f64::INFINITY, hi: f64::INFINITY },
                num_in.value.reason.clone().unwrap_or_default(),
            ),
            RateKind::Converse,
        )
    } else {
        let hi = (num.fekete_upper - decay) / den_lo;
        let lo = (num.witness_lower - decay) / den_hi;
        if hi < 0.0 {
            push_unique(&mut caveats, "error decay exceeds the numerator; bound clamped at 0");
        }
        let kind = match errors {
            ErrorSequence::Constant { .. } => RateKind::StrongConverse,
            _ => RateKind::Converse,
        };
        (
            DivergenceValue::finite(hi.max(0.0), Provenance::WitnessBracket { lo: lo.max(0.0).min(hi.max(0.0)), hi: hi.max(0.0) }),
            kind,
        )
    };
    Ok(RateReport {
        value,
        kind,
        strong_converse: kind == RateKind::StrongConverse,
        formula: "distillation_tradeoff: (D_Omega^inf(rho) - limsup (1/n) log 1/eps_n) / D_min^inf(psi)".into(),
        inputs: vec![
            num_in,
            bracket_input("denominator: regularized min-relative entropy of resource of ψ", &den),
            NamedValue {
                name: "error decay exponent limsup (1/n) log 1/eps_n".into(),
                value: if decay.is_finite() {
                    DivergenceValue::finite(decay, Provenance::ClosedForm)
                } else {
                    DivergenceValue::infinite(Provenance::ClosedForm, "superexponential decay")
                },
            },
        ],
        caveats,
        comparator: None,
    })
}

/// Exact rate between dichotomies `(ρ₁, ρ₂) → (ω₁, ω₂)`:
/// `𝔻_Ω(ρ₁‖ρ₂) / D(ω₁‖ω₂)`, with the deterministic comparator
/// `D(ρ₁‖ρ₂) / D(ω₁‖ω₂)`.
pub fn dichotomy_rate(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    omega1: &DensityMatrix,
    omega2: &DensityMatrix,
) -> Result<RateReport> {
    let den = rel_entropy(omega1, omega2)?;
    if !(den.bits > DENOMINATOR_FLOOR) || den.bits.is_infinite() {
        return Err(Error::DenominatorUnresolved { lo: den.bits, hi: den.bits });
    }
    let num = dproj(rho1, rho2)?;
    let det = rel_entropy(rho1, rho2)?;
    let value = if num.is_finite() {
        DivergenceValue::finite(num.bits / den.bits, Provenance::ClosedForm)
    } else {
        DivergenceValue::infinite(Provenance::ClosedForm, num.reason.clone().unwrap_or_default())
    };
    let comparator = if det.is_finite() {
        DivergenceValue::finite(det.bits / den.bits, Provenance::ClosedForm)
    } else {
        DivergenceValue::infinite(Provenance::ClosedForm, det.reason.clone().unwrap_or_default())
    };
    Ok(RateReport {
        value,
        kind: RateKind::Exact,
        strong_converse: true,
        formula: "dichotomy_rate: D_Omega(rho1||rho2) / D(omega1||omega2)".into(),
        inputs: vec![
            NamedValue {
                name: "numerator: projective divergence D_Omega(ρ₁‖ρ₂)".into(),
                value: num,
            },
            NamedValue {
                name: "denominator: relative entropy D(ω₁‖ω₂)".into(),
                value: den,
            },
        ],
        caveats: Vec::new(),
        comparator: Some(comparator),
    })
}

/// Closed-form isotropic distillation rates into a two-qubit maximally
/// entangled target: (probabilistic exact rate, deterministic converse).
pub fn isotropic_rates(d: usize, p: f64) -> Result<(RateReport, RateReport)> {
    let params = IsotropicParams::new(d, p)?;
    let prob_bits = isotropic_dproj_bits(params);
    let det_bits = isotropic_dsep_inf_bits(params);
    let unit = NamedValue {
        name: "denominator: regularized relative entropy of entanglement of Φ₂".into(),
        value: DivergenceValue::finite(1.0, Provenance::ClosedForm),
    };
    let value_of = |bits: f64| {
        if bits.is_finite() {
            DivergenceValue::finite(bits, Provenance::ClosedForm)
        } else {
            DivergenceValue::infinite(Provenance::ClosedForm, "maximally entangled input")
        }
    };
    let prob = RateReport {
        value: value_of(prob_bits),
        kind: RateKind::Exact,
        strong_converse: false,
        formula: "isotropic_prob: log(p(d-1)/(1-p))".into(),
        inputs: vec![
            NamedValue {
                name: "numerator: regularized projective divergence of ρ_p".into(),
                value: value_of(prob_bits),
            },
            unit.clone(),
        ],
        caveats: Vec::new(),
        comparator: None,
    };
    let det = RateReport {
        value: value_of(det_bits),
        kind: RateKind::Converse,
        strong_converse: false,
        formula: "isotropic_det: p log d + (1-p) log(d/(d-1)) - h2(p)".into(),
        inputs: vec![
            NamedValue {
                name: "numerator: regularized relative entropy of entanglement of ρ_p".into(),
                value: value_of(det_bits),
            },
            unit,
        ],
        caveats: Vec::new(),
        comparator: None,
    };
    Ok((prob, det))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freesets::FreeCone;
    use crate::models::{binary_entropy, isotropic, max_entangled};
    use crate::qlinalg::HermitianOperator;

    fn ppt() -> FreeConeFamily {
        FreeConeFamily::new(FreeCone::ppt(2, 2).unwrap())
    }

    fn iso(p: f64) -> DensityMatrix {
        isotropic(IsotropicParams::new(2, p).unwrap()).unwrap()
    }

    fn diag(v: &[f64]) -> DensityMatrix {
        DensityMatrix::new(HermitianOperator::diagonal(v)).unwrap()
    }

    #[test]
    fn probabilistic_converse_for_isotropic() {
        let phi = max_entangled(2).unwrap();
        let r = converse_prob(&iso(0.75), &phi, &ppt(), &ppt(), 1).unwrap();
        assert!((r.value.bits - 3f64.log2()).abs() < 1e-5, "{r:?}");
        assert!(converse_prob(&iso(0.4), &phi, &ppt(), &ppt(), 1).unwrap().value.bits < 1e-6);
        assert!(!converse_prob(&phi, &phi, &ppt(), &ppt(), 1).unwrap().value.is_finite());
    }

    #[test]
    fn deterministic_converse_for_isotropic() {
        let phi = max_entangled(2).unwrap();
        let r = converse_det(&iso(0.75), &phi, &ppt(), &ppt(), 1).unwrap();
        let expect = 1.0 - binary_entropy(0.75);
        assert!((r.value.bits - expect).abs() < 1e-3, "{r:?}");
        let p = converse_prob(&iso(0.75), &phi, &ppt(), &ppt(), 1).unwrap();
        assert!(p.value.bits >= r.value.bits - 1e-6);
    }

    #[test]
    fn tradeoff_values() {
        let phi = max_entangled(2).unwrap();
        let l3 = 3f64.log2();
        let c = distillation_tradeoff(&iso(0.75), &phi, &ppt(), &ppt(), ErrorSequence::constant(0.1).unwrap(), 1).unwrap();
        assert!((c.value.bits - l3).abs() < 1e-6);
        assert_eq!(c.kind, RateKind::StrongConverse);
        let e = distillation_tradeoff(&iso(0.75), &phi, &ppt(), &ppt(), ErrorSequence::exponential(0.5).unwrap(), 1).unwrap();
        assert!((e.value.bits - (l3 - 0.5)).abs() < 1e-6);
        let s = distillation_tradeoff(&iso(0.75), &phi, &ppt(), &ppt(), ErrorSequence::Superexponential, 1).unwrap();
        assert_eq!(s.value.bits, 0.0);
        assert!(!s.caveats.is_empty());
    }

    #[test]
    fn achievable_for_isotropic() {
        let phi = max_entangled(2).unwrap();
        let r = achievable_standard(&iso(0.75), &phi, &ppt(), &ppt(), 1, &[]).unwrap();
        assert!((r.value.bits - 3f64.log2()).abs() < 1e-5, "{r:?}");
        assert!(matches!(
            achievable_standard(&iso(0.75), &iso(0.3), &ppt(), &ppt(), 1, &[]),
            Err(Error::DenominatorUnresolved { .. })
        ));
        let diag_fam = FreeConeFamily::new(FreeCone::diagonal(2).unwrap());
        assert!(matches!(
            achievable_standard(&diag(&[0.5, 0.5]), &diag(&[0.5, 0.5]), &diag_fam, &diag_fam, 1, &[]),
            Err(Error::WrongRegime(_))
        ));
    }

    #[test]
    fn singleton_exact_rate() {
        let half = FreeConeFamily::new(FreeCone::singleton(DensityMatrix::maximally_mixed(2)).unwrap());
        let r = exact_affine(&diag(&[0.9, 0.1]), &diag(&[0.8, 0.2]), &half, &half, 2).unwrap();
        let expect = (1.8f64.log2() + 5f64.log2()) / (1.0 - binary_entropy(0.8));
        assert!((r.value.bits - expect).abs() < 1e-9);
        assert!(r.strong_converse);
        assert!(matches!(
            exact_affine(&iso(0.7), &iso(0.7), &ppt(), &ppt(), 1),
            Err(Error::WrongRegime(_))
        ));
    }

    #[test]
    fn dichotomy_example() {
        let half = DensityMatrix::maximally_mixed(2);
        let r = dichotomy_rate(&diag(&[0.9, 0.1]), &half, &diag(&[0.8, 0.2]), &half).unwrap();
        let expect = (1.8f64.log2() + 5f64.log2()) / (1.0 - binary_entropy(0.8));
        assert!((r.value.bits - expect).abs() < 1e-12);
        assert!(r.value.bits >= r.comparator.unwrap().bits);
        let same = dichotomy_rate(&half, &half, &diag(&[0.8, 0.2]), &half).unwrap();
        assert!(same.value.bits.abs() < 1e-12);
    }

    #[test]
    fn isotropic_closed_form_rates() {
        let (p, d) = isotropic_rates(2, 0.9).unwrap();
        assert!((p.value.bits - 9f64.log2()).abs() < 1e-12);
        assert!((d.value.bits - 0.531_004_406_410_719).abs() < 1e-9);
        let (p, d) = isotropic_rates(2, 0.5).unwrap();
        assert_eq!((p.value.bits, d.value.bits), (0.0, 0.0));
        let (p, _) = isotropic_rates(3, 0.75).unwrap();
        assert!((p.value.bits - 6f64.log2()).abs() < 1e-12);
    }
}
