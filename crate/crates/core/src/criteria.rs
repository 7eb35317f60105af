//! Separability criteria over MUMs and GSICs.
//!
//! For a fully separable state every collective observable `X_E = sum_i E_i`
//! built from a complete measurement set satisfies
//! `sum_E I^s(rho, X_E) <= bound <= sum_E V(rho, X_E)`, so a skew sum above the
//! bound or a variance sum below it certifies entanglement.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::measurements::{GsicSet, MeasurementKind, MeasurementSet, MumSet};
use crate::measures::{
    skew_information_dense, variance, DensityMatrix, MomentProvider, NoisyMoments, NoisyPureState, NoisySpectrum,
    Provenance, SkewOrder,
};
use crate::operator::{register_dim, CollectiveObservable, DenseLimit, HermitianOperator};

/// Slack allowed in `lhs_skew <= lhs_variance` before inputs are rejected.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    EntangledBySkew,
    EntangledByVariance,
    Inconclusive,
}

impl Verdict {
    pub fn is_entangled(self) -> bool {
        self != Self::Inconclusive
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::EntangledBySkew => "EntangledBySkew",
            Self::EntangledByVariance => "EntangledByVariance",
            Self::Inconclusive => "Inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Strict-violation margin `1e-9 * max(1, |bound|)`.
pub fn verdict_margin(bound: f64) -> f64 {
    1e-9 * bound.abs().max(1.0)
}

pub fn classify(lhs_skew: f64, lhs_variance: f64, bound: f64) -> Result<Verdict> {
    if lhs_skew > lhs_variance + CONSISTENCY_TOLERANCE * lhs_variance.abs().max(1.0) {
        return Err(Error::Invariant(format!(
            "skew sum {lhs_skew} exceeds variance sum {lhs_variance}"
        )));
    }
    let margin = verdict_margin(bound);
    Ok(if lhs_skew > bound + margin {
        Verdict::EntangledBySkew
    } else if lhs_variance < bound - margin {
        Verdict::EntangledByVariance
    } else {
        Verdict::Inconclusive
    })
}

/// Rounds to 15 significant digits, the precision used in every emitted report.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// LHS sums, bound and verdict for one state, measurement set and order.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub family: MeasurementKind,
    pub parties: usize,
    pub d: usize,
    pub s: SkewOrder,
    /// Measured `kappa` (MUM) or `eta` (GSIC).
    pub parameter: f64,
    pub lhs_skew: f64,
    pub lhs_variance: f64,
    pub bound: f64,
    pub verdict: Verdict,
}

impl CriterionReport {
    fn assemble(summary: &SetSummary, parties: usize, s: SkewOrder, lhs_skew: f64, lhs_variance: f64) -> Result<Self> {
        let bound = summary.bound;
        Ok(Self {
            family: summary.kind,
            parties,
            d: summary.d,
            s,
            parameter: summary.parameter,
            lhs_skew,
            lhs_variance,
            bound,
            verdict: classify(lhs_skew, lhs_variance, bound)?,
        })
    }

    pub fn parameter_name(&self) -> &'static str {
        match self.family {
            MeasurementKind::Mum => "kappa",
            MeasurementKind::Gsic => "eta",
        }
    }

    /// `lhs_skew - bound`; positive when the skew criterion fires.
    pub fn skew_gap(&self) -> f64 {
        self.lhs_skew - self.bound
    }

    /// `bound - lhs_variance`; positive when the variance criterion fires.
    pub fn variance_gap(&self) -> f64 {
        self.bound - self.lhs_variance
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "family": self.family,
            "N": self.parties,
            "d": self.d,
            "s": round_significant(self.s.value()),
            "lhs_skew": round_significant(self.lhs_skew),
            "lhs_variance": round_significant(self.lhs_variance),
            "bound": round_significant(self.bound),
            "verdict": self.verdict,
        });
        v[self.parameter_name()] = json!(round_significant(self.parameter));
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |field: &str| Error::InvalidParameter(format!("report field '{field}' missing or malformed"));
        let num = |field: &str| v.get(field).and_then(Value::as_f64).ok_or_else(|| bad(field));
        let int = |field: &str| {
            v.get(field)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| bad(field))
        };
        let family: MeasurementKind =
            serde_json::from_value(v.get("family").cloned().ok_or_else(|| bad("family"))?)
                .map_err(|_| bad("family"))?;
        let verdict: Verdict = serde_json::from_value(v.get("verdict").cloned().ok_or_else(|| bad("verdict"))?)
            .map_err(|_| bad("verdict"))?;
        let parameter = match family {
            MeasurementKind::Mum => num("kappa")?,
            MeasurementKind::Gsic => num("eta")?,
        };
        Ok(Self {
            family,
            parties: int("N")?,
            d: int("d")?,
            s: SkewOrder::new(num("s")?)?,
            parameter,
            lhs_skew: num("lhs_skew")?,
            lhs_variance: num("lhs_variance")?,
            bound: num("bound")?,
            verdict,
        })
    }
}

/// The state a criterion is evaluated on.
#[derive(Debug, Clone, Copy)]
pub enum StateDescriptor<'a> {
    Dense(&'a DensityMatrix),
    NoisyPure(NoisyPureState<'a>),
}

#[derive(Debug, Clone, Copy)]
struct SetSummary {
    kind: MeasurementKind,
    d: usize,
    parameter: f64,
    bound: f64,
}

impl SetSummary {
    fn of(set: &MeasurementSet, parties: usize) -> Self {
        Self {
            kind: set.kind(),
            d: set.d(),
            parameter: set.parameter(),
            bound: set.bound(parties),
        }
    }
}

fn criteria_order(order: SkewOrder) -> Result<SkewOrder> {
    if order.is_criteria_range() {
        Ok(order)
    } else {
        Err(Error::InvalidParameter(format!(
            "the separability criteria hold only for -1 <= s <= 0, got s = {order}"
        )))
    }
}

/// Noisy-pure evaluation with per-element moments computed once.
///
/// Only the two-point spectrum depends on `p`, so repeated reports for
/// different `p` cost `O(#elements)`.
#[derive(Debug, Clone)]
pub struct NoisyEvaluator {
    summary: SetSummary,
    parties: usize,
    dim: f64,
    moments: Vec<NoisyMoments>,
    provenance: Provenance,
}

impl NoisyEvaluator {
    pub fn new(source: &dyn MomentProvider, set: &MeasurementSet) -> Result<Self> {
        if source.party_dim() != set.d() {
            return Err(Error::DimensionMismatch {
                expected: set.d(),
                actual: source.party_dim(),
            });
        }
        let parties = source.parties();
        let moments = set
            .elements()
            .into_iter()
            .map(|e| NoisyMoments::new(source, &CollectiveObservable::new(e.clone(), parties)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            summary: SetSummary::of(set, parties),
            parties,
            dim: source.total_dim(),
            moments,
            provenance: source.provenance(),
        })
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn bound(&self) -> f64 {
        self.summary.bound
    }

    pub fn report(&self, p: f64, order: SkewOrder) -> Result<CriterionReport> {
        let order = criteria_order(order)?;
        let spectrum = NoisySpectrum::new(p, self.dim)?;
        let mut lhs_skew = 0.0;
        let mut lhs_variance = 0.0;
        for m in &self.moments {
            lhs_skew += m.skew(&spectrum, order)?;
            lhs_variance += m.variance(&spectrum)?;
        }
        CriterionReport::assemble(&self.summary, self.parties, order, lhs_skew, lhs_variance)
    }
}

/// Dense evaluation with the collective observables materialized once.
#[derive(Debug, Clone)]
pub struct DenseEvaluator {
    summary: SetSummary,
    parties: usize,
    observables: Vec<HermitianOperator>,
}

impl DenseEvaluator {
    pub fn new(set: &MeasurementSet, parties: usize, limit: &DenseLimit) -> Result<Self> {
        let observables = set
            .elements()
            .into_iter()
            .map(|e| CollectiveObservable::new(e.clone(), parties)?.dense(limit))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            summary: SetSummary::of(set, parties),
            parties,
            observables,
        })
    }

    pub fn dim(&self) -> usize {
        self.observables.first().map_or(0, HermitianOperator::dim)
    }

    pub fn report(&self, rho: &DensityMatrix, order: SkewOrder) -> Result<CriterionReport> {
        let order = criteria_order(order)?;
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: rho.dim(),
            });
        }
        let mut lhs_skew = 0.0;
        let mut lhs_variance = 0.0;
        for x in &self.observables {
            lhs_skew += skew_information_dense(rho, x, order)?;
            lhs_variance += variance(rho, x)?;
        }
        CriterionReport::assemble(&self.summary, self.parties, order, lhs_skew, lhs_variance)
    }
}

/// Evaluates both sums for `state` on `parties` copies of `set`.
pub fn evaluate(
    state: &StateDescriptor<'_>,
    set: &MeasurementSet,
    parties: usize,
    order: SkewOrder,
) -> Result<CriterionReport> {
    let order = criteria_order(order)?;
    match state {
        StateDescriptor::Dense(rho) => {
            let expected = register_dim(set.d(), parties).ok_or_else(|| {
                Error::InvalidParameter(format!("{}^{parties} overflows", set.d()))
            })?;
            if rho.dim() != expected {
                return Err(Error::DimensionMismatch {
                    expected,
                    actual: rho.dim(),
                });
            }
            // rho already holds a D x D matrix, so observables of that size are affordable
            let limit = DenseLimit {
                max_dim: expected,
                max_operator_dim: expected,
            };
            DenseEvaluator::new(set, parties, &limit)?.report(rho, order)
        }
        StateDescriptor::NoisyPure(noisy) => {
            if noisy.source().parties() != parties {
                return Err(Error::InvalidParameter(format!(
                    "state has {} parties but {parties} were requested",
                    noisy.source().parties()
                )));
            }
            NoisyEvaluator::new(noisy.source(), set)?.report(noisy.p(), order)
        }
    }
}

/// Theorem for MUMs: bound `N kappa d - N`.
pub fn mum_criterion(
    state: &StateDescriptor<'_>,
    mums: &MumSet,
    parties: usize,
    order: SkewOrder,
) -> Result<CriterionReport> {
    evaluate(state, &MeasurementSet::Mum(mums.clone()), parties, order)
}

/// Theorem for GSICs: bound `N d eta - N (eta d^2 + 1) / (d (d + 1))`.
pub fn gsic_criterion(
    state: &StateDescriptor<'_>,
    gsic: &GsicSet,
    parties: usize,
    order: SkewOrder,
) -> Result<CriterionReport> {
    evaluate(state, &MeasurementSet::Gsic(gsic.clone()), parties, order)
}
