//! Critical noise levels `p*` of white-noise families and `p` sweeps.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::criteria::{round_significant, verdict_margin, CriterionReport, DenseEvaluator, NoisyEvaluator};
use crate::error::{Error, Result};
use crate::measurements::{MeasurementKind, MeasurementSet};
use crate::measures::{MomentProvider, Provenance, SkewOrder};
use crate::operator::DenseLimit;
use crate::states::{antisym_state, dicke_state, two_qutrit_psi, w_state, AntisymMoments, PureState};

/// Points in the sign-change pre-scan over `[0, 1]`.
pub const PRESCAN_POINTS: usize = 64;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Largest antisymmetric register evaluated from a state vector.
pub const MAX_DENSE_ANTISYM: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Qubit Dicke state with `ceil(N/2)` excitations.
    Dicke,
    W,
    /// Antisymmetric state of `N` parties of dimension `N`.
    Antisym,
    /// The fixed antisymmetric two-qutrit state.
    TwoQutrit,
    Custom(PureState),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Dicke => "dicke",
            Self::W => "w",
            Self::Antisym => "antisym",
            Self::TwoQutrit => "two_qutrit",
            Self::Custom(_) => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "dicke" => Ok(Self::Dicke),
            "w" => Ok(Self::W),
            "antisym" | "antisymmetric" => Ok(Self::Antisym),
            "two_qutrit" => Ok(Self::TwoQutrit),
            other => Err(Error::InvalidParameter(format!(
                "unknown family '{other}' (expected dicke, w, antisym or two_qutrit)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Detector {
    Skew,
    Variance,
}

impl Detector {
    /// Signed distance to the bound; positive when this detector fires.
    pub fn gap(self, report: &CriterionReport) -> f64 {
        match self {
            Self::Skew => report.skew_gap(),
            Self::Variance => report.variance_gap(),
        }
    }

    /// Whether the verdict (including its strict margin) credits this detector.
    pub fn fires(self, report: &CriterionReport) -> bool {
        self.gap(report) > verdict_margin(report.bound)
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Skew => "skew",
            Self::Variance => "variance",
        })
    }
}

impl FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "skew" => Ok(Self::Skew),
            "variance" => Ok(Self::Variance),
            other => Err(Error::InvalidParameter(format!(
                "unknown detector '{other}' (expected skew or variance)"
            ))),
        }
    }
}

/// One family `p |psi><psi| + (1 - p) / D * 1` together with the criterion to apply.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    family: Family,
    parties: usize,
    measurement: MeasurementKind,
    order: SkewOrder,
    detector: Detector,
    analytic: bool,
}

impl FamilySpec {
    pub fn new(
        family: Family,
        parties: usize,
        measurement: MeasurementKind,
        order: SkewOrder,
        detector: Detector,
    ) -> Result<Self> {
        if !order.is_criteria_range() {
            return Err(Error::InvalidParameter(format!(
                "the separability criteria hold only for -1 <= s <= 0, got s = {order}"
            )));
        }
        let min = match &family {
            Family::Dicke | Family::Antisym => 2,
            Family::W => 3,
            Family::TwoQutrit => 2,
            Family::Custom(psi) => psi.parties(),
        };
        if parties < min {
            return Err(Error::InvalidParameter(format!("{family} needs N >= {min}, got {parties}")));
        }
        match &family {
            Family::TwoQutrit if parties != 2 => {
                return Err(Error::InvalidParameter(format!("two_qutrit has N = 2, got {parties}")));
            }
            Family::Custom(psi) if psi.parties() != parties => {
                return Err(Error::InvalidParameter(format!(
                    "custom state has {} parties, got N = {parties}",
                    psi.parties()
                )));
            }
            _ => {}
        }
        Ok(Self {
            family,
            parties,
            measurement,
            order,
            detector,
            analytic: false,
        })
    }

    /// Use closed-form moments instead of a state vector (antisym only).
    pub fn with_analytic(mut self, analytic: bool) -> Result<Self> {
        if analytic && self.family != Family::Antisym {
            return Err(Error::InvalidParameter(format!(
                "analytic moments are available for antisym only, not {}",
                self.family
            )));
        }
        self.analytic = analytic;
        Ok(self)
    }

    pub fn with_detector(mut self, detector: Detector) -> Self {
        self.detector = detector;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    /// Local dimension implied by the family.
    pub fn d(&self) -> usize {
        match &self.family {
            Family::Dicke | Family::W => 2,
            Family::Antisym => self.parties,
            Family::TwoQutrit => 3,
            Family::Custom(psi) => psi.party_dim(),
        }
    }

    pub fn measurement(&self) -> MeasurementKind {
        self.measurement
    }

    pub fn order(&self) -> SkewOrder {
        self.order
    }

    pub fn detector(&self) -> Detector {
        self.detector
    }

    pub fn analytic(&self) -> bool {
        self.analytic
    }

    /// The explicit state vector, for families that have one at this size.
    pub fn pure_state(&self, limit: &DenseLimit) -> Result<PureState> {
        match &self.family {
            Family::Dicke => dicke_state(self.parties, limit),
            Family::W => w_state(self.parties, limit),
            Family::Antisym => antisym_state(self.parties, limit),
            Family::TwoQutrit => Ok(two_qutrit_psi()),
            Family::Custom(psi) => Ok(psi.clone()),
        }
    }

    fn moment_source(&self, limit: &DenseLimit) -> Result<Box<dyn MomentProvider>> {
        if self.family == Family::Antisym {
            if self.analytic {
                return Ok(Box::new(AntisymMoments::new(self.parties)?));
            }
            if self.parties > MAX_DENSE_ANTISYM {
                return Err(Error::InvalidParameter(format!(
                    "antisym with N = {} needs analytic moments (N <= {MAX_DENSE_ANTISYM} runs from the state vector)",
                    self.parties
                )));
            }
        }
        Ok(Box::new(self.pure_state(limit)?))
    }

    pub fn measurement_set(&self) -> Result<MeasurementSet> {
        MeasurementSet::load(self.measurement, self.d())
    }
}

/// Anything that can report the criterion at noise level `p`.
pub trait NoiseFamily {
    fn report(&self, p: f64) -> Result<CriterionReport>;

    fn provenance(&self) -> Provenance;
}

/// Fast path: pure-state moments once, closed-form noise dependence.
#[derive(Debug, Clone)]
pub struct FamilyEvaluator {
    order: SkewOrder,
    inner: NoisyEvaluator,
}

impl FamilyEvaluator {
    pub fn new(spec: &FamilySpec, limit: &DenseLimit) -> Result<Self> {
        let set = spec.measurement_set()?;
        let source = spec.moment_source(limit)?;
        Ok(Self {
            order: spec.order,
            inner: NoisyEvaluator::new(source.as_ref(), &set)?,
        })
    }
}

impl NoiseFamily for FamilyEvaluator {
    fn report(&self, p: f64) -> Result<CriterionReport> {
        self.inner.report(p, self.order)
    }

    fn provenance(&self) -> Provenance {
        self.inner.provenance()
    }
}

/// Reference path: materializes `rho(p)` and every collective observable.
#[derive(Debug, Clone)]
pub struct DenseFamilyEvaluator {
    order: SkewOrder,
    psi: PureState,
    evaluator: DenseEvaluator,
    limit: DenseLimit,
}

impl DenseFamilyEvaluator {
    pub fn new(spec: &FamilySpec, limit: &DenseLimit) -> Result<Self> {
        let psi = spec.pure_state(limit)?;
        let evaluator = DenseEvaluator::new(&spec.measurement_set()?, spec.parties, limit)?;
        Ok(Self {
            order: spec.order,
            psi,
            evaluator,
            limit: *limit,
        })
    }
}

impl NoiseFamily for DenseFamilyEvaluator {
    fn report(&self, p: f64) -> Result<CriterionReport> {
        let rho = self.psi.noisy_density(p, &self.limit)?;
        self.evaluator.report(&rho, self.order)
    }

    fn provenance(&self) -> Provenance {
        Provenance::Dense
    }
}

/// `lhs_skew - bound` (skew detector) or `bound - lhs_variance` (variance detector) at `p`.
pub fn violation_gap(spec: &FamilySpec, p: f64) -> Result<f64> {
    let report = FamilyEvaluator::new(spec, &DenseLimit::from_env())?.report(p)?;
    Ok(spec.detector.gap(&report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    /// Midpoint of the final bracket, or `None` when the detector never changes state on `[0, 1]`.
    pub p_star: Option<f64>,
    pub bracket: Option<(f64, f64)>,
    pub iterations: usize,
    pub detector: Detector,
    pub provenance: Provenance,
}

impl ThresholdResult {
    pub fn to_json(&self, spec: &FamilySpec) -> Value {
        json!({
            "family": spec.family.name(),
            "N": spec.parties,
            "d": spec.d(),
            "measurement": spec.measurement,
            "s": round_significant(spec.order.value()),
            "detector": self.detector,
            "p_star": self.p_star.map(round_significant),
            "p_star_rounded": self.p_star.map(|p| format!("{p:.4}")),
            "bracket": self.bracket.map(|(a, b)| [round_significant(a), round_significant(b)]),
            "iterations": self.iterations,
            "provenance": self.provenance,
        })
    }
}

/// Locates the single `p` at which `detector` starts (or stops) firing.
///
/// A 64-point scan of `[0, 1]` brackets the change; more than one change is an
/// error. The bracket is then bisected until it is narrower than `tol`.
pub fn find_threshold_with(family: &dyn NoiseFamily, detector: Detector, tol: f64) -> Result<ThresholdResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let fires = |p: f64| -> Result<bool> { Ok(detector.fires(&family.report(p)?)) };
    let grid: Vec<f64> = (0..PRESCAN_POINTS)
        .map(|i| i as f64 / (PRESCAN_POINTS - 1) as f64)
        .collect();
    let states = grid.iter().map(|&p| fires(p)).collect::<Result<Vec<_>>>()?;
    let changes: Vec<usize> = (1..grid.len()).filter(|&i| states[i] != states[i - 1]).collect();
    let provenance = family.provenance();
    match changes.as_slice() {
        [] => Ok(ThresholdResult {
            p_star: None,
            bracket: None,
            iterations: 0,
            detector,
            provenance,
        }),
        &[i] => {
            let (mut lo, mut hi) = (grid[i - 1], grid[i]);
            let lo_state = states[i - 1];
            let mut iterations = 0;
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if fires(mid)? == lo_state {
                    lo = mid;
                } else {
                    hi = mid;
                }
                iterations += 1;
            }
            Ok(ThresholdResult {
                p_star: Some(0.5 * (lo + hi)),
                bracket: Some((lo, hi)),
                iterations,
                detector,
                provenance,
            })
        }
        many => Err(Error::MultipleCrossings {
            crossings: many.len(),
            locations: many.iter().map(|&i| 0.5 * (grid[i - 1] + grid[i])).collect(),
        }),
    }
}

pub fn find_threshold(spec: &FamilySpec, tol: f64) -> Result<ThresholdResult> {
    find_threshold_with(&FamilyEvaluator::new(spec, &DenseLimit::from_env())?, spec.detector, tol)
}

/// `steps` evenly spaced points from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::InvalidParameter("grid needs at least one point".into()));
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    let span = stop - start;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                stop
            } else {
                start + span * i as f64 / (steps - 1) as f64
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p: f64,
    pub report: CriterionReport,
}

/// One report per grid point, ordered by `p`.
pub fn sweep(family: &dyn NoiseFamily, grid: &[f64]) -> Result<Vec<SweepRow>> {
    if let Some(bad) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidParameter(format!("grid point {bad} outside [0, 1]")));
    }
    let mut points = grid.to_vec();
    points.sort_by(f64::total_cmp);
    points
        .into_iter()
        .map(|p| Ok(SweepRow { p, report: family.report(p)? }))
        .collect()
}

pub const CSV_HEADER: &str = "p,lhs_skew,lhs_variance,bound,verdict";

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        let r = &row.report;
        writeln!(
            out,
            "{},{},{},{},{}",
            round_significant(row.p),
            round_significant(r.lhs_skew),
            round_significant(r.lhs_variance),
            round_significant(r.bound),
            r.verdict
        )?;
    }
    out.flush()
}
