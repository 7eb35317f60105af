//! Mutually unbiased measurements (MUMs) and general symmetric
//! informationally complete measurements (GSICs).
//!
//! Efficiency parameters (`kappa` for MUMs, `eta` for GSICs) are always
//! measured from the elements, never taken on trust.

pub mod tables;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{hermitian_eigen, norm_sqr, HermitianOperator};

/// Tolerance used when a measurement set is accepted at construction.
pub const CONSTRUCTION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasurementKind {
    Mum,
    Gsic,
}

impl fmt::Display for MeasurementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Mum => "mum",
            Self::Gsic => "gsic",
        })
    }
}

impl FromStr for MeasurementKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mum" | "mub" => Ok(Self::Mum),
            "gsic" | "sic" => Ok(Self::Gsic),
            other => Err(Error::InvalidParameter(format!(
                "unknown measurement kind '{other}' (expected mum or gsic)"
            ))),
        }
    }
}

/// A complete set of `d + 1` MUMs with `d` elements each.
#[derive(Debug, Clone)]
pub struct MumSet {
    d: usize,
    groups: Vec<Vec<HermitianOperator>>,
    kappa: f64,
}

impl MumSet {
    /// Accepts a user-supplied family after checking shape and every MUM relation.
    pub fn from_groups(groups: Vec<Vec<HermitianOperator>>) -> Result<Self> {
        let set = Self::from_groups_unverified(groups)?;
        let report = verify_mum(&set, CONSTRUCTION_TOLERANCE);
        if !report.passed {
            return Err(Error::InvalidMeasurement(report.summary()));
        }
        Ok(set)
    }

    /// Shape checks only; relations are left to [`verify_mum`].
    pub fn from_groups_unverified(groups: Vec<Vec<HermitianOperator>>) -> Result<Self> {
        let d = groups
            .first()
            .and_then(|g| g.first())
            .map(HermitianOperator::dim)
            .ok_or_else(|| Error::InvalidMeasurement("empty MUM family".into()))?;
        if d < 2 {
            return Err(Error::InvalidMeasurement("MUMs need d >= 2".into()));
        }
        if groups.len() != d + 1 {
            return Err(Error::InvalidMeasurement(format!(
                "a complete MUM family in d={d} has {} measurements, got {}",
                d + 1,
                groups.len()
            )));
        }
        for (u, g) in groups.iter().enumerate() {
            if g.len() != d {
                return Err(Error::InvalidMeasurement(format!(
                    "measurement {} has {} elements, expected {d}",
                    u + 1,
                    g.len()
                )));
            }
            if let Some(bad) = g.iter().find(|m| m.dim() != d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: bad.dim(),
                });
            }
        }
        let count = (d * (d + 1)) as f64;
        let kappa = groups.iter().flatten().map(|m| m.trace_of_square()).sum::<f64>() / count;
        Ok(Self { d, groups, kappa })
    }

    /// Rejects the set if `claimed` disagrees with the measured `kappa`.
    pub fn with_claimed_kappa(self, claimed: f64) -> Result<Self> {
        if (claimed - self.kappa).abs() > CONSTRUCTION_TOLERANCE {
            return Err(Error::InvalidMeasurement(format!(
                "claimed kappa {claimed} but the set measures {}",
                self.kappa
            )));
        }
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn groups(&self) -> &[Vec<HermitianOperator>] {
        &self.groups
    }

    /// All elements, measurement-major.
    pub fn elements(&self) -> impl Iterator<Item = &HermitianOperator> {
        self.groups.iter().flatten()
    }

    /// Separability bound `N kappa d - N`.
    pub fn bound(&self, parties: usize) -> f64 {
        let n = parties as f64;
        n * self.kappa * self.d as f64 - n
    }
}

/// The rank-1 MUB projectors for `d` in {2, 3, 4, 5, 8, 9} (`kappa = 1`).
pub fn mub_set(d: usize) -> Result<MumSet> {
    let groups = tables::mub_vectors(d, true).ok_or(Error::UnsupportedDimension {
        kind: "MUB",
        d,
        supported: tables::SUPPORTED_MUB_DIMS,
    })?;
    MumSet::from_groups_unverified(projector_groups(&groups))
}

/// The reference tables verbatim, without the errata applied.
pub fn mub_set_uncorrected(d: usize) -> Result<MumSet> {
    let groups = tables::mub_vectors(d, false).ok_or(Error::UnsupportedDimension {
        kind: "MUB",
        d,
        supported: tables::SUPPORTED_MUB_DIMS,
    })?;
    MumSet::from_groups_unverified(projector_groups(&groups))
}

fn projector_groups(groups: &[Vec<Vec<Complex64>>]) -> Vec<Vec<HermitianOperator>> {
    groups
        .iter()
        .map(|g| g.iter().map(|v| HermitianOperator::projector(v)).collect())
        .collect()
}

/// A GSIC: `d^2` elements with uniform purity `eta`.
#[derive(Debug, Clone)]
pub struct GsicSet {
    d: usize,
    elements: Vec<HermitianOperator>,
    eta: f64,
}

impl GsicSet {
    pub fn from_elements(elements: Vec<HermitianOperator>) -> Result<Self> {
        let set = Self::from_elements_unverified(elements)?;
        let report = verify_gsic(&set, CONSTRUCTION_TOLERANCE);
        if !report.passed {
            return Err(Error::InvalidMeasurement(report.summary()));
        }
        Ok(set)
    }

    pub fn from_elements_unverified(elements: Vec<HermitianOperator>) -> Result<Self> {
        let d = elements
            .first()
            .map(HermitianOperator::dim)
            .ok_or_else(|| Error::InvalidMeasurement("empty GSIC".into()))?;
        if d < 2 {
            return Err(Error::InvalidMeasurement("GSICs need d >= 2".into()));
        }
        if elements.len() != d * d {
            return Err(Error::InvalidMeasurement(format!(
                "a GSIC in d={d} has {} elements, got {}",
                d * d,
                elements.len()
            )));
        }
        if let Some(bad) = elements.iter().find(|g| g.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: bad.dim(),
            });
        }
        let eta = elements.iter().map(|g| g.trace_of_square()).sum::<f64>() / (d * d) as f64;
        Ok(Self { d, elements, eta })
    }

    pub fn with_claimed_eta(self, claimed: f64) -> Result<Self> {
        if (claimed - self.eta).abs() > CONSTRUCTION_TOLERANCE {
            return Err(Error::InvalidMeasurement(format!(
                "claimed eta {claimed} but the set measures {}",
                self.eta
            )));
        }
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    /// Separability bound `N d eta - N (eta d^2 + 1) / (d (d + 1))`.
    pub fn bound(&self, parties: usize) -> f64 {
        let (n, d) = (parties as f64, self.d as f64);
        n * d * self.eta - n * (self.eta * d * d + 1.0) / (d * (d + 1.0))
    }
}

/// The explicit GSICs for `d` in {2, 3} (`eta = 1/d^2`).
pub fn gsic_set(d: usize) -> Result<GsicSet> {
    let elements = match d {
        2 => tables::gsic_d2_matrices()
            .into_iter()
            .map(|m| HermitianOperator::from_rows(&[m[0].to_vec(), m[1].to_vec()]))
            .collect::<Result<Vec<_>>>()?,
        3 => tables::gsic_d3_vectors()
            .iter()
            .map(|v| HermitianOperator::projector(v).scale(1.0 / 3.0))
            .collect(),
        _ => {
            return Err(Error::UnsupportedDimension {
                kind: "GSIC",
                d,
                supported: tables::SUPPORTED_GSIC_DIMS,
            })
        }
    };
    GsicSet::from_elements_unverified(elements)
}

/// Either family, as consumed by the criteria.
#[derive(Debug, Clone)]
pub enum MeasurementSet {
    Mum(MumSet),
    Gsic(GsicSet),
}

impl MeasurementSet {
    /// The embedded set of the given kind and dimension.
    pub fn load(kind: MeasurementKind, d: usize) -> Result<Self> {
        match kind {
            MeasurementKind::Mum => mub_set(d).map(Self::Mum),
            MeasurementKind::Gsic => gsic_set(d).map(Self::Gsic),
        }
    }

    pub fn kind(&self) -> MeasurementKind {
        match self {
            Self::Mum(_) => MeasurementKind::Mum,
            Self::Gsic(_) => MeasurementKind::Gsic,
        }
    }

    pub fn d(&self) -> usize {
        match self {
            Self::Mum(m) => m.d(),
            Self::Gsic(g) => g.d(),
        }
    }

    /// Measured `kappa` or `eta`.
    pub fn parameter(&self) -> f64 {
        match self {
            Self::Mum(m) => m.kappa(),
            Self::Gsic(g) => g.eta(),
        }
    }

    pub fn elements(&self) -> Vec<&HermitianOperator> {
        match self {
            Self::Mum(m) => m.elements().collect(),
            Self::Gsic(g) => g.elements().iter().collect(),
        }
    }

    pub fn bound(&self, parties: usize) -> f64 {
        match self {
            Self::Mum(m) => m.bound(parties),
            Self::Gsic(g) => g.bound(parties),
        }
    }

    /// Value of `sum <psi|E|psi>^2` shared by every pure `psi`.
    pub fn pure_state_constant(&self) -> f64 {
        match self {
            Self::Mum(m) => 1.0 + m.kappa(),
            Self::Gsic(g) => {
                let d = g.d() as f64;
                (g.eta() * d * d + 1.0) / (d * (d + 1.0))
            }
        }
    }

    pub fn verify(&self, tol: f64) -> VerificationReport {
        match self {
            Self::Mum(m) => verify_mum(m, tol),
            Self::Gsic(g) => verify_gsic(g, tol),
        }
    }

    /// `{ "kind", "d", "elements" }` with each element flattened row-major as `[re, im]` pairs.
    pub fn to_json(&self) -> serde_json::Value {
        let elements: Vec<Vec<[f64; 2]>> = self
            .elements()
            .into_iter()
            .map(|e| {
                let m = e.matrix();
                (0..m.nrows())
                    .flat_map(|i| (0..m.ncols()).map(move |j| [m[(i, j)].re, m[(i, j)].im]))
                    .collect()
            })
            .collect();
        serde_json::json!({
            "kind": self.kind(),
            "d": self.d(),
            "elements": elements,
        })
    }
}

/// Largest residual of one defining relation and where it occurred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationResidual {
    pub relation: String,
    pub residual: f64,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub kind: MeasurementKind,
    pub d: usize,
    pub tolerance: f64,
    pub max_residual: f64,
    pub measured_parameter: f64,
    pub passed: bool,
    pub relations: Vec<RelationResidual>,
}

impl VerificationReport {
    fn from_relations(
        kind: MeasurementKind,
        d: usize,
        tolerance: f64,
        measured_parameter: f64,
        relations: Vec<RelationResidual>,
    ) -> Self {
        let max_residual = relations.iter().map(|r| r.residual).fold(0.0, f64::max);
        Self {
            kind,
            d,
            tolerance,
            max_residual,
            measured_parameter,
            passed: max_residual <= tolerance,
            relations,
        }
    }

    /// The relations whose residual exceeds the tolerance.
    pub fn failures(&self) -> impl Iterator<Item = &RelationResidual> {
        self.relations.iter().filter(move |r| r.residual > self.tolerance)
    }

    pub fn summary(&self) -> String {
        let failed: Vec<String> = self
            .failures()
            .map(|r| format!("{} off by {:.3e} at {}", r.relation, r.residual, r.location))
            .collect();
        if failed.is_empty() {
            format!("{} d={} passed (max residual {:.3e})", self.kind, self.d, self.max_residual)
        } else {
            format!("{} d={} failed: {}", self.kind, self.d, failed.join("; "))
        }
    }
}

/// Running maximum that remembers the location of the worst entry.
struct Worst {
    relation: &'static str,
    residual: f64,
    location: String,
}

impl Worst {
    fn new(relation: &'static str) -> Self {
        Self {
            relation,
            residual: 0.0,
            location: "-".into(),
        }
    }

    fn update(&mut self, residual: f64, location: impl FnOnce() -> String) {
        // NaN residuals must register as failures
        if residual > self.residual || residual.is_nan() {
            self.residual = if residual.is_nan() { f64::INFINITY } else { residual };
            self.location = location();
        }
    }

    fn finish(self) -> RelationResidual {
        RelationResidual {
            relation: self.relation.into(),
            residual: self.residual,
            location: self.location,
        }
    }
}

fn identity_deviation(op: &HermitianOperator, scale: f64) -> f64 {
    op.max_abs_diff(&HermitianOperator::identity(op.dim()).scale(scale))
}

fn positivity_deficit(op: &HermitianOperator) -> f64 {
    match hermitian_eigen(op) {
        Ok(e) => (-e.values[0]).max(0.0),
        Err(_) => f64::INFINITY,
    }
}

/// Checks unit traces, completeness of each measurement, positivity, the
/// pairwise trace relation with fitted `kappa`, and `sum (M^(uv))^2 = kappa (d+1) 1`.
pub fn verify_mum(set: &MumSet, tol: f64) -> VerificationReport {
    let d = set.d;
    let kappa = set.kappa;
    let off_diag_same = (1.0 - kappa) / (d as f64 - 1.0);
    let unbiased = 1.0 / d as f64;

    let mut unit_trace = Worst::new("unit trace");
    let mut positivity = Worst::new("positivity");
    let mut completeness = Worst::new("completeness");
    let mut pairwise = Worst::new("pairwise trace");
    let mut squares = Worst::new("sum of squares");

    for (u, group) in set.groups.iter().enumerate() {
        let mut sum = HermitianOperator::identity(d).scale(0.0);
        for (v, m) in group.iter().enumerate() {
            unit_trace.update((m.trace() - 1.0).abs(), || format!("u={},v={}", u + 1, v + 1));
            positivity.update(positivity_deficit(m), || format!("u={},v={}", u + 1, v + 1));
            sum = sum.add(m).expect("shape checked at construction");
        }
        completeness.update(identity_deviation(&sum, 1.0), || format!("u={}", u + 1));
    }

    let flat: Vec<(usize, usize, &HermitianOperator)> = set
        .groups
        .iter()
        .enumerate()
        .flat_map(|(u, g)| g.iter().enumerate().map(move |(v, m)| (u, v, m)))
        .collect();
    for &(u, v, a) in &flat {
        for &(u2, v2, b) in &flat {
            let expected = match (u == u2, v == v2) {
                (true, true) => kappa,
                (true, false) => off_diag_same,
                _ => unbiased,
            };
            pairwise.update((a.trace_product(b) - expected).abs(), || {
                format!("(u={},v={}),(u'={},v'={})", u + 1, v + 1, u2 + 1, v2 + 1)
            });
        }
    }

    let mut sum_sq = HermitianOperator::identity(d).scale(0.0);
    for (_, _, m) in &flat {
        sum_sq = sum_sq.add(&m.square()).expect("shape checked at construction");
    }
    squares.update(identity_deviation(&sum_sq, kappa * (d as f64 + 1.0)), || "all".into());

    VerificationReport::from_relations(
        MeasurementKind::Mum,
        d,
        tol,
        kappa,
        vec![
            unit_trace.finish(),
            positivity.finish(),
            completeness.finish(),
            pairwise.finish(),
            squares.finish(),
        ],
    )
}

/// Checks completeness, positivity, `Tr G^2 = eta`, cross traces
/// `(1 - d eta) / (d (d^2 - 1))`, and `sum (G^(u))^2 = d eta 1`.
pub fn verify_gsic(set: &GsicSet, tol: f64) -> VerificationReport {
    let d = set.d as f64;
    let eta = set.eta;
    let cross = (1.0 - d * eta) / (d * (d * d - 1.0));

    let mut completeness = Worst::new("completeness");
    let mut positivity = Worst::new("positivity");
    let mut purity = Worst::new("purity");
    let mut pairwise = Worst::new("cross trace");
    let mut squares = Worst::new("sum of squares");

    let zero = HermitianOperator::identity(set.d).scale(0.0);
    let mut sum = zero.clone();
    let mut sum_sq = zero;
    for (u, g) in set.elements.iter().enumerate() {
        positivity.update(positivity_deficit(g), || format!("u={}", u + 1));
        sum = sum.add(g).expect("shape checked at construction");
        sum_sq = sum_sq.add(&g.square()).expect("shape checked at construction");
        for (u2, h) in set.elements.iter().enumerate() {
            let tr = g.trace_product(h);
            if u == u2 {
                purity.update((tr - eta).abs(), || format!("u={}", u + 1));
            } else {
                pairwise.update((tr - cross).abs(), || format!("u={},u'={}", u + 1, u2 + 1));
            }
        }
    }
    completeness.update(identity_deviation(&sum, 1.0), || "all".into());
    squares.update(identity_deviation(&sum_sq, d * eta), || "all".into());

    VerificationReport::from_relations(
        MeasurementKind::Gsic,
        set.d,
        tol,
        eta,
        vec![
            completeness.finish(),
            positivity.finish(),
            purity.finish(),
            pairwise.finish(),
            squares.finish(),
        ],
    )
}

/// `(sum_E <psi|E|psi>^2, expected constant)` for a unit vector `psi`.
pub fn pure_state_moment_identity(set: &MeasurementSet, psi: &[Complex64]) -> Result<(f64, f64)> {
    if psi.len() != set.d() {
        return Err(Error::DimensionMismatch {
            expected: set.d(),
            actual: psi.len(),
        });
    }
    let norm = norm_sqr(psi);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("vector has squared norm {norm}, expected 1")));
    }
    let mut sum = 0.0;
    for e in set.elements() {
        let mean = e.expectation(psi)?;
        sum += mean * mean;
    }
    Ok((sum, set.pure_state_constant()))
}
