//! Multipartite entanglement criteria built from the generalized
//! Wigner-Yanase skew information `I^s` and the variance, evaluated over
//! mutually unbiased measurements (MUMs) and general symmetric
//! informationally complete measurements (GSICs).
//!
//! ```
//! use entwitness::{find_threshold, Detector, Family, FamilySpec, MeasurementKind, SkewOrder};
//!
//! let spec = FamilySpec::new(Family::Dicke, 3, MeasurementKind::Mum, SkewOrder::FISHER, Detector::Skew).unwrap();
//! let p = find_threshold(&spec, 1e-8).unwrap().p_star.unwrap();
//! assert!((p - 0.5254).abs() < 5e-4);
//! ```

pub mod criteria;
pub mod error;
pub mod measurements;
pub mod measures;
pub mod operator;
pub mod states;
pub mod threshold;

#[cfg(test)]
mod testutil;

pub use criteria::{classify, evaluate, gsic_criterion, mum_criterion, CriterionReport, StateDescriptor, Verdict};
pub use error::{Error, Result};
pub use measurements::{gsic_set, mub_set, GsicSet, MeasurementKind, MeasurementSet, MumSet, VerificationReport};
pub use measures::{DensityMatrix, MomentProvider, NoisyPureState, Provenance, SkewOrder};
pub use operator::{CollectiveObservable, DenseLimit, HermitianOperator};
pub use states::PureState;
pub use threshold::{find_threshold, Detector, Family, FamilySpec, ThresholdResult};
