//! The mean `f_s`, the generalized Wigner-Yanase skew information `I^s`,
//! the variance, and closed forms for white-noise mixtures of pure states.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{
    hermitian_eigen, CollectiveObservable, ComplexMatrix, EigenDecomposition, HermitianOperator,
};

/// Eigenvalue pairs closer than this contribute nothing to `I^s`.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// Negative eigenvalues above `-CLIP_TOLERANCE` are treated as rounding noise.
pub const CLIP_TOLERANCE: f64 = 1e-10;

const NEGATIVE_SLACK: f64 = 1e-12;

/// The order `s <= 0` of the mean `f_s`. `s = -inf` is allowed.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SkewOrder(f64);

impl SkewOrder {
    /// The quantum Fisher information case `s = -1`.
    pub const FISHER: Self = Self(-1.0);
    /// The Wigner-Yanase case `s = 0`.
    pub const WIGNER_YANASE: Self = Self(0.0);

    pub fn new(s: f64) -> Result<Self> {
        if s.is_nan() || s > 0.0 {
            return Err(Error::InvalidParameter(format!("skew order s must satisfy s <= 0, got {s}")));
        }
        Ok(Self(if s == 0.0 { 0.0 } else { s }))
    }

    /// Orders accepted by the separability criteria: `-1 <= s <= 0`.
    pub fn for_criteria(s: f64) -> Result<Self> {
        if !(-1.0..=0.0).contains(&s) {
            return Err(Error::InvalidParameter(format!(
                "the separability criteria hold only for -1 <= s <= 0, got s = {s}"
            )));
        }
        Self::new(s)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_criteria_range(self) -> bool {
        (-1.0..=0.0).contains(&self.0)
    }
}

impl TryFrom<f64> for SkewOrder {
    type Error = Error;

    fn try_from(s: f64) -> Result<Self> {
        Self::new(s)
    }
}

impl From<SkewOrder> for f64 {
    fn from(s: SkewOrder) -> f64 {
        s.0
    }
}

impl fmt::Display for SkewOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `f_s(a, b) = ((a^s + b^s) / 2)^(1/s)`, with `f_0 = sqrt(ab)`,
/// `f_-inf = min(a, b)`, and `0` whenever `a` or `b` is zero.
pub fn f_s(a: f64, b: f64, order: SkewOrder) -> f64 {
    let s = order.value();
    if a <= 0.0 || b <= 0.0 {
        return 0.0;
    }
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if s == f64::NEG_INFINITY {
        return lo;
    }
    if s == 0.0 {
        return (a * b).sqrt();
    }
    // lo * ((1 + r^s) / 2)^(1/s) with r = hi/lo, written to stay accurate as s -> 0
    let log_ratio = (hi / lo).ln();
    let x = s * log_ratio;
    // the true mean never exceeds hi; capping the exponent keeps tiny lo from overflowing
    lo * ((x.exp_m1() / 2.0).ln_1p() / s).min(log_ratio).exp()
}

/// A unit-trace, positive semidefinite operator with its spectrum cached.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    operator: HermitianOperator,
    eigen: EigenDecomposition,
}

impl DensityMatrix {
    pub fn new(operator: HermitianOperator) -> Result<Self> {
        let trace = operator.trace();
        if (trace - 1.0).abs() > CLIP_TOLERANCE {
            return Err(Error::InvalidState(format!("trace is {trace}, expected 1")));
        }
        let mut eigen = hermitian_eigen(&operator)?;
        let min = eigen.values.first().copied().unwrap_or(0.0);
        if min < -CLIP_TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        // eigenvalues this close to zero are solver noise; f_0 = sqrt(ab) would amplify them
        let max = eigen.values.last().copied().unwrap_or(0.0).abs();
        let floor = 8.0 * eigen.values.len() as f64 * f64::EPSILON * max.max(1.0);
        let mut changed = false;
        for v in eigen.values.iter_mut() {
            if *v <= floor && *v != 0.0 {
                *v = 0.0;
                changed = true;
            }
        }
        if changed {
            let total: f64 = eigen.values.iter().sum();
            for v in eigen.values.iter_mut() {
                *v /= total;
            }
        }
        if min < -floor {
            let operator = HermitianOperator::new(eigen.reconstruct())?;
            return Ok(Self { operator, eigen });
        }
        Ok(Self { operator, eigen })
    }

    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(matrix)?)
    }

    /// `|psi><psi|` for a unit vector.
    pub fn pure(psi: &[num_complex::Complex64]) -> Result<Self> {
        let norm = crate::operator::norm_sqr(psi);
        if (norm - 1.0).abs() > CLIP_TOLERANCE {
            return Err(Error::InvalidState(format!("vector has squared norm {norm}, expected 1")));
        }
        Self::new(HermitianOperator::projector(psi))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new(HermitianOperator::identity(dim).scale(1.0 / dim as f64))
            .expect("identity / D is a valid state")
    }

    /// Convex combination `sum_k w_k rho_k`; weights must be nonnegative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let dim = first.1.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (w, rho) in parts {
            if *w < 0.0 {
                return Err(Error::InvalidState(format!("negative mixture weight {w}")));
            }
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: rho.dim(),
                });
            }
            acc += rho.matrix().scale(*w);
        }
        Self::from_matrix(acc)
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.operator
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.operator.matrix()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eigen
    }
}

fn check_dims(rho: &DensityMatrix, x: &HermitianOperator) -> Result<()> {
    if rho.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: x.dim(),
        });
    }
    Ok(())
}

fn clamp_nonnegative(value: f64, scale: f64, what: &str) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -NEGATIVE_SLACK * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::Invariant(format!("{what} evaluated to {value:e}")))
    }
}

/// `I^s(rho, X) = sum_{l != l'} [lambda_l - f_s(lambda_l, lambda_l')] |<psi_l|X|psi_l'>|^2`.
pub fn skew_information_dense(rho: &DensityMatrix, x: &HermitianOperator, order: SkewOrder) -> Result<f64> {
    check_dims(rho, x)?;
    let u = &rho.eigen().vectors;
    let y = u.adjoint() * x.matrix() * u;
    let lambda = rho.eigenvalues();
    let n = lambda.len();
    let mut total = 0.0;
    for l in 0..n {
        let mut row = 0.0;
        for k in 0..n {
            if k == l || (lambda[l] - lambda[k]).abs() <= DEGENERACY_TOLERANCE {
                continue;
            }
            row += (lambda[l] - f_s(lambda[l], lambda[k], order)) * y[(l, k)].norm_sqr();
        }
        total += row;
    }
    clamp_nonnegative(total, x.trace_of_square(), "skew information")
}

/// `V(rho, X) = Tr(rho X^2) - (Tr rho X)^2`.
pub fn variance(rho: &DensityMatrix, x: &HermitianOperator) -> Result<f64> {
    check_dims(rho, x)?;
    let first = rho.operator().trace_product(x);
    let second = rho.operator().trace_product(&x.square());
    clamp_nonnegative(second - first * first, second.abs(), "variance")
}

/// Where the pure-state moments of a state came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Computed from an explicit state vector or density matrix.
    Dense,
    /// Computed from closed-form moment rules; no state vector exists.
    Analytic,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dense => "dense",
            Self::Analytic => "analytic",
        })
    }
}

/// A pure state of `parties` systems of dimension `party_dim` that can report
/// `m1 = <psi|X|psi>` and `m2 = <psi|X^2|psi>` for collective `X = sum_i M_i`.
pub trait MomentProvider {
    fn party_dim(&self) -> usize;

    fn parties(&self) -> usize;

    fn moments(&self, local: &HermitianOperator) -> Result<(f64, f64)>;

    fn provenance(&self) -> Provenance;

    /// Total dimension `d^N` as a float, valid past `usize` overflow.
    fn total_dim(&self) -> f64 {
        (self.party_dim() as f64).powi(self.parties() as i32)
    }
}

/// Spectrum of `p |psi><psi| + (1 - p) / D * 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisySpectrum {
    pub p: f64,
    pub dim: f64,
}

impl NoisySpectrum {
    pub fn new(p: f64, dim: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("mixing parameter p must lie in [0, 1], got {p}")));
        }
        Ok(Self { p, dim })
    }

    /// Eigenvalue on `|psi>`.
    pub fn high(&self) -> f64 {
        self.p + self.low()
    }

    /// Eigenvalue on the complement of `|psi>` (multiplicity `D - 1`).
    pub fn low(&self) -> f64 {
        (1.0 - self.p) / self.dim
    }

    /// `lambda_1 + lambda_0 - 2 f_s(lambda_1, lambda_0)`, so that `I^s = c * V(|psi>, X)`.
    pub fn skew_coefficient(&self, order: SkewOrder) -> f64 {
        let (hi, lo) = (self.high(), self.low());
        if hi - lo <= DEGENERACY_TOLERANCE {
            return 0.0;
        }
        hi + lo - 2.0 * f_s(hi, lo, order)
    }
}

/// Pure-state and maximally-mixed moments of one collective observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisyMoments {
    pub pure_first: f64,
    pub pure_second: f64,
    pub mixed_first: f64,
    pub mixed_second: f64,
}

impl NoisyMoments {
    pub fn new(source: &dyn MomentProvider, x: &CollectiveObservable) -> Result<Self> {
        if x.party_dim() != source.party_dim() {
            return Err(Error::DimensionMismatch {
                expected: source.party_dim(),
                actual: x.party_dim(),
            });
        }
        if x.parties() != source.parties() {
            return Err(Error::InvalidParameter(format!(
                "observable acts on {} parties but the state has {}",
                x.parties(),
                source.parties()
            )));
        }
        let (pure_first, pure_second) = source.moments(x.local())?;
        Ok(Self {
            pure_first,
            pure_second,
            mixed_first: x.normalized_trace_first(),
            mixed_second: x.normalized_trace_second(),
        })
    }

    /// `V(|psi>, X)`.
    pub fn pure_variance(&self) -> Result<f64> {
        let v = self.pure_second - self.pure_first * self.pure_first;
        clamp_nonnegative(v, self.pure_second.abs(), "pure-state variance")
    }

    pub fn skew(&self, spectrum: &NoisySpectrum, order: SkewOrder) -> Result<f64> {
        Ok(spectrum.skew_coefficient(order) * self.pure_variance()?)
    }

    pub fn variance(&self, spectrum: &NoisySpectrum) -> Result<f64> {
        let q = 1.0 - spectrum.p;
        let first = spectrum.p * self.pure_first + q * self.mixed_first;
        let second = spectrum.p * self.pure_second + q * self.mixed_second;
        clamp_nonnegative(second - first * first, second.abs(), "variance")
    }
}

/// `p |psi><psi| + (1 - p) / D * 1` with `|psi>` supplied through its moments.
#[derive(Clone, Copy)]
pub struct NoisyPureState<'a> {
    source: &'a dyn MomentProvider,
    spectrum: NoisySpectrum,
}

impl<'a> NoisyPureState<'a> {
    pub fn new(source: &'a dyn MomentProvider, p: f64) -> Result<Self> {
        let spectrum = NoisySpectrum::new(p, source.total_dim())?;
        Ok(Self { source, spectrum })
    }

    pub fn source(&self) -> &'a dyn MomentProvider {
        self.source
    }

    pub fn p(&self) -> f64 {
        self.spectrum.p
    }

    pub fn spectrum(&self) -> NoisySpectrum {
        self.spectrum
    }
}

impl fmt::Debug for NoisyPureState<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NoisyPureState")
            .field("party_dim", &self.source.party_dim())
            .field("parties", &self.source.parties())
            .field("p", &self.spectrum.p)
            .finish()
    }
}

pub fn skew_information_noisy(
    state: &NoisyPureState<'_>,
    x: &CollectiveObservable,
    order: SkewOrder,
) -> Result<f64> {
    NoisyMoments::new(state.source, x)?.skew(&state.spectrum, order)
}

pub fn variance_noisy(state: &NoisyPureState<'_>, x: &CollectiveObservable) -> Result<f64> {
    NoisyMoments::new(state.source, x)?.variance(&state.spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::DenseLimit;
    use crate::states::PureState;
    use crate::testutil;
    use num_complex::Complex64;

    fn s(v: f64) -> SkewOrder {
        SkewOrder::new(v).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn z() -> HermitianOperator {
        HermitianOperator::diagonal(&[1.0, -1.0])
    }

    #[test]
    fn skew_order_validation() {
        assert!(SkewOrder::new(0.5).is_err());
        assert!(SkewOrder::new(f64::NAN).is_err());
        assert!(SkewOrder::new(f64::NEG_INFINITY).is_ok());
        assert!(SkewOrder::for_criteria(-1.5).is_err());
        assert!(SkewOrder::for_criteria(-1.0).is_ok());
        assert_eq!(SkewOrder::new(-0.0).unwrap().value().to_bits(), 0f64.to_bits());
    }

    #[test]
    fn f_s_special_values() {
        assert_eq!(f_s(0.0, 5.0, s(-0.3)), 0.0);
        assert_eq!(f_s(5.0, 0.0, s(0.0)), 0.0);
        assert!((f_s(4.0, 9.0, s(0.0)) - 6.0).abs() < 1e-15);
        assert!((f_s(2.0, 6.0, s(-1.0)) - 3.0).abs() < 1e-14);
        assert_eq!(f_s(2.0, 6.0, s(f64::NEG_INFINITY)), 2.0);
        assert!((f_s(0.7, 0.7, s(-0.4)) - 0.7).abs() < 1e-16);
    }

    #[test]
    fn f_s_matches_definition_and_limits() {
        for &(a, b) in &[(0.3f64, 0.9f64), (1e-6, 0.5), (2.0, 2.5)] {
            for &sv in &[-1.0, -0.5, -0.1, -3.0] {
                let direct = ((a.powf(sv) + b.powf(sv)) / 2.0).powf(1.0 / sv);
                assert!((f_s(a, b, s(sv)) - direct).abs() < 1e-13 * direct.max(1.0));
            }
            assert!((f_s(a, b, s(-1e-12)) - (a * b).sqrt()).abs() < 1e-12);
            assert!((f_s(a, b, s(-1e6)) - a.min(b)).abs() < 1e-5);
        }
    }

    #[test]
    fn f_s_monotone_in_s() {
        let grid = [-5.0, -1.0, -0.75, -0.5, -0.25, -0.01, 0.0];
        for &(a, b) in &[(0.1, 0.8), (3.0, 0.2)] {
            let values: Vec<f64> = grid.iter().map(|&v| f_s(a, b, s(v))).collect();
            assert!(values.windows(2).all(|w| w[0] <= w[1] + 1e-15), "{values:?}");
        }
    }

    #[test]
    fn variance_examples() {
        let ket0 = DensityMatrix::pure(&[c(1.0), c(0.0)]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityMatrix::pure(&[c(r), c(r)]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!(variance(&ket0, &z()).unwrap().abs() < 1e-15);
        assert!((variance(&plus, &z()).unwrap() - 1.0).abs() < 1e-14);
        assert!((variance(&mixed, &z()).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn maximally_mixed_has_no_skew() {
        let mut rng = testutil::rng(1);
        let x = testutil::hermitian(&mut rng, 5);
        let rho = DensityMatrix::maximally_mixed(5);
        for v in [-1.0, -0.5, 0.0] {
            assert_eq!(skew_information_dense(&rho, &x, s(v)).unwrap(), 0.0);
        }
    }

    #[test]
    fn pure_states_have_skew_equal_to_variance() {
        let mut rng = testutil::rng(2);
        for _ in 0..20 {
            let psi = testutil::unit_vector(&mut rng, 6);
            let x = testutil::hermitian(&mut rng, 6);
            let rho = DensityMatrix::pure(&psi).unwrap();
            let v = variance(&rho, &x).unwrap();
            for sv in [-1.0, -0.5, 0.0] {
                assert!((skew_information_dense(&rho, &x, s(sv)).unwrap() - v).abs() < 1e-9);
            }
        }
    }

    /// `I^s = Tr(rho X^2) - sum_{l,l'} f_s(lambda_l, lambda_l') |X_ll'|^2`.
    fn second_formula(rho: &DensityMatrix, x: &HermitianOperator, order: SkewOrder) -> f64 {
        let u = &rho.eigen().vectors;
        let y = u.adjoint() * x.matrix() * u;
        let lambda = rho.eigenvalues();
        let mut sum = 0.0;
        for (l, &a) in lambda.iter().enumerate() {
            for (k, &b) in lambda.iter().enumerate() {
                sum += f_s(a, b, order) * y[(l, k)].norm_sqr();
            }
        }
        rho.operator().trace_product(&x.square()) - sum
    }

    #[test]
    fn pairwise_form_matches_second_formula() {
        let mut rng = testutil::rng(3);
        for _ in 0..50 {
            let rho = testutil::density(&mut rng, 4, 4);
            let x = testutil::hermitian(&mut rng, 4);
            for sv in [-1.0, -0.3, 0.0] {
                let a = skew_information_dense(&rho, &x, s(sv)).unwrap();
                let b = second_formula(&rho, &x, s(sv));
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn harmonic_mean_closed_form_at_fisher_order() {
        let mut rng = testutil::rng(4);
        let rho = testutil::density(&mut rng, 4, 3);
        let x = testutil::hermitian(&mut rng, 4);
        let u = &rho.eigen().vectors;
        let y = u.adjoint() * x.matrix() * u;
        let lambda = rho.eigenvalues();
        let mut sum = 0.0;
        for (l, &a) in lambda.iter().enumerate() {
            for (k, &b) in lambda.iter().enumerate() {
                if a + b > 0.0 {
                    sum += 2.0 * a * b / (a + b) * y[(l, k)].norm_sqr();
                }
            }
        }
        let expected = rho.operator().trace_product(&x.square()) - sum;
        let got = skew_information_dense(&rho, &x, SkewOrder::FISHER).unwrap();
        assert!((got - expected).abs() < 1e-9);
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = HermitianOperator::diagonal(&[0.5, 0.6]);
        assert!(matches!(DensityMatrix::new(bad_trace), Err(Error::InvalidState(_))));
        let negative = HermitianOperator::diagonal(&[1.1, -0.1]);
        assert!(DensityMatrix::new(negative).is_err());
        let tiny = HermitianOperator::diagonal(&[1.0 + 5e-11, -5e-11]);
        let rho = DensityMatrix::new(tiny).unwrap();
        assert_eq!(rho.eigenvalues()[0], 0.0);
        assert!((rho.eigenvalues().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn noisy_endpoints() {
        let mut rng = testutil::rng(5);
        let psi = PureState::new(testutil::unit_vector(&mut rng, 8), 8, 1).unwrap();
        let m = testutil::hermitian(&mut rng, 8);
        let x = CollectiveObservable::new(m.clone(), 1).unwrap();
        let pure_var = variance(&DensityMatrix::pure(psi.amplitudes()).unwrap(), &m).unwrap();

        let one = NoisyPureState::new(&psi, 1.0).unwrap();
        assert!((skew_information_noisy(&one, &x, s(-0.5)).unwrap() - pure_var).abs() < 1e-9);
        assert!((variance_noisy(&one, &x).unwrap() - pure_var).abs() < 1e-9);

        let zero = NoisyPureState::new(&psi, 0.0).unwrap();
        assert_eq!(skew_information_noisy(&zero, &x, s(-0.5)).unwrap(), 0.0);
        let t1 = m.trace() / 8.0;
        let t2 = m.trace_of_square() / 8.0;
        assert!((variance_noisy(&zero, &x).unwrap() - (t2 - t1 * t1)).abs() < 1e-12);

        assert!(NoisyPureState::new(&psi, 1.2).is_err());
    }

    #[test]
    fn noisy_closed_form_matches_dense() {
        let mut rng = testutil::rng(6);
        let limit = DenseLimit::default();
        for _ in 0..20 {
            let psi = PureState::new(testutil::unit_vector(&mut rng, 8), 8, 1).unwrap();
            let m = testutil::hermitian(&mut rng, 8);
            let x = CollectiveObservable::new(m.clone(), 1).unwrap();
            let state = NoisyPureState::new(&psi, 0.37).unwrap();
            let rho = psi.noisy_density(0.37, &limit).unwrap();
            let order = s(-0.5);
            let fast = skew_information_noisy(&state, &x, order).unwrap();
            let dense = skew_information_dense(&rho, &m, order).unwrap();
            assert!((fast - dense).abs() < 1e-9, "{fast} vs {dense}");
            let fast_v = variance_noisy(&state, &x).unwrap();
            assert!((fast_v - variance(&rho, &m).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn noisy_state_rejects_mismatched_observable() {
        let psi = PureState::new(vec![c(1.0), c(0.0), c(0.0), c(0.0)], 2, 2).unwrap();
        let state = NoisyPureState::new(&psi, 0.5).unwrap();
        let wrong_parties = CollectiveObservable::new(z(), 3).unwrap();
        assert!(skew_information_noisy(&state, &wrong_parties, s(-1.0)).is_err());
        let wrong_dim = CollectiveObservable::new(HermitianOperator::identity(4), 1).unwrap();
        assert!(variance_noisy(&state, &wrong_dim).is_err());
    }
}
