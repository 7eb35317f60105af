//! Example state families and pure-state moments of collective observables.
//!
//! Registers of `N` parties with local dimension `d` use the operator ordering:
//! basis index `i_1 d^(N-1) + ... + i_N`, so site 1 is the most significant digit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measures::{DensityMatrix, MomentProvider, Provenance};
use crate::operator::{inner, norm_sqr, register_dim, CollectiveObservable, ComplexMatrix, DenseLimit, HermitianOperator};

const NORM_TOLERANCE: f64 = 1e-10;

/// A unit vector on `parties` systems of dimension `party_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
    party_dim: usize,
    parties: usize,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>, party_dim: usize, parties: usize) -> Result<Self> {
        if party_dim == 0 || parties == 0 {
            return Err(Error::InvalidParameter("party dimension and count must be positive".into()));
        }
        let dim = register_dim(party_dim, parties).ok_or_else(|| {
            Error::InvalidParameter(format!("{party_dim}^{parties} overflows"))
        })?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: amplitudes.len(),
            });
        }
        let norm = norm_sqr(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("vector has squared norm {norm}, expected 1")));
        }
        Ok(Self {
            amplitudes,
            party_dim,
            parties,
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn party_dim(&self) -> usize {
        self.party_dim
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, digits: &[usize]) -> Complex64 {
        self.amplitudes[index_of(digits, self.party_dim)]
    }

    /// The state with parties reordered: new site `k` holds old site `perm[k]` (0-based).
    pub fn permute_parties(&self, perm: &[usize]) -> Result<Self> {
        let n = self.parties;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&k| k >= n || std::mem::replace(&mut seen[k], true)) {
            return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation of {n} sites")));
        }
        let d = self.party_dim;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        let mut digits = vec![0; n];
        let mut moved = vec![0; n];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            digits_of(idx, d, &mut digits);
            for (k, &src) in perm.iter().enumerate() {
                moved[k] = digits[src];
            }
            out[index_of(&moved, d)] = *amp;
        }
        Ok(Self {
            amplitudes: out,
            party_dim: d,
            parties: n,
        })
    }

    /// Max-norm distance between two states of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `p |psi><psi| + (1 - p) / D * 1` as a dense density matrix.
    pub fn noisy_density(&self, p: f64, limit: &DenseLimit) -> Result<DensityMatrix> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("mixing parameter p must lie in [0, 1], got {p}")));
        }
        let dim = limit.operator_dim("noisy density matrix", self.party_dim, self.parties)?;
        let noise = (1.0 - p) / dim as f64;
        let psi = &self.amplitudes;
        let m = ComplexMatrix::from_fn(dim, dim, |i, j| {
            let diag = if i == j { noise } else { 0.0 };
            psi[i] * psi[j].conj() * p + Complex64::new(diag, 0.0)
        });
        DensityMatrix::from_matrix(m)
    }
}

impl MomentProvider for PureState {
    fn party_dim(&self) -> usize {
        self.party_dim
    }

    fn parties(&self) -> usize {
        self.parties
    }

    fn moments(&self, local: &HermitianOperator) -> Result<(f64, f64)> {
        pure_moments(self, local)
    }

    fn provenance(&self) -> Provenance {
        Provenance::Dense
    }
}

fn index_of(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &k| acc * d + k)
}

fn digits_of(mut idx: usize, d: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = idx % d;
        idx /= d;
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Equal superposition of the `N`-qubit strings with exactly `k` ones.
pub fn symmetric_qubit_state(parties: usize, k: usize, limit: &DenseLimit) -> Result<PureState> {
    if k > parties {
        return Err(Error::InvalidParameter(format!("{k} excitations on {parties} qubits")));
    }
    let dim = limit.vector_dim("qubit register", 2, parties)?;
    let amp = Complex64::new(binomial(parties, k).sqrt().recip(), 0.0);
    let amplitudes = (0..dim)
        .map(|i| {
            if i.count_ones() as usize == k {
                amp
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    PureState::new(amplitudes, 2, parties)
}

/// Dicke state with `ceil(N/2)` excitations.
pub fn dicke_state(parties: usize, limit: &DenseLimit) -> Result<PureState> {
    if parties < 2 {
        return Err(Error::InvalidParameter(format!("Dicke states need N >= 2, got {parties}")));
    }
    symmetric_qubit_state(parties, parties.div_ceil(2), limit)
}

pub fn w_state(parties: usize, limit: &DenseLimit) -> Result<PureState> {
    if parties < 3 {
        return Err(Error::InvalidParameter(format!("W states need N >= 3, got {parties}")));
    }
    symmetric_qubit_state(parties, 1, limit)
}

/// All permutations of `0..n` in lexicographic order, with their parity signs.
fn signed_permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let inversions = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| perm[i] > perm[j])
            .count();
        out.push((perm.clone(), if inversions % 2 == 0 { 1.0 } else { -1.0 }));
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).expect("successor exists");
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
}

/// The totally antisymmetric state of `N` parties of dimension `N`.
pub fn antisym_state(parties: usize, limit: &DenseLimit) -> Result<PureState> {
    if parties < 2 {
        return Err(Error::InvalidParameter(format!("antisymmetric states need N >= 2, got {parties}")));
    }
    let dim = limit.vector_dim("antisymmetric register", parties, parties)?;
    let perms = signed_permutations(parties);
    let scale = (perms.len() as f64).sqrt().recip();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    for (perm, sign) in perms {
        amplitudes[index_of(&perm, parties)] = Complex64::new(sign * scale, 0.0);
    }
    PureState::new(amplitudes, parties, parties)
}

/// `(|01> - |10> + |02> - |20> + |12> - |21>) / sqrt 6`.
pub fn two_qutrit_psi() -> PureState {
    let a = 6f64.sqrt().recip();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 9];
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        amplitudes[3 * i + j] = Complex64::new(a, 0.0);
        amplitudes[3 * j + i] = Complex64::new(-a, 0.0);
    }
    PureState::new(amplitudes, 3, 2).expect("normalized by construction")
}

/// `|psi_1> ⊗ ... ⊗ |psi_N>` from local unit vectors of a common dimension.
pub fn product_state(locals: &[Vec<Complex64>], limit: &DenseLimit) -> Result<PureState> {
    let d = locals
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidParameter("product of zero factors".into()))?;
    limit.vector_dim("product state", d, locals.len())?;
    let mut amplitudes = vec![Complex64::new(1.0, 0.0)];
    for v in locals {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: v.len(),
            });
        }
        amplitudes = amplitudes
            .iter()
            .flat_map(|a| v.iter().map(move |b| a * b))
            .collect();
    }
    PureState::new(amplitudes, d, locals.len())
}

/// `(<psi|X|psi>, <psi|X^2|psi>)` for `X = sum_i M_i`, applying `M` site by site.
pub fn pure_moments(psi: &PureState, local: &HermitianOperator) -> Result<(f64, f64)> {
    if local.dim() != psi.party_dim {
        return Err(Error::DimensionMismatch {
            expected: psi.party_dim,
            actual: local.dim(),
        });
    }
    let x = CollectiveObservable::new(local.clone(), psi.parties)?;
    let image = x.apply(&psi.amplitudes)?;
    Ok((inner(&psi.amplitudes, &image).re, norm_sqr(&image)))
}

/// Closed-form moments of the antisymmetric state `|S_N>`.
///
/// Every one-party marginal is `1/d` and every two-party marginal is the
/// normalized antisymmetric projector, which fixes `m1` and `m2` in terms of
/// `Tr M` and `Tr M^2` alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AntisymMoments {
    parties: usize,
}

impl AntisymMoments {
    pub fn new(parties: usize) -> Result<Self> {
        if parties < 2 {
            return Err(Error::InvalidParameter(format!("antisymmetric states need N >= 2, got {parties}")));
        }
        Ok(Self { parties })
    }
}

impl MomentProvider for AntisymMoments {
    fn party_dim(&self) -> usize {
        self.parties
    }

    fn parties(&self) -> usize {
        self.parties
    }

    fn moments(&self, local: &HermitianOperator) -> Result<(f64, f64)> {
        if local.dim() != self.parties {
            return Err(Error::DimensionMismatch {
                expected: self.parties,
                actual: local.dim(),
            });
        }
        let n = self.parties as f64;
        let d = n;
        let tr = local.trace();
        let tr2 = local.trace_of_square();
        let m1 = n * tr / d;
        let m2 = n * tr2 / d + n * (n - 1.0) * (tr * tr - tr2) / (d * (d - 1.0));
        Ok((m1, m2))
    }

    fn provenance(&self) -> Provenance {
        Provenance::Analytic
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil;

    fn limit() -> DenseLimit {
        DenseLimit::default()
    }

    fn nonzero(psi: &PureState) -> Vec<(usize, f64)> {
        psi.amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 1e-14)
            .map(|(i, a)| (i, a.re))
            .collect()
    }

    #[test]
    fn dicke_fixtures() {
        let r2 = 0.5f64.sqrt();
        assert_eq!(nonzero(&dicke_state(2, &limit()).unwrap()).len(), 2);
        assert!((dicke_state(2, &limit()).unwrap().amplitude(&[0, 1]).re - r2).abs() < 1e-15);

        let d3 = dicke_state(3, &limit()).unwrap();
        let support: Vec<usize> = nonzero(&d3).iter().map(|&(i, _)| i).collect();
        assert_eq!(support, vec![0b011, 0b101, 0b110]);
        assert!((d3.amplitude(&[1, 1, 0]).re - 3f64.sqrt().recip()).abs() < 1e-15);

        let d4 = nonzero(&dicke_state(4, &limit()).unwrap());
        assert_eq!(d4.len(), 6);
        assert!(d4.iter().all(|&(_, a)| (a - 6f64.sqrt().recip()).abs() < 1e-15));
        assert!(dicke_state(1, &limit()).is_err());
    }

    #[test]
    fn w_state_fixtures() {
        let w3 = w_state(3, &limit()).unwrap();
        let support: Vec<usize> = nonzero(&w3).iter().map(|&(i, _)| i).collect();
        assert_eq!(support, vec![0b001, 0b010, 0b100]);
        assert!(w_state(2, &limit()).is_err());
        let w4 = w_state(4, &limit()).unwrap();
        let d4 = dicke_state(4, &limit()).unwrap();
        assert!(inner(w4.amplitudes(), d4.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn w3_is_bit_flipped_dicke3() {
        let w3 = w_state(3, &limit()).unwrap();
        let d3 = dicke_state(3, &limit()).unwrap();
        for idx in 0..8 {
            assert_eq!(w3.amplitudes()[idx], d3.amplitudes()[7 - idx]);
        }
    }

    #[test]
    fn capacity_is_enforced() {
        let tiny = DenseLimit::default().with_max_dim(16);
        assert!(matches!(dicke_state(5, &tiny), Err(Error::Capacity { .. })));
        assert!(matches!(antisym_state(3, &tiny), Err(Error::Capacity { .. })));
    }

    #[test]
    fn antisym_fixtures() {
        let s2 = antisym_state(2, &limit()).unwrap();
        let r2 = 0.5f64.sqrt();
        assert!((s2.amplitude(&[0, 1]).re - r2).abs() < 1e-15);
        assert!((s2.amplitude(&[1, 0]).re + r2).abs() < 1e-15);

        let s3 = antisym_state(3, &limit()).unwrap();
        let a = 6f64.sqrt().recip();
        for (digits, sign) in [
            ([0, 1, 2], 1.0),
            ([0, 2, 1], -1.0),
            ([1, 0, 2], -1.0),
            ([1, 2, 0], 1.0),
            ([2, 0, 1], 1.0),
            ([2, 1, 0], -1.0),
        ] {
            assert!((s3.amplitude(&digits).re - sign * a).abs() < 1e-15);
        }
        assert_eq!(nonzero(&s3).len(), 6);

        let s4 = antisym_state(4, &limit()).unwrap();
        assert!((norm_sqr(s4.amplitudes()) - 1.0).abs() < 1e-12);
        assert_eq!(nonzero(&s4).len(), 24);
    }

    #[test]
    fn two_qutrit_fixture() {
        let psi = two_qutrit_psi();
        let a = 6f64.sqrt().recip();
        assert!((psi.amplitude(&[0, 1]).re - a).abs() < 1e-15);
        assert!((psi.amplitude(&[1, 0]).re + a).abs() < 1e-15);
        assert!((norm_sqr(psi.amplitudes()) - 1.0).abs() < 1e-15);
        let swapped = psi.permute_parties(&[1, 0]).unwrap();
        for (x, y) in swapped.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((x + y).norm() < 1e-15);
        }
    }

    #[test]
    fn symmetric_states_are_permutation_invariant() {
        for n in 3..=5 {
            for psi in [dicke_state(n, &limit()).unwrap(), w_state(n, &limit()).unwrap()] {
                for (perm, _) in signed_permutations(n) {
                    assert!(psi.permute_parties(&perm).unwrap().max_abs_diff(&psi) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn permutation_generator() {
        let perms = signed_permutations(4);
        assert_eq!(perms.len(), 24);
        assert_eq!(perms.iter().filter(|(_, s)| *s > 0.0).count(), 12);
        assert_eq!(perms[1], (vec![0, 1, 3, 2], -1.0));
    }

    #[test]
    fn moments_of_product_basis_state() {
        let mut rng = testutil::rng(11);
        let m = testutil::hermitian(&mut rng, 3);
        let ket0 = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        let psi = product_state(&[ket0.clone(), ket0.clone(), ket0], &limit()).unwrap();
        let (m1, _) = pure_moments(&psi, &m).unwrap();
        assert!((m1 - 3.0 * m.matrix()[(0, 0)].re).abs() < 1e-12);
    }

    #[test]
    fn moments_of_identity_and_w() {
        let w3 = w_state(3, &limit()).unwrap();
        let (m1, m2) = pure_moments(&w3, &HermitianOperator::identity(2)).unwrap();
        assert!((m1 - 3.0).abs() < 1e-12 && (m2 - 9.0).abs() < 1e-12);
        let (z1, _) = pure_moments(&w3, &HermitianOperator::diagonal(&[1.0, -1.0])).unwrap();
        assert!((z1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_free_moments_match_dense() {
        let mut rng = testutil::rng(12);
        for _ in 0..10 {
            let psi = PureState::new(testutil::unit_vector(&mut rng, 27), 3, 3).unwrap();
            let m = testutil::hermitian(&mut rng, 3);
            let x = CollectiveObservable::new(m.clone(), 3).unwrap().dense(&limit()).unwrap();
            let (m1, m2) = pure_moments(&psi, &m).unwrap();
            assert!((m1 - x.expectation(psi.amplitudes()).unwrap()).abs() < 1e-10);
            assert!((m2 - x.square().expectation(psi.amplitudes()).unwrap()).abs() < 1e-10);
            assert!(m2 - m1 * m1 >= -1e-9);
        }
    }

    #[test]
    fn antisym_rank_one_projector_has_no_spread() {
        let v = testutil::unit_vector(&mut testutil::rng(13), 3);
        let (m1, m2) = AntisymMoments::new(3).unwrap().moments(&HermitianOperator::projector(&v)).unwrap();
        assert!((m1 - 1.0).abs() < 1e-12 && (m2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn antisym_moments_match_dense_state() {
        let mut rng = testutil::rng(14);
        for n in [3, 4] {
            let psi = antisym_state(n, &limit()).unwrap();
            let analytic = AntisymMoments::new(n).unwrap();
            for _ in 0..50 {
                let m = testutil::hermitian(&mut rng, n);
                let (a1, a2) = analytic.moments(&m).unwrap();
                let (d1, d2) = pure_moments(&psi, &m).unwrap();
                assert!((a1 - d1).abs() < 1e-9 && (a2 - d2).abs() < 1e-9, "N={n}");
            }
        }
    }

    #[test]
    fn noisy_density_has_two_point_spectrum() {
        let psi = w_state(3, &limit()).unwrap();
        let rho = psi.noisy_density(0.4, &limit()).unwrap();
        let ev = rho.eigenvalues();
        assert!((ev[7] - (0.4 + 0.6 / 8.0)).abs() < 1e-12);
        assert!(ev[..7].iter().all(|&v| (v - 0.6 / 8.0).abs() < 1e-12));
        assert!(psi.noisy_density(-0.1, &limit()).is_err());
    }
}
