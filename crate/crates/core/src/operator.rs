//! Dense complex operators on multipartite Hilbert spaces.
//!
//! Basis ordering for an `N`-party register of local dimension `d` is
//! `|i_1 i_2 ... i_N>` with `i_1` the most significant digit, so site 1 is
//! the leftmost tensor factor. Every other module relies on this ordering.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Environment variable overriding [`DenseLimit::max_dim`].
pub const DENSE_LIMIT_ENV: &str = "ENTWITNESS_DENSE_LIMIT";

/// Caps on dense materialization.
///
/// `max_dim` bounds state vectors (and therefore any `d^N` register that is
/// expanded densely). `max_operator_dim` bounds square matrices, which grow
/// quadratically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DenseLimit {
    pub max_dim: usize,
    pub max_operator_dim: usize,
}

impl Default for DenseLimit {
    fn default() -> Self {
        Self {
            max_dim: 1 << 20,
            max_operator_dim: 1 << 12,
        }
    }
}

impl DenseLimit {
    /// Default limits, with `max_dim` taken from `ENTWITNESS_DENSE_LIMIT` when set.
    pub fn from_env() -> Self {
        let mut limit = Self::default();
        if let Some(v) = std::env::var(DENSE_LIMIT_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
        {
            limit.max_dim = v;
        }
        limit
    }

    pub fn with_max_dim(mut self, max_dim: usize) -> Self {
        self.max_dim = max_dim;
        self
    }

    /// Dimension `d^n` of a register to be held as a dense vector.
    pub fn vector_dim(&self, what: &'static str, d: usize, n: usize) -> Result<usize> {
        match register_dim(d, n) {
            Some(dim) if dim <= self.max_dim => Ok(dim),
            other => Err(Error::Capacity {
                what,
                requested: describe_dim(other, d, n),
                limit: self.max_dim,
            }),
        }
    }

    /// Dimension `d^n` of a register whose operators are materialized densely.
    pub fn operator_dim(&self, what: &'static str, d: usize, n: usize) -> Result<usize> {
        let limit = self.max_dim.min(self.max_operator_dim);
        match register_dim(d, n) {
            Some(dim) if dim <= limit => Ok(dim),
            other => Err(Error::Capacity {
                what,
                requested: describe_dim(other, d, n),
                limit,
            }),
        }
    }
}

fn describe_dim(dim: Option<usize>, d: usize, n: usize) -> String {
    match dim {
        Some(v) => v.to_string(),
        None => format!("{d}^{n} (overflow)"),
    }
}

/// `d^n`, or `None` on overflow.
pub fn register_dim(d: usize, n: usize) -> Option<usize> {
    u32::try_from(n).ok().and_then(|n| d.checked_pow(n))
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Maximum entrywise deviation from Hermiticity accepted at construction.
    pub const TOLERANCE: f64 = 1e-10;

    /// Validates Hermiticity and stores the exactly Hermitian part `(H + H^dagger) / 2`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        let adjoint = matrix.adjoint();
        let deviation = max_abs_entry(&(&matrix - &adjoint));
        if !(deviation <= Self::TOLERANCE) {
            return Err(Error::NotHermitian(deviation));
        }
        let matrix = (matrix + adjoint).scale(0.5);
        Ok(Self { matrix })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self {
            matrix: DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::new(values[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    /// The outer product `|v><v|` (no normalization applied).
    pub fn projector(v: &[Complex64]) -> Self {
        let n = v.len();
        Self {
            matrix: DMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj()),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// `Tr(H^2)`, computed as the squared Frobenius norm.
    pub fn trace_of_square(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `Tr(A B)` for Hermitian `A`, `B` (always real).
    pub fn trace_product(&self, other: &Self) -> f64 {
        // Tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij)
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    pub fn square(&self) -> Self {
        Self {
            matrix: &self.matrix * &self.matrix,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale(factor),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn apply(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        check_dim(self.dim(), psi.len())?;
        let n = self.dim();
        Ok((0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)] * psi[j]).sum())
            .collect())
    }

    /// `<psi|H|psi>`.
    pub fn expectation(&self, psi: &[Complex64]) -> Result<f64> {
        let h_psi = self.apply(psi)?;
        Ok(inner(psi, &h_psi).re)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs_entry(&(&self.matrix - &other.matrix))
    }

    /// Largest entrywise modulus of the commutator `[A, B]`.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        let ab = &self.matrix * &other.matrix;
        let ba = &other.matrix * &self.matrix;
        max_abs_entry(&(ab - ba))
    }
}

pub fn max_abs_entry(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `<a|b>` (antilinear in the first argument).
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

fn check_site(site: usize, parties: usize) -> Result<()> {
    if parties == 0 {
        return Err(Error::InvalidParameter("party count must be at least 1".into()));
    }
    if site == 0 || site > parties {
        return Err(Error::InvalidParameter(format!(
            "site {site} outside 1..={parties}"
        )));
    }
    Ok(())
}

/// `1 ⊗ ... ⊗ M ⊗ ... ⊗ 1` with `M` at `site` (1-based) among `parties` factors.
pub fn embed_local(
    local: &HermitianOperator,
    site: usize,
    parties: usize,
    limit: &DenseLimit,
) -> Result<HermitianOperator> {
    check_site(site, parties)?;
    let d = local.dim();
    limit.operator_dim("embedded operator", d, parties)?;
    let left = d.pow((site - 1) as u32);
    let right = d.pow((parties - site) as u32);
    let matrix = DMatrix::<Complex64>::identity(left, left)
        .kronecker(local.matrix())
        .kronecker(&DMatrix::<Complex64>::identity(right, right));
    Ok(HermitianOperator { matrix })
}

/// Adds `M_site |psi>` into `out` without forming the `d^N`-dimensional operator.
pub fn apply_local_into(
    local: &HermitianOperator,
    site: usize,
    parties: usize,
    psi: &[Complex64],
    out: &mut [Complex64],
) -> Result<()> {
    check_site(site, parties)?;
    let d = local.dim();
    let total = register_dim(d, parties).ok_or(Error::Capacity {
        what: "local application",
        requested: format!("{d}^{parties} (overflow)"),
        limit: usize::MAX,
    })?;
    check_dim(total, psi.len())?;
    check_dim(total, out.len())?;
    let stride = d.pow((parties - site) as u32);
    let block = d * stride;
    let m = local.matrix();
    let mut gathered = vec![Complex64::new(0.0, 0.0); d];
    for outer in (0..total).step_by(block) {
        for inner_idx in 0..stride {
            let base = outer + inner_idx;
            for (k, g) in gathered.iter_mut().enumerate() {
                *g = psi[base + k * stride];
            }
            for j in 0..d {
                let acc: Complex64 = (0..d).map(|k| m[(j, k)] * gathered[k]).sum();
                out[base + j * stride] += acc;
            }
        }
    }
    Ok(())
}

/// The collective observable `sum_i 1 ⊗ ... ⊗ M_i ⊗ ... ⊗ 1` over `parties` sites.
///
/// Trace moments are analytic and available at any size; the dense operator
/// is only built on request.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveObservable {
    local: HermitianOperator,
    parties: usize,
}

impl CollectiveObservable {
    pub fn new(local: HermitianOperator, parties: usize) -> Result<Self> {
        if parties == 0 {
            return Err(Error::InvalidParameter("party count must be at least 1".into()));
        }
        Ok(Self { local, parties })
    }

    pub fn local(&self) -> &HermitianOperator {
        &self.local
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn party_dim(&self) -> usize {
        self.local.dim()
    }

    /// `d^N`, or `None` if it does not fit in `usize`.
    pub fn total_dim(&self) -> Option<usize> {
        register_dim(self.party_dim(), self.parties)
    }

    /// Sum of the site embeddings, accumulated in site order.
    pub fn dense(&self, limit: &DenseLimit) -> Result<HermitianOperator> {
        let dim = limit.operator_dim("collective observable", self.party_dim(), self.parties)?;
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for site in 1..=self.parties {
            acc += embed_local(&self.local, site, self.parties, limit)?.matrix;
        }
        Ok(HermitianOperator { matrix: acc })
    }

    /// `Tr(sum_i M_i) = N d^(N-1) Tr M`.
    pub fn trace_first(&self) -> f64 {
        let (n, d) = (self.parties as f64, self.party_dim() as f64);
        n * d.powi(self.parties as i32 - 1) * self.local.trace()
    }

    /// `Tr((sum_i M_i)^2) = N d^(N-1) Tr M^2 + N(N-1) d^(N-2) (Tr M)^2`.
    pub fn trace_second(&self) -> f64 {
        let (n, d) = (self.parties as f64, self.party_dim() as f64);
        let tr = self.local.trace();
        n * d.powi(self.parties as i32 - 1) * self.local.trace_of_square()
            + n * (n - 1.0) * d.powi(self.parties as i32 - 2) * tr * tr
    }

    /// `Tr(X) / d^N`, without forming `d^N`.
    pub fn normalized_trace_first(&self) -> f64 {
        self.parties as f64 * self.local.trace() / self.party_dim() as f64
    }

    /// `Tr(X^2) / d^N`, without forming `d^N`.
    pub fn normalized_trace_second(&self) -> f64 {
        let (n, d) = (self.parties as f64, self.party_dim() as f64);
        let mean = self.local.trace() / d;
        n * self.local.trace_of_square() / d + n * (n - 1.0) * mean * mean
    }

    /// `(sum_i M_i) |psi>` computed site by site.
    pub fn apply(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for site in 1..=self.parties {
            apply_local_into(&self.local, site, self.parties, psi, &mut out)?;
        }
        Ok(out)
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `U diag(values) U^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(lambda);
        }
        let out = &scaled * self.vectors.adjoint();
        debug_assert_eq!(out.nrows(), n);
        out
    }
}

pub fn hermitian_eigen(h: &HermitianOperator) -> Result<EigenDecomposition> {
    let n = h.dim();
    let direct = if h.matrix.iter().all(|z| z.im == 0.0) {
        real_eigen(&h.matrix)?
    } else {
        complex_eigen(&h.matrix)?
    };
    let (raw_values, raw_vectors) = match direct {
        Some(found) => found,
        None => {
            // retry in a basis with no structural zeros
            let f = fourier(n);
            let rotated = &f * &h.matrix * f.adjoint();
            let (values, vectors) = complex_eigen(&rotated)?.ok_or(Error::NoConvergence(n))?;
            (values, f.adjoint() * vectors)
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw_values[a].total_cmp(&raw_values[b]));
    let values = order.iter().map(|&k| raw_values[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| raw_vectors[(i, order[j])]);
    Ok(EigenDecomposition { values, vectors })
}

fn max_iter(n: usize) -> usize {
    1000 * n.max(1)
}

fn real_eigen(m: &ComplexMatrix) -> Result<Option<(Vec<f64>, ComplexMatrix)>> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m.map(|z| z.re), f64::EPSILON, max_iter(n)).ok_or(Error::NoConvergence(n))?;
    let finite = eig.eigenvalues.iter().chain(eig.eigenvectors.iter()).all(|v| v.is_finite());
    Ok(finite.then(|| {
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors.map(|v| Complex64::new(v, 0.0)))
    }))
}

fn complex_eigen(m: &ComplexMatrix) -> Result<Option<(Vec<f64>, ComplexMatrix)>> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, max_iter(n)).ok_or(Error::NoConvergence(n))?;
    let finite = eig.eigenvalues.iter().all(|v| v.is_finite())
        && eig.eigenvectors.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    Ok(finite.then(|| (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)))
}

fn fourier(n: usize) -> ComplexMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |j, k| {
        Complex64::from_polar(scale, 2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64)
    })
}
