//! Explicit measurement data: complete MUB tables for d = 2, 3, 4, 5, 8, 9 and
//! GSIC elements for d = 2, 3.
//!
//! MUB vectors are stored as exponent tables over a root of unity
//! `a_m = exp(2 pi i / m)`: row `v` of basis `u` is
//! `(1/sqrt d) sum_k a_m^{e_k} |k>`. Basis 1 is always the computational
//! basis and is not tabulated. The reference tables for d = 8 and d = 9 carry
//! a handful of sign/phase slips; they are kept verbatim here and the
//! corrections in [`MUB_ERRATA`] are applied on load.

use num_complex::Complex64;

/// Root-of-unity order used by the table for each supported dimension.
pub(crate) fn root_order(d: usize) -> Option<usize> {
    match d {
        2 => Some(4),
        3 => Some(3),
        4 => Some(4),
        5 => Some(5),
        8 => Some(4),
        9 => Some(3),
        _ => None,
    }
}

pub const SUPPORTED_MUB_DIMS: &str = "2, 3, 4, 5, 8, 9";
pub const SUPPORTED_GSIC_DIMS: &str = "2, 3";

/// One corrected component of a tabulated MUB vector (bases and vectors 1-based,
/// components 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Erratum {
    pub d: usize,
    pub basis: usize,
    pub vector: usize,
    pub component: usize,
    pub original: u8,
    pub corrected: u8,
}

const fn fix(d: usize, basis: usize, vector: usize, component: usize, original: u8, corrected: u8) -> Erratum {
    Erratum { d, basis, vector, component, original, corrected }
}

/// Each entry is the unique single-vector repair restoring orthogonality and
/// unbiasedness against the rest of the table.
pub static MUB_ERRATA: [Erratum; 28] = [
    fix(8, 2, 3, 1, 0, 1),
    fix(8, 4, 1, 3, 3, 1),
    fix(8, 4, 2, 3, 1, 3),
    fix(8, 4, 3, 3, 1, 3),
    fix(8, 4, 4, 3, 3, 1),
    fix(8, 4, 5, 3, 3, 1),
    fix(8, 4, 6, 3, 1, 3),
    fix(8, 4, 7, 3, 1, 3),
    fix(8, 4, 8, 3, 3, 1),
    fix(8, 8, 1, 5, 3, 1),
    fix(8, 8, 2, 5, 1, 3),
    fix(8, 8, 3, 5, 3, 1),
    fix(8, 8, 4, 5, 1, 3),
    fix(8, 8, 5, 5, 1, 3),
    fix(8, 8, 6, 5, 3, 1),
    fix(8, 8, 7, 5, 1, 3),
    fix(8, 8, 8, 5, 3, 1),
    fix(8, 9, 1, 7, 2, 0),
    fix(8, 9, 2, 7, 0, 2),
    fix(8, 9, 3, 7, 0, 2),
    fix(8, 9, 4, 7, 2, 0),
    fix(8, 9, 5, 7, 0, 2),
    fix(8, 9, 6, 7, 2, 0),
    fix(8, 9, 7, 7, 2, 0),
    fix(8, 9, 8, 7, 0, 2),
    fix(9, 5, 5, 1, 0, 2),
    fix(9, 5, 5, 2, 2, 0),
    fix(9, 5, 5, 3, 0, 1),
];

fn raw_rows(d: usize) -> Option<Vec<Vec<u8>>> {
    fn rows<const D: usize>(t: &[[u8; D]]) -> Vec<Vec<u8>> {
        t.iter().map(|r| r.to_vec()).collect()
    }
    match d {
        2 => Some(rows(&MUB_D2)),
        3 => Some(rows(&MUB_D3)),
        4 => Some(rows(&MUB_D4)),
        5 => Some(rows(&MUB_D5)),
        8 => Some(rows(&MUB_D8)),
        9 => Some(rows(&MUB_D9)),
        _ => None,
    }
}

/// `a_m^e`.
pub(crate) fn root_power(m: usize, e: usize) -> Complex64 {
    // exact values for the quarter turns keep d = 2, 4, 8 free of rounding
    if (4 * e) % m == 0 {
        return match (4 * e / m) % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (e % m) as f64 / m as f64)
}

/// Normalized basis vectors, `groups[u][v]`, for a supported dimension.
pub(crate) fn mub_vectors(d: usize, apply_errata: bool) -> Option<Vec<Vec<Vec<Complex64>>>> {
    let m = root_order(d)?;
    let mut table = raw_rows(d)?;
    if apply_errata {
        for e in MUB_ERRATA.iter().filter(|e| e.d == d) {
            let row = &mut table[(e.basis - 2) * d + (e.vector - 1)];
            debug_assert_eq!(row[e.component], e.original);
            row[e.component] = e.corrected;
        }
    }
    let norm = 1.0 / (d as f64).sqrt();
    let mut groups = Vec::with_capacity(d + 1);
    groups.push(
        (0..d)
            .map(|v| {
                (0..d)
                    .map(|k| Complex64::new(if k == v { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect(),
    );
    for chunk in table.chunks(d) {
        groups.push(
            chunk
                .iter()
                .map(|row| row.iter().map(|&e| root_power(m, e as usize) * norm).collect())
                .collect(),
        );
    }
    Some(groups)
}

/// A 2x2 entry `(re + sqrt3 * sqrt(3) + i * im)` before the common prefactor.
type SurdEntry = (i32, i32, i32);

/// d = 2 GSIC: `(prefactor denominator k, entries)` with
/// `G = 1/(k sqrt 3) [[e00, e01], [e10, e11]]`.
static GSIC_D2: [(f64, [[SurdEntry; 2]; 2]); 4] = [
    (12.0, [[(1, 3, 0), (-5, 0, 1)], [(-5, 0, -1), (-1, 3, 0)]]),
    (12.0, [[(1, 3, 0), (1, 0, -5)], [(1, 0, 5), (-1, 3, 0)]]),
    (12.0, [[(-5, 3, 0), (1, 0, 1)], [(1, 0, -1), (5, 3, 0)]]),
    (4.0, [[(1, 1, 0), (1, 0, 1)], [(1, 0, -1), (-1, 1, 0)]]),
];

pub(crate) fn gsic_d2_matrices() -> Vec<[[Complex64; 2]; 2]> {
    let s3 = 3f64.sqrt();
    GSIC_D2
        .iter()
        .map(|(k, rows)| {
            let pref = 1.0 / (k * s3);
            let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
            for (i, row) in rows.iter().enumerate() {
                for (j, &(re, sq, im)) in row.iter().enumerate() {
                    out[i][j] = Complex64::new(re as f64 + sq as f64 * s3, im as f64) * pref;
                }
            }
            out
        })
        .collect()
}

/// d = 3 GSIC vectors `(1/sqrt 2)(b^p |j> - b^q |k>)` as `(j, p, k, q)`, `b = exp(2 pi i / 3)`;
/// elements are `G_u = |phi_u><phi_u| / 3`.
static GSIC_D3: [(usize, usize, usize, usize); 9] = [
    (1, 0, 2, 0),
    (1, 1, 2, 2),
    (1, 2, 2, 1),
    (0, 0, 1, 0),
    (0, 1, 1, 2),
    (0, 2, 1, 1),
    (2, 0, 0, 0),
    (2, 1, 0, 2),
    (2, 2, 0, 1),
];

pub(crate) fn gsic_d3_vectors() -> Vec<[Complex64; 3]> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    GSIC_D3
        .iter()
        .map(|&(j, p, k, q)| {
            let mut v = [Complex64::new(0.0, 0.0); 3];
            v[j] += root_power(3, p) * h;
            v[k] -= root_power(3, q) * h;
            v
        })
        .collect()
}

/// Quadratic-phase MUBs for prime `d`: the computational basis plus
/// `(1/sqrt d) sum_n w^(k n^2 + j n) |n>` for odd `d`, Pauli eigenbases for `d = 2`.
#[cfg(test)]
pub(crate) fn standard_prime_mub(d: usize) -> Vec<Vec<Vec<Complex64>>> {
    let mut groups: Vec<Vec<Vec<Complex64>>> = vec![(0..d)
        .map(|v| (0..d).map(|k| Complex64::new((k == v) as u8 as f64, 0.0)).collect())
        .collect()];
    let norm = 1.0 / (d as f64).sqrt();
    if d == 2 {
        for phase in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
            groups.push(vec![
                vec![Complex64::new(norm, 0.0), phase * norm],
                vec![Complex64::new(norm, 0.0), -phase * norm],
            ]);
        }
        return groups;
    }
    for k in 0..d {
        groups.push(
            (0..d)
                .map(|j| (0..d).map(|n| root_power(d, (k * n * n + j * n) % d) * norm).collect())
                .collect(),
        );
    }
    groups
}

static MUB_D2: [[u8; 2]; 4] = [
    // basis 2
    [0, 0],
    [0, 2],
    // basis 3
    [0, 1],
    [0, 3],
];

static MUB_D3: [[u8; 3]; 9] = [
    // basis 2
    [0, 0, 0],
    [0, 1, 2],
    [0, 2, 1],
    // basis 3
    [0, 1, 1],
    [0, 2, 0],
    [0, 0, 2],
    // basis 4
    [0, 2, 2],
    [0, 0, 1],
    [0, 1, 0],
];

static MUB_D4: [[u8; 4]; 16] = [
    // basis 2
    [0, 0, 0, 0],
    [0, 2, 0, 2],
    [0, 0, 2, 2],
    [0, 2, 2, 0],
    // basis 3
    [0, 1, 1, 2],
    [0, 3, 1, 0],
    [0, 1, 3, 0],
    [0, 3, 3, 2],
    // basis 4
    [0, 1, 0, 3],
    [0, 3, 0, 1],
    [0, 1, 2, 1],
    [0, 3, 2, 3],
    // basis 5
    [0, 0, 1, 3],
    [0, 2, 1, 1],
    [0, 0, 3, 1],
    [0, 2, 3, 3],
];

static MUB_D5: [[u8; 5]; 25] = [
    // basis 2
    [0, 0, 0, 0, 0],
    [0, 1, 2, 3, 4],
    [0, 2, 4, 1, 3],
    [0, 3, 1, 4, 2],
    [0, 4, 3, 2, 1],
    // basis 3
    [0, 1, 4, 4, 1],
    [0, 2, 1, 2, 0],
    [0, 3, 3, 0, 4],
    [0, 4, 0, 3, 3],
    [0, 0, 2, 1, 2],
    // basis 4
    [0, 2, 3, 3, 2],
    [0, 3, 0, 1, 1],
    [0, 4, 2, 4, 0],
    [0, 0, 4, 2, 4],
    [0, 1, 1, 0, 3],
    // basis 5
    [0, 3, 2, 2, 3],
    [0, 4, 4, 0, 2],
    [0, 0, 1, 3, 1],
    [0, 1, 3, 1, 0],
    [0, 2, 0, 4, 4],
    // basis 6
    [0, 4, 1, 1, 4],
    [0, 0, 3, 4, 3],
    [0, 1, 0, 2, 2],
    [0, 2, 2, 0, 1],
    [0, 3, 4, 3, 0],
];

static MUB_D8: [[u8; 8]; 64] = [
    // basis 2
    [0, 1, 1, 2, 1, 2, 2, 3],
    [0, 3, 1, 0, 1, 0, 2, 1],
    [0, 0, 3, 0, 1, 2, 0, 1],
    [0, 3, 3, 2, 1, 0, 0, 3],
    [0, 1, 1, 2, 3, 0, 0, 1],
    [0, 3, 1, 0, 3, 2, 0, 3],
    [0, 1, 3, 0, 3, 0, 2, 3],
    [0, 3, 3, 2, 3, 2, 2, 1],
    // basis 3
    [0, 0, 1, 3, 1, 1, 0, 2],
    [0, 2, 1, 1, 1, 3, 0, 0],
    [0, 0, 3, 1, 1, 1, 2, 0],
    [0, 2, 3, 3, 1, 3, 2, 2],
    [0, 0, 1, 3, 3, 3, 2, 0],
    [0, 2, 1, 1, 3, 1, 2, 2],
    [0, 0, 3, 1, 3, 3, 0, 2],
    [0, 2, 3, 3, 3, 1, 0, 0],
    // basis 4
    [0, 1, 0, 3, 1, 0, 3, 2],
    [0, 3, 0, 1, 1, 2, 3, 0],
    [0, 1, 2, 1, 1, 0, 1, 0],
    [0, 3, 2, 3, 1, 2, 1, 2],
    [0, 1, 0, 3, 3, 2, 1, 0],
    [0, 3, 0, 1, 3, 0, 1, 2],
    [0, 1, 2, 1, 3, 2, 3, 2],
    [0, 3, 2, 3, 3, 0, 3, 0],
    // basis 5
    [0, 0, 0, 2, 1, 3, 1, 1],
    [0, 2, 0, 0, 1, 1, 1, 3],
    [0, 0, 2, 0, 1, 3, 3, 3],
    [0, 2, 2, 2, 1, 1, 3, 1],
    [0, 0, 0, 2, 3, 1, 3, 3],
    [0, 2, 0, 0, 3, 3, 3, 1],
    [0, 0, 2, 0, 3, 1, 1, 1],
    [0, 2, 2, 2, 3, 3, 1, 3],
    // basis 6
    [0, 1, 1, 0, 0, 3, 1, 2],
    [0, 3, 1, 2, 0, 1, 1, 0],
    [0, 1, 3, 2, 0, 3, 3, 0],
    [0, 3, 3, 0, 0, 1, 3, 2],
    [0, 1, 1, 0, 2, 1, 3, 0],
    [0, 3, 1, 2, 2, 3, 3, 2],
    [0, 1, 3, 2, 2, 1, 1, 2],
    [0, 3, 3, 0, 2, 3, 1, 0],
    // basis 7
    [0, 0, 1, 1, 0, 2, 3, 1],
    [0, 2, 1, 3, 0, 0, 3, 3],
    [0, 0, 3, 3, 0, 2, 1, 3],
    [0, 2, 3, 1, 0, 0, 1, 1],
    [0, 0, 1, 1, 2, 0, 1, 3],
    [0, 2, 1, 3, 2, 2, 1, 1],
    [0, 0, 3, 3, 2, 0, 3, 1],
    [0, 2, 3, 1, 2, 2, 3, 3],
    // basis 8
    [0, 1, 0, 3, 0, 3, 2, 1],
    [0, 3, 0, 1, 0, 1, 2, 3],
    [0, 1, 2, 1, 0, 3, 0, 3],
    [0, 3, 2, 3, 0, 1, 0, 1],
    [0, 1, 0, 3, 2, 1, 0, 3],
    [0, 3, 0, 1, 2, 3, 0, 1],
    [0, 1, 2, 1, 2, 1, 2, 1],
    [0, 3, 2, 3, 2, 3, 2, 3],
    // basis 9
    [0, 0, 0, 0, 0, 0, 0, 2],
    [0, 2, 0, 2, 0, 2, 0, 0],
    [0, 0, 2, 2, 0, 0, 2, 0],
    [0, 2, 2, 0, 0, 2, 2, 2],
    [0, 0, 0, 0, 2, 2, 2, 0],
    [0, 2, 0, 2, 2, 0, 2, 2],
    [0, 0, 2, 2, 2, 2, 0, 2],
    [0, 2, 2, 0, 2, 0, 0, 0],
];

static MUB_D9: [[u8; 9]; 81] = [
    // basis 2
    [0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 2, 0, 1, 2, 0, 1, 2],
    [0, 2, 1, 0, 2, 1, 0, 2, 1],
    [0, 0, 0, 1, 1, 1, 2, 2, 2],
    [0, 1, 2, 1, 2, 0, 2, 0, 1],
    [0, 2, 1, 1, 0, 2, 2, 1, 0],
    [0, 0, 0, 2, 2, 2, 1, 1, 1],
    [0, 1, 2, 2, 0, 1, 1, 2, 0],
    [0, 2, 1, 2, 1, 0, 1, 0, 2],
    // basis 3
    [0, 1, 1, 1, 2, 2, 1, 2, 2],
    [0, 2, 0, 1, 0, 1, 1, 0, 1],
    [0, 0, 2, 1, 1, 0, 1, 1, 0],
    [0, 1, 1, 2, 0, 0, 0, 1, 1],
    [0, 2, 0, 2, 1, 2, 0, 2, 0],
    [0, 0, 2, 2, 2, 1, 0, 0, 2],
    [0, 1, 1, 0, 1, 1, 2, 0, 0],
    [0, 2, 0, 0, 2, 0, 2, 1, 2],
    [0, 0, 2, 0, 0, 2, 2, 2, 1],
    // basis 4
    [0, 2, 2, 2, 1, 1, 2, 1, 1],
    [0, 0, 1, 2, 2, 0, 2, 2, 0],
    [0, 1, 0, 2, 0, 2, 2, 0, 2],
    [0, 2, 2, 0, 2, 2, 1, 0, 0],
    [0, 0, 1, 0, 0, 1, 1, 1, 2],
    [0, 1, 0, 0, 1, 0, 1, 2, 1],
    [0, 2, 2, 1, 0, 0, 0, 2, 2],
    [0, 0, 1, 1, 1, 2, 0, 0, 1],
    [0, 1, 0, 1, 2, 1, 0, 1, 0],
    // basis 5
    [0, 1, 1, 0, 0, 2, 0, 2, 0],
    [0, 2, 0, 0, 1, 1, 0, 0, 2],
    [0, 0, 2, 0, 2, 0, 0, 1, 1],
    [0, 1, 1, 1, 1, 0, 2, 1, 2],
    [0, 0, 2, 0, 2, 2, 2, 2, 1],
    [0, 0, 2, 1, 0, 1, 2, 0, 0],
    [0, 1, 1, 2, 2, 1, 1, 0, 1],
    [0, 2, 0, 2, 0, 0, 1, 1, 0],
    [0, 0, 2, 2, 1, 2, 1, 2, 2],
    // basis 6
    [0, 2, 2, 0, 0, 1, 0, 1, 0],
    [0, 0, 1, 0, 1, 0, 0, 2, 2],
    [0, 1, 0, 0, 2, 2, 0, 0, 1],
    [0, 2, 2, 1, 1, 2, 2, 0, 2],
    [0, 0, 1, 1, 2, 1, 2, 1, 1],
    [0, 1, 0, 1, 0, 0, 2, 2, 0],
    [0, 2, 2, 2, 2, 0, 1, 2, 1],
    [0, 0, 1, 2, 0, 2, 1, 0, 0],
    [0, 1, 0, 2, 1, 1, 1, 1, 2],
    // basis 7
    [0, 0, 0, 1, 2, 0, 1, 0, 2],
    [0, 1, 2, 1, 0, 2, 1, 1, 1],
    [0, 2, 1, 1, 1, 1, 1, 2, 0],
    [0, 0, 0, 2, 0, 1, 0, 2, 1],
    [0, 1, 2, 2, 1, 0, 0, 0, 0],
    [0, 2, 1, 2, 2, 2, 0, 1, 2],
    [0, 0, 0, 0, 1, 2, 2, 1, 0],
    [0, 1, 2, 0, 2, 1, 2, 2, 2],
    [0, 2, 1, 0, 0, 0, 2, 0, 1],
    // basis 8
    [0, 2, 2, 1, 2, 1, 1, 1, 2],
    [0, 0, 1, 1, 0, 0, 1, 2, 1],
    [0, 1, 0, 1, 1, 2, 1, 0, 0],
    [0, 2, 2, 2, 0, 2, 0, 0, 1],
    [0, 0, 1, 2, 1, 1, 0, 1, 0],
    [0, 1, 0, 2, 2, 0, 0, 2, 2],
    [0, 2, 2, 0, 1, 0, 2, 2, 0],
    [0, 0, 1, 0, 2, 2, 2, 0, 2],
    [0, 1, 0, 0, 0, 1, 2, 1, 1],
    // basis 9
    [0, 0, 0, 2, 1, 0, 2, 0, 1],
    [0, 1, 2, 2, 2, 2, 2, 1, 0],
    [0, 2, 1, 2, 0, 1, 2, 2, 2],
    [0, 0, 0, 0, 2, 1, 1, 2, 0],
    [0, 1, 2, 0, 0, 0, 1, 0, 2],
    [0, 2, 1, 0, 1, 2, 1, 1, 1],
    [0, 0, 0, 1, 0, 2, 0, 1, 2],
    [0, 1, 2, 1, 1, 1, 0, 2, 1],
    [0, 2, 1, 1, 2, 0, 0, 0, 0],
    // basis 10
    [0, 1, 1, 2, 1, 2, 2, 2, 1],
    [0, 2, 0, 2, 2, 1, 2, 0, 0],
    [0, 0, 2, 2, 0, 0, 2, 1, 2],
    [0, 1, 1, 0, 2, 0, 1, 1, 0],
    [0, 2, 0, 0, 0, 2, 1, 2, 2],
    [0, 0, 2, 0, 1, 1, 1, 0, 1],
    [0, 1, 1, 1, 0, 1, 0, 0, 2],
    [0, 2, 0, 1, 1, 0, 0, 1, 1],
    [0, 0, 2, 1, 2, 2, 0, 2, 0],
];
