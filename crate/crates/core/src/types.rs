//! Shared domain vocabulary: frequencies, lag patterns, sign vectors, sample
//! paths and 2x2 covariance sequences.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure, Error, Result};

/// Maximum length of a sign vector (and hence a lag pattern) accepted by the
/// moment engines; the sums are `2^s` terms.
pub const MAX_ORDER: usize = 16;

/// Angular frequency in radians per unit time, restricted to `(0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Frequency(f64);

impl Frequency {
    pub fn new(lambda: f64) -> Result<Self> {
        ensure(lambda.is_finite() && lambda > 0.0 && lambda <= PI, || {
            format!("frequency must lie in (0, pi], got {lambda}")
        })?;
        Ok(Self(lambda))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Frequency {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Frequency> for f64 {
    fn from(f: Frequency) -> f64 {
        f.0
    }
}

/// Non-decreasing tuple of integer lags `tau_1 <= ... <= tau_s`, `s >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct LagPattern(Vec<i64>);

impl LagPattern {
    /// Builds a pattern, sorting the lags first so callers can pass any order.
    pub fn new(mut lags: Vec<i64>) -> Result<Self> {
        ensure(!lags.is_empty(), || {
            "lag pattern must contain at least one lag".into()
        })?;
        lags.sort_unstable();
        Ok(Self(lags))
    }

    /// Builds a pattern from lags that must already be sorted.
    pub fn from_sorted(lags: Vec<i64>) -> Result<Self> {
        ensure(!lags.is_empty(), || {
            "lag pattern must contain at least one lag".into()
        })?;
        ensure(lags.windows(2).all(|w| w[0] <= w[1]), || {
            format!("lags must be non-decreasing, got {lags:?}")
        })?;
        Ok(Self(lags))
    }

    pub fn lags(&self) -> &[i64] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn min(&self) -> i64 {
        self.0[0]
    }

    pub fn max(&self) -> i64 {
        *self.0.last().expect("non-empty")
    }

    /// The same pattern shifted by `c`.
    pub fn shifted(&self, c: i64) -> Self {
        Self(self.0.iter().map(|&t| t + c).collect())
    }
}

impl TryFrom<Vec<i64>> for LagPattern {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LagPattern> for Vec<i64> {
    fn from(p: LagPattern) -> Vec<i64> {
        p.0
    }
}

/// Vector `e` in `{-1, +1}^s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        ensure(signs.iter().all(|&e| e == 1 || e == -1), || {
            format!("sign entries must be +1 or -1, got {signs:?}")
        })?;
        Ok(Self(signs))
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    /// `prod_j e_j`.
    pub fn product(&self) -> f64 {
        if self.0.iter().filter(|&&e| e < 0).count() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|&e| -e).collect())
    }

    /// `sum_j e_j x_j`.
    pub fn dot(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&e, &v)| e as f64 * v).sum()
    }
}

/// Enumerates `{-1, 1}^s` in lexicographic order (`-1 < +1`), optionally
/// keeping only the zero-sum vectors.
pub fn enumerate_sign_vectors(s: usize, zero_sum: bool) -> Result<Vec<SignVector>> {
    if s == 0 {
        return Err(domain("sign-vector length must be at least 1"));
    }
    if s > MAX_ORDER {
        return Err(Error::SizeLimit {
            what: "sign-vector length",
            got: s,
            max: MAX_ORDER,
        });
    }
    if zero_sum && s % 2 == 1 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    // Bit j (from the most significant end) set means e_j = +1; counting up
    // therefore walks the set lexicographically.
    for code in 0u32..(1u32 << s) {
        let signs: Vec<i8> = (0..s)
            .map(|j| if code >> (s - 1 - j) & 1 == 1 { 1 } else { -1 })
            .collect();
        if zero_sum && signs.iter().map(|&e| e as i32).sum::<i32>() != 0 {
            continue;
        }
        out.push(SignVector(signs));
    }
    Ok(out)
}

/// Finite realization `y_{t0}, ..., y_{t0+n-1}` together with its seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPath {
    pub start_time: i64,
    pub values: Vec<f64>,
    pub seed: u64,
}

impl SeriesPath {
    pub fn new(start_time: i64, values: Vec<f64>, seed: u64) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(domain(format!("path value at index {i} is not finite")));
        }
        Ok(Self {
            start_time,
            values,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time stamp of the k-th value.
    pub fn time(&self, k: usize) -> i64 {
        self.start_time + k as i64
    }

    /// Value at absolute time `t`, if inside the path.
    pub fn at(&self, t: i64) -> Option<f64> {
        let k = t - self.start_time;
        if k < 0 {
            None
        } else {
            self.values.get(k as usize).copied()
        }
    }
}

/// Row-major 2x2 real matrix.
pub type Mat2 = [[f64; 2]; 2];

/// `R(z) = [[cos z, sin z], [-sin z, cos z]]`.
pub fn rotation(z: f64) -> Mat2 {
    let (s, c) = z.sin_cos();
    [[c, s], [-s, c]]
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

pub fn mat2_apply(a: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

/// Lag-indexed sequence of 2x2 (cross-)covariance matrices, stored for
/// `tau >= 0` only; negative lags are served through `Omega(-tau) = Omega(tau)^T`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CovSequence {
    entries: BTreeMap<i64, Mat2>,
}

impl CovSequence {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `Omega(tau)`; a negative lag is stored as the transpose at `-tau`.
    /// The lag-zero matrix must be symmetric positive semidefinite.
    pub fn insert(&mut self, tau: i64, m: Mat2) -> Result<()> {
        let (tau, m) = if tau < 0 {
            (-tau, mat2_transpose(&m))
        } else {
            (tau, m)
        };
        if tau == 0 {
            let scale = m[0][0].abs().max(m[1][1].abs()).max(1.0);
            ensure((m[0][1] - m[1][0]).abs() <= 1e-9 * scale, || {
                "lag-zero covariance must be symmetric".into()
            })?;
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            ensure(
                m[0][0] >= -1e-12 && m[1][1] >= -1e-12 && det >= -1e-9 * scale * scale,
                || "lag-zero covariance must be positive semidefinite".into(),
            )?;
        }
        self.entries.insert(tau, m);
        Ok(())
    }

    pub fn get(&self, tau: i64) -> Option<Mat2> {
        if tau >= 0 {
            self.entries.get(&tau).copied()
        } else {
            self.entries.get(&-tau).map(mat2_transpose)
        }
    }

    pub fn max_lag(&self) -> Option<i64> {
        self.entries.keys().next_back().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Mat2)> {
        self.entries.iter().map(|(&k, v)| (k, v))
    }
}
