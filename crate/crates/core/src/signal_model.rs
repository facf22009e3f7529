//! Signals, measurement ensembles, 1-bit measurements, and evaluation metrics.
//!
//! The measurement model is `y = sign(A x)` for a unit-norm, exactly
//! K-sparse signal `x` and a dense Gaussian matrix `A`; noise negates each
//! bit independently with probability `rho < 0.5`. `sign(0)` is defined as
//! `+1` everywhere in this crate so that results stay deterministic even on
//! the measure-zero event of an exactly-zero measurement.

use crate::error::{Error, Result};
use crate::rng::Rng;

/// `sign` with the crate-wide convention `sign(0) = +1`.
#[inline]
pub fn sign_pm(v: f64) -> i8 {
    if v < 0.0 {
        -1
    } else {
        1
    }
}

/// An exactly K-sparse signal with unit 2-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    values: Vec<f64>,
    support: Vec<usize>,
}

impl SparseSignal {
    /// Wraps an existing vector, validating every invariant: the nonzero
    /// count defines the support, and the 2-norm must already be 1 within
    /// `1e-12`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDimension("signal length must be >= 1".into()));
        }
        let norm = l2_norm(&values);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "signal must have unit 2-norm, got {norm}"
            )));
        }
        let support: Vec<usize> = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect();
        if support.is_empty() {
            return Err(Error::ZeroVector);
        }
        Ok(Self { values, support })
    }

    /// Builds a signal by normalizing `values` to unit 2-norm.
    pub fn from_unnormalized(values: Vec<f64>) -> Result<Self> {
        let norm = l2_norm(&values);
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let scaled: Vec<f64> = values.iter().map(|v| v / norm).collect();
        Self::new(scaled)
    }

    /// Full length-N coefficient vector.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Sorted indices of the nonzero entries.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Signal dimension N.
    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    /// Number of nonzero entries K.
    pub fn sparsity(&self) -> usize {
        self.support.len()
    }
}

/// Dense M×N measurement matrix stored row-major.
///
/// Row-major is the layout both hot loops want: measuring iterates rows,
/// and the per-column Hamming counts are accumulated in a single row-major
/// pass. Column access is available as an O(M) strided copy.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementEnsemble {
    entries: Vec<f64>,
    m: usize,
    n: usize,
}

impl MeasurementEnsemble {
    /// Wraps a row-major buffer of `m * n` finite entries.
    pub fn from_row_major(entries: Vec<f64>, m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidDimension(format!(
                "matrix dimensions must be >= 1, got {m}x{n}"
            )));
        }
        if entries.len() != m * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {m}x{n} matrix, got {}",
                m * n,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::OutOfRange("matrix entries must be finite".into()));
        }
        Ok(Self { entries, m, n })
    }

    /// Row count M.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Column count N.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Row `i` as a contiguous slice.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Column `j` as an owned vector (strided gather).
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.m).map(|i| self.entries[i * self.n + j]).collect()
    }

    /// Full row-major buffer.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Dense product `A v` for a length-N vector.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "matvec expects length {}, got {}",
                self.n,
                v.len()
            )));
        }
        Ok((0..self.m)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum::<f64>())
            .collect())
    }

    /// Dense product `Aᵀ u` for a length-M vector.
    pub fn matvec_transpose(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "transpose matvec expects length {}, got {}",
                self.m,
                u.len()
            )));
        }
        let mut out = vec![0.0; self.n];
        for (i, &ui) in u.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * ui;
            }
        }
        Ok(out)
    }
}

/// Length-M vector of 1-bit measurements, each exactly −1 or +1.
#[derive(Debug, Clone, PartialEq)]
pub struct BitMeasurements {
    bits: Vec<i8>,
    flip_ratio: f64,
}

impl BitMeasurements {
    /// Wraps a ±1 vector. `flip_ratio` records the noise level used to
    /// generate it (0 for clean measurements); it is bookkeeping only and
    /// is never consumed by any recovery path.
    pub fn new(bits: Vec<i8>, flip_ratio: f64) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidDimension(
                "measurement count must be >= 1".into(),
            ));
        }
        if bits.iter().any(|&b| b != 1 && b != -1) {
            return Err(Error::OutOfRange("bits must be exactly -1 or +1".into()));
        }
        if !(0.0..0.5).contains(&flip_ratio) {
            return Err(Error::InvalidFlipRatio(flip_ratio));
        }
        Ok(Self { bits, flip_ratio })
    }

    /// The ±1 measurements.
    pub fn bits(&self) -> &[i8] {
        &self.bits
    }

    /// Measurement count M.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Flip ratio used when generating this vector; 0 if clean.
    pub fn flip_ratio(&self) -> f64 {
        self.flip_ratio
    }

    /// Bits converted to real ±1.0 values.
    pub fn as_reals(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| f64::from(b)).collect()
    }
}

/// Draws an exactly `k`-sparse unit-norm signal of dimension `n`:
/// `k` uniformly random distinct support indices, standard-normal nonzero
/// values, normalized to unit 2-norm.
///
/// If normalization ever leaves a zero on the support (impossible for
/// continuous draws, conceivable only through underflow), generation is
/// retried once and then fails.
pub fn gen_sparse_signal(n: usize, k: usize, rng: &mut Rng) -> Result<SparseSignal> {
    if n == 0 {
        return Err(Error::InvalidDimension("signal length must be >= 1".into()));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidDimension(format!(
            "sparsity must satisfy 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    for _ in 0..2 {
        let support = rng.distinct_indices(n, k);
        let mut values = vec![0.0; n];
        for &j in &support {
            values[j] = rng.standard_normal();
        }
        let norm = l2_norm(&values);
        if norm == 0.0 {
            continue;
        }
        for v in values.iter_mut() {
            *v /= norm;
        }
        if support.iter().all(|&j| values[j] != 0.0) {
            return Ok(SparseSignal { values, support });
        }
    }
    Err(Error::DegenerateSignal)
}

/// Draws an M×N matrix of i.i.d. standard normal entries.
pub fn gen_measurement_matrix(m: usize, n: usize, rng: &mut Rng) -> Result<MeasurementEnsemble> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidDimension(format!(
            "matrix dimensions must be >= 1, got {m}x{n}"
        )));
    }
    let entries: Vec<f64> = (0..m * n).map(|_| rng.standard_normal()).collect();
    Ok(MeasurementEnsemble { entries, m, n })
}

/// Clean 1-bit measurements `y = sign(A x)`, with `sign(0) = +1`.
///
/// The row product is accumulated over the support only, in ascending
/// index order; skipped zero terms cannot change an IEEE sum.
pub fn measure(a: &MeasurementEnsemble, x: &SparseSignal) -> Result<BitMeasurements> {
    if a.n() != x.dimension() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} columns but signal has dimension {}",
            a.n(),
            x.dimension()
        )));
    }
    let bits = (0..a.m())
        .map(|i| {
            let row = a.row(i);
            let dot: f64 = x.support().iter().map(|&j| row[j] * x.values()[j]).sum();
            sign_pm(dot)
        })
        .collect();
    Ok(BitMeasurements {
        bits,
        flip_ratio: 0.0,
    })
}

/// Independently negates each bit with probability `rho` and records the
/// ratio. One uniform is drawn per bit even when `rho = 0`, so flip
/// patterns at different ratios from the same stream position are nested.
pub fn apply_sign_flips(y: &BitMeasurements, rho: f64, rng: &mut Rng) -> Result<BitMeasurements> {
    if !(0.0..0.5).contains(&rho) {
        return Err(Error::InvalidFlipRatio(rho));
    }
    let bits = y
        .bits()
        .iter()
        .map(|&b| if rng.uniform() < rho { -b } else { b })
        .collect();
    Ok(BitMeasurements {
        bits,
        flip_ratio: rho,
    })
}

/// Relative recovery error `‖x − x*‖₂ / ‖x‖₂`.
pub fn recovery_error(x: &SparseSignal, x_star: &[f64]) -> Result<f64> {
    if x.dimension() != x_star.len() {
        return Err(Error::DimensionMismatch(format!(
            "signal dimension {} vs estimate dimension {}",
            x.dimension(),
            x_star.len()
        )));
    }
    let diff_sq: f64 = x
        .values()
        .iter()
        .zip(x_star)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(diff_sq.sqrt() / l2_norm(x.values()))
}

/// Support detection accuracy: `100 · |est ∩ true| / |true|` percent.
pub fn support_detection_accuracy(true_supp: &[usize], est_supp: &[usize]) -> Result<f64> {
    if true_supp.is_empty() {
        return Err(Error::EmptyTrueSupport);
    }
    let hits = est_supp.iter().filter(|j| true_supp.contains(j)).count();
    Ok(100.0 * hits as f64 / true_supp.len() as f64)
}

pub(crate) fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
