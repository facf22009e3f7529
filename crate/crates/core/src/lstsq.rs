//! Dense overdetermined least squares ("left matrix divide") and the
//! sparse post-processing operators applied after coefficient recovery.
//!
//! The solver is Householder QR without pivoting. Rank deficiency is
//! detected from the R diagonal (threshold `1e-10` relative to its largest
//! entry) and reported with the offending column for diagnosis rather than
//! silently regularized.

use crate::error::{Error, Result};
use crate::signal_model::{l2_norm, BitMeasurements, MeasurementEnsemble};

/// Relative R-diagonal threshold below which columns are declared
/// numerically dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// A column-subset view `A_S` of a measurement ensemble.
#[derive(Debug, Clone)]
pub struct SubmatrixView<'a> {
    source: &'a MeasurementEnsemble,
    columns: Vec<usize>,
}

impl<'a> SubmatrixView<'a> {
    /// Selects the columns with indices in `columns`, which must be
    /// strictly ascending, each below N, and fewer than M of them so the
    /// system stays overdetermined.
    pub fn new(source: &'a MeasurementEnsemble, columns: &[usize]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidDimension(
                "column set must be nonempty".into(),
            ));
        }
        if !columns.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "column indices must be strictly ascending".into(),
            ));
        }
        if *columns.last().unwrap() >= source.n() {
            return Err(Error::OutOfRange(format!(
                "column index {} out of range for {} columns",
                columns.last().unwrap(),
                source.n()
            )));
        }
        if columns.len() >= source.m() {
            return Err(Error::InvalidDimension(format!(
                "need |S| < M for an overdetermined system, got |S|={} with M={}",
                columns.len(),
                source.m()
            )));
        }
        Ok(Self {
            source,
            columns: columns.to_vec(),
        })
    }

    /// Row count M of the source.
    pub fn m(&self) -> usize {
        self.source.m()
    }

    /// Number of selected columns |S|.
    pub fn width(&self) -> usize {
        self.columns.len()
    }

    /// The selected column indices.
    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    /// Materializes the submatrix column-major. The gather walks the
    /// source row-major once, which keeps the access pattern sequential.
    pub fn to_col_major(&self) -> Vec<f64> {
        let m = self.m();
        let mut out = vec![0.0; m * self.width()];
        for i in 0..m {
            let row = self.source.row(i);
            for (jj, &j) in self.columns.iter().enumerate() {
                out[jj * m + i] = row[j];
            }
        }
        out
    }
}

/// Householder QR factorization of an M×L matrix with M > L.
///
/// Reflectors are kept unnormalized together with their `tau = 2/(vᵀv)`
/// scalings; R is the upper-triangular L×L factor.
#[derive(Debug, Clone)]
pub struct QrFactorization {
    m: usize,
    l: usize,
    reflectors: Vec<Vec<f64>>,
    taus: Vec<f64>,
    r: Vec<f64>, // row-major L×L, strictly lower part zero
}

impl QrFactorization {
    /// Factors a column-major M×L buffer.
    pub fn factor(col_major: &[f64], m: usize, l: usize) -> Result<Self> {
        if m == 0 || l == 0 || l >= m {
            return Err(Error::InvalidDimension(format!(
                "QR needs 1 <= L < M, got M={m}, L={l}"
            )));
        }
        if col_major.len() != m * l {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries, got {}",
                m * l,
                col_major.len()
            )));
        }
        let mut work = col_major.to_vec();
        let mut reflectors = Vec::with_capacity(l);
        let mut taus = Vec::with_capacity(l);

        for k in 0..l {
            let col = |w: &[f64], j: usize, i: usize| w[j * m + i];
            let norm = (k..m).map(|i| col(&work, k, i).powi(2)).sum::<f64>().sqrt();
            let head = col(&work, k, k);
            let alpha = if head >= 0.0 { -norm } else { norm };
            let mut v: Vec<f64> = (k..m).map(|i| col(&work, k, i)).collect();
            v[0] -= alpha;
            let vtv: f64 = v.iter().map(|x| x * x).sum();
            let tau = if vtv == 0.0 { 0.0 } else { 2.0 / vtv };

            // Reflect the trailing columns; column k becomes alpha·e1 by
            // construction and is written directly.
            for j in (k + 1)..l {
                let w_dot: f64 = v
                    .iter()
                    .enumerate()
                    .map(|(i, &vi)| vi * work[j * m + k + i])
                    .sum();
                let scale = tau * w_dot;
                for (i, &vi) in v.iter().enumerate() {
                    work[j * m + k + i] -= scale * vi;
                }
            }
            work[k * m + k] = alpha;
            for i in (k + 1)..m {
                work[k * m + i] = 0.0;
            }
            reflectors.push(v);
            taus.push(tau);
        }

        let mut r = vec![0.0; l * l];
        for j in 0..l {
            for i in 0..=j {
                r[i * l + j] = work[j * m + i];
            }
        }
        Ok(Self {
            m,
            l,
            reflectors,
            taus,
            r,
        })
    }

    /// Factors the selected columns of a measurement ensemble.
    pub fn factor_view(view: &SubmatrixView<'_>) -> Result<Self> {
        Self::factor(&view.to_col_major(), view.m(), view.width())
    }

    /// The upper-triangular factor, row-major L×L.
    pub fn r(&self) -> &[f64] {
        &self.r
    }

    /// Errors if any R diagonal is below [`RANK_TOLERANCE`] relative to the
    /// largest, naming the first offending column.
    pub fn check_full_rank(&self) -> Result<()> {
        let max_diag = (0..self.l)
            .map(|k| self.r[k * self.l + k].abs())
            .fold(0.0f64, f64::max);
        for k in 0..self.l {
            let d = self.r[k * self.l + k].abs();
            if d <= RANK_TOLERANCE * max_diag || max_diag == 0.0 {
                return Err(Error::RankDeficient(format!(
                    "column {k} has R diagonal {d:.3e} against maximum {max_diag:.3e}"
                )));
            }
        }
        Ok(())
    }

    /// Minimum-residual solution of `min ‖rhs − A c‖₂` via `Qᵀ` then
    /// back-substitution.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "rhs has length {}, expected {}",
                rhs.len(),
                self.m
            )));
        }
        self.check_full_rank()?;
        let mut w = rhs.to_vec();
        for (k, (v, &tau)) in self.reflectors.iter().zip(&self.taus).enumerate() {
            let dot: f64 = v.iter().enumerate().map(|(i, &vi)| vi * w[k + i]).sum();
            let scale = tau * dot;
            for (i, &vi) in v.iter().enumerate() {
                w[k + i] -= scale * vi;
            }
        }
        let mut c = vec![0.0; self.l];
        for k in (0..self.l).rev() {
            let mut s = w[k];
            for j in (k + 1)..self.l {
                s -= self.r[k * self.l + j] * c[j];
            }
            c[k] = s / self.r[k * self.l + k];
        }
        Ok(c)
    }

    /// Re-multiplies `Q·R`, for verifying the factorization.
    pub fn reconstruct(&self) -> Vec<f64> {
        let (m, l) = (self.m, self.l);
        let mut out = vec![0.0; m * l];
        for j in 0..l {
            for i in 0..=j.min(m - 1) {
                out[j * m + i] = self.r[i * l + j];
            }
        }
        for k in (0..l).rev() {
            let v = &self.reflectors[k];
            let tau = self.taus[k];
            for j in 0..l {
                let dot: f64 = v
                    .iter()
                    .enumerate()
                    .map(|(i, &vi)| vi * out[j * m + k + i])
                    .sum();
                let scale = tau * dot;
                for (i, &vi) in v.iter().enumerate() {
                    out[j * m + k + i] -= scale * vi;
                }
            }
        }
        out
    }
}

/// Least-squares coefficients `argmin_c ‖y − A_S c‖₂` ("left matrix
/// divide") with the bits entering as real ±1 values.
pub fn left_divide(a_s: &SubmatrixView<'_>, y: &BitMeasurements) -> Result<Vec<f64>> {
    if y.len() != a_s.m() {
        return Err(Error::DimensionMismatch(format!(
            "bit vector has length {} but submatrix has {} rows",
            y.len(),
            a_s.m()
        )));
    }
    QrFactorization::factor_view(a_s)?.solve(&y.as_reals())
}

/// Keeps the `k` largest-magnitude entries and zeroes the rest; magnitude
/// ties are resolved toward the smaller index.
pub fn hard_threshold(v: &[f64], k: usize) -> Result<Vec<f64>> {
    if k == 0 || k > v.len() {
        return Err(Error::InvalidTargetSize(format!(
            "k must satisfy 1 <= k <= {}, got {k}",
            v.len()
        )));
    }
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b)));
    let mut out = vec![0.0; v.len()];
    for &idx in &order[..k] {
        out[idx] = v[idx];
    }
    Ok(out)
}

/// `v / ‖v‖₂`; an exactly-zero vector is a contract violation signalling
/// total recovery failure upstream.
pub fn normalize(v: &[f64]) -> Result<Vec<f64>> {
    let norm = l2_norm(v);
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|x| x / norm).collect())
}
