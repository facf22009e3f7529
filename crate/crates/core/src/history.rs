//! End-to-end recovery: proxy estimation, support selection with a
//! redundancy factor, least squares on the candidate columns, hard
//! thresholding back to the requested sparsity, and normalization.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamming_detect::{adaptive_alpha, estimate_proxy, find_supp, CandidateSupport};
use crate::lstsq::{hard_threshold, left_divide, normalize, SubmatrixView};
use crate::signal_model::{BitMeasurements, MeasurementEnsemble};

/// How the support-redundancy factor α is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaMode {
    /// Constant α ≥ 1.
    Fixed { alpha: f64 },
    /// `α = 1 + α₀·e^(−τ·M/N)`, shrinking as measurements accumulate.
    Adaptive { alpha0: f64, tau: f64 },
}

impl AlphaMode {
    /// The default adaptive schedule: `α₀ = 4`, `τ = 1`.
    pub fn adaptive_default() -> Self {
        AlphaMode::Adaptive {
            alpha0: 4.0,
            tau: 1.0,
        }
    }

    /// Resolves the factor for a concrete problem size.
    pub fn resolve(&self, m: usize, n: usize) -> Result<f64> {
        match *self {
            AlphaMode::Fixed { alpha } => {
                if !(alpha >= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "fixed alpha must be >= 1, got {alpha}"
                    )));
                }
                Ok(alpha)
            }
            AlphaMode::Adaptive { alpha0, tau } => adaptive_alpha(m, n, alpha0, tau),
        }
    }

    /// Short label used in benchmark records, e.g. `adaptive(4,1)` or `fixed(2)`.
    pub fn descriptor(&self) -> String {
        match *self {
            AlphaMode::Fixed { alpha } => format!("fixed({alpha})"),
            AlphaMode::Adaptive { alpha0, tau } => format!("adaptive({alpha0},{tau})"),
        }
    }
}

/// Parameters of a recovery run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryParams {
    pub k: usize,
    pub alpha_mode: AlphaMode,
}

impl HistoryParams {
    pub fn new(k: usize, alpha_mode: AlphaMode) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("sparsity k must be >= 1".into()));
        }
        match alpha_mode {
            AlphaMode::Fixed { alpha } if !(alpha >= 1.0) => {
                return Err(Error::InvalidParameter(format!(
                    "fixed alpha must be >= 1, got {alpha}"
                )))
            }
            AlphaMode::Adaptive { alpha0, tau } => {
                if !(alpha0 >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "alpha0 must be >= 0, got {alpha0}"
                    )));
                }
                if !(tau > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "tau must be > 0, got {tau}"
                    )));
                }
            }
            _ => {}
        }
        Ok(Self { k, alpha_mode })
    }

    /// Sparsity `k` with the default adaptive α schedule.
    pub fn adaptive(k: usize) -> Result<Self> {
        Self::new(k, AlphaMode::adaptive_default())
    }
}

/// Why a recovery run could not produce a unit-norm estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecoveryStatus {
    Success,
    /// The candidate columns were numerically dependent.
    RankDeficient,
    /// Every retained coefficient was zero, so normalization is undefined.
    ZeroSolution,
}

impl RecoveryStatus {
    pub fn is_success(&self) -> bool {
        matches!(self, RecoveryStatus::Success)
    }

    /// Stable label used in CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            RecoveryStatus::Success => "ok",
            RecoveryStatus::RankDeficient => "rank_deficient",
            RecoveryStatus::ZeroSolution => "zero_solution",
        }
    }
}

/// Outcome of a recovery run. On failure `x_star` is the zero vector and
/// `status` explains why; on success `x_star` has unit 2-norm and at most
/// `k` nonzeros.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    pub x_star: Vec<f64>,
    pub support: Vec<usize>,
    pub candidate_support: Option<CandidateSupport>,
    pub coefficients: Vec<f64>,
    pub alpha_used: Option<f64>,
    /// Update steps performed, for iterative algorithms.
    pub iterations: Option<usize>,
    /// Seconds spent inside the recovery call.
    pub wall_time: f64,
    pub status: RecoveryStatus,
}

impl RecoveryResult {
    pub(crate) fn failure(n: usize, status: RecoveryStatus) -> Self {
        Self {
            x_star: vec![0.0; n],
            support: Vec::new(),
            candidate_support: None,
            coefficients: Vec::new(),
            alpha_used: None,
            iterations: None,
            wall_time: 0.0,
            status,
        }
    }
}

pub(crate) fn nonzero_indices(v: &[f64]) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, &x)| x != 0.0)
        .map(|(i, _)| i)
        .collect()
}

/// Effective candidate size `l = round(α·k)` clamped to `[k, min(n, m−1)]`.
fn effective_target_size(alpha: f64, k: usize, m: usize, n: usize) -> Result<usize> {
    let upper = n.min(m.saturating_sub(1));
    if upper < k {
        return Err(Error::InvalidParameter(format!(
            "sparsity k={k} needs k <= min(n, m-1) = {upper}"
        )));
    }
    let rounded = (alpha * k as f64).round() as usize;
    Ok(rounded.clamp(k, upper))
}

/// Full recovery: Hamming proxy, top-`round(α·k)` candidate support, left
/// divide, hard threshold when the candidate set is strictly larger than
/// `k`, normalization.
///
/// Numerical failures (rank-deficient candidates, an all-zero solution)
/// are reported through [`RecoveryResult::status`] so sweeps can record
/// the trial; only precondition violations return `Err`.
pub fn history_recover(
    y: &BitMeasurements,
    a: &MeasurementEnsemble,
    params: &HistoryParams,
) -> Result<RecoveryResult> {
    let started = Instant::now();
    if y.len() != a.m() {
        return Err(Error::DimensionMismatch(format!(
            "bit vector has length {} but matrix has {} rows",
            y.len(),
            a.m()
        )));
    }
    let params = HistoryParams::new(params.k, params.alpha_mode)?;
    let alpha = params.alpha_mode.resolve(a.m(), a.n())?;
    let l = effective_target_size(alpha, params.k, a.m(), a.n())?;

    let proxy = estimate_proxy(y, a)?;
    let candidate = find_supp(&proxy.magnitudes(), l, alpha)?;
    finish_on_support(y, a, candidate, params.k, Some(alpha), started)
}

/// Runs only the coefficient stage on a caller-supplied support,
/// bypassing detection. Used to study the least-squares stage in
/// isolation.
pub fn history_recover_with_support(
    y: &BitMeasurements,
    a: &MeasurementEnsemble,
    forced_support: &[usize],
    k: usize,
) -> Result<RecoveryResult> {
    let started = Instant::now();
    if y.len() != a.m() {
        return Err(Error::DimensionMismatch(format!(
            "bit vector has length {} but matrix has {} rows",
            y.len(),
            a.m()
        )));
    }
    if k == 0 || k > a.n() {
        return Err(Error::InvalidParameter(format!(
            "sparsity must satisfy 1 <= k <= {}, got {k}",
            a.n()
        )));
    }
    let mut indices = forced_support.to_vec();
    indices.sort_unstable();
    indices.dedup();
    if indices.len() != forced_support.len() {
        return Err(Error::InvalidParameter(
            "forced support has duplicate indices".into(),
        ));
    }
    if indices.is_empty() {
        return Err(Error::InvalidParameter(
            "forced support must be nonempty".into(),
        ));
    }
    if indices.len() >= a.m() {
        return Err(Error::InvalidDimension(format!(
            "forced support size {} must be < M = {}",
            indices.len(),
            a.m()
        )));
    }
    if *indices.last().unwrap() >= a.n() {
        return Err(Error::OutOfRange(format!(
            "forced support index {} out of range for {} columns",
            indices.last().unwrap(),
            a.n()
        )));
    }
    let ratio = (indices.len() as f64 / k as f64).max(1.0);
    let candidate = CandidateSupport::from_indices(indices, ratio)?;
    finish_on_support(y, a, candidate, k, None, started)
}

/// Steps shared by both entry points: left divide, optional threshold,
/// normalize, and diagnostics assembly.
fn finish_on_support(
    y: &BitMeasurements,
    a: &MeasurementEnsemble,
    candidate: CandidateSupport,
    k: usize,
    alpha_used: Option<f64>,
    started: Instant,
) -> Result<RecoveryResult> {
    let view = SubmatrixView::new(a, candidate.indices())?;
    let coefficients = match left_divide(&view, y) {
        Ok(c) => c,
        Err(Error::RankDeficient(_)) => {
            let mut failed = RecoveryResult::failure(a.n(), RecoveryStatus::RankDeficient);
            failed.candidate_support = Some(candidate);
            failed.alpha_used = alpha_used;
            failed.wall_time = started.elapsed().as_secs_f64();
            return Ok(failed);
        }
        Err(other) => return Err(other),
    };

    let mut x = vec![0.0; a.n()];
    for (&j, &c) in candidate.indices().iter().zip(&coefficients) {
        x[j] = c;
    }
    if candidate.target_size() > k {
        x = hard_threshold(&x, k)?;
    }
    let x_star = match normalize(&x) {
        Ok(u) => u,
        Err(Error::ZeroVector) => {
            let mut failed = RecoveryResult::failure(a.n(), RecoveryStatus::ZeroSolution);
            failed.candidate_support = Some(candidate);
            failed.coefficients = coefficients;
            failed.alpha_used = alpha_used;
            failed.wall_time = started.elapsed().as_secs_f64();
            return Ok(failed);
        }
        Err(other) => return Err(other),
    };

    let support = nonzero_indices(&x_star);
    Ok(RecoveryResult {
        x_star,
        support,
        candidate_support: Some(candidate),
        coefficients,
        alpha_used,
        iterations: None,
        wall_time: started.elapsed().as_secs_f64(),
        status: RecoveryStatus::Success,
    })
}
