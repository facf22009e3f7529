//! Seeded benchmark sweeps.
//!
//! A sweep walks a parameter grid; at each generation point
//! `(m, n, k, rho, trial)` it derives a trial seed, draws one
//! `(x, A, y)` instance, and runs every requested algorithm (and, for the
//! redundancy experiments, every α variant) on that same instance, so all
//! comparisons are paired. Records are emitted in the deterministic
//! nested-loop order `m → n → k → rho → trial → k_select → α → algorithm`
//! regardless of how many worker threads execute the trials.
//!
//! Trial seeds are FNV-1a hashes of
//! `"{base_seed}:{experiment}:m={m}:n={n}:k={k}:trial={trial}"`
//! (see [`crate::rng::derive_seed`]); the flip ratio, the sparsity handed
//! to the algorithms, and the α variant are deliberately excluded so that
//! those comparisons stay paired on identical draws. Within a trial the
//! stream order is: support indices, signal values, matrix entries, then
//! one uniform per measurement for the sign flips.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{biht_l2_recover, passive_recover, BihtParams, PassiveParams};
use crate::error::{Error, Result};
use crate::history::{history_recover, AlphaMode, HistoryParams, RecoveryResult};
use crate::rng::{derive_seed, Rng};
use crate::signal_model::{
    apply_sign_flips, gen_measurement_matrix, gen_sparse_signal, measure, recovery_error,
    support_detection_accuracy, BitMeasurements, MeasurementEnsemble,
};

/// The experiments the harness knows how to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Support detection accuracy of adaptive α against fixed α ∈ {1,2,4,8}.
    AlphaSda,
    /// CPU time of the same α variants.
    AlphaTime,
    /// Recovery error as the measurement count grows.
    ErrorVsM,
    /// Recovery error as the sparsity grows.
    ErrorVsK,
    /// Recovery error as the sign-flip ratio grows.
    ErrorVsRho,
    /// Recovery error when the algorithms are handed a wrong sparsity.
    MisspecifiedK,
    /// Total per-algorithm running time at the reference operating point.
    RuntimeTable,
}

impl Experiment {
    pub fn id(&self) -> &'static str {
        match self {
            Experiment::AlphaSda => "alpha_sda",
            Experiment::AlphaTime => "alpha_time",
            Experiment::ErrorVsM => "error_vs_m",
            Experiment::ErrorVsK => "error_vs_k",
            Experiment::ErrorVsRho => "error_vs_rho",
            Experiment::MisspecifiedK => "misspecified_k",
            Experiment::RuntimeTable => "runtime_table",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        Self::all()
            .iter()
            .copied()
            .find(|e| e.id() == id)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown experiment '{id}'; expected one of {}",
                    Self::all()
                        .iter()
                        .map(|e| e.id())
                        .collect::<Vec<_>>()
                        .join(", ")
                ))
            })
    }

    pub fn all() -> [Experiment; 7] {
        [
            Experiment::AlphaSda,
            Experiment::AlphaTime,
            Experiment::ErrorVsM,
            Experiment::ErrorVsK,
            Experiment::ErrorVsRho,
            Experiment::MisspecifiedK,
            Experiment::RuntimeTable,
        ]
    }

    /// α-variant experiments compare several redundancy settings per trial.
    fn is_alpha_experiment(&self) -> bool {
        matches!(self, Experiment::AlphaSda | Experiment::AlphaTime)
    }
}

/// Recovery algorithms runnable by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    History,
    BihtL2,
    Passive,
}

impl Algorithm {
    pub fn id(&self) -> &'static str {
        match self {
            Algorithm::History => "history",
            Algorithm::BihtL2 => "biht_l2",
            Algorithm::Passive => "passive",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        [Algorithm::History, Algorithm::BihtL2, Algorithm::Passive]
            .into_iter()
            .find(|a| a.id() == id)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm '{id}'")))
    }
}

/// A scalar-or-list config field: `4000` and `[200, 4000]` both parse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid<T> {
    Scalar(T),
    List(Vec<T>),
}

impl<T: Clone> Grid<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            Grid::Scalar(v) => vec![v.clone()],
            Grid::List(v) => v.clone(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Grid::List(v) if v.is_empty())
    }
}

impl<T> From<T> for Grid<T> {
    fn from(v: T) -> Self {
        Grid::Scalar(v)
    }
}

impl<T> From<Vec<T>> for Grid<T> {
    fn from(v: Vec<T>) -> Self {
        Grid::List(v)
    }
}

/// Full description of one sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub experiment: Experiment,
    pub m: Grid<usize>,
    pub n: Grid<usize>,
    pub k: Grid<usize>,
    pub rho: Grid<f64>,
    /// Sparsity handed to the algorithms; defaults to the true `k`.
    /// Only the misspecification experiment may set it explicitly.
    pub k_select: Option<Grid<usize>>,
    pub trials: usize,
    pub base_seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub alpha_mode: AlphaMode,
    pub biht_max_iters: usize,
    pub biht_step_size: f64,
}

/// The same fields, all optional, as they may appear in a JSON config
/// file; anything omitted keeps the experiment's default.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepConfigPatch {
    experiment: Option<Experiment>,
    m: Option<Grid<usize>>,
    n: Option<Grid<usize>>,
    k: Option<Grid<usize>>,
    rho: Option<Grid<f64>>,
    k_select: Option<Grid<usize>>,
    trials: Option<usize>,
    base_seed: Option<u64>,
    algorithms: Option<Vec<Algorithm>>,
    alpha_mode: Option<AlphaMode>,
    biht_max_iters: Option<usize>,
    biht_step_size: Option<f64>,
}

impl SweepConfig {
    /// Paper-style defaults for each experiment; grids are overridable.
    pub fn defaults_for(experiment: Experiment) -> Self {
        let m_curve: Grid<usize> = vec![200, 400, 800, 1500, 2000, 3000, 4000].into();
        let base = Self {
            experiment,
            m: Grid::Scalar(4000),
            n: Grid::Scalar(1000),
            k: Grid::Scalar(10),
            rho: Grid::Scalar(0.1),
            k_select: None,
            trials: 100,
            base_seed: 42,
            algorithms: vec![Algorithm::History, Algorithm::BihtL2, Algorithm::Passive],
            alpha_mode: AlphaMode::adaptive_default(),
            biht_max_iters: 200,
            biht_step_size: 1.0,
        };
        match experiment {
            Experiment::AlphaSda | Experiment::AlphaTime => Self {
                m: m_curve,
                algorithms: vec![Algorithm::History],
                ..base
            },
            Experiment::ErrorVsM => Self { m: m_curve, ..base },
            Experiment::ErrorVsK => Self {
                k: vec![10, 25, 50, 100, 150, 200].into(),
                ..base
            },
            Experiment::ErrorVsRho => Self {
                rho: vec![0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45].into(),
                ..base
            },
            Experiment::MisspecifiedK => Self {
                k_select: Some((1..=20).collect::<Vec<_>>().into()),
                ..base
            },
            Experiment::RuntimeTable => Self {
                biht_max_iters: 100,
                ..base
            },
        }
    }

    /// Parses a JSON config; the file must name the experiment.
    pub fn from_json(json: &str) -> Result<Self> {
        let patch: SweepConfigPatch =
            serde_json::from_str(json).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let experiment = patch
            .experiment
            .ok_or_else(|| Error::InvalidConfig("config must name an experiment".into()))?;
        Self::from_patch(experiment, patch)
    }

    /// Parses a JSON config against a caller-chosen experiment; a config
    /// naming a different experiment is rejected.
    pub fn from_json_for(experiment: Experiment, json: &str) -> Result<Self> {
        let patch: SweepConfigPatch =
            serde_json::from_str(json).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        if let Some(named) = patch.experiment {
            if named != experiment {
                return Err(Error::InvalidConfig(format!(
                    "config names experiment '{}' but '{}' was requested",
                    named.id(),
                    experiment.id()
                )));
            }
        }
        Self::from_patch(experiment, patch)
    }

    fn from_patch(experiment: Experiment, patch: SweepConfigPatch) -> Result<Self> {
        let defaults = Self::defaults_for(experiment);
        let config = Self {
            experiment,
            m: patch.m.unwrap_or(defaults.m),
            n: patch.n.unwrap_or(defaults.n),
            k: patch.k.unwrap_or(defaults.k),
            rho: patch.rho.unwrap_or(defaults.rho),
            k_select: patch.k_select.or(defaults.k_select),
            trials: patch.trials.unwrap_or(defaults.trials),
            base_seed: patch.base_seed.unwrap_or(defaults.base_seed),
            algorithms: patch.algorithms.unwrap_or(defaults.algorithms),
            alpha_mode: patch.alpha_mode.unwrap_or(defaults.alpha_mode),
            biht_max_iters: patch.biht_max_iters.unwrap_or(defaults.biht_max_iters),
            biht_step_size: patch.biht_step_size.unwrap_or(defaults.biht_step_size),
        };
        config.validate()?;
        Ok(config)
    }

    /// Rejects any grid point that would violate a module precondition,
    /// before any work starts.
    pub fn validate(&self) -> Result<()> {
        for (name, grid) in [("m", &self.m), ("n", &self.n), ("k", &self.k)] {
            if grid.is_empty() {
                return Err(Error::InvalidConfig(format!("grid '{name}' is empty")));
            }
            if grid.values().contains(&0) {
                return Err(Error::InvalidConfig(format!("grid '{name}' contains 0")));
            }
        }
        if self.rho.is_empty() {
            return Err(Error::InvalidConfig("grid 'rho' is empty".into()));
        }
        for rho in self.rho.values() {
            if !(0.0..0.5).contains(&rho) {
                return Err(Error::InvalidConfig(format!(
                    "rho grid value {rho} outside [0, 0.5); exactly 0.5 destroys all information \
                     and violates the noise model's precondition"
                )));
            }
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be >= 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidConfig("algorithms list is empty".into()));
        }
        let mut seen = Vec::new();
        for algo in &self.algorithms {
            if seen.contains(algo) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate algorithm '{}'",
                    algo.id()
                )));
            }
            seen.push(*algo);
        }
        if self.experiment.is_alpha_experiment() && self.algorithms != vec![Algorithm::History] {
            return Err(Error::InvalidConfig(
                "alpha experiments compare redundancy settings and run 'history' only".into(),
            ));
        }
        if self.k_select.is_some() && self.experiment != Experiment::MisspecifiedK {
            return Err(Error::InvalidConfig(
                "k_select is only meaningful for the misspecified_k experiment".into(),
            ));
        }
        if let Some(ks) = &self.k_select {
            if ks.is_empty() {
                return Err(Error::InvalidConfig("grid 'k_select' is empty".into()));
            }
            if ks.values().contains(&0) {
                return Err(Error::InvalidConfig("grid 'k_select' contains 0".into()));
            }
        }
        if self.biht_max_iters == 0 {
            return Err(Error::InvalidConfig("biht_max_iters must be >= 1".into()));
        }
        if !(self.biht_step_size > 0.0) {
            return Err(Error::InvalidConfig("biht_step_size must be > 0".into()));
        }
        match self.alpha_mode {
            AlphaMode::Fixed { alpha } if !(alpha >= 1.0) => {
                return Err(Error::InvalidConfig(format!(
                    "fixed alpha must be >= 1, got {alpha}"
                )))
            }
            AlphaMode::Adaptive { alpha0, tau } if !(alpha0 >= 0.0) || !(tau > 0.0) => {
                return Err(Error::InvalidConfig(format!(
                    "adaptive alpha needs alpha0 >= 0 and tau > 0, got alpha0={alpha0}, tau={tau}"
                )))
            }
            _ => {}
        }

        // Per-point feasibility.
        let selected = self.effective_k_select();
        for &m in &self.m.values() {
            for &n in &self.n.values() {
                for &k in &self.k.values() {
                    if k > n {
                        return Err(Error::InvalidConfig(format!(
                            "grid point k={k} > n={n} cannot generate a signal"
                        )));
                    }
                    let ks_list = selected.clone().unwrap_or_else(|| vec![k]);
                    for k_sel in ks_list {
                        if k_sel > n {
                            return Err(Error::InvalidConfig(format!("k_select={k_sel} > n={n}")));
                        }
                        if self.algorithms.contains(&Algorithm::History) && k_sel >= m.min(n + 1) {
                            return Err(Error::InvalidConfig(format!(
                                "k_select={k_sel} needs k_select <= min(n, m-1) at m={m}, n={n}"
                            )));
                        }
                        if self.algorithms.contains(&Algorithm::Passive) && n < 2 {
                            return Err(Error::InvalidConfig(
                                "passive's default gamma needs n >= 2".into(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn effective_k_select(&self) -> Option<Vec<usize>> {
        self.k_select.as_ref().map(|g| g.values())
    }

    /// α variants exercised per trial: the configured mode for ordinary
    /// experiments; adaptive plus fixed {1, 2, 4, 8} for the α studies.
    fn alpha_variants(&self) -> Vec<AlphaMode> {
        if self.experiment.is_alpha_experiment() {
            let adaptive = match self.alpha_mode {
                AlphaMode::Adaptive { .. } => self.alpha_mode,
                AlphaMode::Fixed { .. } => AlphaMode::adaptive_default(),
            };
            let mut variants = vec![adaptive];
            for alpha in [1.0, 2.0, 4.0, 8.0] {
                variants.push(AlphaMode::Fixed { alpha });
            }
            variants
        } else {
            vec![self.alpha_mode]
        }
    }
}

/// One (grid point, trial, algorithm) outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub experiment: Experiment,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    pub k_select: usize,
    /// α descriptor for history records, `-` for baselines.
    pub alpha: String,
    pub trial: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub error: f64,
    pub sda: f64,
    pub time_s: f64,
    pub status: String,
}

/// Aggregated over trials at one grid point for one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub experiment: Experiment,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    pub k_select: usize,
    pub alpha: String,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub mean_error: f64,
    pub mean_sda: f64,
    pub total_time_s: f64,
}

/// One generation point: everything needed to redraw its instance.
#[derive(Debug, Clone, Copy)]
struct GenerationPoint {
    m: usize,
    n: usize,
    k: usize,
    rho: f64,
    trial: usize,
    seed: u64,
}

/// Runs a sweep and returns records in deterministic order.
///
/// `threads` = 0 uses all available cores; the runtime-table experiment
/// always runs single-threaded so its timings are comparable.
pub fn run_sweep(config: &SweepConfig, threads: usize) -> Result<Vec<TrialRecord>> {
    config.validate()?;

    let mut points = Vec::new();
    for &m in &config.m.values() {
        for &n in &config.n.values() {
            for &k in &config.k.values() {
                for &rho in &config.rho.values() {
                    for trial in 0..config.trials {
                        let seed =
                            derive_seed(config.base_seed, config.experiment.id(), m, n, k, trial);
                        points.push(GenerationPoint {
                            m,
                            n,
                            k,
                            rho,
                            trial,
                            seed,
                        });
                    }
                }
            }
        }
    }

    let sequential = threads == 1 || config.experiment == Experiment::RuntimeTable;
    let nested: Vec<Vec<TrialRecord>> = if sequential {
        points
            .iter()
            .map(|p| run_generation_point(config, p))
            .collect::<Result<_>>()?
    } else if threads == 0 {
        points
            .par_iter()
            .map(|p| run_generation_point(config, p))
            .collect::<std::result::Result<_, Error>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {e}")))?;
        pool.install(|| {
            points
                .par_iter()
                .map(|p| run_generation_point(config, p))
                .collect::<std::result::Result<_, Error>>()
        })?
    };

    Ok(nested.into_iter().flatten().collect())
}

/// Convenience wrapper for the α-comparison study.
pub fn sda_alpha_experiment(config: &SweepConfig, threads: usize) -> Result<Vec<TrialRecord>> {
    if !config.experiment.is_alpha_experiment() {
        return Err(Error::InvalidConfig(format!(
            "expected an alpha experiment, got '{}'",
            config.experiment.id()
        )));
    }
    run_sweep(config, threads)
}

fn run_generation_point(config: &SweepConfig, point: &GenerationPoint) -> Result<Vec<TrialRecord>> {
    let mut rng = Rng::from_seed(point.seed);
    let x = gen_sparse_signal(point.n, point.k, &mut rng)?;
    let a = gen_measurement_matrix(point.m, point.n, &mut rng)?;
    let clean = measure(&a, &x)?;
    let y = apply_sign_flips(&clean, point.rho, &mut rng)?;

    let k_selects = config.effective_k_select().unwrap_or_else(|| vec![point.k]);
    let variants = config.alpha_variants();

    let mut records = Vec::new();
    for &k_select in &k_selects {
        for alpha_mode in &variants {
            for &algorithm in &config.algorithms {
                let (result, alpha_label) =
                    run_algorithm(config, algorithm, &y, &a, k_select, alpha_mode)?;
                let (error, sda) = if result.status.is_success() {
                    (
                        recovery_error(&x, &result.x_star)?,
                        support_detection_accuracy(x.support(), &result.support)?,
                    )
                } else {
                    // Failed trials count as a zero estimate.
                    (1.0, 0.0)
                };
                records.push(TrialRecord {
                    experiment: config.experiment,
                    m: point.m,
                    n: point.n,
                    k: point.k,
                    rho: point.rho,
                    k_select,
                    alpha: alpha_label,
                    trial: point.trial,
                    seed: point.seed,
                    algorithm,
                    error,
                    sda,
                    time_s: result.wall_time,
                    status: result.status.label().to_string(),
                });
            }
        }
    }
    Ok(records)
}

fn run_algorithm(
    config: &SweepConfig,
    algorithm: Algorithm,
    y: &BitMeasurements,
    a: &MeasurementEnsemble,
    k_select: usize,
    alpha_mode: &AlphaMode,
) -> Result<(RecoveryResult, String)> {
    match algorithm {
        Algorithm::History => {
            let params = HistoryParams::new(k_select, *alpha_mode)?;
            Ok((history_recover(y, a, &params)?, alpha_mode.descriptor()))
        }
        Algorithm::BihtL2 => {
            let params = BihtParams::new(k_select, config.biht_max_iters, config.biht_step_size)?;
            Ok((biht_l2_recover(y, a, &params)?, "-".to_string()))
        }
        Algorithm::Passive => {
            let params = PassiveParams::with_default_gamma(k_select, a.n(), a.m())?;
            Ok((passive_recover(y, a, &params)?, "-".to_string()))
        }
    }
}

/// Grid point identity used when grouping records: (m, n, k, rho bits,
/// k_select, alpha descriptor, algorithm).
type GroupKey = (usize, usize, usize, u64, usize, String, Algorithm);

/// Arithmetic means over trials, grouped per grid point and algorithm in
/// first-seen record order. Failed trials already carry error 1 and SDA 0.
pub fn aggregate(records: &[TrialRecord]) -> Result<Vec<SummaryRow>> {
    if records.is_empty() {
        return Err(Error::EmptyInput("no records to aggregate".into()));
    }
    let mut rows: Vec<SummaryRow> = Vec::new();
    let mut index: std::collections::HashMap<GroupKey, usize> = std::collections::HashMap::new();
    for r in records {
        let key = (
            r.m,
            r.n,
            r.k,
            r.rho.to_bits(),
            r.k_select,
            r.alpha.clone(),
            r.algorithm,
        );
        let at = *index.entry(key).or_insert_with(|| {
            rows.push(SummaryRow {
                experiment: r.experiment,
                m: r.m,
                n: r.n,
                k: r.k,
                rho: r.rho,
                k_select: r.k_select,
                alpha: r.alpha.clone(),
                algorithm: r.algorithm,
                trials: 0,
                mean_error: 0.0,
                mean_sda: 0.0,
                total_time_s: 0.0,
            });
            rows.len() - 1
        });
        let row = &mut rows[at];
        row.trials += 1;
        row.mean_error += r.error;
        row.mean_sda += r.sda;
        row.total_time_s += r.time_s;
    }
    for row in rows.iter_mut() {
        row.mean_error /= row.trials as f64;
        row.mean_sda /= row.trials as f64;
    }
    Ok(rows)
}

/// CSV header shared by every record file.
pub const CSV_HEADER: [&str; 14] = [
    "experiment",
    "m",
    "n",
    "k",
    "rho",
    "k_select",
    "alpha",
    "trial",
    "seed",
    "algorithm",
    "error",
    "sda",
    "time_s",
    "status",
];

/// Writes records as UTF-8 CSV with LF line endings; floats are printed
/// shortest-round-trip so re-parsing reproduces them exactly.
pub fn write_csv<W: Write>(records: &[TrialRecord], writer: W) -> std::io::Result<()> {
    let mut out = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    out.write_record(CSV_HEADER)?;
    for r in records {
        out.write_record([
            r.experiment.id().to_string(),
            r.m.to_string(),
            r.n.to_string(),
            r.k.to_string(),
            format!("{}", r.rho),
            r.k_select.to_string(),
            r.alpha.clone(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.algorithm.id().to_string(),
            format!("{}", r.error),
            format!("{}", r.sda),
            format!("{}", r.time_s),
            r.status.clone(),
        ])?;
    }
    out.flush()
}

/// Records rendered to CSV in memory.
pub fn csv_bytes(records: &[TrialRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory cannot fail");
    buf
}
