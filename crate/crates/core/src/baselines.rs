//! Comparator algorithms: binary iterative hard thresholding with the
//! one-sided ℓ2 objective (BIHT-ℓ2) and the single-pass Passive estimator.
//!
//! Neither baseline is given the flip ratio. Their update rules follow the
//! reference implementations they are usually compared under:
//!
//! - BIHT-ℓ2 starts from the zero vector; its first update direction is
//!   the sign-residual `Aᵀy` (the one-sided step at zero, where the ℓ2
//!   gradient itself vanishes identically), and every later update is
//!   `x ← H_K(x − (τ/M)·Aᵀ(y ∘ min(y ∘ Ax, 0)))`. The `1/M` factor
//!   normalizes the gradient of the unscaled Gaussian ensemble; a raw
//!   unit step diverges. The objective `‖min(y ∘ Ax, 0)‖₂²` is tracked on
//!   the normalized iterate (the update map is scale-equivariant) and the
//!   best iterate seen is returned.
//! - Passive scores coordinates by `s = Aᵀy/M`, soft-thresholds at γ
//!   (default `√(log N / M)`), hard-thresholds to K, and normalizes.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::history::{nonzero_indices, RecoveryResult, RecoveryStatus};
use crate::lstsq::{hard_threshold, normalize};
use crate::signal_model::{BitMeasurements, MeasurementEnsemble};

/// BIHT-ℓ2 configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BihtParams {
    pub k: usize,
    pub max_iters: usize,
    pub step_size: f64,
}

impl BihtParams {
    pub fn new(k: usize, max_iters: usize, step_size: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("sparsity k must be >= 1".into()));
        }
        if max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        if !(step_size > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step_size must be > 0, got {step_size}"
            )));
        }
        Ok(Self {
            k,
            max_iters,
            step_size,
        })
    }

    /// 200 iterations with unit step.
    pub fn with_defaults(k: usize) -> Result<Self> {
        Self::new(k, 200, 1.0)
    }
}

/// Passive configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassiveParams {
    pub k: usize,
    pub gamma: f64,
}

impl PassiveParams {
    pub fn new(k: usize, gamma: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("sparsity k must be >= 1".into()));
        }
        if !(gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be > 0, got {gamma}"
            )));
        }
        Ok(Self { k, gamma })
    }

    /// The usual regularization choice `γ = √(log N / M)`.
    pub fn with_default_gamma(k: usize, n: usize, m: usize) -> Result<Self> {
        if n < 2 || m == 0 {
            return Err(Error::InvalidParameter(format!(
                "default gamma needs n >= 2 and m >= 1, got n={n}, m={m}"
            )));
        }
        Self::new(k, ((n as f64).ln() / m as f64).sqrt())
    }
}

/// One BIHT-ℓ2 run, reduced to what tests need: the accepted-objective
/// trace (non-increasing by construction), the best unnormalized iterate,
/// and the number of update steps performed.
pub(crate) fn biht_iterations(
    y_reals: &[f64],
    a: &MeasurementEnsemble,
    k: usize,
    max_iters: usize,
    step_size: f64,
) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let m = a.m() as f64;
    let mut x = hard_threshold(&a.matvec_transpose(y_reals)?, k)?;
    let mut iterations = 1;
    let mut best = x.clone();
    let mut best_obj = f64::INFINITY;
    let mut accepted = Vec::new();

    loop {
        let ax = a.matvec(&x)?;
        let mut raw_obj = 0.0;
        let mut violation = vec![0.0; ax.len()];
        for (i, (&yi, &si)) in y_reals.iter().zip(&ax).enumerate() {
            let v = (yi * si).min(0.0);
            raw_obj += v * v;
            violation[i] = yi * v;
        }
        let norm_sq: f64 = x.iter().map(|v| v * v).sum();
        let objective = if norm_sq > 0.0 && raw_obj.is_finite() {
            raw_obj / norm_sq
        } else {
            f64::INFINITY
        };
        if objective < best_obj {
            best_obj = objective;
            best = x.clone();
            accepted.push(objective);
        }
        if best_obj == 0.0 || iterations >= max_iters || !norm_sq.is_finite() {
            break;
        }

        let gradient = a.matvec_transpose(&violation)?;
        let scale = step_size / m;
        for (xi, gi) in x.iter_mut().zip(&gradient) {
            *xi -= scale * gi;
        }
        x = hard_threshold(&x, k)?;
        iterations += 1;
    }
    Ok((best, accepted, iterations))
}

/// BIHT-ℓ2 recovery. Always returns the best iterate; the only failure
/// mode is a best iterate that is exactly zero.
pub fn biht_l2_recover(
    y: &BitMeasurements,
    a: &MeasurementEnsemble,
    params: &BihtParams,
) -> Result<RecoveryResult> {
    let started = Instant::now();
    let params = BihtParams::new(params.k, params.max_iters, params.step_size)?;
    if y.len() != a.m() {
        return Err(Error::DimensionMismatch(format!(
            "bit vector has length {} but matrix has {} rows",
            y.len(),
            a.m()
        )));
    }
    if params.k > a.n() {
        return Err(Error::InvalidParameter(format!(
            "sparsity {} exceeds dimension {}",
            params.k,
            a.n()
        )));
    }
    let (best, _trace, iterations) = biht_iterations(
        &y.as_reals(),
        a,
        params.k,
        params.max_iters,
        params.step_size,
    )?;
    let mut result = match normalize(&best) {
        Ok(unit) => {
            let support = nonzero_indices(&unit);
            let coefficients = support.iter().map(|&j| unit[j]).collect();
            RecoveryResult {
                x_star: unit,
                support,
                candidate_support: None,
                coefficients,
                alpha_used: None,
                iterations: Some(iterations),
                wall_time: 0.0,
                status: RecoveryStatus::Success,
            }
        }
        Err(Error::ZeroVector) => {
            let mut failed = RecoveryResult::failure(a.n(), RecoveryStatus::ZeroSolution);
            failed.iterations = Some(iterations);
            failed
        }
        Err(other) => return Err(other),
    };
    result.wall_time = started.elapsed().as_secs_f64();
    Ok(result)
}

/// Passive recovery: score, soft-threshold, hard-threshold, normalize.
/// A γ exceeding every score magnitude zeroes the estimate and is
/// reported as a failure status.
pub fn passive_recover(
    y: &BitMeasurements,
    a: &MeasurementEnsemble,
    params: &PassiveParams,
) -> Result<RecoveryResult> {
    let started = Instant::now();
    let params = PassiveParams::new(params.k, params.gamma)?;
    if y.len() != a.m() {
        return Err(Error::DimensionMismatch(format!(
            "bit vector has length {} but matrix has {} rows",
            y.len(),
            a.m()
        )));
    }
    if params.k > a.n() {
        return Err(Error::InvalidParameter(format!(
            "sparsity {} exceeds dimension {}",
            params.k,
            a.n()
        )));
    }
    let m = a.m() as f64;
    let mut scores = a.matvec_transpose(&y.as_reals())?;
    for s in scores.iter_mut() {
        *s /= m;
        *s = soft_threshold(*s, params.gamma);
    }
    if scores.iter().all(|&s| s == 0.0) {
        let mut failed = RecoveryResult::failure(a.n(), RecoveryStatus::ZeroSolution);
        failed.wall_time = started.elapsed().as_secs_f64();
        return Ok(failed);
    }
    let thresholded = hard_threshold(&scores, params.k)?;
    let mut result = match normalize(&thresholded) {
        Ok(unit) => {
            let support = nonzero_indices(&unit);
            let coefficients = support.iter().map(|&j| unit[j]).collect();
            RecoveryResult {
                x_star: unit,
                support,
                candidate_support: None,
                coefficients,
                alpha_used: None,
                iterations: None,
                wall_time: 0.0,
                status: RecoveryStatus::Success,
            }
        }
        Err(Error::ZeroVector) => RecoveryResult::failure(a.n(), RecoveryStatus::ZeroSolution),
        Err(other) => return Err(other),
    };
    result.wall_time = started.elapsed().as_secs_f64();
    Ok(result)
}

fn soft_threshold(v: f64, gamma: f64) -> f64 {
    if v > gamma {
        v - gamma
    } else if v < -gamma {
        v + gamma
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_seed, Rng};
    use crate::signal_model::{
        apply_sign_flips, gen_measurement_matrix, gen_sparse_signal, l2_norm, measure,
    };

    #[test]
    fn biht_recovers_single_spike_support() {
        let mut hits = 0;
        for trial in 0..100 {
            let seed = derive_seed(31_337, "biht_spike", 2000, 20, 1, trial);
            let mut rng = Rng::from_seed(seed);
            let mut values = vec![0.0; 20];
            values[7] = 1.0;
            let x = crate::signal_model::SparseSignal::new(values).unwrap();
            let a = gen_measurement_matrix(2000, 20, &mut rng).unwrap();
            let y = measure(&a, &x).unwrap();
            let params = BihtParams::with_defaults(1).unwrap();
            let result = biht_l2_recover(&y, &a, &params).unwrap();
            if result.support == vec![7] {
                hits += 1;
            }
        }
        assert!(hits >= 90, "support recovered in only {hits}/100 trials");
    }

    #[test]
    fn biht_objective_trace_is_non_increasing() {
        for seed in 0..6 {
            let mut rng = Rng::from_seed(seed);
            let x = gen_sparse_signal(60, 6, &mut rng).unwrap();
            let a = gen_measurement_matrix(300, 60, &mut rng).unwrap();
            let clean = measure(&a, &x).unwrap();
            let y = apply_sign_flips(&clean, 0.1, &mut rng).unwrap();
            let (_, trace, iterations) = biht_iterations(&y.as_reals(), &a, 6, 80, 1.0).unwrap();
            assert!(!trace.is_empty());
            assert!(
                trace.windows(2).all(|w| w[1] <= w[0]),
                "trace not monotone: {trace:?}"
            );
            assert!((1..=80).contains(&iterations));
        }
    }

    #[test]
    fn biht_output_is_unit_norm_and_sparse_or_failed() {
        for seed in 20..26 {
            let mut rng = Rng::from_seed(seed);
            let x = gen_sparse_signal(40, 4, &mut rng).unwrap();
            let a = gen_measurement_matrix(200, 40, &mut rng).unwrap();
            let y = measure(&a, &x).unwrap();
            let params = BihtParams::new(4, 50, 1.0).unwrap();
            let result = biht_l2_recover(&y, &a, &params).unwrap();
            if result.status.is_success() {
                assert!((l2_norm(&result.x_star) - 1.0).abs() < 1e-12);
                assert!(result.support.len() <= 4);
            } else {
                assert_eq!(l2_norm(&result.x_star), 0.0);
            }
            assert!(result.iterations.unwrap() >= 1);
        }
    }

    #[test]
    fn biht_rejects_zero_max_iters() {
        assert!(BihtParams::new(3, 0, 1.0).is_err());
        assert!(BihtParams::new(0, 10, 1.0).is_err());
        assert!(BihtParams::new(3, 10, 0.0).is_err());
    }

    #[test]
    fn biht_is_deterministic() {
        let mut rng = Rng::from_seed(5);
        let x = gen_sparse_signal(30, 3, &mut rng).unwrap();
        let a = gen_measurement_matrix(150, 30, &mut rng).unwrap();
        let y = measure(&a, &x).unwrap();
        let params = BihtParams::new(3, 40, 1.0).unwrap();
        let first = biht_l2_recover(&y, &a, &params).unwrap();
        let second = biht_l2_recover(&y, &a, &params).unwrap();
        assert_eq!(first.x_star, second.x_star);
        assert_eq!(first.iterations, second.iterations);
    }

    #[test]
    fn passive_selects_dominant_score() {
        // One column aligned with y, the other nearly orthogonal.
        let entries = vec![
            2.0, 0.1, //
            2.0, -0.1, //
            1.5, 0.1, //
            2.5, -0.1,
        ];
        let a = MeasurementEnsemble::from_row_major(entries, 4, 2).unwrap();
        let y = BitMeasurements::new(vec![1, 1, 1, 1], 0.0).unwrap();
        let params = PassiveParams::new(1, 0.05).unwrap();
        let result = passive_recover(&y, &a, &params).unwrap();
        assert!(result.status.is_success());
        assert_eq!(result.support, vec![0]);
        assert!((result.x_star[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn passive_fails_when_gamma_dominates() {
        let entries = vec![0.1, -0.1, 0.2, 0.1];
        let a = MeasurementEnsemble::from_row_major(entries, 2, 2).unwrap();
        let y = BitMeasurements::new(vec![1, 1], 0.0).unwrap();
        let params = PassiveParams::new(1, 10.0).unwrap();
        let result = passive_recover(&y, &a, &params).unwrap();
        assert_eq!(result.status, RecoveryStatus::ZeroSolution);
        assert_eq!(result.status.label(), "zero_solution");
        assert_eq!(l2_norm(&result.x_star), 0.0);
    }

    #[test]
    fn passive_default_gamma_matches_formula() {
        let params = PassiveParams::with_default_gamma(10, 1000, 4000).unwrap();
        assert!((params.gamma - 0.04155645340672775).abs() < 1e-15);
        assert!(PassiveParams::with_default_gamma(10, 1, 4000).is_err());
    }

    #[test]
    fn passive_is_deterministic_and_unit_norm() {
        let mut rng = Rng::from_seed(41);
        let x = gen_sparse_signal(50, 5, &mut rng).unwrap();
        let a = gen_measurement_matrix(500, 50, &mut rng).unwrap();
        let y = measure(&a, &x).unwrap();
        let params = PassiveParams::with_default_gamma(5, 50, 500).unwrap();
        let first = passive_recover(&y, &a, &params).unwrap();
        let second = passive_recover(&y, &a, &params).unwrap();
        assert_eq!(first.x_star, second.x_star);
        assert!(first.status.is_success());
        assert!((l2_norm(&first.x_star) - 1.0).abs() < 1e-12);
        assert!(first.support.len() <= 5);
    }

    #[test]
    fn baselines_validate_dimensions() {
        let a = MeasurementEnsemble::from_row_major(vec![1.0, 2.0], 1, 2).unwrap();
        let y = BitMeasurements::new(vec![1, 1], 0.0).unwrap();
        assert!(biht_l2_recover(&y, &a, &BihtParams::with_defaults(1).unwrap()).is_err());
        assert!(passive_recover(&y, &a, &PassiveParams::new(1, 0.1).unwrap()).is_err());
    }
}
