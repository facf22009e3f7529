//! Monte-Carlo verification of the mismatch-probability laws.
//!
//! Three checks, all seeded and deterministic:
//!
//! 1. noiseless mismatch rates against `arccos(x_j)/π`,
//! 2. noisy mismatch rates against `((1−2ρ)/π)·arccos(x_j) + ρ` for
//!    ρ ∈ {0.1, 0.3},
//! 3. the Hamming comparison probability for a coefficient gap of 0.3
//!    against its closed-form lower bound.
//!
//! Rate checks use the uniform binomial four-sigma tolerance `2/√samples`.

use crate::error::Result;
use crate::hamming_detect::{estimate_flip_probabilities, flip_probability, lemma2_lower_bound};
use crate::rng::Rng;
use crate::signal_model::{apply_sign_flips, gen_measurement_matrix, measure, SparseSignal};

/// Outcome of one deviation-style check.
#[derive(Debug, Clone)]
pub struct RateCheck {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Outcome of the Hamming-comparison bound check.
#[derive(Debug, Clone)]
pub struct ComparisonCheck {
    pub observed_frequency: f64,
    pub lower_bound: f64,
    pub redraws: usize,
    pub passed: bool,
}

/// Results of all law checks for one seed.
#[derive(Debug, Clone)]
pub struct LawReport {
    pub samples: usize,
    pub seed: u64,
    pub rate_checks: Vec<RateCheck>,
    pub comparison: ComparisonCheck,
}

impl LawReport {
    pub fn all_passed(&self) -> bool {
        self.rate_checks.iter().all(|c| c.passed) && self.comparison.passed
    }

    /// One human-readable line per check.
    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.rate_checks {
            out.push(format!(
                "{}: {} max deviation {:.6} (tolerance {:.6})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.max_deviation,
                c.tolerance
            ));
        }
        let c = &self.comparison;
        out.push(format!(
            "{}: hamming comparison frequency {:.6} over {} redraws (lower bound {:.6})",
            if c.passed { "PASS" } else { "FAIL" },
            c.observed_frequency,
            c.redraws,
            c.lower_bound
        ));
        out
    }
}

/// Probe signal covering positive, negative, zero, and small-positive
/// coefficients: the unit normalization of `(0.8, −0.6, 0, 0.36)`.
pub fn probe_signal() -> SparseSignal {
    SparseSignal::from_unnormalized(vec![0.8, -0.6, 0.0, 0.36]).expect("static probe signal")
}

/// Runs every law check with `samples` measurement rows.
pub fn verify_laws(samples: usize, seed: u64) -> Result<LawReport> {
    let samples = samples.max(100);
    let x = probe_signal();
    let n = x.dimension();
    let tolerance = 2.0 / (samples as f64).sqrt();
    let mut rng = Rng::from_seed(seed);
    let mut rate_checks = Vec::new();

    let a = gen_measurement_matrix(samples, n, &mut rng)?;
    let clean = measure(&a, &x)?;

    let noiseless = estimate_flip_probabilities(&clean, &a)?;
    let max_dev = (0..n)
        .map(|j| {
            let law = flip_probability(x.values()[j], 0.0).unwrap();
            (noiseless.p()[j] - law).abs()
        })
        .fold(0.0f64, f64::max);
    rate_checks.push(RateCheck {
        name: "noiseless mismatch rate".into(),
        max_deviation: max_dev,
        tolerance,
        passed: max_dev <= tolerance,
    });

    for rho in [0.1, 0.3] {
        let noisy = apply_sign_flips(&clean, rho, &mut rng)?;
        let rates = estimate_flip_probabilities(&noisy, &a)?;
        let max_dev = (0..n)
            .map(|j| {
                let law = flip_probability(x.values()[j], rho).unwrap();
                (rates.p()[j] - law).abs()
            })
            .fold(0.0f64, f64::max);
        rate_checks.push(RateCheck {
            name: format!("noisy mismatch rate (rho={rho})"),
            max_deviation: max_dev,
            tolerance,
            passed: max_dev <= tolerance,
        });
    }

    let comparison = comparison_check(&mut rng, samples)?;
    Ok(LawReport {
        samples,
        seed,
        rate_checks,
        comparison,
    })
}

/// Frequency of the better column winning the Hamming comparison for a
/// coefficient gap of 0.3 at M = 1000 rows and rho = 0.1, against the
/// closed-form lower bound.
fn comparison_check(rng: &mut Rng, samples: usize) -> Result<ComparisonCheck> {
    let redraws = (samples / 20).max(100);
    let m = 1000;
    let rho = 0.1;
    let gap = 0.3;
    // Coordinates 0 and 1 differ by exactly `gap`; the third carries the
    // rest of the unit norm.
    let x = SparseSignal::new(vec![gap, 0.0, (1.0 - gap * gap).sqrt()])?;
    let bound = lemma2_lower_bound(m, rho, gap)?;

    let mut wins = 0usize;
    for _ in 0..redraws {
        let a = gen_measurement_matrix(m, 3, rng)?;
        let clean = measure(&a, &x)?;
        let y = apply_sign_flips(&clean, rho, rng)?;
        let rates = estimate_flip_probabilities(&y, &a)?;
        // Integer counts compared through the estimated rates.
        if rates.p()[0] < rates.p()[1] {
            wins += 1;
        }
    }
    let observed = wins as f64 / redraws as f64;
    Ok(ComparisonCheck {
        observed_frequency: observed,
        lower_bound: bound,
        redraws,
        passed: observed >= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_signal_is_unit_norm_with_zero_coordinate() {
        let x = probe_signal();
        assert_eq!(x.dimension(), 4);
        assert_eq!(x.sparsity(), 3);
        assert_eq!(x.values()[2], 0.0);
    }

    #[test]
    fn small_law_run_passes() {
        let report = verify_laws(40_000, 7).unwrap();
        assert_eq!(report.rate_checks.len(), 3);
        assert!(report.all_passed(), "{:#?}", report);
        assert_eq!(report.lines().len(), 4);
    }

    #[test]
    fn report_is_deterministic() {
        let a = verify_laws(5_000, 3).unwrap();
        let b = verify_laws(5_000, 3).unwrap();
        for (x, y) in a.rate_checks.iter().zip(&b.rate_checks) {
            assert_eq!(x.max_deviation, y.max_deviation);
        }
        assert_eq!(
            a.comparison.observed_frequency,
            b.comparison.observed_frequency
        );
    }
}
