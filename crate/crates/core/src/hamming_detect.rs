//! Hamming-distance support detection.
//!
//! For a unit-norm signal and Gaussian rows, the probability that a
//! measurement bit disagrees with the sign of the j-th matrix entry is
//! `arccos(x_j)/π`; under sign-flip noise of ratio `rho` it becomes
//! `((1−2ρ)/π)·arccos(x_j) + ρ`. Both laws are strictly decreasing in
//! `x_j`, so the per-column Hamming distances `H(y, A_j)/M` rank the
//! coefficients without any knowledge of the noise level. The proxy
//! `h_j = cos(π·P̂_j)` turns the empirical mismatch rate back into an
//! amplitude surrogate, and the candidate support is the index set of the
//! largest `round(α·K)` proxy magnitudes.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::signal_model::{sign_pm, BitMeasurements, MeasurementEnsemble};

/// Empirical per-column sign-mismatch rates `P̂_j = H(y, A_j)/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipProbabilityVector {
    p: Vec<f64>,
    m: usize,
}

impl FlipProbabilityVector {
    /// The rates, each in `[0, 1]`.
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// Measurement count the rates were estimated from.
    pub fn m(&self) -> usize {
        self.m
    }
}

/// Amplitude proxies `h_j = cos(π·P_j)`, each in `[−1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxyVector {
    h: Vec<f64>,
}

impl ProxyVector {
    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// Elementwise magnitudes `|h_j|`, the ranking key for support selection.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.h.iter().map(|v| v.abs()).collect()
    }
}

/// Candidate support produced by top-`l` proxy selection.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSupport {
    indices: Vec<usize>,
    alpha_used: f64,
    target_size: usize,
}

impl CandidateSupport {
    /// Wraps an explicit index set (strictly ascending, nonempty).
    pub fn from_indices(indices: Vec<usize>, alpha_used: f64) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidTargetSize(
                "candidate support must be nonempty".into(),
            ));
        }
        if !indices.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "candidate indices must be strictly ascending".into(),
            ));
        }
        let target_size = indices.len();
        Ok(Self {
            indices,
            alpha_used,
            target_size,
        })
    }

    /// Sorted candidate indices.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Redundancy factor that produced the target size.
    pub fn alpha_used(&self) -> f64 {
        self.alpha_used
    }

    /// Requested selection size `l = |indices|`.
    pub fn target_size(&self) -> usize {
        self.target_size
    }
}

/// The constants of the detection-probability lower bound:
/// `C1 = 1/(4M)` and `C2 = π²/(4M(1−2ρ)²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Constants {
    pub c1: f64,
    pub c2: f64,
}

impl Lemma2Constants {
    pub fn new(m: usize, rho: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDimension(
                "measurement count must be >= 1".into(),
            ));
        }
        if !(0.0..0.5).contains(&rho) {
            return Err(Error::InvalidFlipRatio(rho));
        }
        let m = m as f64;
        let shrink = 1.0 - 2.0 * rho;
        Ok(Self {
            c1: 1.0 / (4.0 * m),
            c2: PI * PI / (4.0 * m * shrink * shrink),
        })
    }
}

/// Noiseless mismatch probability `arccos(x_j)/π`.
pub fn app_probability(x_j: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x_j) {
        return Err(Error::OutOfRange(format!(
            "coefficient must lie in [-1, 1], got {x_j}"
        )));
    }
    Ok(x_j.acos() / PI)
}

/// Mismatch probability under sign-flip noise:
/// `((1−2ρ)/π)·arccos(x_j) + ρ`.
pub fn flip_probability(x_j: f64, rho: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&rho) {
        return Err(Error::InvalidFlipRatio(rho));
    }
    Ok((1.0 - 2.0 * rho) * app_probability(x_j)? + rho)
}

/// Expected Hamming distance `M·P_j` of the binomial mismatch count.
pub fn expected_hamming(x_j: f64, rho: f64, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidDimension(
            "measurement count must be >= 1".into(),
        ));
    }
    Ok(m as f64 * flip_probability(x_j, rho)?)
}

/// Lower bound `1 + C1 − C2·ε⁻²` on the probability that the column of the
/// larger coefficient wins the Hamming comparison when `x_u − x_v > ε`.
///
/// The raw formula is returned even when it is vacuous (≤ 0); callers
/// decide informativeness.
pub fn lemma2_lower_bound(m: usize, rho: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::OutOfRange(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let constants = Lemma2Constants::new(m, rho)?;
    Ok(1.0 + constants.c1 - constants.c2 / (eps * eps))
}

/// Number of positions where `y_i` differs from `sign(column_i)`,
/// with `sign(0) = +1`.
pub fn hamming_distance(y: &BitMeasurements, column: &[f64]) -> Result<usize> {
    if y.len() != column.len() {
        return Err(Error::DimensionMismatch(format!(
            "bit vector has length {} but column has length {}",
            y.len(),
            column.len()
        )));
    }
    Ok(y.bits()
        .iter()
        .zip(column)
        .filter(|(&b, &c)| b != sign_pm(c))
        .count())
}

/// Empirical mismatch rates for every column, in one row-major pass.
///
/// Counts are integers, so the result is identical however the pass is
/// ordered or parallelized.
pub fn estimate_flip_probabilities(
    y: &BitMeasurements,
    a: &MeasurementEnsemble,
) -> Result<FlipProbabilityVector> {
    if y.len() != a.m() {
        return Err(Error::DimensionMismatch(format!(
            "bit vector has length {} but matrix has {} rows",
            y.len(),
            a.m()
        )));
    }
    // Counts accumulate in f64 (exact for any feasible M) with the bit
    // branch hoisted out of the inner loop; this form vectorizes to the
    // same throughput as a fused multiply-add pass. The comparisons encode
    // sign(0) = +1.
    let mut counts = vec![0.0f64; a.n()];
    for (i, &bit) in y.bits().iter().enumerate() {
        let row = a.row(i);
        if bit > 0 {
            for (count, &entry) in counts.iter_mut().zip(row) {
                *count += if entry < 0.0 { 1.0 } else { 0.0 };
            }
        } else {
            for (count, &entry) in counts.iter_mut().zip(row) {
                *count += if entry >= 0.0 { 1.0 } else { 0.0 };
            }
        }
    }
    let m = a.m();
    let p = counts.iter().map(|&c| c / m as f64).collect();
    Ok(FlipProbabilityVector { p, m })
}

/// Amplitude proxies `h_j = cos(π·H(y, A_j)/M)` for every column; O(MN).
pub fn estimate_proxy(y: &BitMeasurements, a: &MeasurementEnsemble) -> Result<ProxyVector> {
    let rates = estimate_flip_probabilities(y, a)?;
    let h = rates.p().iter().map(|&p| (PI * p).cos()).collect();
    Ok(ProxyVector { h })
}

/// Redundancy factor `α = 1 + α₀·e^(−τ·M/N)`: large when measurements are
/// scarce, decaying to 1 as M grows.
pub fn adaptive_alpha(m: usize, n: usize, alpha0: f64, tau: f64) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidDimension(format!(
            "m and n must be >= 1, got m={m}, n={n}"
        )));
    }
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
    Ok(1.0 + alpha0 * (-tau * m as f64 / n as f64).exp())
}

/// Indices of the `l` largest magnitudes, ties broken toward the smaller
/// index; returned sorted ascending. `alpha` is recorded on the result for
/// diagnostics.
pub fn find_supp(magnitudes: &[f64], l: usize, alpha: f64) -> Result<CandidateSupport> {
    if l == 0 || l > magnitudes.len() {
        return Err(Error::InvalidTargetSize(format!(
            "target size must satisfy 1 <= l <= {}, got {l}",
            magnitudes.len()
        )));
    }
    let mut order: Vec<usize> = (0..magnitudes.len()).collect();
    order.sort_by(|&a, &b| {
        magnitudes[b]
            .partial_cmp(&magnitudes[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut indices = order[..l].to_vec();
    indices.sort_unstable();
    Ok(CandidateSupport {
        indices,
        alpha_used: alpha,
        target_size: l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use crate::signal_model::gen_measurement_matrix;
    use proptest::prelude::*;

    #[test]
    fn app_probability_reference_points() {
        assert!((app_probability(0.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(app_probability(1.0).unwrap(), 0.0);
        assert!((app_probability(-1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((app_probability(0.5).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(app_probability(1.1).is_err());
        assert!(app_probability(-1.1).is_err());
    }

    #[test]
    fn flip_probability_reference_points() {
        for x in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert_eq!(
                flip_probability(x, 0.0).unwrap(),
                app_probability(x).unwrap()
            );
        }
        for rho in [0.0, 0.1, 0.25, 0.49] {
            assert!((flip_probability(0.0, rho).unwrap() - 0.5).abs() < 1e-15);
        }
        assert!((flip_probability(1.0, 0.2).unwrap() - 0.2).abs() < 1e-15);
        assert!(flip_probability(0.0, 0.5).is_err());
    }

    #[test]
    fn expected_hamming_reference_points() {
        assert!((expected_hamming(0.0, 0.1, 4000).unwrap() - 2000.0).abs() < 1e-9);
        assert_eq!(expected_hamming(1.0, 0.0, 1000).unwrap(), 0.0);
        // 1000 * (0.8/3 + 0.1) = 1100/3
        assert!((expected_hamming(0.5, 0.1, 1000).unwrap() - 1100.0 / 3.0).abs() < 1e-9);
        assert!(expected_hamming(0.5, 0.1, 0).is_err());
    }

    #[test]
    fn lemma2_bound_reference_points() {
        // Frozen from an independent evaluation of 1 + 1/(4M) - pi^2/(4M(1-2rho)^2 eps^2).
        let b = lemma2_lower_bound(4000, 0.1, 0.1).unwrap();
        assert!((b - 0.9036796445206119).abs() < 1e-12);

        // Approaches 1 from below as M grows.
        let near = lemma2_lower_bound(10_000_000_000, 0.1, 0.1).unwrap();
        assert!(near < 1.0);
        assert!((near - 1.0).abs() < 1e-6);
        let coarse = lemma2_lower_bound(100_000_000, 0.1, 0.1).unwrap();
        assert!(coarse < near && (coarse - 1.0).abs() < 1e-4);

        // Blows down as rho approaches 0.5.
        let tight = lemma2_lower_bound(1000, 0.4999, 0.1).unwrap();
        assert!(tight < -1e6);

        // Vacuous values are returned raw.
        assert!(lemma2_lower_bound(10, 0.4, 0.01).unwrap() < 0.0);

        assert!(lemma2_lower_bound(0, 0.1, 0.1).is_err());
        assert!(lemma2_lower_bound(10, 0.5, 0.1).is_err());
        assert!(lemma2_lower_bound(10, 0.1, 0.0).is_err());
    }

    #[test]
    fn lemma2_constants_match_closed_forms() {
        let c = Lemma2Constants::new(4000, 0.1).unwrap();
        assert!((c.c1 - 1.0 / 16000.0).abs() < 1e-18);
        assert!((c.c2 - PI * PI / (16000.0 * 0.64)).abs() < 1e-15);
        assert!(c.c1 > 0.0 && c.c2 > 0.0);
    }

    #[test]
    fn hamming_distance_reference_points() {
        let y = BitMeasurements::new(vec![1, 1], 0.0).unwrap();
        assert_eq!(hamming_distance(&y, &[0.3, -0.2]).unwrap(), 1);
        assert_eq!(hamming_distance(&y, &[0.3, 0.2]).unwrap(), 0);

        let y = BitMeasurements::new(vec![1, -1, 1], 0.0).unwrap();
        assert_eq!(hamming_distance(&y, &[-1.0, 2.0, -0.5]).unwrap(), 3);
        assert!(hamming_distance(&y, &[1.0]).is_err());
    }

    #[test]
    fn hamming_distance_treats_zero_as_positive() {
        let y = BitMeasurements::new(vec![1, -1], 0.0).unwrap();
        assert_eq!(hamming_distance(&y, &[0.0, 0.0]).unwrap(), 1);
    }

    #[test]
    fn proxy_reference_points() {
        let y = BitMeasurements::new(vec![1, -1], 0.0).unwrap();
        // Column matching y exactly, column opposite, column half-matching.
        let a = MeasurementEnsemble::from_row_major(vec![0.4, -0.4, 1.0, -0.7, 0.7, 2.0], 2, 3)
            .unwrap();
        let proxy = estimate_proxy(&y, &a).unwrap();
        assert!((proxy.h()[0] - 1.0).abs() < 1e-15);
        assert!((proxy.h()[1] + 1.0).abs() < 1e-15);
        assert!(proxy.h()[2].abs() < 1e-15);
    }

    #[test]
    fn proxy_matches_per_column_distances() {
        let mut rng = Rng::from_seed(31);
        let a = gen_measurement_matrix(50, 7, &mut rng).unwrap();
        let bits: Vec<i8> = (0..50).map(|i| if i % 3 == 0 { -1 } else { 1 }).collect();
        let y = BitMeasurements::new(bits, 0.0).unwrap();
        let rates = estimate_flip_probabilities(&y, &a).unwrap();
        assert_eq!(rates.m(), 50);
        for j in 0..7 {
            let expected = hamming_distance(&y, &a.column(j)).unwrap() as f64 / 50.0;
            assert_eq!(rates.p()[j], expected);
        }
    }

    // Binomial concentration: the empirical rate lands inside the 4-sigma
    // band in at least 99% of repetitions.
    #[test]
    fn empirical_rates_concentrate_around_the_law() {
        use crate::signal_model::{apply_sign_flips, measure, SparseSignal};
        let x = SparseSignal::from_unnormalized(vec![0.8, -0.6, 0.0, 0.36]).unwrap();
        let rho = 0.1;
        let m = 2000;
        let mut rng = Rng::from_seed(314);
        let mut checks = 0usize;
        let mut inside = 0usize;
        for _ in 0..100 {
            let a = gen_measurement_matrix(m, x.dimension(), &mut rng).unwrap();
            let clean = measure(&a, &x).unwrap();
            let y = apply_sign_flips(&clean, rho, &mut rng).unwrap();
            let rates = estimate_flip_probabilities(&y, &a).unwrap();
            for j in 0..x.dimension() {
                let law = flip_probability(x.values()[j], rho).unwrap();
                let sigma = (law * (1.0 - law) / m as f64).sqrt();
                checks += 1;
                if (rates.p()[j] - law).abs() <= 4.0 * sigma {
                    inside += 1;
                }
            }
        }
        let fraction = inside as f64 / checks as f64;
        assert!(
            fraction >= 0.99,
            "only {fraction} of repetitions inside the 4-sigma band"
        );
    }

    #[test]
    fn adaptive_alpha_reference_points() {
        let alpha = adaptive_alpha(1000, 1000, 4.0, 1.0).unwrap();
        assert!((alpha - 2.4715177646857693).abs() < 1e-12);
        assert!((adaptive_alpha(1_000_000, 10, 4.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(adaptive_alpha(123, 456, 0.0, 1.0).unwrap(), 1.0);
        assert!(adaptive_alpha(0, 10, 4.0, 1.0).is_err());
        assert!(adaptive_alpha(10, 10, -1.0, 1.0).is_err());
        assert!(adaptive_alpha(10, 10, 4.0, 0.0).is_err());
    }

    #[test]
    fn find_supp_reference_points() {
        let s = find_supp(&[0.1, 0.9, 0.5], 2, 1.0).unwrap();
        assert_eq!(s.indices(), &[1, 2]);
        assert_eq!(s.target_size(), 2);

        let s = find_supp(&[0.1, 0.9, 0.5], 3, 1.0).unwrap();
        assert_eq!(s.indices(), &[0, 1, 2]);

        // Tie at the selection boundary: lower index wins.
        let s = find_supp(&[0.5, 0.5, 0.1], 1, 1.0).unwrap();
        assert_eq!(s.indices(), &[0]);

        assert!(find_supp(&[0.5], 2, 1.0).is_err());
        assert!(find_supp(&[0.5], 0, 1.0).is_err());
    }

    proptest! {
        // Strict monotonicity: larger coefficient, smaller mismatch probability.
        #[test]
        fn flip_probability_strictly_decreasing(
            a in -0.999f64..0.999,
            gap in 1e-6f64..0.5,
            rho in 0.0f64..0.499,
        ) {
            let b = (a + gap).min(0.9999);
            prop_assume!(b > a);
            let pa = flip_probability(a, rho).unwrap();
            let pb = flip_probability(b, rho).unwrap();
            prop_assert!(pa > pb);
        }

        // The descending order of cos(pi * P_j) does not depend on rho.
        #[test]
        fn proxy_order_is_rho_free(
            xs in proptest::collection::vec(-1.0f64..=1.0, 2..12),
            rho1 in 0.0f64..0.499,
            rho2 in 0.0f64..0.499,
        ) {
            let order = |rho: f64| {
                let hs: Vec<f64> = xs
                    .iter()
                    .map(|&x| (PI * flip_probability(x, rho).unwrap()).cos())
                    .collect();
                let mut idx: Vec<usize> = (0..hs.len()).collect();
                idx.sort_by(|&i, &j| {
                    hs[j].partial_cmp(&hs[i]).unwrap().then(i.cmp(&j))
                });
                idx
            };
            prop_assert_eq!(order(rho1), order(rho2));
        }

        // Estimated rates stay in [0,1] and proxies in [-1,1].
        #[test]
        fn proxy_and_rates_stay_in_range(seed in 0u64..1000, m in 1usize..40, n in 1usize..10) {
            let mut rng = Rng::from_seed(seed);
            let a = gen_measurement_matrix(m, n, &mut rng).unwrap();
            let bits: Vec<i8> = (0..m).map(|_| if rng.uniform() < 0.5 { -1 } else { 1 }).collect();
            let y = BitMeasurements::new(bits, 0.0).unwrap();
            let rates = estimate_flip_probabilities(&y, &a).unwrap();
            prop_assert!(rates.p().iter().all(|&p| (0.0..=1.0).contains(&p)));
            let proxy = estimate_proxy(&y, &a).unwrap();
            prop_assert!(proxy.h().iter().all(|&h| (-1.0..=1.0).contains(&h)));
        }
    }
}
