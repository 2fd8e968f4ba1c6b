//! The estimators: soft thresholding, empirical Bayes shrinkage under a
//! Bernoulli-Gaussian prior, and the positive-part Lindley estimator.
//!
//! The empirical Bayes estimator is the posterior mean under the prior
//! `(1 - epsilon) delta_0 + epsilon N(mu, xi^2)` with `mu` and `xi^2`
//! plugged in from the data:
//!
//! ```text
//! mu_hat  = ybar / epsilon                      (0 in zero-location mode)
//! xi2_hat = ((y2bar - ybar^2/epsilon - 1)_+) / epsilon
//!           ((y2bar - 1)_+) / epsilon           (zero-location mode)
//!
//!             mu_hat + (1 - 1/(1 + xi2_hat)) (y_i - mu_hat)
//! est_i = -----------------------------------------------------------
//!         1 + (1-eps)/eps sqrt(1+xi2_hat) exp(-y_i^2/2 + (y_i-mu_hat)^2
//!                                             / (2 (1+xi2_hat)))
//! ```
//!
//! where `ybar` and `y2bar` are the empirical first and second moments.
//! The denominator is evaluated in log space: at small `epsilon` the
//! prefactor is large, and for non-zero `mu_hat` the exponent can be
//! positive, so the naive product overflows.

use crate::error::{Error, Result};
use crate::util::{log1p_exp, mean, norm_sq};

/// Soft-thresholding parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftThresholdParams {
    lambda: f64,
}

impl SoftThresholdParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::parameter(format!(
                "threshold must be >= 0, got {lambda}"
            )));
        }
        Ok(SoftThresholdParams { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Empirical Bayes parameters: prior mixture weight and whether the
/// location parameter is pinned to zero.
///
/// `zero_location` should be set only when the caller asserts a centered
/// signal; the general form is the default for standalone denoising.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EbParams {
    epsilon: f64,
    zero_location: bool,
}

impl EbParams {
    pub fn new(epsilon: f64, zero_location: bool) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::parameter(format!(
                "epsilon must lie in (0, 1], got {epsilon}"
            )));
        }
        Ok(EbParams {
            epsilon,
            zero_location,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn zero_location(&self) -> bool {
        self.zero_location
    }
}

/// The data-dependent quantities shared by the empirical Bayes estimator
/// and its risk estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct EbStatistics {
    pub mu_hat: f64,
    /// Clamped variance estimate, always >= 0.
    pub xi2_hat: f64,
    /// `xi2_hat / (1 + xi2_hat)`, in `[0, 1)`.
    pub a_y: f64,
    /// `1 + xi2_hat`, always >= 1.
    pub d_y: f64,
    /// `(1 - eps)/eps * sqrt(d_y)`, always >= 0.
    pub c_y: f64,
    /// Per-component denominators, every entry >= 1.
    pub b: Vec<f64>,
}

/// Shared scalar state for the empirical Bayes estimator. All of the
/// global (whole-vector) statistics live here; per-component evaluation
/// is then a pure function of `y_i`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EbCore {
    pub epsilon: f64,
    pub zero_location: bool,
    pub n: usize,
    pub mu: f64,
    pub xi2: f64,
    pub d: f64,
    pub a: f64,
    pub c: f64,
    ln_c: f64,
    /// Whether the variance clamp is inactive (the estimate is in the
    /// smooth regime where it depends on the data).
    pub active: bool,
}

impl EbCore {
    pub(crate) fn from_values(y: &[f64], params: &EbParams) -> EbCore {
        let n = y.len();
        let eps = params.epsilon();
        let y2bar = norm_sq(y) / n as f64;
        let (mu, inner) = if params.zero_location() {
            (0.0, y2bar - 1.0)
        } else {
            let ybar = mean(y);
            (ybar / eps, y2bar - ybar * ybar / eps - 1.0)
        };
        let active = inner > 0.0;
        let xi2 = if active { inner / eps } else { 0.0 };
        let d = 1.0 + xi2;
        let a = xi2 / d;
        let c = (1.0 - eps) / eps * d.sqrt();
        EbCore {
            epsilon: eps,
            zero_location: params.zero_location(),
            n,
            mu,
            xi2,
            d,
            a,
            c,
            ln_c: c.ln(),
            active,
        }
    }

    /// Exponent of the denominator: `-y^2/2 + (y - mu)^2 / (2 d)`.
    /// Reduces to `-a y^2 / 2` when `mu = 0`.
    #[inline]
    pub(crate) fn exponent(&self, yi: f64) -> f64 {
        let dev = yi - self.mu;
        -0.5 * yi * yi + dev * dev / (2.0 * self.d)
    }

    /// `log b_i` where `b_i = 1 + c e^{G_i}`, computed as `log1p(exp(.))`.
    #[inline]
    pub(crate) fn log_b(&self, yi: f64) -> f64 {
        log1p_exp(self.ln_c + self.exponent(yi))
    }

    #[inline]
    pub(crate) fn b(&self, yi: f64) -> f64 {
        self.log_b(yi).exp()
    }

    /// `(b_i - 1) / b_i` in `[0, 1)`, stable for huge `b_i`.
    #[inline]
    pub(crate) fn shrink_fraction(&self, yi: f64) -> f64 {
        let t = self.ln_c + self.exponent(yi);
        (t - log1p_exp(t)).exp()
    }

    /// Numerator `mu + a (y_i - mu)`.
    #[inline]
    pub(crate) fn numerator(&self, yi: f64) -> f64 {
        self.mu + self.a * (yi - self.mu)
    }

    /// The estimate for one component.
    #[inline]
    pub(crate) fn estimate(&self, yi: f64) -> f64 {
        self.numerator(yi) * (-self.log_b(yi)).exp()
    }

    /// `d est / d y_i` holding the global statistics fixed. This is the
    /// componentwise derivative used for the Onsager correction in AMP,
    /// where the global statistics are effectively deterministic.
    #[inline]
    pub(crate) fn derivative_frozen(&self, yi: f64) -> f64 {
        let dev = yi - self.mu;
        let g_prime = -yi + dev / self.d;
        let sig = self.shrink_fraction(yi);
        (self.a - self.numerator(yi) * sig * g_prime) * (-self.log_b(yi)).exp()
    }

    /// `d est / d y_i` differentiating through the data-dependent global
    /// statistics `mu_hat` and `xi2_hat` as well.
    pub(crate) fn derivative_full(&self, yi: f64) -> f64 {
        let n = self.n as f64;
        let dev = yi - self.mu;
        let mu_prime = if self.zero_location {
            0.0
        } else {
            1.0 / (n * self.epsilon)
        };
        let xi2_prime = if self.active {
            2.0 * dev / (n * self.epsilon)
        } else {
            0.0
        };
        let a_prime = xi2_prime / (self.d * self.d);
        let num_prime = mu_prime * (1.0 - self.a) + self.a + dev * a_prime;
        let g_prime = -yi + dev * (1.0 - mu_prime) / self.d
            - dev * dev * xi2_prime / (2.0 * self.d * self.d);
        // c'/c = xi2' / (2 d); b' = (b - 1)(c'/c + G').
        let c_ratio = xi2_prime / (2.0 * self.d);
        let sig = self.shrink_fraction(yi);
        (num_prime - self.numerator(yi) * sig * (c_ratio + g_prime)) * (-self.log_b(yi)).exp()
    }
}

#[inline]
pub(crate) fn soft_threshold_scalar(y: f64, lambda: f64) -> f64 {
    if y > lambda {
        y - lambda
    } else if y < -lambda {
        y + lambda
    } else {
        0.0
    }
}

/// Componentwise soft thresholding: shrink toward zero by `lambda`,
/// zeroing the dead zone `|y_i| <= lambda`.
pub fn soft_threshold(y: &[f64], params: &SoftThresholdParams) -> Vec<f64> {
    y.iter()
        .map(|&v| soft_threshold_scalar(v, params.lambda()))
        .collect()
}

/// Compute the shared empirical Bayes statistics for an observation.
pub fn eb_statistics(y: &[f64], params: &EbParams) -> EbStatistics {
    let core = EbCore::from_values(y, params);
    EbStatistics {
        mu_hat: core.mu,
        xi2_hat: core.xi2,
        a_y: core.a,
        d_y: core.d,
        c_y: core.c,
        b: y.iter().map(|&v| core.b(v)).collect(),
    }
}

/// The empirical Bayes estimate of a sparse vector from `y = theta + w`.
pub fn ebayes(y: &[f64], params: &EbParams) -> Vec<f64> {
    let core = EbCore::from_values(y, params);
    y.iter().map(|&v| core.estimate(v)).collect()
}

/// Positive-part Lindley estimator: shrink toward the empirical mean,
/// `est = ybar 1 + (1 - (n-3)/||y - ybar 1||^2)_+ (y - ybar 1)`.
pub fn lindley_positive_part(y: &[f64]) -> Result<Vec<f64>> {
    let n = y.len();
    if n < 4 {
        return Err(Error::Dimension { expected: 4, got: n });
    }
    let ybar = mean(y);
    let ss: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();
    // ss = 0 gives factor (1 - inf)_+ = 0, i.e. est = ybar 1.
    let factor = (1.0 - (n as f64 - 3.0) / ss).max(0.0);
    Ok(y.iter().map(|v| ybar + factor * (v - ybar)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{fill_standard_normal, rng_from_seed};
    use approx::assert_abs_diff_eq;

    fn st(lambda: f64) -> SoftThresholdParams {
        SoftThresholdParams::new(lambda).unwrap()
    }

    fn eb(epsilon: f64, zero_location: bool) -> EbParams {
        EbParams::new(epsilon, zero_location).unwrap()
    }

    #[test]
    fn soft_threshold_branches() {
        let out = soft_threshold(&[2.5, 0.5, -3.0], &st(1.0));
        assert_eq!(out, vec![1.5, 0.0, -2.0]);
    }

    #[test]
    fn soft_threshold_rejects_negative_lambda() {
        assert!(SoftThresholdParams::new(-0.1).is_err());
        assert!(SoftThresholdParams::new(f64::NAN).is_err());
    }

    #[test]
    fn eb_params_domain() {
        assert!(EbParams::new(0.0, false).is_err());
        assert!(EbParams::new(1.1, false).is_err());
        assert!(EbParams::new(1.0, true).is_ok());
    }

    #[test]
    fn eb_statistics_clamped_regime() {
        // ||y||^2 / n <= 1: the variance estimate clamps to zero.
        let y = [0.5, -0.5, 0.5, -0.5];
        let stats = eb_statistics(&y, &eb(0.25, true));
        assert_eq!(stats.xi2_hat, 0.0);
        assert_eq!(stats.a_y, 0.0);
        assert_eq!(stats.d_y, 1.0);
        for b in &stats.b {
            // b_i = 1 + (1-eps)/eps = 1/eps.
            assert_abs_diff_eq!(*b, 4.0, epsilon = 1e-12);
        }
        // The estimate is identically zero here.
        assert!(ebayes(&y, &eb(0.25, true)).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn eb_statistics_epsilon_one() {
        let y = [2.0, -1.0, 3.0, 0.5];
        let stats = eb_statistics(&y, &eb(1.0, true));
        assert_eq!(stats.c_y, 0.0);
        assert!(stats.b.iter().all(|b| *b == 1.0));
    }

    #[test]
    fn eb_statistics_hand_example() {
        // zero-location, eps = 0.5, ||y||^2/n = 3.
        let y = [3f64.sqrt(), -(3f64.sqrt()), 3f64.sqrt(), -(3f64.sqrt())];
        let stats = eb_statistics(&y, &eb(0.5, true));
        assert_abs_diff_eq!(stats.xi2_hat, 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(stats.a_y, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(stats.d_y, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(stats.c_y, 5f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn ebayes_epsilon_one_is_linear_shrinkage() {
        let y = [4.0, -2.0, 1.0, 3.0, -5.0, 2.0];
        let out = ebayes(&y, &eb(1.0, false));
        let ybar = y.iter().sum::<f64>() / y.len() as f64;
        let y2bar = y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64;
        let xi2 = (y2bar - ybar * ybar - 1.0).max(0.0);
        let a = xi2 / (1.0 + xi2);
        for (o, v) in out.iter().zip(&y) {
            assert_abs_diff_eq!(*o, ybar + a * (v - ybar), epsilon = 1e-12);
        }
    }

    #[test]
    fn ebayes_hand_example() {
        // zero-location, n = 4, y = (2, -2, 2, -2), eps = 0.5:
        // ||y||^2/n = 4, xi2 = 6, a = 6/7, c = sqrt(7),
        // est_i = (6/7) y_i / (1 + sqrt(7) e^{-12/7}).
        let y = [2.0, -2.0, 2.0, -2.0];
        let out = ebayes(&y, &eb(0.5, true));
        let b = 1.0 + 7f64.sqrt() * (-12.0 / 7.0f64).exp();
        for (o, v) in out.iter().zip(&y) {
            assert_abs_diff_eq!(*o, (6.0 / 7.0) * v / b, epsilon = 1e-12);
        }
    }

    #[test]
    fn lindley_requires_four_entries() {
        assert!(lindley_positive_part(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn lindley_clamps_small_deviation() {
        // ||y - ybar 1||^2 = 4 * 0.01 < n - 3 = 1: the shrink factor clamps.
        let y = [1.1, 0.9, 1.1, 0.9];
        let out = lindley_positive_part(&y).unwrap();
        for o in out {
            assert_abs_diff_eq!(o, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn lindley_fixes_constant_vectors() {
        let y = [2.5; 8];
        assert_eq!(lindley_positive_part(&y).unwrap(), y.to_vec());
    }

    #[test]
    fn lindley_shrink_factor_concentrates() {
        // y ~ N(0, 4 I) at n = 1000: factor = 1 - (n-3)/||y - ybar||^2,
        // which concentrates near 1 - (n-3)/(4n) = 0.75.
        let mut rng = rng_from_seed(31);
        let mut y = vec![0.0; 1000];
        fill_standard_normal(&mut rng, &mut y);
        for v in &mut y {
            *v *= 2.0;
        }
        let out = lindley_positive_part(&y).unwrap();
        let ybar = y.iter().sum::<f64>() / 1000.0;
        // Recover the factor from an entry far from the mean.
        let i = y
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .unwrap()
            .0;
        let factor = (out[i] - ybar) / (y[i] - ybar);
        assert!((factor - 0.75).abs() < 0.02, "factor {factor}");
    }

    #[test]
    fn epsilon_one_reduces_to_lindley_up_to_small_correction() {
        let mut rng = rng_from_seed(77);
        let mut y = vec![0.0; 1000];
        fill_standard_normal(&mut rng, &mut y);
        for v in &mut y {
            *v *= 2.0;
        }
        let eb_out = ebayes(&y, &eb(1.0, false));
        let lindley = lindley_positive_part(&y).unwrap();
        let ybar = y.iter().sum::<f64>() / y.len() as f64;
        let ss: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();
        let max_dev = y.iter().map(|v| (v - ybar).abs()).fold(0.0, f64::max);
        // The shrink factors differ by 3/||y - ybar 1||^2.
        let bound = 3.0 * max_dev / ss;
        let max_diff = eb_out
            .iter()
            .zip(&lindley)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(
            max_diff <= bound + 1e-12,
            "max diff {max_diff} exceeds {bound}"
        );
    }

    #[test]
    fn ebayes_is_odd_in_zero_location_mode() {
        let y = [1.5, -0.3, 2.2, 0.0, -4.0];
        let flipped: Vec<f64> = y.iter().map(|v| -v).collect();
        let a = ebayes(&y, &eb(0.3, true));
        let b = ebayes(&flipped, &eb(0.3, true));
        for (x, z) in a.iter().zip(&b) {
            assert_abs_diff_eq!(*x, -z, epsilon = 1e-14);
        }
    }
}
