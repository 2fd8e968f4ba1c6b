//! Stein unbiased risk estimates (SURE) for the implemented estimators,
//! plus a finite-difference divergence oracle used to validate the
//! analytic expressions.
//!
//! For an almost-everywhere differentiable estimator of `theta` from
//! `y ~ N(theta, I)`, the quantity
//!
//! ```text
//! R_hat = -n + ||y - est||^2 + 2 sum_i d est_i / d y_i
//! ```
//!
//! is an unbiased estimate of the risk `E ||est - theta||^2`. The
//! divergence `sum_i d est_i / d y_i` is available in closed form for
//! soft thresholding (the count of surviving coordinates) and for the
//! empirical Bayes estimator (differentiating through the data-dependent
//! statistics `mu_hat` and `xi2_hat`). Everything here is returned
//! normalized (per `n`); only [`sure_generic`] works in unnormalized
//! form.

use rayon::prelude::*;

use crate::denoise::{EbCore, EbParams};
use crate::error::{Error, Result};
use crate::util::norm_sq;

/// Unnormalized SURE from an estimate and its divergence:
/// `-n + ||y - estimate||^2 + 2 divergence`.
pub fn sure_generic(y: &[f64], estimate: &[f64], divergence: f64) -> Result<f64> {
    if y.len() != estimate.len() {
        return Err(Error::Dimension {
            expected: y.len(),
            got: estimate.len(),
        });
    }
    let resid: f64 = y
        .iter()
        .zip(estimate)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(-(y.len() as f64) + resid + 2.0 * divergence)
}

/// Central-difference estimate of the divergence `sum_i d est_i / d y_i`.
///
/// The full estimator is re-evaluated for every perturbed coordinate, so
/// data-dependent global statistics are differentiated through. Runs the
/// per-coordinate differences in parallel; the final sum is accumulated
/// in index order so the result does not depend on scheduling.
pub fn divergence_fd<F>(denoiser: F, y: &[f64], h: f64) -> f64
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    let slopes: Vec<f64> = (0..y.len())
        .into_par_iter()
        .map(|i| {
            let mut plus = y.to_vec();
            plus[i] += h;
            let mut minus = y.to_vec();
            minus[i] -= h;
            (denoiser(&plus)[i] - denoiser(&minus)[i]) / (2.0 * h)
        })
        .collect();
    slopes.iter().sum()
}

/// Normalized SURE for soft thresholding with threshold `lambda`:
/// `-1 + ||y - est||^2 / n + (2/n) #{i : y_i^2 > lambda^2}`.
pub fn sure_soft_threshold(y: &[f64], lambda: f64) -> f64 {
    let n = y.len() as f64;
    let lam2 = lambda * lambda;
    let mut resid = 0.0;
    let mut survivors = 0usize;
    for &v in y {
        if v * v > lam2 {
            survivors += 1;
            resid += lam2;
        } else {
            resid += v * v;
        }
    }
    -1.0 + resid / n + 2.0 * survivors as f64 / n
}

/// Analytic divergence of the empirical Bayes estimator, differentiating
/// through the data-dependent statistics.
pub fn ebayes_divergence(y: &[f64], params: &EbParams) -> f64 {
    let core = EbCore::from_values(y, params);
    y.iter().map(|&v| core.derivative_full(v)).sum()
}

/// Normalized SURE for the zero-location empirical Bayes estimator,
/// evaluated from the closed-form rearrangement of the divergence.
///
/// With `s = ||y||^2 / n` and the statistics `a, d, c, b_i` from
/// [`crate::denoise::eb_statistics`]:
///
/// ```text
/// R_hat / n = (s - 1)
///           + (a^2/n) sum y_i^2 (1 + 2 c E_i) / b_i^2
///           - (2a/n)  sum (y_i^2 - 1) / b_i
///           + (4 / (d^2 eps n^2))            sum y_i^2 / b_i   [s > 1]
///           + (2 (1-eps) a / (d^{3/2} eps^2 n^2)) sum y_i^4 E_i / b_i^2
///           - (2 (1-eps) a / (d^{1/2} eps^2 n^2)) sum y_i^2 E_i / b_i^2
/// ```
///
/// where `E_i = e^{-a y_i^2 / 2}`. The last three terms are the
/// contribution of the derivatives of the global statistics; they are
/// `O(1/n)` and may be dropped (`include_small_terms = false`) in hot
/// loops at no practical cost.
pub fn sure_ebayes_zero_location(y: &[f64], epsilon: f64, include_small_terms: bool) -> Result<f64> {
    let params = EbParams::new(epsilon, true)?;
    let core = EbCore::from_values(y, &params);
    let n = y.len() as f64;
    let s = norm_sq(y) / n;
    let (a, d, c, eps) = (core.a, core.d, core.c, epsilon);

    let mut main2 = 0.0; // sum y^2 (1 + 2 c E) / b^2
    let mut main3 = 0.0; // sum (y^2 - 1) / b
    let mut tail_b1 = 0.0; // sum y^2 / b
    let mut tail_y4 = 0.0; // sum y^4 E / b^2
    let mut tail_y2 = 0.0; // sum y^2 E / b^2
    for &v in y {
        let e = (-0.5 * a * v * v).exp();
        let b = 1.0 + c * e;
        let v2 = v * v;
        main2 += v2 * (1.0 + 2.0 * c * e) / (b * b);
        main3 += (v2 - 1.0) / b;
        tail_b1 += v2 / b;
        tail_y4 += v2 * v2 * e / (b * b);
        tail_y2 += v2 * e / (b * b);
    }

    let mut sure = (s - 1.0) + a * a * main2 / n - 2.0 * a * main3 / n;
    if include_small_terms {
        if core.active {
            sure += 4.0 * tail_b1 / (d * d * eps * n * n);
        }
        sure += 2.0 * (1.0 - eps) * a * tail_y4 / (d.powf(1.5) * eps * eps * n * n);
        sure -= 2.0 * (1.0 - eps) * a * tail_y2 / (d.sqrt() * eps * eps * n * n);
    }
    Ok(sure)
}

/// Normalized SURE for the general (estimated-location) empirical Bayes
/// estimator, via the analytic divergence.
pub fn sure_ebayes_general(y: &[f64], epsilon: f64) -> Result<f64> {
    let params = EbParams::new(epsilon, false)?;
    let core = EbCore::from_values(y, &params);
    let mut resid = 0.0;
    let mut div = 0.0;
    for &v in y {
        let est = core.estimate(v);
        resid += (v - est) * (v - est);
        div += core.derivative_full(v);
    }
    let n = y.len() as f64;
    Ok((-n + resid + 2.0 * div) / n)
}

/// Normalized SURE for the empirical Bayes estimator in either mode.
pub fn sure_ebayes(y: &[f64], params: &EbParams, include_small_terms: bool) -> Result<f64> {
    if params.zero_location() {
        sure_ebayes_zero_location(y, params.epsilon(), include_small_terms)
    } else {
        sure_ebayes_general(y, params.epsilon())
    }
}
