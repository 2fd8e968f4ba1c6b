//! Parameter selection: the minimax soft-threshold, SURE-grid search for
//! `lambda` and `epsilon`, and the SURE-comparison hybrid estimator.

use crate::denoise::{ebayes, soft_threshold, EbParams, SoftThresholdParams};
use crate::error::{Error, Result};
use crate::risk::{sure_ebayes, sure_soft_threshold};
use crate::util::{normal_cdf, normal_pdf};

/// A strictly increasing, positive, nonempty parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    values: Vec<f64>,
}

impl Grid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if values[0] <= 0.0 || values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::parameter(
                "grid must be strictly increasing and positive",
            ));
        }
        Ok(Grid { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }
}

/// The lambda and epsilon grids used together by tuning and AMP.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningGrids {
    pub lambda: Grid,
    pub epsilon: Grid,
}

impl TuningGrids {
    /// The default grids for problem size `n`:
    /// `lambda in {0.1 i : i = 1..ceil(10 sqrt(2 ln n))}` and
    /// `epsilon in {0.02 i : i = 1..50}`.
    pub fn for_size(n: usize) -> Result<Self> {
        let (lambda, epsilon) = default_grids(n)?;
        Ok(TuningGrids { lambda, epsilon })
    }
}

/// The outcome of the SURE comparison between the two estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridChoice {
    /// 1 when the empirical Bayes estimate was selected, 0 otherwise.
    pub gamma: u8,
    /// The selected estimator's output.
    pub estimate: Vec<f64>,
    pub sure_eb: f64,
    pub sure_st: f64,
}

impl HybridChoice {
    pub fn chosen(&self) -> crate::model::EstimatorKind {
        if self.gamma == 1 {
            crate::model::EstimatorKind::EBayes
        } else {
            crate::model::EstimatorKind::SoftThreshold
        }
    }
}

/// Worst-case normalized soft-thresholding risk over signals of sparsity
/// level `epsilon`, as a function of the threshold:
/// `eps (1 + lambda^2) + (1 - eps) [2 (1 + lambda^2) Phi(-lambda) - 2 lambda phi(lambda)]`.
pub fn st_worst_case_risk(lambda: f64, epsilon: f64) -> f64 {
    epsilon * (1.0 + lambda * lambda) + (1.0 - epsilon) * st_risk_at_zero(lambda)
}

/// Normalized soft-thresholding risk at the zero signal:
/// `2 [(1 + lambda^2) Phi(-lambda) - lambda phi(lambda)]`.
pub fn st_risk_at_zero(lambda: f64) -> f64 {
    2.0 * ((1.0 + lambda * lambda) * normal_cdf(-lambda) - lambda * normal_pdf(lambda))
}

const MINIMAX_SEARCH_MAX: f64 = 10.0;
const MINIMAX_TOL: f64 = 1e-6;

/// The threshold minimizing the worst-case soft-thresholding risk over
/// signals of sparsity level `epsilon`, found by golden-section search
/// on `[0, 10]` (the objective is unimodal there) refined to `1e-6`.
pub fn minimax_lambda(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::parameter(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    let f = |lambda: f64| st_worst_case_risk(lambda, epsilon);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, MINIMAX_SEARCH_MAX);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > MINIMAX_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    // The minimum may sit at the boundary (epsilon = 1 gives exactly 0).
    if f(0.0) <= f(mid) {
        Ok(0.0)
    } else {
        Ok(mid)
    }
}

/// The paper grids for problem size `n`: thresholds
/// `{0.1 i : i = 1..ceil(10 sqrt(2 ln n))}` covering `(0, sqrt(2 ln n)]`,
/// and mixture weights `{0.02 i : i = 1..50}` covering `(0, 1]`.
pub fn default_grids(n: usize) -> Result<(Grid, Grid)> {
    if n < 2 {
        return Err(Error::parameter("grid construction requires n >= 2"));
    }
    let count = (10.0 * (2.0 * (n as f64).ln()).sqrt()).ceil() as usize;
    let lambda = Grid::new((1..=count).map(|i| 0.1 * i as f64).collect())?;
    let epsilon = Grid::new((1..=50).map(|i| 0.02 * i as f64).collect())?;
    Ok((lambda, epsilon))
}

/// Scan a grid for the value minimizing `objective`, ascending order,
/// ties broken toward the smallest parameter.
fn grid_argmin(grid: &Grid, mut objective: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for &p in grid.values() {
        let val = objective(p)?;
        match best {
            Some((_, v)) if val >= v => {}
            _ => best = Some((p, val)),
        }
    }
    best.ok_or(Error::EmptyGrid)
}

/// Choose the soft threshold minimizing SURE over the grid.
/// Returns `(lambda_star, sure_at_lambda_star)`.
pub fn tune_st(y: &[f64], grid: &Grid) -> Result<(f64, f64)> {
    grid_argmin(grid, |lambda| Ok(sure_soft_threshold(y, lambda)))
}

/// Choose the mixture weight minimizing the empirical Bayes SURE over
/// the grid. Returns `(epsilon_star, sure_at_epsilon_star)`.
pub fn tune_eb(y: &[f64], grid: &Grid, zero_location: bool) -> Result<(f64, f64)> {
    grid_argmin(grid, |epsilon| {
        let params = EbParams::new(epsilon, zero_location)?;
        sure_ebayes(y, &params, true)
    })
}

/// Evaluate both estimators at the given parameters and keep the one
/// with the smaller SURE. Ties favor the empirical Bayes estimate.
pub fn hybrid(y: &[f64], lambda: f64, epsilon: f64, zero_location: bool) -> Result<HybridChoice> {
    let st_params = SoftThresholdParams::new(lambda)?;
    let eb_params = EbParams::new(epsilon, zero_location)?;
    let sure_st = sure_soft_threshold(y, lambda);
    let sure_eb = sure_ebayes(y, &eb_params, true)?;
    let gamma = u8::from(sure_eb <= sure_st);
    let estimate = if gamma == 1 {
        ebayes(y, &eb_params)
    } else {
        soft_threshold(y, &st_params)
    };
    Ok(HybridChoice {
        gamma,
        estimate,
        sure_eb,
        sure_st,
    })
}
