//! Approximate message passing (AMP) for compressed sensing, with the
//! crate's denoisers plugged in per iteration.
//!
//! For the measurement model `y = A theta + w` with `A` an `m x n`
//! matrix of i.i.d. `N(0, 1/m)` entries and undersampling ratio
//! `delta = m/n < 1`, the iteration starting from `theta_0 = 0`,
//! `z_0 = y` is
//!
//! ```text
//! theta_t = f_t(A' z_{t-1} + theta_{t-1})
//! z_t     = y - A theta_t + (1/delta) z_{t-1} <f_t'(A' z_{t-1} + theta_{t-1})>
//! ```
//!
//! where `f_t` is a denoiser adapted to the effective noise level
//! `tau_{t-1} = ||z_{t-1}|| / sqrt(m)` and `<.>` is the entrywise mean.
//! The last term (the Onsager correction) keeps the effective
//! observation `A' z_t + theta_t` approximately Gaussian around `theta`.
//!
//! Per iteration, the denoiser parameter is chosen by evaluating every
//! grid value and keeping the candidate `(theta_t, z_t)` pair with the
//! smallest residual `||z_t||^2 / m`; the hybrid family runs both grids
//! and keeps the better family's pair.

use rayon::prelude::*;

use crate::denoise::{soft_threshold_scalar, EbCore, EbParams, SoftThresholdParams};
use crate::error::{Error, Result};
use crate::model::{fill_standard_normal, rng_from_seed, EstimatorKind, Signal};
use crate::selection::TuningGrids;
use crate::util::norm_sq;

/// Dense row-major matrix with deterministic (fixed-order) products.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    /// `A x`. Each output entry is one sequential row dot product, so the
    /// result is identical under any parallel schedule.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .into_par_iter()
            .map(|r| {
                let row = &self.data[r * self.cols..(r + 1) * self.cols];
                row.iter().zip(x).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `A' z`, parallel over column blocks; every column accumulates its
    /// sum in row order, keeping the result schedule-independent.
    pub fn t_matvec(&self, z: &[f64]) -> Vec<f64> {
        debug_assert_eq!(z.len(), self.rows);
        const BLOCK: usize = 512;
        let mut out = vec![0.0; self.cols];
        let cols = self.cols;
        out.par_chunks_mut(BLOCK).enumerate().for_each(|(bi, chunk)| {
            let j0 = bi * BLOCK;
            for (r, &zr) in z.iter().enumerate() {
                let row = &self.data[r * cols + j0..r * cols + j0 + chunk.len()];
                for (o, a) in chunk.iter_mut().zip(row) {
                    *o += zr * a;
                }
            }
        });
        out
    }
}

/// A compressed-sensing instance: matrix, measurements, and (optionally)
/// the ground truth for MSE reporting.
#[derive(Debug, Clone)]
pub struct MeasurementModel {
    pub matrix: DenseMatrix,
    pub m: usize,
    pub n: usize,
    /// Undersampling ratio `m / n`, recomputed after rounding `m`.
    pub delta: f64,
    /// Measurement noise standard deviation.
    pub sigma: f64,
    pub y: Vec<f64>,
    pub theta_true: Option<Signal>,
}

/// Generate a measurement model: `A` with i.i.d. `N(0, 1/m)` entries and
/// `y = A theta + sigma w`. Deterministic given the seed.
pub fn generate_measurement(
    n: usize,
    delta: f64,
    sigma: f64,
    signal: &Signal,
    seed: u64,
) -> Result<MeasurementModel> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::parameter(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if !(sigma >= 0.0) {
        return Err(Error::parameter(format!("sigma must be >= 0, got {sigma}")));
    }
    if signal.n() != n {
        return Err(Error::Dimension {
            expected: n,
            got: signal.n(),
        });
    }
    let m = (delta * n as f64).round() as usize;
    if m < 1 || m >= n {
        return Err(Error::parameter(format!(
            "round(delta n) = {m} must lie in [1, n)"
        )));
    }
    let delta = m as f64 / n as f64;

    let mut rng = rng_from_seed(seed);
    let mut data = vec![0.0; m * n];
    fill_standard_normal(&mut rng, &mut data);
    let scale = (1.0 / m as f64).sqrt();
    for v in &mut data {
        *v *= scale;
    }
    let matrix = DenseMatrix {
        rows: m,
        cols: n,
        data,
    };

    let mut y = matrix.matvec(signal.values());
    if sigma > 0.0 {
        let mut noise = vec![0.0; m];
        fill_standard_normal(&mut rng, &mut noise);
        for (yi, wi) in y.iter_mut().zip(&noise) {
            *yi += sigma * wi;
        }
    }
    Ok(MeasurementModel {
        matrix,
        m,
        n,
        delta,
        sigma,
        y,
        theta_true: Some(signal.clone()),
    })
}

/// One AMP iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct AmpState {
    pub theta: Vec<f64>,
    pub z: Vec<f64>,
    /// Residual-based effective noise level `||z|| / sqrt(m)`.
    pub tau_hat: f64,
    pub t: usize,
    pub chosen_param: Option<f64>,
    pub chosen_family: Option<EstimatorKind>,
}

impl AmpState {
    /// Initial conditions `theta_0 = 0`, `z_0 = y`.
    pub fn init(model: &MeasurementModel) -> AmpState {
        let z = model.y.clone();
        let tau_hat = (norm_sq(&z) / model.m as f64).sqrt();
        AmpState {
            theta: vec![0.0; model.n],
            z,
            tau_hat,
            t: 0,
            chosen_param: None,
            chosen_family: None,
        }
    }
}

/// A denoiser with a concrete parameter, for a single AMP step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepDenoiser {
    SoftThreshold { lambda: f64 },
    EBayes { epsilon: f64, zero_location: bool },
}

impl StepDenoiser {
    fn family(&self) -> EstimatorKind {
        match self {
            StepDenoiser::SoftThreshold { .. } => EstimatorKind::SoftThreshold,
            StepDenoiser::EBayes { .. } => EstimatorKind::EBayes,
        }
    }

    fn param(&self) -> f64 {
        match *self {
            StepDenoiser::SoftThreshold { lambda } => lambda,
            StepDenoiser::EBayes { epsilon, .. } => epsilon,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            StepDenoiser::SoftThreshold { lambda } => {
                SoftThresholdParams::new(lambda).map(|_| ())
            }
            StepDenoiser::EBayes {
                epsilon,
                zero_location,
            } => EbParams::new(epsilon, zero_location).map(|_| ()),
        }
    }
}

/// Run options for [`amp_run`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmpOptions {
    /// Use the zero-location empirical Bayes form. On by default: the
    /// denoiser sees a centered effective observation in the standard
    /// symmetric-signal setups, and the location estimate divides by
    /// epsilon, which amplifies mean noise at small mixture weights.
    pub zero_location: bool,
    /// When set, grid searches run only for `t <= freeze_after`; later
    /// iterations reuse the most recent parameter (and family) choice.
    pub freeze_after: Option<usize>,
}

impl Default for AmpOptions {
    fn default() -> Self {
        AmpOptions {
            zero_location: true,
            freeze_after: None,
        }
    }
}

/// One point of an AMP trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub t: usize,
    /// `||theta_t - theta||^2 / n`; present when the model carries truth.
    pub mse: Option<f64>,
    /// `||z_t||^2 / m`.
    pub tau2: f64,
    pub chosen_param: Option<f64>,
    pub chosen_family: Option<EstimatorKind>,
    /// State-evolution MSE prediction `delta (tau2 - sigma^2)_+`.
    pub se_prediction: f64,
}

pub type Trajectory = Vec<TrajectoryPoint>;

/// State-evolution MSE prediction from the two families' squared
/// residual norms: `tau2 = min(z_st, z_eb)/m`, `delta (tau2 - sigma^2)_+`.
pub fn se_prediction(z_st_norm2: f64, z_eb_norm2: f64, m: usize, delta: f64, sigma: f64) -> f64 {
    let tau2 = z_st_norm2.min(z_eb_norm2) / m as f64;
    delta * (tau2 - sigma * sigma).max(0.0)
}

/// Apply the noise-adapted denoiser to the effective observation.
/// Returns the estimate and the mean componentwise derivative `<f'>`
/// used for the Onsager correction.
///
/// Both families are adapted to the noise level by rescaling: the
/// unit-noise estimator is applied to `u / tau` and the output scaled
/// back by `tau` (for soft thresholding this is the same as thresholding
/// `u` at `lambda tau`).
pub fn apply_denoiser(u: &[f64], tau: f64, denoiser: &StepDenoiser) -> (Vec<f64>, f64) {
    if tau <= f64::MIN_POSITIVE {
        // Degenerate zero-residual state: every denoiser passes through.
        return (u.to_vec(), 1.0);
    }
    match *denoiser {
        StepDenoiser::SoftThreshold { lambda } => {
            let thr = lambda * tau;
            let theta: Vec<f64> = u.iter().map(|&v| soft_threshold_scalar(v, thr)).collect();
            let survivors = u.iter().filter(|v| v.abs() > thr).count();
            (theta, survivors as f64 / u.len() as f64)
        }
        StepDenoiser::EBayes {
            epsilon,
            zero_location,
        } => {
            let params = EbParams::new(epsilon, zero_location).expect("validated upstream");
            let scaled: Vec<f64> = u.iter().map(|&v| v / tau).collect();
            let core = EbCore::from_values(&scaled, &params);
            let theta: Vec<f64> = scaled.iter().map(|&v| tau * core.estimate(v)).collect();
            // The Onsager derivative treats the global statistics as
            // constants; the full data derivative is an O(1/n) correction.
            let fp: f64 = scaled.iter().map(|&v| core.derivative_frozen(v)).sum();
            (theta, fp / u.len() as f64)
        }
    }
}

struct Candidate {
    param: f64,
    theta: Vec<f64>,
    z: Vec<f64>,
    z_norm_sq: f64,
}

fn eval_candidate(
    model: &MeasurementModel,
    u: &[f64],
    tau: f64,
    z_prev: &[f64],
    denoiser: &StepDenoiser,
) -> Candidate {
    let (theta, fp) = apply_denoiser(u, tau, denoiser);
    let a_theta = model.matrix.matvec(&theta);
    let onsager = fp / model.delta;
    let z: Vec<f64> = model
        .y
        .iter()
        .zip(&a_theta)
        .zip(z_prev)
        .map(|((y, at), zp)| y - at + onsager * zp)
        .collect();
    let z_norm_sq = norm_sq(&z);
    Candidate {
        param: denoiser.param(),
        theta,
        z,
        z_norm_sq,
    }
}

/// Advance one AMP iteration with a fixed denoiser and parameter.
pub fn amp_step(
    model: &MeasurementModel,
    state: &AmpState,
    denoiser: StepDenoiser,
) -> Result<AmpState> {
    denoiser.validate()?;
    let iteration = state.t + 1;
    if !state.z.iter().all(|v| v.is_finite())
        || !state.theta.iter().all(|v| v.is_finite())
        || !state.tau_hat.is_finite()
    {
        return Err(Error::Divergence { iteration });
    }
    let mut u = model.matrix.t_matvec(&state.z);
    for (ui, ti) in u.iter_mut().zip(&state.theta) {
        *ui += ti;
    }
    if !u.iter().all(|v| v.is_finite()) {
        return Err(Error::Divergence { iteration });
    }
    let cand = eval_candidate(model, &u, state.tau_hat, &state.z, &denoiser);
    if !cand.z.iter().all(|v| v.is_finite()) {
        return Err(Error::Divergence { iteration });
    }
    Ok(AmpState {
        tau_hat: (cand.z_norm_sq / model.m as f64).sqrt(),
        theta: cand.theta,
        z: cand.z,
        t: iteration,
        chosen_param: Some(cand.param),
        chosen_family: Some(denoiser.family()),
    })
}

/// Evaluate all grid candidates and keep the residual-minimizing one.
/// Candidates run in parallel; the argmin scans in ascending grid order
/// so ties resolve to the smallest parameter on every schedule.
fn search_grid(
    model: &MeasurementModel,
    u: &[f64],
    tau: f64,
    z_prev: &[f64],
    denoisers: &[StepDenoiser],
) -> Candidate {
    let mut candidates: Vec<Candidate> = denoisers
        .par_iter()
        .map(|d| eval_candidate(model, u, tau, z_prev, d))
        .collect();
    let mut best = 0;
    for (i, c) in candidates.iter().enumerate().skip(1) {
        if c.z_norm_sq < candidates[best].z_norm_sq {
            best = i;
        }
    }
    candidates.swap_remove(best)
}

fn st_denoisers(grids: &TuningGrids) -> Vec<StepDenoiser> {
    grids
        .lambda
        .values()
        .iter()
        .map(|&lambda| StepDenoiser::SoftThreshold { lambda })
        .collect()
}

fn eb_denoisers(grids: &TuningGrids, zero_location: bool) -> Vec<StepDenoiser> {
    grids
        .epsilon
        .values()
        .iter()
        .map(|&epsilon| StepDenoiser::EBayes {
            epsilon,
            zero_location,
        })
        .collect()
}

fn trajectory_point(
    model: &MeasurementModel,
    state: &AmpState,
    se: f64,
) -> Result<TrajectoryPoint> {
    let mse = match &model.theta_true {
        Some(truth) => Some(
            crate::model::squared_loss(truth.values(), &state.theta)? / model.n as f64,
        ),
        None => None,
    };
    Ok(TrajectoryPoint {
        t: state.t,
        mse,
        tau2: state.tau_hat * state.tau_hat,
        chosen_param: state.chosen_param,
        chosen_family: state.chosen_family,
        se_prediction: se,
    })
}

/// Run AMP for `iterations` steps with per-iteration parameter tuning.
///
/// For the single-denoiser families every grid value is evaluated as a
/// full candidate `(theta, z)` pair and the pair minimizing `||z||^2/m`
/// is carried forward jointly. The hybrid family runs both searches and
/// keeps the winning family's pair; both families restart from that pair
/// at the next iteration.
pub fn amp_run(
    model: &MeasurementModel,
    family: EstimatorKind,
    iterations: usize,
    grids: &TuningGrids,
    options: &AmpOptions,
) -> Result<Trajectory> {
    let mut state = AmpState::init(model);
    let sigma = model.sigma;
    let init_se = model.delta * (state.tau_hat * state.tau_hat - sigma * sigma).max(0.0);
    let mut trajectory = vec![trajectory_point(model, &state, init_se)?];

    let st_grid = st_denoisers(grids);
    let eb_grid = eb_denoisers(grids, options.zero_location);

    for t in 1..=iterations {
        if !state.z.iter().all(|v| v.is_finite()) || !state.tau_hat.is_finite() {
            return Err(Error::Divergence { iteration: t });
        }
        let frozen = options.freeze_after.is_some_and(|tf| t > tf);

        let mut u = model.matrix.t_matvec(&state.z);
        for (ui, ti) in u.iter_mut().zip(&state.theta) {
            *ui += ti;
        }
        if !u.iter().all(|v| v.is_finite()) {
            return Err(Error::Divergence { iteration: t });
        }

        let (winner, winner_family, se) = if frozen {
            let denoiser = match state.chosen_family.expect("set after first iteration") {
                EstimatorKind::EBayes => StepDenoiser::EBayes {
                    epsilon: state.chosen_param.expect("set after first iteration"),
                    zero_location: options.zero_location,
                },
                _ => StepDenoiser::SoftThreshold {
                    lambda: state.chosen_param.expect("set after first iteration"),
                },
            };
            let cand = eval_candidate(model, &u, state.tau_hat, &state.z, &denoiser);
            let se = model.delta * (cand.z_norm_sq / model.m as f64 - sigma * sigma).max(0.0);
            (cand, denoiser.family(), se)
        } else {
            match family {
                EstimatorKind::SoftThreshold => {
                    let cand = search_grid(model, &u, state.tau_hat, &state.z, &st_grid);
                    let se = se_prediction(cand.z_norm_sq, cand.z_norm_sq, model.m, model.delta, sigma);
                    (cand, EstimatorKind::SoftThreshold, se)
                }
                EstimatorKind::EBayes => {
                    let cand = search_grid(model, &u, state.tau_hat, &state.z, &eb_grid);
                    let se = se_prediction(cand.z_norm_sq, cand.z_norm_sq, model.m, model.delta, sigma);
                    (cand, EstimatorKind::EBayes, se)
                }
                EstimatorKind::Hybrid => {
                    let best_st = search_grid(model, &u, state.tau_hat, &state.z, &st_grid);
                    let best_eb = search_grid(model, &u, state.tau_hat, &state.z, &eb_grid);
                    let se = se_prediction(
                        best_st.z_norm_sq,
                        best_eb.z_norm_sq,
                        model.m,
                        model.delta,
                        sigma,
                    );
                    if best_eb.z_norm_sq <= best_st.z_norm_sq {
                        (best_eb, EstimatorKind::EBayes, se)
                    } else {
                        (best_st, EstimatorKind::SoftThreshold, se)
                    }
                }
            }
        };

        if !winner.z.iter().all(|v| v.is_finite()) {
            return Err(Error::Divergence { iteration: t });
        }
        state = AmpState {
            tau_hat: (winner.z_norm_sq / model.m as f64).sqrt(),
            theta: winner.theta,
            z: winner.z,
            t,
            chosen_param: Some(winner.param),
            chosen_family: Some(winner_family),
        };
        trajectory.push(trajectory_point(model, &state, se)?);
    }
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_signal, SignalFamily, SignalSpec};
    use approx::assert_abs_diff_eq;

    fn rademacher_model(n: usize, delta: f64, sigma: f64, seed: u64) -> MeasurementModel {
        let signal = generate_signal(&SignalSpec {
            n,
            eta: 0.1,
            family: SignalFamily::RademacherNonzeros,
            seed,
        })
        .unwrap();
        generate_measurement(n, delta, sigma, &signal, seed ^ 0x5eed).unwrap()
    }

    #[test]
    fn noiseless_measurement_is_exact_product() {
        let model = rademacher_model(200, 0.5, 0.0, 3);
        let product = model.matrix.matvec(model.theta_true.as_ref().unwrap().values());
        assert_eq!(model.y, product);
    }

    #[test]
    fn column_norms_concentrate() {
        // Mean squared column norm is ||A||_F^2 / n, which concentrates
        // around 1 for N(0, 1/m) entries.
        let model = rademacher_model(10_000, 0.5, 0.0, 7);
        assert_eq!(model.m, 5000);
        let frob_sq = norm_sq(model.matrix.entries());
        let mean_col = frob_sq / model.n as f64;
        assert!((mean_col - 1.0).abs() < 0.05, "mean column norm {mean_col}");
    }

    #[test]
    fn pure_noise_measurement_has_unit_energy() {
        let signal = generate_signal(&SignalSpec {
            n: 10_000,
            eta: 0.0,
            family: SignalFamily::RademacherNonzeros,
            seed: 1,
        })
        .unwrap();
        let model = generate_measurement(10_000, 0.5, 1.0, &signal, 2).unwrap();
        let energy = norm_sq(&model.y) / model.m as f64;
        assert!((energy - 1.0).abs() < 0.1, "residual energy {energy}");
    }

    #[test]
    fn measurement_parameters_are_validated() {
        let signal = generate_signal(&SignalSpec {
            n: 100,
            eta: 0.1,
            family: SignalFamily::RademacherNonzeros,
            seed: 0,
        })
        .unwrap();
        assert!(generate_measurement(100, 0.0, 0.0, &signal, 0).is_err());
        assert!(generate_measurement(100, 1.0, 0.0, &signal, 0).is_err());
        assert!(generate_measurement(100, 0.5, -1.0, &signal, 0).is_err());
        assert!(generate_measurement(50, 0.5, 0.0, &signal, 0).is_err());
    }

    #[test]
    fn initial_state_matches_model() {
        let model = rademacher_model(100, 0.5, 0.0, 5);
        let state = AmpState::init(&model);
        assert_eq!(state.t, 0);
        assert!(state.theta.iter().all(|v| *v == 0.0));
        assert_eq!(state.z, model.y);
        assert_abs_diff_eq!(
            state.tau_hat,
            (norm_sq(&model.y) / model.m as f64).sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn zero_lambda_step_reduces_to_identity_denoiser() {
        // f = identity: <f'> = 1, the Onsager term is z/delta.
        let model = rademacher_model(120, 0.5, 0.1, 9);
        let state = AmpState::init(&model);
        let next = amp_step(&model, &state, StepDenoiser::SoftThreshold { lambda: 0.0 }).unwrap();
        let mut u = model.matrix.t_matvec(&state.z);
        for (ui, ti) in u.iter_mut().zip(&state.theta) {
            *ui += ti;
        }
        assert_eq!(next.theta, u);
        let a_theta = model.matrix.matvec(&u);
        for i in 0..model.m {
            let expected = model.y[i] - a_theta[i] + state.z[i] / model.delta;
            assert_abs_diff_eq!(next.z[i], expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn step_rejects_non_finite_state() {
        let model = rademacher_model(64, 0.5, 0.0, 2);
        let mut state = AmpState::init(&model);
        state.z[0] = f64::NAN;
        let err = amp_step(&model, &state, StepDenoiser::SoftThreshold { lambda: 1.0 });
        assert!(matches!(err, Err(Error::Divergence { iteration: 1 })));
    }

    #[test]
    fn scaled_soft_threshold_matches_rescaling_identity() {
        // f_tau(u) = tau f_1(u / tau).
        let u = [3.0, -0.4, 1.7, 0.05, -2.2];
        let tau = 0.7;
        let lambda = 1.3;
        let (direct, _) = apply_denoiser(&u, tau, &StepDenoiser::SoftThreshold { lambda });
        for (d, &ui) in direct.iter().zip(&u) {
            let rescaled = tau * soft_threshold_scalar(ui / tau, lambda);
            assert_abs_diff_eq!(*d, rescaled, epsilon = 1e-12);
        }
    }

    #[test]
    fn se_prediction_formula() {
        assert_eq!(se_prediction(4.0, 9.0, 4, 0.5, 1.0), 0.0);
        assert_abs_diff_eq!(se_prediction(8.0, 9.0, 4, 0.5, 0.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_iterations_yields_initial_point_only() {
        let model = rademacher_model(100, 0.5, 0.0, 4);
        let grids = TuningGrids::for_size(100).unwrap();
        let traj = amp_run(
            &model,
            EstimatorKind::SoftThreshold,
            0,
            &grids,
            &AmpOptions::default(),
        )
        .unwrap();
        assert_eq!(traj.len(), 1);
        let theta_norm = model.theta_true.as_ref().unwrap().norm_sq();
        assert_abs_diff_eq!(
            traj[0].mse.unwrap(),
            theta_norm / model.n as f64,
            epsilon = 1e-12
        );
        assert_eq!(traj[0].chosen_param, None);
    }

    #[test]
    fn freeze_holds_parameters_constant() {
        let model = rademacher_model(400, 0.5, 0.0, 12);
        let grids = TuningGrids::for_size(400).unwrap();
        let options = AmpOptions {
            zero_location: true,
            freeze_after: Some(1),
        };
        let traj = amp_run(&model, EstimatorKind::Hybrid, 6, &grids, &options).unwrap();
        let frozen_param = traj[1].chosen_param.unwrap();
        let frozen_family = traj[1].chosen_family.unwrap();
        for point in &traj[2..] {
            assert_eq!(point.chosen_param.unwrap(), frozen_param);
            assert_eq!(point.chosen_family.unwrap(), frozen_family);
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let model = rademacher_model(300, 0.5, 0.0, 21);
        let grids = TuningGrids::for_size(300).unwrap();
        let a = amp_run(&model, EstimatorKind::Hybrid, 5, &grids, &AmpOptions::default()).unwrap();
        let b = amp_run(&model, EstimatorKind::Hybrid, 5, &grids, &AmpOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn amp_reduces_mse_in_easy_regime() {
        let model = rademacher_model(600, 0.5, 0.0, 33);
        let grids = TuningGrids::for_size(600).unwrap();
        for family in [
            EstimatorKind::SoftThreshold,
            EstimatorKind::EBayes,
            EstimatorKind::Hybrid,
        ] {
            let traj = amp_run(&model, family, 8, &grids, &AmpOptions::default()).unwrap();
            let first = traj[0].mse.unwrap();
            let last = traj[8].mse.unwrap();
            assert!(
                last < 0.25 * first,
                "{family}: MSE {first} -> {last} did not shrink"
            );
        }
    }

    #[test]
    fn onsager_derivative_matches_fd_for_soft_threshold() {
        // <f'> against the averaged central-difference divergence of the
        // scaled denoiser, away from the threshold kinks.
        let model = rademacher_model(400, 0.5, 0.0, 44);
        let state = AmpState::init(&model);
        let mut u = model.matrix.t_matvec(&state.z);
        for (ui, ti) in u.iter_mut().zip(&state.theta) {
            *ui += ti;
        }
        let tau = state.tau_hat;
        let lambda = 1.0;
        let h = 1e-6;
        let near_kink = u.iter().any(|v| (v.abs() - lambda * tau).abs() < 10.0 * h);
        assert!(!near_kink, "unlucky draw: kink too close for FD");
        let (_, fp) = apply_denoiser(&u, tau, &StepDenoiser::SoftThreshold { lambda });
        let fd = crate::risk::divergence_fd(
            |v| apply_denoiser(v, tau, &StepDenoiser::SoftThreshold { lambda }).0,
            &u,
            h,
        ) / u.len() as f64;
        assert!((fp - fd).abs() < 1e-3, "analytic {fp} vs fd {fd}");
    }
}
