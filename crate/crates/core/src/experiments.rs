//! Monte Carlo harness: sparsity sweeps, statistical verification
//! suites, and AMP experiments, all deterministic given a base seed.
//!
//! Seed discipline: a sweep point `p` derives `point_base = seed ^ (p << 40)`;
//! noise trial `i` within a point uses `point_base ^ i`, and the point's
//! signal uses `point_base ^ (1 << 63)`. Trials touch only the low 40
//! bits, points only bits 40.., and the signal tag bit 63, so streams
//! never collide. Trials are embarrassingly parallel; results are
//! collected in trial order before aggregation, so parallel and
//! sequential runs produce identical output.

use std::path::Path;

use rayon::prelude::*;

use crate::amp::{amp_run, generate_measurement, AmpOptions, Trajectory};
use crate::denoise::{ebayes, soft_threshold, EbParams, SoftThresholdParams};
use crate::error::{Error, Result};
use crate::model::{
    generate_signal, observe, squared_loss, trial_seed, EstimatorKind, RiskReport, Signal,
    SignalFamily, SignalSpec,
};
use crate::risk::{sure_ebayes, sure_soft_threshold};
use crate::selection::{hybrid, minimax_lambda, tune_eb, tune_st, TuningGrids};
use crate::util::{mean, sample_std};

const SIGNAL_SEED_TAG: u64 = 1 << 63;

/// Smallest mixture weight on the default epsilon grid; used in place of
/// `eta` when a sweep point has no nonzero entries.
const EPSILON_FLOOR: f64 = 0.02;

fn point_base(seed: u64, point: usize) -> u64 {
    seed ^ ((point as u64) << 40)
}

/// Full double precision (17 significant digits), fixed layout.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn write_to_path(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// Sparsity sweeps
// ---------------------------------------------------------------------------

/// How sweep estimators pick their parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TuningMode {
    /// The sparsity level is treated as known: the threshold is the
    /// minimax `lambda*(eta)` and the mixture weight is `eta` itself.
    KnownEta,
    /// Both parameters are tuned per trial by SURE grid search.
    SureGrid,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub n: usize,
    pub eta_grid: Vec<f64>,
    pub family: SignalFamily,
    pub trials: usize,
    pub estimators: Vec<EstimatorKind>,
    pub tuning: TuningMode,
    /// Use the zero-location empirical Bayes form (default: general).
    pub zero_location: bool,
    /// Redraw the signal every trial instead of fixing it per point.
    pub redraw_signal: bool,
    pub base_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub eta: f64,
    pub estimator: EstimatorKind,
    pub mean_loss: f64,
    pub std_loss: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eta,estimator,mean_loss,std_loss,trials\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_f64(r.eta),
                r.estimator,
                fmt_f64(r.mean_loss),
                fmt_f64(r.std_loss),
                r.trials
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_to_path(path, &self.to_csv())
    }
}

fn validate_sweep(config: &SweepConfig) -> Result<()> {
    if config.trials == 0 {
        return Err(Error::parameter("trials must be >= 1"));
    }
    if config.eta_grid.is_empty() {
        return Err(Error::parameter("eta grid must be nonempty"));
    }
    if config.eta_grid.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(Error::parameter("eta grid entries must lie in [0, 1]"));
    }
    if config.estimators.is_empty() {
        return Err(Error::parameter("estimator set must be nonempty"));
    }
    Ok(())
}

/// One trial's reports for the requested estimator set.
fn run_sweep_trial(
    signal: &Signal,
    noise_seed: u64,
    config: &SweepConfig,
    known_params: Option<(f64, f64)>,
    grids: &TuningGrids,
) -> Result<Vec<RiskReport>> {
    let y = observe(signal, noise_seed);
    let yv = y.values();
    let n = signal.n() as f64;

    let (lambda, eps) = match known_params {
        Some(pair) => pair,
        None => {
            let (lambda, _) = tune_st(yv, &grids.lambda)?;
            let (eps, _) = tune_eb(yv, &grids.epsilon, config.zero_location)?;
            (lambda, eps)
        }
    };

    let st_params = SoftThresholdParams::new(lambda)?;
    let eb_params = EbParams::new(eps, config.zero_location)?;
    let st_est = soft_threshold(yv, &st_params);
    let eb_est = ebayes(yv, &eb_params);
    let st_loss = squared_loss(signal.values(), &st_est)? / n;
    let eb_loss = squared_loss(signal.values(), &eb_est)? / n;
    let st_sure = sure_soft_threshold(yv, lambda);
    let eb_sure = sure_ebayes(yv, &eb_params, true)?;

    let mut reports = Vec::with_capacity(config.estimators.len());
    for kind in &config.estimators {
        let report = match kind {
            EstimatorKind::SoftThreshold => {
                RiskReport::new(EstimatorKind::SoftThreshold, st_loss, st_sure, lambda)?
            }
            EstimatorKind::EBayes => {
                RiskReport::new(EstimatorKind::EBayes, eb_loss, eb_sure, eps)?
            }
            EstimatorKind::Hybrid => {
                let (loss, sure, param) = if eb_sure <= st_sure {
                    (eb_loss, eb_sure, eps)
                } else {
                    (st_loss, st_sure, lambda)
                };
                RiskReport::new(EstimatorKind::Hybrid, loss, sure, param)?
            }
        };
        reports.push(report);
    }
    Ok(reports)
}

/// Average normalized loss per (eta, estimator) over seeded noise trials.
/// The signal is fixed per sweep point unless `redraw_signal` is set.
pub fn sweep_eta(config: &SweepConfig) -> Result<SweepTable> {
    validate_sweep(config)?;
    let grids = TuningGrids::for_size(config.n)?;
    let mut rows = Vec::new();

    for (point, &eta) in config.eta_grid.iter().enumerate() {
        let base = point_base(config.base_seed, point);
        let signal_seed = base ^ SIGNAL_SEED_TAG;
        let make_spec = |seed| SignalSpec {
            n: config.n,
            eta,
            family: config.family,
            seed,
        };
        let fixed_signal = generate_signal(&make_spec(signal_seed))?;

        let known_params = match config.tuning {
            TuningMode::KnownEta => {
                let eps = if eta == 0.0 { EPSILON_FLOOR } else { eta };
                Some((minimax_lambda(eps)?, eps))
            }
            TuningMode::SureGrid => None,
        };

        let per_trial: Vec<Result<Vec<RiskReport>>> = (0..config.trials)
            .into_par_iter()
            .map(|i| {
                let noise_seed = trial_seed(base, i as u64);
                if config.redraw_signal {
                    let signal = generate_signal(&make_spec(signal_seed ^ i as u64))?;
                    run_sweep_trial(&signal, noise_seed, config, known_params, &grids)
                } else {
                    run_sweep_trial(&fixed_signal, noise_seed, config, known_params, &grids)
                }
            })
            .collect();

        let mut losses: Vec<Vec<f64>> = vec![Vec::with_capacity(config.trials); config.estimators.len()];
        for trial in per_trial {
            for (slot, report) in trial?.into_iter().enumerate() {
                losses[slot].push(report.loss);
            }
        }
        for (slot, kind) in config.estimators.iter().enumerate() {
            let series = &losses[slot];
            rows.push(SweepRow {
                eta,
                estimator: *kind,
                mean_loss: mean(series),
                std_loss: if series.len() > 1 { sample_std(series) } else { 0.0 },
                trials: config.trials,
            });
        }
    }
    Ok(SweepTable { rows })
}

/// Named sweep scenario presets.
pub fn sweep_preset(name: &str, n: usize, trials: usize, base_seed: u64) -> Option<SweepConfig> {
    let eta_grid: Vec<f64> = (1..=10).map(|i| 0.05 * i as f64).collect();
    let both = vec![EstimatorKind::SoftThreshold, EstimatorKind::EBayes];
    let all = vec![
        EstimatorKind::SoftThreshold,
        EstimatorKind::EBayes,
        EstimatorKind::Hybrid,
    ];
    let (family, tuning, estimators) = match name {
        "fig1" => (SignalFamily::HalfPlusMinus(3.0), TuningMode::KnownEta, both),
        "fig2" => (SignalFamily::AllConstant(3.0), TuningMode::KnownEta, both),
        "fig3" => (SignalFamily::HalfPlusMinus(3.0), TuningMode::KnownEta, all),
        "fig4" => (SignalFamily::AllConstant(3.0), TuningMode::KnownEta, all),
        "fig5" => (SignalFamily::GaussianNonzeros(1.0), TuningMode::SureGrid, all),
        "fig6" => (SignalFamily::LaplaceNonzeros(2.0), TuningMode::SureGrid, all),
        "fig7" => (SignalFamily::RademacherNonzeros, TuningMode::SureGrid, all),
        "fig8" => (
            SignalFamily::UniformNonzeros(-1.0, 1.0),
            TuningMode::SureGrid,
            all,
        ),
        _ => return None,
    };
    Some(SweepConfig {
        n,
        eta_grid,
        family,
        trials,
        estimators,
        tuning,
        zero_location: false,
        redraw_signal: false,
        base_seed,
    })
}

pub const SWEEP_PRESETS: [&str; 8] = [
    "fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8",
];

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

/// One pass/fail record of a verification suite.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub statistic: f64,
    /// Inclusive lower bound, when the check has one.
    pub lo: Option<f64>,
    /// Inclusive upper bound, when the check has one.
    pub hi: Option<f64>,
    pub pass: bool,
}

impl CheckRecord {
    fn bounded(name: impl Into<String>, statistic: f64, lo: Option<f64>, hi: Option<f64>) -> Self {
        let pass = lo.is_none_or(|l| statistic >= l) && hi.is_none_or(|h| statistic <= h);
        CheckRecord {
            name: name.into(),
            statistic,
            lo,
            hi,
            pass,
        }
    }
}

/// Machine-readable result of one verification suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    /// Raw values recorded for audit, not checked.
    pub info: Vec<(String, f64)>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Line-delimited `key=value` report, one record per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("suite name={} seed={}\n", self.suite, self.seed);
        for c in &self.checks {
            out.push_str(&format!(
                "check name={} statistic={} lo={} hi={} verdict={}\n",
                c.name,
                fmt_f64(c.statistic),
                c.lo.map(fmt_f64).unwrap_or_else(|| "-".into()),
                c.hi.map(fmt_f64).unwrap_or_else(|| "-".into()),
                if c.pass { "pass" } else { "fail" }
            ));
        }
        for (name, value) in &self.info {
            out.push_str(&format!("info name={} value={}\n", name, fmt_f64(*value)));
        }
        out.push_str(&format!(
            "summary verdict={}\n",
            if self.pass() { "pass" } else { "fail" }
        ));
        out
    }

    pub fn write_text(&self, path: &Path) -> Result<()> {
        write_to_path(path, &self.to_text())
    }
}

/// Collect `(loss/n, sure)` pairs for a fixed scenario over noise trials.
fn loss_sure_series(
    signal: &Signal,
    base: u64,
    trials: usize,
    estimate_and_sure: impl Fn(&[f64]) -> Result<(Vec<f64>, f64)> + Sync,
) -> Result<Vec<(f64, f64)>> {
    let n = signal.n() as f64;
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let y = observe(signal, trial_seed(base, i as u64));
            let (est, sure) = estimate_and_sure(y.values())?;
            Ok((squared_loss(signal.values(), &est)? / n, sure))
        })
        .collect()
}

fn unbiasedness_check(
    name: &str,
    signal: &Signal,
    base: u64,
    trials: usize,
    estimate_and_sure: impl Fn(&[f64]) -> Result<(Vec<f64>, f64)> + Sync,
) -> Result<CheckRecord> {
    let series = loss_sure_series(signal, base, trials, estimate_and_sure)?;
    let diffs: Vec<f64> = series.iter().map(|(loss, sure)| sure - loss).collect();
    let se = sample_std(&diffs) / (trials as f64).sqrt();
    Ok(CheckRecord::bounded(
        name,
        mean(&diffs).abs(),
        None,
        Some(3.0 * se),
    ))
}

#[derive(Debug, Clone, Copy)]
pub struct UnbiasednessConfig {
    pub n: usize,
    pub trials: usize,
    pub base_seed: u64,
}

impl Default for UnbiasednessConfig {
    fn default() -> Self {
        UnbiasednessConfig {
            n: 1000,
            trials: 2000,
            base_seed: 1,
        }
    }
}

/// SURE is an unbiased risk estimate: per estimator, the mean SURE and
/// the mean normalized loss agree within three standard errors of their
/// paired difference.
pub fn unbiasedness_suite(config: &UnbiasednessConfig) -> Result<SuiteReport> {
    let half_pm = generate_signal(&SignalSpec {
        n: config.n,
        eta: 0.2,
        family: SignalFamily::HalfPlusMinus(3.0),
        seed: config.base_seed ^ SIGNAL_SEED_TAG,
    })?;
    let all_const = generate_signal(&SignalSpec {
        n: config.n,
        eta: 0.2,
        family: SignalFamily::AllConstant(3.0),
        seed: config.base_seed ^ SIGNAL_SEED_TAG ^ 1,
    })?;

    let st_params = SoftThresholdParams::new(1.0)?;
    let eb_zl = EbParams::new(0.2, true)?;
    let eb_gen = EbParams::new(0.2, false)?;

    let checks = vec![
        unbiasedness_check(
            "st_lambda1_half_pm3",
            &half_pm,
            point_base(config.base_seed, 0),
            config.trials,
            |y| Ok((soft_threshold(y, &st_params), sure_soft_threshold(y, 1.0))),
        )?,
        unbiasedness_check(
            "eb_zero_location_half_pm3",
            &half_pm,
            point_base(config.base_seed, 1),
            config.trials,
            |y| Ok((ebayes(y, &eb_zl), sure_ebayes(y, &eb_zl, true)?)),
        )?,
        unbiasedness_check(
            "eb_general_all_const3",
            &all_const,
            point_base(config.base_seed, 2),
            config.trials,
            |y| Ok((ebayes(y, &eb_gen), sure_ebayes(y, &eb_gen, true)?)),
        )?,
    ];
    Ok(SuiteReport {
        suite: "unbiasedness".into(),
        seed: config.base_seed,
        checks,
        info: Vec::new(),
    })
}

#[derive(Debug, Clone)]
pub struct ConcentrationConfig {
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
}

impl Default for ConcentrationConfig {
    fn default() -> Self {
        ConcentrationConfig {
            sizes: vec![250, 1000, 4000],
            trials: 500,
            base_seed: 2,
        }
    }
}

/// Loss and SURE concentration: their per-trial standard deviation
/// shrinks like `n^{-1/2}`, so each 4x growth in `n` should halve it.
/// Successive std ratios must land in `[1.5, 2.5]`.
pub fn concentration_suite(config: &ConcentrationConfig) -> Result<SuiteReport> {
    if config.sizes.len() < 2 {
        return Err(Error::parameter("concentration needs at least two sizes"));
    }
    let st_params = SoftThresholdParams::new(1.0)?;
    let eb_params = EbParams::new(0.2, true)?;

    let mut st_loss_std = Vec::new();
    let mut eb_loss_std = Vec::new();
    let mut eb_sure_std = Vec::new();
    let mut info = Vec::new();

    for (point, &n) in config.sizes.iter().enumerate() {
        let base = point_base(config.base_seed, point);
        let signal = generate_signal(&SignalSpec {
            n,
            eta: 0.2,
            family: SignalFamily::HalfPlusMinus(3.0),
            seed: base ^ SIGNAL_SEED_TAG,
        })?;
        let st_series = loss_sure_series(&signal, base, config.trials, |y| {
            Ok((soft_threshold(y, &st_params), sure_soft_threshold(y, 1.0)))
        })?;
        let eb_series = loss_sure_series(&signal, base ^ 1 << 39, config.trials, |y| {
            Ok((ebayes(y, &eb_params), sure_ebayes(y, &eb_params, true)?))
        })?;

        let st_losses: Vec<f64> = st_series.iter().map(|p| p.0).collect();
        let eb_losses: Vec<f64> = eb_series.iter().map(|p| p.0).collect();
        let eb_sures: Vec<f64> = eb_series.iter().map(|p| p.1).collect();
        st_loss_std.push(sample_std(&st_losses));
        eb_loss_std.push(sample_std(&eb_losses));
        eb_sure_std.push(sample_std(&eb_sures));
        info.push((format!("st_loss_std_n{n}"), st_loss_std[point]));
        info.push((format!("eb_loss_std_n{n}"), eb_loss_std[point]));
        info.push((format!("eb_sure_std_n{n}"), eb_sure_std[point]));
    }

    let mut checks = Vec::new();
    for w in 0..config.sizes.len() - 1 {
        let (n0, n1) = (config.sizes[w], config.sizes[w + 1]);
        for (tag, series) in [
            ("st_loss", &st_loss_std),
            ("eb_loss", &eb_loss_std),
            ("eb_sure", &eb_sure_std),
        ] {
            checks.push(CheckRecord::bounded(
                format!("{tag}_std_ratio_n{n0}_n{n1}"),
                series[w] / series[w + 1],
                Some(1.5),
                Some(2.5),
            ));
        }
    }
    Ok(SuiteReport {
        suite: "concentration".into(),
        seed: config.base_seed,
        checks,
        info,
    })
}

#[derive(Debug, Clone)]
pub struct HybridRegretConfig {
    pub n: usize,
    pub trials: usize,
    pub etas: Vec<f64>,
    pub base_seed: u64,
}

impl Default for HybridRegretConfig {
    fn default() -> Self {
        HybridRegretConfig {
            n: 1000,
            trials: 1000,
            etas: vec![0.1, 0.3, 0.5],
            base_seed: 3,
        }
    }
}

/// The hybrid's loss concentrates on the smaller of its two candidates'
/// losses: the excess over the per-trial minimum exceeds 0.02 in fewer
/// than 1% of trials, and its mean is below `5 / sqrt(n)`.
pub fn hybrid_regret_suite(config: &HybridRegretConfig) -> Result<SuiteReport> {
    let scenarios = [
        ("half_pm3", SignalFamily::HalfPlusMinus(3.0)),
        ("all_const3", SignalFamily::AllConstant(3.0)),
    ];
    let mut checks = Vec::new();
    for (si, (tag, family)) in scenarios.iter().enumerate() {
        for (ei, &eta) in config.etas.iter().enumerate() {
            let base = point_base(config.base_seed, si * config.etas.len() + ei);
            let signal = generate_signal(&SignalSpec {
                n: config.n,
                eta,
                family: *family,
                seed: base ^ SIGNAL_SEED_TAG,
            })?;
            let lambda = minimax_lambda(eta)?;
            let n = config.n as f64;

            let excesses: Vec<f64> = (0..config.trials)
                .into_par_iter()
                .map(|i| {
                    let y = observe(&signal, trial_seed(base, i as u64));
                    let yv = y.values();
                    let st_params = SoftThresholdParams::new(lambda)?;
                    let eb_params = EbParams::new(eta, false)?;
                    let st_loss = squared_loss(signal.values(), &soft_threshold(yv, &st_params))?;
                    let eb_loss = squared_loss(signal.values(), &ebayes(yv, &eb_params))?;
                    let choice = hybrid(yv, lambda, eta, false)?;
                    let hybrid_loss = if choice.gamma == 1 { eb_loss } else { st_loss };
                    Ok((hybrid_loss - st_loss.min(eb_loss)) / n)
                })
                .collect::<Result<_>>()?;

            let exceed = excesses.iter().filter(|e| **e > 0.02).count() as f64
                / config.trials as f64;
            checks.push(CheckRecord::bounded(
                format!("{tag}_eta{eta}_exceed_rate"),
                exceed,
                None,
                Some(0.01),
            ));
            checks.push(CheckRecord::bounded(
                format!("{tag}_eta{eta}_mean_excess"),
                mean(&excesses),
                None,
                Some(5.0 / n.sqrt()),
            ));
        }
    }
    Ok(SuiteReport {
        suite: "hybrid-regret".into(),
        seed: config.base_seed,
        checks,
        info: Vec::new(),
    })
}

// ---------------------------------------------------------------------------
// AMP experiments
// ---------------------------------------------------------------------------

/// A compressed-sensing scenario: undersampling, sparsity, noise level,
/// and the nonzero-value distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmpScenario {
    pub delta: f64,
    pub eta: f64,
    pub sigma: f64,
    pub family: SignalFamily,
}

/// The four preset scenarios.
pub fn amp_preset(name: &str) -> Option<AmpScenario> {
    match name {
        "fig9" => Some(AmpScenario {
            delta: 0.65,
            eta: 0.13,
            sigma: 1.0,
            family: SignalFamily::GaussianNonzeros(5.0),
        }),
        "fig10" => Some(AmpScenario {
            delta: 0.65,
            eta: 0.13,
            sigma: 1.0,
            family: SignalFamily::UniformNonzeros(-5.0, 5.0),
        }),
        "fig11" => Some(AmpScenario {
            delta: 0.5,
            eta: 0.1,
            sigma: 0.0,
            family: SignalFamily::RademacherNonzeros,
        }),
        "fig12" => Some(AmpScenario {
            delta: 0.5,
            eta: 0.05,
            sigma: 0.05,
            family: SignalFamily::RademacherNonzeros,
        }),
        _ => None,
    }
}

pub const AMP_PRESETS: [&str; 4] = ["fig9", "fig10", "fig11", "fig12"];

#[derive(Debug, Clone)]
pub struct AmpExperimentConfig {
    pub scenario: AmpScenario,
    pub n: usize,
    pub iterations: usize,
    pub families: Vec<EstimatorKind>,
    pub options: AmpOptions,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmpTableRow {
    pub t: usize,
    pub family: EstimatorKind,
    pub mse: Option<f64>,
    pub tau2: f64,
    pub chosen_param: Option<f64>,
    pub se_prediction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmpTable {
    pub rows: Vec<AmpTableRow>,
}

impl AmpTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,family,mse,tau_hat2,chosen_param,se_prediction\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.t,
                r.family,
                fmt_opt(r.mse),
                fmt_f64(r.tau2),
                fmt_opt(r.chosen_param),
                fmt_f64(r.se_prediction)
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_to_path(path, &self.to_csv())
    }
}

/// Run one AMP trajectory per requested family on a shared instance.
pub fn amp_experiment(config: &AmpExperimentConfig) -> Result<AmpTable> {
    let signal = generate_signal(&SignalSpec {
        n: config.n,
        eta: config.scenario.eta,
        family: config.scenario.family,
        seed: config.seed ^ SIGNAL_SEED_TAG,
    })?;
    let model = generate_measurement(
        config.n,
        config.scenario.delta,
        config.scenario.sigma,
        &signal,
        config.seed,
    )?;
    let grids = TuningGrids::for_size(config.n)?;

    let mut rows = Vec::new();
    for family in &config.families {
        let trajectory: Trajectory =
            amp_run(&model, *family, config.iterations, &grids, &config.options)?;
        for p in trajectory {
            rows.push(AmpTableRow {
                t: p.t,
                family: *family,
                mse: p.mse,
                tau2: p.tau2,
                chosen_param: p.chosen_param,
                se_prediction: p.se_prediction,
            });
        }
    }
    Ok(AmpTable { rows })
}
