//! Domain types, sparse-signal generation, noise injection, and loss.
//!
//! The observation model throughout the crate is `y = theta + w` with
//! `w ~ N(0, I)` (unit noise variance; other noise levels are handled by
//! rescaling where they arise). Signals are deterministic functions of a
//! [`SignalSpec`], and noise is a deterministic function of a seed, so
//! every experiment in the crate can be replayed bit-for-bit.
//!
//! Randomness discipline: all streams come from `ChaCha8Rng` seeded with
//! an explicit `u64`. Parallel Monte Carlo splits streams by seed, never
//! by sharing a generator: trial `i` uses `base_seed ^ i` (see
//! [`trial_seed`]), which makes parallel and sequential runs identical.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::util::norm_sq;

/// Tags for the three estimators compared throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    SoftThreshold,
    EBayes,
    Hybrid,
}

impl EstimatorKind {
    /// Short stable name used in CSV output and CLI flags.
    pub fn tag(&self) -> &'static str {
        match self {
            EstimatorKind::SoftThreshold => "st",
            EstimatorKind::EBayes => "eb",
            EstimatorKind::Hybrid => "hybrid",
        }
    }
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Distribution of the nonzero entries of a sparse signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalFamily {
    /// Half the nonzero entries equal `v`, the other half `-v`.
    HalfPlusMinus(f64),
    /// Every nonzero entry equals `v`.
    AllConstant(f64),
    /// Nonzero entries drawn i.i.d. from `N(0, variance)`.
    GaussianNonzeros(f64),
    /// Nonzero entries drawn i.i.d. from a zero-mean Laplace law with the
    /// given variance.
    LaplaceNonzeros(f64),
    /// Nonzero entries drawn i.i.d. uniform on `{-1, +1}`.
    RademacherNonzeros,
    /// Nonzero entries drawn i.i.d. uniform on `[lo, hi)`.
    UniformNonzeros(f64, f64),
}

impl SignalFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SignalFamily::GaussianNonzeros(v) | SignalFamily::LaplaceNonzeros(v) => {
                if !(v > 0.0) {
                    return Err(Error::parameter(format!("variance must be > 0, got {v}")));
                }
            }
            SignalFamily::UniformNonzeros(lo, hi) => {
                if !(lo < hi) {
                    return Err(Error::parameter(format!(
                        "uniform bounds must satisfy lo < hi, got [{lo}, {hi})"
                    )));
                }
            }
            SignalFamily::HalfPlusMinus(v) | SignalFamily::AllConstant(v) => {
                if !v.is_finite() {
                    return Err(Error::parameter("nonzero value must be finite"));
                }
            }
            SignalFamily::RademacherNonzeros => {}
        }
        Ok(())
    }

    /// Upper bound for the empirical fourth moment `(1/n) sum theta_i^4`
    /// of signals generated from this family at moderate sparsity.
    ///
    /// The bound is the relevant population fourth-moment proxy plus unit
    /// slack for sampling fluctuation.
    pub fn fourth_moment_cap(&self) -> f64 {
        match *self {
            SignalFamily::HalfPlusMinus(v) | SignalFamily::AllConstant(v) => v.powi(4) + 1.0,
            SignalFamily::GaussianNonzeros(var) | SignalFamily::LaplaceNonzeros(var) => {
                3.0 * var * var + 1.0
            }
            SignalFamily::RademacherNonzeros => 2.0,
            SignalFamily::UniformNonzeros(lo, hi) => lo.powi(4) + hi.powi(4) + 1.0,
        }
    }

    /// Draw one nonzero value. Only meaningful for the random families;
    /// the deterministic ones are handled directly in [`generate_signal`].
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            SignalFamily::HalfPlusMinus(v) | SignalFamily::AllConstant(v) => v,
            SignalFamily::GaussianNonzeros(var) => var.sqrt() * standard_normal(rng),
            SignalFamily::LaplaceNonzeros(var) => {
                // Inverse-CDF sampling; Laplace(scale b) has variance 2 b^2.
                let b = (var / 2.0).sqrt();
                let u = uniform01(rng) - 0.5;
                let t = (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE);
                -b * u.signum() * t.ln()
            }
            SignalFamily::RademacherNonzeros => {
                if rng.next_u64() & 1 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            SignalFamily::UniformNonzeros(lo, hi) => lo + (hi - lo) * uniform01(rng),
        }
    }
}

/// Everything needed to generate a signal deterministically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalSpec {
    pub n: usize,
    /// True sparsity level `k/n`; the signal has exactly `round(eta * n)`
    /// nonzero entries.
    pub eta: f64,
    pub family: SignalFamily,
    pub seed: u64,
}

/// A sparse ground-truth vector together with its sparsity metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    values: Vec<f64>,
    eta: f64,
    family: SignalFamily,
}

impl Signal {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn family(&self) -> SignalFamily {
        self.family
    }

    pub fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|v| **v != 0.0).count()
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.values)
    }

    /// Empirical fourth moment `(1/n) sum theta_i^4`.
    pub fn fourth_moment(&self) -> f64 {
        self.values.iter().map(|v| v.powi(4)).sum::<f64>() / self.n() as f64
    }
}

/// A noisy observation `y = theta + w`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    values: Vec<f64>,
}

impl Observation {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::parameter("observation must be nonempty"));
        }
        Ok(Observation { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }
}

/// Per-trial record: one estimator's normalized loss, normalized SURE,
/// and the parameter it ran with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskReport {
    pub estimator: EstimatorKind,
    /// `||estimate - theta||^2 / n` (always >= 0).
    pub loss: f64,
    /// Normalized SURE of the estimate.
    pub sure: f64,
    /// The lambda or epsilon the estimator was evaluated at.
    pub param: f64,
}

impl RiskReport {
    pub fn new(estimator: EstimatorKind, loss: f64, sure: f64, param: f64) -> Result<Self> {
        if !(loss >= 0.0) {
            return Err(Error::parameter(format!("loss must be >= 0, got {loss}")));
        }
        Ok(RiskReport {
            estimator,
            loss,
            sure,
            param,
        })
    }
}

/// Stream-splitting rule for parallel Monte Carlo: trial `i` of a run
/// seeded with `base` uses `base ^ i`.
pub fn trial_seed(base: u64, trial: u64) -> u64 {
    base ^ trial
}

/// The crate-wide seedable generator.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw in `[0, 1)` with 53 random bits.
pub(crate) fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One standard normal via Box-Muller.
pub(crate) fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    standard_normal_pair(rng).0
}

/// A pair of independent standard normals via Box-Muller.
pub(crate) fn standard_normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    // 1 - u in (0, 1] keeps the log finite.
    let u1 = 1.0 - uniform01(rng);
    let u2 = uniform01(rng);
    let r = (-2.0 * u1.ln()).sqrt();
    let phi = 2.0 * std::f64::consts::PI * u2;
    (r * phi.cos(), r * phi.sin())
}

/// Fill `out` with i.i.d. standard normals.
pub(crate) fn fill_standard_normal(rng: &mut ChaCha8Rng, out: &mut [f64]) {
    let mut chunks = out.chunks_exact_mut(2);
    for pair in &mut chunks {
        let (a, b) = standard_normal_pair(rng);
        pair[0] = a;
        pair[1] = b;
    }
    if let [last] = chunks.into_remainder() {
        *last = standard_normal(rng);
    }
}

/// Unbiased integer draw from `[0, bound)` by rejection.
fn gen_index(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let zone = u64::MAX - u64::MAX % bound;
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % bound;
        }
    }
}

/// `k` distinct positions from `0..n`, sorted ascending, via a partial
/// Fisher-Yates shuffle.
fn sample_support(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    debug_assert!(k <= n);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + gen_index(rng, (n - i) as u64) as usize;
        idx.swap(i, j);
    }
    let mut support = idx[..k].to_vec();
    support.sort_unstable();
    support
}

fn shuffle<T>(rng: &mut ChaCha8Rng, xs: &mut [T]) {
    for i in (1..xs.len()).rev() {
        let j = gen_index(rng, (i + 1) as u64) as usize;
        xs.swap(i, j);
    }
}

/// Number of nonzero entries for a sparsity level: `round(eta * n)`,
/// ties rounding half-up.
fn nonzero_count_for(n: usize, eta: f64) -> usize {
    (eta * n as f64).round() as usize
}

/// Generate a sparse signal: exactly `round(eta * n)` nonzero entries on
/// a uniformly random support, values drawn per family. Pure function of
/// the spec.
pub fn generate_signal(spec: &SignalSpec) -> Result<Signal> {
    if spec.n == 0 {
        return Err(Error::parameter("signal length must be >= 1"));
    }
    if !(0.0..=1.0).contains(&spec.eta) {
        return Err(Error::parameter(format!(
            "eta must lie in [0, 1], got {}",
            spec.eta
        )));
    }
    spec.family.validate()?;

    let k = nonzero_count_for(spec.n, spec.eta);
    let mut rng = rng_from_seed(spec.seed);
    let support = sample_support(&mut rng, spec.n, k);

    let nonzeros = match spec.family {
        SignalFamily::HalfPlusMinus(v) => {
            // ceil(k/2) positive entries, floor(k/2) negative, assigned to
            // the support in shuffled order so sign is independent of index.
            let mut vals: Vec<f64> = (0..k)
                .map(|i| if i < k.div_ceil(2) { v } else { -v })
                .collect();
            shuffle(&mut rng, &mut vals);
            vals
        }
        _ => (0..k).map(|_| spec.family.sample(&mut rng)).collect(),
    };

    let mut values = vec![0.0; spec.n];
    for (pos, val) in support.into_iter().zip(nonzeros) {
        values[pos] = val;
    }
    Ok(Signal {
        values,
        eta: spec.eta,
        family: spec.family,
    })
}

/// Observe a signal through i.i.d. unit-variance Gaussian noise.
/// Deterministic given the seed.
pub fn observe(signal: &Signal, seed: u64) -> Observation {
    let mut rng = rng_from_seed(seed);
    let mut noise = vec![0.0; signal.n()];
    fill_standard_normal(&mut rng, &mut noise);
    let values = signal
        .values()
        .iter()
        .zip(&noise)
        .map(|(t, w)| t + w)
        .collect();
    Observation { values }
}

/// Squared error `||a - b||^2`. Symmetric in its arguments.
pub fn squared_loss(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}
