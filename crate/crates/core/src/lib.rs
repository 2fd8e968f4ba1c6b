//! Sparse-vector denoising in Gaussian noise.
//!
//! The crate implements three estimators for the observation model
//! `y = theta + w`, `w ~ N(0, I)`, where `theta` is sparse:
//!
//! * soft thresholding,
//! * an empirical Bayes posterior mean under a Bernoulli-Gaussian prior
//!   (general and zero-location forms),
//! * a hybrid rule that picks whichever of the two has the smaller
//!   Stein unbiased risk estimate (SURE) on the realized data.
//!
//! Exact SURE expressions for all estimators live in [`risk`], together
//! with a finite-difference divergence oracle used to validate them.
//! [`selection`] provides minimax and SURE-grid parameter tuning,
//! [`amp`] an approximate message passing solver for compressed sensing
//! that uses the denoisers with per-iteration residual-based tuning, and
//! [`experiments`] a deterministic, seedable Monte Carlo harness.

pub mod amp;
pub mod denoise;
pub mod error;
pub mod experiments;
pub mod model;
pub mod risk;
pub mod selection;

pub(crate) mod util;

pub use amp::{AmpOptions, AmpState, MeasurementModel, StepDenoiser, Trajectory, TrajectoryPoint};
pub use denoise::{EbParams, EbStatistics, SoftThresholdParams};
pub use error::{Error, Result};
pub use model::{EstimatorKind, Observation, RiskReport, Signal, SignalFamily, SignalSpec};
pub use selection::{Grid, HybridChoice, TuningGrids};
