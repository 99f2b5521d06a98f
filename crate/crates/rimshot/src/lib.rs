//! Shooting-skill estimation from ball-tracking data.
//!
//! `rimshot` turns noisy, per-shot ball trajectories into rim-plane shot
//! factors (depth, left-right accuracy, entry angle), models shot-make
//! probabilities from those factors, and aggregates the probabilities into
//! Rao-Blackwellized and empirical-Bayes-shrunk shooting percentages that
//! predict future shooting better than raw make/miss averages.
//!
//! The crate is organized around the stages of that pipeline:
//!
//! - [`trajectory`] — quadratic height-surface fits (ordinary and Bayesian
//!   with pseudo-data anchors) and rim-plane factor extraction;
//! - [`shotmodel`] — the 10-term logistic shot-make model plus Brier,
//!   log-loss, cross-validation, and make-zone diagnostics;
//! - [`estimators`] — raw, Rao-Blackwellized, and shrunk percentage
//!   estimators with beta-binomial variance models and confidence intervals;
//! - [`evaluation`] — prediction-error tables, RMSE-versus-data curves, rank
//!   stability, discrimination, and resampled-uncertainty experiments;
//! - [`simulate`] — a synthetic-league generator with known ground truth so
//!   every estimator claim is verifiable;
//! - [`pipeline`] — deterministic file-based orchestration with content-hash
//!   manifests, exposed through the `rimshot` CLI.
//!
//! See the crate examples for runnable walk-throughs of each capability
//! (`cargo run --example simulate_season`, `--example estimator_comparison`,
//! and so on).

pub mod estimators;
pub mod evaluation;
pub mod io;
pub mod optim;
pub mod pipeline;
pub mod shotmodel;
pub mod simulate;
pub mod trajectory;

pub(crate) mod util;
