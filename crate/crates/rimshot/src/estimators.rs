//! Raw, Rao-Blackwellized, and shrunk shooting-percentage estimators.
//!
//! The raw estimator of a player's percentage is the make fraction; the
//! Rao-Blackwellized (RB) estimator replaces each 0/1 outcome with that
//! shot's make probability and averages those instead, which strictly
//! reduces variance when the probabilities carry real information. Both can
//! be shrunk toward a league-wide Beta prior, and per-player uncertainty is
//! modeled by fitting a Beta distribution to the shot probabilities by
//! maximum likelihood (Nelder-Mead over log shape parameters).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::ContinuousCDF;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::optim::{nelder_mead_minimize, NelderMeadCfg};
use crate::util::{mean, sample_variance};

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("no shots to estimate from")]
    EmptyShots,
    #[error("need at least {need} probabilities for a beta fit, got {got}")]
    TooFewValues { got: usize, need: usize },
    #[error("probabilities must lie strictly inside (0, 1)")]
    InvalidProbability,
    #[error("sample variance too small to identify a beta concentration")]
    DegenerateSample,
    #[error("player has no field-goal or free-throw attempts")]
    NoAttempts,
}

/// Shot class; the per-attempt point value follows from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ShotClass {
    #[serde(rename = "3PT")]
    ThreePt,
    #[serde(rename = "2PT")]
    TwoPt,
    #[serde(rename = "FT")]
    Ft,
}

impl ShotClass {
    pub const ALL: [ShotClass; 3] = [ShotClass::ThreePt, ShotClass::TwoPt, ShotClass::Ft];

    pub fn points(&self) -> f64 {
        match self {
            ShotClass::ThreePt => 3.0,
            ShotClass::TwoPt => 2.0,
            ShotClass::Ft => 1.0,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ShotClass::ThreePt => "3PT",
            ShotClass::TwoPt => "2PT",
            ShotClass::Ft => "FT",
        }
    }

    pub fn parse(s: &str) -> Option<ShotClass> {
        match s {
            "3PT" => Some(ShotClass::ThreePt),
            "2PT" => Some(ShotClass::TwoPt),
            "FT" => Some(ShotClass::Ft),
            _ => None,
        }
    }

    /// Field-goal classes count toward FGA; free throws do not.
    pub fn is_field_goal(&self) -> bool {
        !matches!(self, ShotClass::Ft)
    }
}

/// One scored shot: the observed outcome and its make probability
/// (`fill = true` when the probability is a 0/1 fill rather than a model
/// estimate).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShotObs {
    pub made: bool,
    pub p_make: f64,
    pub fill: bool,
}

/// All of one player's scored shots, grouped by class.
#[derive(Debug, Clone, Default)]
pub struct PlayerShots {
    pub player_id: String,
    pub by_class: BTreeMap<ShotClass, Vec<ShotObs>>,
}

impl PlayerShots {
    pub fn new(player_id: impl Into<String>) -> Self {
        Self { player_id: player_id.into(), by_class: BTreeMap::new() }
    }

    pub fn push(&mut self, class: ShotClass, obs: ShotObs) {
        self.by_class.entry(class).or_default().push(obs);
    }

    pub fn class_shots(&self, class: ShotClass) -> &[ShotObs] {
        self.by_class.get(&class).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn attempts(&self, class: ShotClass) -> usize {
        self.class_shots(class).len()
    }

    pub fn field_goal_attempts(&self) -> usize {
        self.attempts(ShotClass::ThreePt) + self.attempts(ShotClass::TwoPt)
    }

    pub fn free_throw_attempts(&self) -> usize {
        self.attempts(ShotClass::Ft)
    }
}

/// Raw shooting percentage: the make fraction.
pub fn raw_fg_pct(outcomes: &[bool]) -> Result<f64, EstimatorError> {
    if outcomes.is_empty() {
        return Err(EstimatorError::EmptyShots);
    }
    Ok(outcomes.iter().filter(|y| **y).count() as f64 / outcomes.len() as f64)
}

/// Rao-Blackwellized shooting percentage: the mean of per-shot make
/// probabilities (fill probabilities included).
pub fn rb_fg_pct(p_makes: &[f64]) -> Result<f64, EstimatorError> {
    if p_makes.is_empty() {
        return Err(EstimatorError::EmptyShots);
    }
    Ok(mean(p_makes))
}

/// A Beta distribution fitted to a player's shot-make probabilities.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BetaFit {
    pub alpha: f64,
    pub beta: f64,
    /// Mean `alpha / (alpha + beta)`.
    pub theta: f64,
    /// Concentration `alpha + beta`.
    pub v: f64,
    pub loglik: f64,
    pub converged: bool,
}

/// Method-of-moments starting point for the Beta fit; the concentration is
/// clamped to a small positive floor when the sample is overdispersed.
pub fn beta_mom_init(values: &[f64]) -> (f64, f64) {
    let m = mean(values);
    let s2 = sample_variance(values);
    let v = if s2 > 0.0 { (m * (1.0 - m) / s2 - 1.0).max(0.1) } else { 0.1 };
    (m * v, (1.0 - m) * v)
}

fn beta_neg_loglik(log_ab: &[f64], n: f64, sum_ln_p: f64, sum_ln_q: f64) -> f64 {
    let a = log_ab[0].exp();
    let b = log_ab[1].exp();
    if !a.is_finite() || !b.is_finite() || a <= 0.0 || b <= 0.0 {
        return f64::INFINITY;
    }
    let ln_beta_fn = ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
    -((a - 1.0) * sum_ln_p + (b - 1.0) * sum_ln_q - n * ln_beta_fn)
}

/// Maximum-likelihood Beta fit to probabilities strictly inside (0, 1),
/// optimized over log shape parameters from the method-of-moments start.
pub fn fit_beta_mle(values: &[f64]) -> Result<BetaFit, EstimatorError> {
    const MIN_VALUES: usize = 5;
    if values.len() < MIN_VALUES {
        return Err(EstimatorError::TooFewValues { got: values.len(), need: MIN_VALUES });
    }
    if values.iter().any(|p| *p <= 0.0 || *p >= 1.0) {
        return Err(EstimatorError::InvalidProbability);
    }
    if sample_variance(values) <= 1e-10 {
        return Err(EstimatorError::DegenerateSample);
    }

    let n = values.len() as f64;
    let sum_ln_p: f64 = values.iter().map(|p| p.ln()).sum();
    let sum_ln_q: f64 = values.iter().map(|p| (1.0 - p).ln()).sum();

    let (a0, b0) = beta_mom_init(values);
    let start = [a0.max(1e-6).ln(), b0.max(1e-6).ln()];
    let result = nelder_mead_minimize(
        |x| beta_neg_loglik(x, n, sum_ln_p, sum_ln_q),
        &start,
        &NelderMeadCfg::default(),
    );
    let alpha = result.x[0].exp();
    let beta = result.x[1].exp();
    Ok(BetaFit {
        alpha,
        beta,
        theta: alpha / (alpha + beta),
        v: alpha + beta,
        loglik: -result.fx,
        converged: result.converged,
    })
}

/// League-wide Beta prior used for shrinkage.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShrinkPrior {
    pub alpha0: f64,
    pub beta0: f64,
}

impl Default for ShrinkPrior {
    fn default() -> Self {
        Self { alpha0: 3.5, beta0: 6.5 }
    }
}

impl ShrinkPrior {
    pub fn mean(&self) -> f64 {
        self.alpha0 / (self.alpha0 + self.beta0)
    }

    pub fn strength(&self) -> f64 {
        self.alpha0 + self.beta0
    }

    /// Prior with the same mean but a different alpha (strength rescaled).
    pub fn with_alpha0(alpha0: f64, prior_mean: f64) -> Self {
        Self { alpha0, beta0: alpha0 * (1.0 - prior_mean) / prior_mean }
    }
}

/// Posterior-mean shrinkage of an estimate with effective weight `v_hat`
/// toward the prior: `(alpha0 + theta*v) / (alpha0 + beta0 + v)`.
pub fn shrink_estimate(theta_hat: f64, v_hat: f64, prior: ShrinkPrior) -> f64 {
    (prior.alpha0 + theta_hat * v_hat) / (prior.alpha0 + prior.beta0 + v_hat)
}

/// Which sampling-variance model to evaluate.
#[derive(Debug, Clone, Copy)]
pub enum VarKind {
    /// Binomial variance of the make fraction.
    Raw { theta: f64, n: usize },
    /// Variance of the mean of Beta-distributed shot probabilities, using
    /// the fitted Beta shape parameters.
    Rb { alpha: f64, beta: f64, n: usize },
}

pub fn estimator_variance(kind: VarKind) -> f64 {
    match kind {
        VarKind::Raw { theta, n } => theta * (1.0 - theta) / n as f64,
        VarKind::Rb { alpha, beta, n } => {
            let s = alpha + beta;
            alpha * beta / (n as f64 * s * s * (s + 1.0))
        }
    }
}

/// Normal-approximation confidence interval, clipped to `[0, 1]`.
pub fn normal_ci(theta_hat: f64, variance: f64, level: f64) -> (f64, f64) {
    let level = level.clamp(1e-9, 1.0 - 1e-9);
    let z = statrs::distribution::Normal::standard().inverse_cdf(0.5 + level / 2.0);
    let half = z * variance.max(0.0).sqrt();
    ((theta_hat - half).clamp(0.0, 1.0), (theta_hat + half).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsKind {
    Raw,
    Rb,
}

/// True shooting percentage, `points / (2 * (FGA + 0.44 * FTA))`; the RB
/// variant replaces realized points with expected points from the per-shot
/// probabilities (fills included).
pub fn true_shooting_pct(kind: TsKind, player: &PlayerShots) -> Result<f64, EstimatorError> {
    let fga = player.field_goal_attempts();
    let fta = player.free_throw_attempts();
    if fga + fta == 0 {
        return Err(EstimatorError::NoAttempts);
    }
    let mut points = 0.0;
    for class in ShotClass::ALL {
        for obs in player.class_shots(class) {
            points += match kind {
                TsKind::Raw => {
                    if obs.made {
                        class.points()
                    } else {
                        0.0
                    }
                }
                TsKind::Rb => class.points() * obs.p_make,
            };
        }
    }
    Ok(points / (2.0 * (fga as f64 + 0.44 * fta as f64)))
}

/// The full estimator record for one player and shot class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlayerEstimate {
    pub player_id: String,
    pub class: ShotClass,
    pub n: usize,
    pub theta_raw: f64,
    pub theta_rb: f64,
    pub theta_shrunk_raw: f64,
    pub theta_shrunk_rb: f64,
    /// Beta shape parameters fitted to the model probabilities; absent when
    /// the sample was too small or too concentrated to identify them.
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub var_raw: f64,
    pub var_rb: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Compute every estimator for one player/class shot list.
///
/// The shrinkage weight is the attempt count (each attempt counts as one
/// pseudo-observation against the prior's ten). The RB variance uses the
/// fitted Beta shape parameters, falling back to the binomial form around
/// the RB mean when the Beta fit is unavailable; the confidence interval is
/// a normal approximation around the RB estimate.
pub fn estimate_player_class(
    player_id: &str,
    class: ShotClass,
    shots: &[ShotObs],
    prior: ShrinkPrior,
    ci_level: f64,
) -> Result<PlayerEstimate, EstimatorError> {
    if shots.is_empty() {
        return Err(EstimatorError::EmptyShots);
    }
    let n = shots.len();
    let outcomes: Vec<bool> = shots.iter().map(|s| s.made).collect();
    let probs: Vec<f64> = shots.iter().map(|s| s.p_make).collect();
    let theta_raw = raw_fg_pct(&outcomes)?;
    let theta_rb = rb_fg_pct(&probs)?;

    let model_probs: Vec<f64> = shots
        .iter()
        .filter(|s| !s.fill && s.p_make > 0.0 && s.p_make < 1.0)
        .map(|s| s.p_make)
        .collect();
    let beta_fit = fit_beta_mle(&model_probs).ok();
    let var_rb = match &beta_fit {
        Some(fit) => estimator_variance(VarKind::Rb { alpha: fit.alpha, beta: fit.beta, n }),
        None => estimator_variance(VarKind::Raw { theta: theta_rb, n }),
    };
    let (ci_lo, ci_hi) = normal_ci(theta_rb, var_rb, ci_level);

    Ok(PlayerEstimate {
        player_id: player_id.to_string(),
        class,
        n,
        theta_raw,
        theta_rb,
        theta_shrunk_raw: shrink_estimate(theta_raw, n as f64, prior),
        theta_shrunk_rb: shrink_estimate(theta_rb, n as f64, prior),
        alpha: beta_fit.as_ref().map(|f| f.alpha),
        beta: beta_fit.as_ref().map(|f| f.beta),
        var_raw: estimator_variance(VarKind::Raw { theta: theta_raw, n }),
        var_rb,
        ci_lo,
        ci_hi,
    })
}
