//! Logistic shot-make probability model over the rim-plane factors.
//!
//! The feature basis is the fixed 10-term polynomial expansion
//! `[1, D, LR, A, D^2, LR^2, A^2, D*LR, D*A, LR*A]` with depth and
//! left-right in inches and the entry angle in degrees. Fitting is
//! maximum likelihood via iteratively reweighted least squares with
//! step-halving; features are standardized internally for conditioning and
//! coefficients are reported in both standardized and raw units.

use nalgebra::{SMatrix, SVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trajectory::{RimFactors, ShotFactors};
use crate::util::stream_rng;

pub const N_FEATURES: usize = 10;

type Vec10 = SVector<f64, 10>;
type Mat10 = SMatrix<f64, 10, 10>;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("shot factors are invalid; use the fill probability instead")]
    InvalidFactors,
    #[error("training data contains a single outcome class")]
    OneClass,
    #[error("need at least {need} training rows, got {got}")]
    TooFewRows { got: usize, need: usize },
    #[error("quasi-separated data: coefficients diverged beyond {limit}")]
    Separation { limit: f64 },
    #[error("model has not converged; refusing to predict")]
    NotConverged,
    #[error("prediction and outcome lengths differ ({preds} vs {outcomes})")]
    LengthMismatch { preds: usize, outcomes: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("no shots fall inside the zone")]
    EmptyZone,
    #[error("cross validation needs 2 <= k <= n (k={k}, n={n})")]
    BadFoldCount { k: usize, n: usize },
}

/// Numerically stable logistic function, clamped into the open interval
/// (0, 1) so downstream probability math never sees an exact 0 or 1.
pub fn sigmoid(x: f64) -> f64 {
    let p = if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    };
    p.max(f64::MIN_POSITIVE).min(1.0 - f64::EPSILON / 2.0)
}

/// The ordered 10-term polynomial feature expansion of one shot's factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; N_FEATURES]);

impl FeatureVector {
    pub fn from_raw(depth_in: f64, left_right_in: f64, entry_angle_deg: f64) -> Self {
        let (d, lr, a) = (depth_in, left_right_in, entry_angle_deg);
        FeatureVector([1.0, d, lr, a, d * d, lr * lr, a * a, d * lr, d * a, lr * a])
    }

    pub fn from_factors(f: &RimFactors) -> Self {
        Self::from_raw(f.depth_in, f.left_right_in, f.entry_angle_deg)
    }
}

/// Feature expansion for a measured shot; invalid shots have no features.
pub fn build_features(f: &ShotFactors) -> Result<FeatureVector, ModelError> {
    match f {
        ShotFactors::Valid(rim) => Ok(FeatureVector::from_factors(rim)),
        ShotFactors::Invalid { .. } => Err(ModelError::InvalidFactors),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainCfg {
    /// Convergence tolerance on the log-likelihood change.
    pub tol: f64,
    pub max_iter: usize,
    pub min_rows: usize,
    /// Tiny ridge on the non-intercept curvature, for degenerate columns.
    pub ridge: f64,
    /// Standardized-scale coefficient bound beyond which the data is
    /// declared quasi-separated.
    pub coef_limit: f64,
}

impl Default for TrainCfg {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 100, min_rows: 50, ridge: 1e-10, coef_limit: 1e3 }
    }
}

/// A trained shot-make model. Coefficients are stored on the standardized
/// feature scale together with the standardization parameters, so the model
/// file is self-contained.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbModel {
    /// Coefficients over the standardized basis (intercept first).
    pub coef: [f64; N_FEATURES],
    /// Mean of raw feature columns 2..10.
    pub feature_mean: [f64; N_FEATURES - 1],
    /// Scale (population sd, or 1 for constant columns) of columns 2..10.
    pub feature_scale: [f64; N_FEATURES - 1],
    /// Coefficient covariance on the standardized scale (inverse observed
    /// information at the optimum).
    pub coef_cov: [[f64; N_FEATURES]; N_FEATURES],
    pub train_n: usize,
    pub converged: bool,
    pub loglik: f64,
}

impl ProbModel {
    fn standardized(&self, fv: &FeatureVector) -> Vec10 {
        let mut x = Vec10::zeros();
        x[0] = fv.0[0];
        for j in 1..N_FEATURES {
            x[j] = (fv.0[j] - self.feature_mean[j - 1]) / self.feature_scale[j - 1];
        }
        x
    }

    /// Make probability for an explicit feature vector.
    pub fn predict(&self, fv: &FeatureVector) -> f64 {
        let x = self.standardized(fv);
        sigmoid(Vec10::from_column_slice(&self.coef).dot(&x))
    }

    /// Coefficients mapped back to the raw feature units.
    pub fn raw_coef(&self) -> [f64; N_FEATURES] {
        let mut raw = [0.0; N_FEATURES];
        raw[0] = self.coef[0];
        for j in 1..N_FEATURES {
            raw[j] = self.coef[j] / self.feature_scale[j - 1];
            raw[0] -= self.coef[j] * self.feature_mean[j - 1] / self.feature_scale[j - 1];
        }
        raw
    }

    /// Standard errors of the raw-unit coefficients.
    pub fn raw_standard_errors(&self) -> [f64; N_FEATURES] {
        // raw = A * std with A the de-standardization map.
        let mut a = Mat10::zeros();
        a[(0, 0)] = 1.0;
        for j in 1..N_FEATURES {
            a[(0, j)] = -self.feature_mean[j - 1] / self.feature_scale[j - 1];
            a[(j, j)] = 1.0 / self.feature_scale[j - 1];
        }
        let cov = Mat10::from_fn(|i, j| self.coef_cov[i][j]);
        let raw_cov = a * cov * a.transpose();
        let mut se = [0.0; N_FEATURES];
        for j in 0..N_FEATURES {
            se[j] = raw_cov[(j, j)].max(0.0).sqrt();
        }
        se
    }
}

fn loglik(rows: &[(Vec10, f64)], coef: &Vec10) -> f64 {
    rows.iter()
        .map(|(x, y)| {
            let eta = coef.dot(x);
            y * eta - (eta.max(0.0) + (-eta.abs()).exp().ln_1p())
        })
        .sum()
}

/// Maximum-likelihood logistic fit by IRLS with step-halving.
pub fn train_logistic(
    rows: &[(FeatureVector, bool)],
    cfg: &TrainCfg,
) -> Result<ProbModel, ModelError> {
    let n = rows.len();
    if n == 0 {
        return Err(ModelError::EmptyInput);
    }
    let makes = rows.iter().filter(|(_, y)| *y).count();
    if makes == 0 || makes == n {
        return Err(ModelError::OneClass);
    }
    if n < cfg.min_rows {
        return Err(ModelError::TooFewRows { got: n, need: cfg.min_rows });
    }

    // Standardize columns 2..10; constant columns get scale 1 and vanish.
    let mut mean = [0.0; N_FEATURES - 1];
    let mut scale = [0.0; N_FEATURES - 1];
    for j in 1..N_FEATURES {
        let m = rows.iter().map(|(f, _)| f.0[j]).sum::<f64>() / n as f64;
        let var = rows.iter().map(|(f, _)| (f.0[j] - m) * (f.0[j] - m)).sum::<f64>() / n as f64;
        mean[j - 1] = m;
        scale[j - 1] = if var.sqrt() > 1e-12 { var.sqrt() } else { 1.0 };
    }
    let std_rows: Vec<(Vec10, f64)> = rows
        .iter()
        .map(|(f, y)| {
            let mut x = Vec10::zeros();
            x[0] = 1.0;
            for j in 1..N_FEATURES {
                x[j] = (f.0[j] - mean[j - 1]) / scale[j - 1];
            }
            (x, if *y { 1.0 } else { 0.0 })
        })
        .collect();

    let weighted_info = |coef: &Vec10| -> Mat10 {
        let mut info = Mat10::zeros();
        for (x, _) in &std_rows {
            let p = sigmoid(coef.dot(x));
            let w = (p * (1.0 - p)).max(1e-10);
            info += x * x.transpose() * w;
        }
        info
    };

    let mut coef = Vec10::zeros();
    let mut ll = loglik(&std_rows, &coef);
    let mut converged = false;

    for _ in 0..cfg.max_iter {
        let mut grad = Vec10::zeros();
        for (x, y) in &std_rows {
            let p = sigmoid(coef.dot(x));
            grad += x * (y - p);
        }
        let mut info = weighted_info(&coef);
        for j in 1..N_FEATURES {
            info[(j, j)] += cfg.ridge;
        }

        let delta = {
            let mut jitter = 0.0;
            loop {
                let mut h = info;
                if jitter > 0.0 {
                    for j in 0..N_FEATURES {
                        h[(j, j)] += jitter;
                    }
                }
                match h.cholesky() {
                    Some(ch) => break ch.solve(&grad),
                    None if jitter < 1e-4 => jitter = (jitter * 100.0).max(1e-8),
                    None => return Err(ModelError::Separation { limit: cfg.coef_limit }),
                }
            }
        };

        // Step-halving keeps the likelihood non-decreasing.
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let cand = coef + delta * t;
            let cand_ll = loglik(&std_rows, &cand);
            if cand_ll.is_finite() && cand_ll >= ll {
                accepted = Some((cand, cand_ll));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, cand_ll)) = accepted else {
            converged = true; // no ascent left within machine precision
            break;
        };
        if cand.amax() > cfg.coef_limit {
            return Err(ModelError::Separation { limit: cfg.coef_limit });
        }
        let improved = cand_ll - ll;
        coef = cand;
        ll = cand_ll;
        if improved.abs() < cfg.tol {
            converged = true;
            break;
        }
    }

    // Observed information at the optimum gives the coefficient covariance.
    let cov = {
        let info = weighted_info(&coef);
        let mut jitter = 0.0;
        loop {
            let mut h = info;
            if jitter > 0.0 {
                for j in 0..N_FEATURES {
                    h[(j, j)] += jitter;
                }
            }
            match h.cholesky() {
                Some(ch) => break ch.inverse(),
                None if jitter < 1.0 => jitter = (jitter * 100.0).max(1e-10),
                None => break Mat10::zeros(),
            }
        }
    };

    let mut coef_arr = [0.0; N_FEATURES];
    let mut cov_arr = [[0.0; N_FEATURES]; N_FEATURES];
    for i in 0..N_FEATURES {
        coef_arr[i] = coef[i];
        for j in 0..N_FEATURES {
            cov_arr[i][j] = cov[(i, j)];
        }
    }
    Ok(ProbModel {
        coef: coef_arr,
        feature_mean: mean,
        feature_scale: scale,
        coef_cov: cov_arr,
        train_n: n,
        converged,
        loglik: ll,
    })
}

/// Make probability for a measured shot; invalid shots must use their fill
/// probability instead, and unconverged models refuse to predict.
pub fn predict_make_prob(model: &ProbModel, f: &ShotFactors) -> Result<f64, ModelError> {
    if !model.converged {
        return Err(ModelError::NotConverged);
    }
    Ok(model.predict(&build_features(f)?))
}

fn check_lengths(preds: &[f64], outcomes: &[bool]) -> Result<(), ModelError> {
    if preds.len() != outcomes.len() {
        return Err(ModelError::LengthMismatch { preds: preds.len(), outcomes: outcomes.len() });
    }
    if preds.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    Ok(())
}

/// Mean squared error of probability forecasts.
pub fn score_brier(preds: &[f64], outcomes: &[bool]) -> Result<f64, ModelError> {
    check_lengths(preds, outcomes)?;
    let sum: f64 = preds
        .iter()
        .zip(outcomes)
        .map(|(p, y)| {
            let y = if *y { 1.0 } else { 0.0 };
            (p - y) * (p - y)
        })
        .sum();
    Ok(sum / preds.len() as f64)
}

/// Mean negative log-likelihood (natural log), with predictions clipped to
/// `[1e-15, 1 - 1e-15]`.
pub fn score_logloss(preds: &[f64], outcomes: &[bool]) -> Result<f64, ModelError> {
    check_lengths(preds, outcomes)?;
    let sum: f64 = preds
        .iter()
        .zip(outcomes)
        .map(|(p, y)| {
            let p = p.clamp(1e-15, 1.0 - 1e-15);
            if *y {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum();
    Ok(sum / preds.len() as f64)
}

/// Mean held-out misclassification rate over `k` seeded, shuffled folds,
/// classifying at probability 0.5. Deterministic for a fixed seed.
pub fn crossval_misclassification(
    rows: &[(FeatureVector, bool)],
    k: usize,
    seed: u64,
    cfg: &TrainCfg,
) -> Result<f64, ModelError> {
    let n = rows.len();
    if k < 2 || n < k {
        return Err(ModelError::BadFoldCount { k, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    {
        use rand::seq::SliceRandom;
        let mut rng = stream_rng(seed, &[0x6356]);
        order.shuffle(&mut rng);
    }

    let mut fold_rates = Vec::with_capacity(k);
    for fold in 0..k {
        let lo = fold * n / k;
        let hi = (fold + 1) * n / k;
        let held: &[usize] = &order[lo..hi];
        let train: Vec<(FeatureVector, bool)> = order[..lo]
            .iter()
            .chain(&order[hi..])
            .map(|&i| rows[i])
            .collect();
        let model = train_logistic(&train, cfg)?;
        let errors = held
            .iter()
            .filter(|&&i| {
                let p = model.predict(&rows[i].0);
                (p >= 0.5) != rows[i].1
            })
            .count();
        fold_rates.push(errors as f64 / held.len().max(1) as f64);
    }
    Ok(fold_rates.iter().sum::<f64>() / k as f64)
}

/// The factor-space box treated as a near-guaranteed make zone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GmzCfg {
    pub angle_center_deg: f64,
    pub angle_halfwidth_deg: f64,
    pub lr_abs_max_in: f64,
    pub depth_min_in: f64,
    pub depth_max_in: f64,
}

impl Default for GmzCfg {
    fn default() -> Self {
        Self {
            angle_center_deg: 45.0,
            angle_halfwidth_deg: 2.0,
            lr_abs_max_in: 2.0,
            depth_min_in: 7.0,
            depth_max_in: 14.0,
        }
    }
}

impl GmzCfg {
    pub fn contains(&self, f: &RimFactors) -> bool {
        (f.entry_angle_deg - self.angle_center_deg).abs() <= self.angle_halfwidth_deg
            && f.left_right_in.abs() <= self.lr_abs_max_in
            && f.depth_in >= self.depth_min_in
            && f.depth_in <= self.depth_max_in
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GmzRate {
    pub rate: f64,
    pub in_zone: usize,
}

/// Make fraction among measured shots inside the zone.
pub fn gmz_make_rate(shots: &[(ShotFactors, bool)], zone: &GmzCfg) -> Result<GmzRate, ModelError> {
    let mut in_zone = 0usize;
    let mut made = 0usize;
    for (f, y) in shots {
        if let Some(rim) = f.rim() {
            if zone.contains(rim) {
                in_zone += 1;
                if *y {
                    made += 1;
                }
            }
        }
    }
    if in_zone == 0 {
        return Err(ModelError::EmptyZone);
    }
    Ok(GmzRate { rate: made as f64 / in_zone as f64, in_zone })
}

/// The three headline scores of a probability model; misclassification is
/// absent for baselines that never classify (for example the grand mean).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScoreReport {
    pub misclassification: Option<f64>,
    pub brier: f64,
    pub logloss: f64,
}
