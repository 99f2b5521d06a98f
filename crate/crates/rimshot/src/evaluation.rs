//! Estimator-comparison experiments.
//!
//! Everything here works on a scored season: shots with outcomes and make
//! probabilities, grouped by player, class, game, and season half. The
//! experiments mirror the production questions: how well does each
//! estimator built from the first half predict second-half shooting, how
//! fast does estimation error shrink with more games, how stable are player
//! rankings, how much of the between-player spread is skill rather than
//! noise, and how much extra variance the trajectory-fit uncertainty adds.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::Vector6;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};
use statrs::distribution::Normal;
use thiserror::Error;

use crate::estimators::{
    shrink_estimate, true_shooting_pct, PlayerShots, ShotClass, ShotObs, ShrinkPrior, TsKind,
};
use crate::shotmodel::{FeatureVector, ProbModel};
use crate::trajectory::{compute_shot_factors, rim_crossing, LinePath, QuadraticFit, ShotContext};
use crate::util::{mean, sample_sd, sample_variance, stream_rng};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no players meet the attempt minimum in both halves")]
    NoQualifyingPlayers,
    #[error("need at least {need} common players, got {got}")]
    TooFewPlayers { got: usize, need: usize },
    #[error("between-player variance is zero; discrimination undefined")]
    ZeroTotalVariance,
    #[error("empty search grid")]
    EmptyGrid,
    #[error("fractions must lie in (0, 1]")]
    BadFraction,
}

/// A per-player statistic together with the attempt count behind it.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PlayerStat {
    pub value: f64,
    pub n: usize,
}

/// One scored shot of a season.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoredShot {
    pub shot_id: String,
    pub player_id: String,
    pub class: ShotClass,
    pub game_id: u32,
    pub half: u8,
    pub made: bool,
    pub p_make: f64,
    pub fill: bool,
}

impl ScoredShot {
    fn obs(&self) -> ShotObs {
        ShotObs { made: self.made, p_make: self.p_make, fill: self.fill }
    }
}

/// A season of scored shots.
#[derive(Debug, Clone, Default)]
pub struct Season {
    pub shots: Vec<ScoredShot>,
}

impl Season {
    pub fn new(shots: Vec<ScoredShot>) -> Self {
        Self { shots }
    }

    pub fn games(&self) -> BTreeSet<u32> {
        self.shots.iter().map(|s| s.game_id).collect()
    }

    /// Group shots into per-player collections, optionally filtered.
    pub fn player_shots<F: Fn(&ScoredShot) -> bool>(
        &self,
        keep: F,
    ) -> BTreeMap<String, PlayerShots> {
        let mut out: BTreeMap<String, PlayerShots> = BTreeMap::new();
        for s in self.shots.iter().filter(|s| keep(s)) {
            out.entry(s.player_id.clone())
                .or_insert_with(|| PlayerShots::new(s.player_id.clone()))
                .push(s.class, s.obs());
        }
        out
    }

    /// Split into first-half and second-half player collections.
    pub fn split(&self) -> SplitDataset {
        SplitDataset {
            first: self.player_shots(|s| s.half == 1),
            second: self.player_shots(|s| s.half == 2),
        }
    }
}

/// First-half and second-half player collections over disjoint games.
#[derive(Debug, Clone)]
pub struct SplitDataset {
    pub first: BTreeMap<String, PlayerShots>,
    pub second: BTreeMap<String, PlayerShots>,
}

/// Which estimator to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstKind {
    Raw,
    Rb,
    ShrunkRaw,
    ShrunkRb,
}

impl EstKind {
    pub fn label(&self) -> &'static str {
        match self {
            EstKind::Raw => "raw",
            EstKind::Rb => "rb",
            EstKind::ShrunkRaw => "shrunk_raw",
            EstKind::ShrunkRb => "shrunk_rb",
        }
    }
}

fn class_estimate(shots: &[ShotObs], kind: EstKind, prior: ShrinkPrior) -> f64 {
    let n = shots.len() as f64;
    let raw = shots.iter().filter(|s| s.made).count() as f64 / n;
    let rb = shots.iter().map(|s| s.p_make).sum::<f64>() / n;
    match kind {
        EstKind::Raw => raw,
        EstKind::Rb => rb,
        EstKind::ShrunkRaw => shrink_estimate(raw, n, prior),
        EstKind::ShrunkRb => shrink_estimate(rb, n, prior),
    }
}

/// Per-player estimates of one shot class from one half.
pub fn half_estimates(
    half: &BTreeMap<String, PlayerShots>,
    class: ShotClass,
    kind: EstKind,
    prior: ShrinkPrior,
) -> BTreeMap<String, PlayerStat> {
    half.iter()
        .filter_map(|(id, p)| {
            let shots = p.class_shots(class);
            if shots.is_empty() {
                return None;
            }
            Some((
                id.clone(),
                PlayerStat { value: class_estimate(shots, kind, prior), n: shots.len() },
            ))
        })
        .collect()
}

/// Mean absolute error of per-player estimates against a target statistic,
/// over players with at least `min_attempts` behind both numbers. Players
/// are weighted equally.
pub fn prediction_mae(
    estimates: &BTreeMap<String, PlayerStat>,
    targets: &BTreeMap<String, PlayerStat>,
    min_attempts: usize,
) -> Result<f64, EvalError> {
    let mut errs = Vec::new();
    for (id, est) in estimates {
        if est.n < min_attempts {
            continue;
        }
        if let Some(t) = targets.get(id) {
            if t.n >= min_attempts {
                errs.push((est.value - t.value).abs());
            }
        }
    }
    if errs.is_empty() {
        return Err(EvalError::NoQualifyingPlayers);
    }
    Ok(mean(&errs))
}

/// RMSE of an estimator computed from seeded game subsets against the
/// end-of-season raw percentage, per requested fraction of games.
/// Deterministic for a fixed seed.
pub fn rmse_vs_game_fraction(
    season: &Season,
    class: ShotClass,
    fractions: &[f64],
    kind: EstKind,
    prior: ShrinkPrior,
    min_attempts: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>, EvalError> {
    if fractions.iter().any(|f| *f <= 0.0 || *f > 1.0) {
        return Err(EvalError::BadFraction);
    }
    let games: Vec<u32> = season.games().into_iter().collect();
    let full = season.player_shots(|s| s.class == class);
    let targets: BTreeMap<String, f64> = full
        .iter()
        .filter(|(_, p)| !p.class_shots(class).is_empty())
        .map(|(id, p)| {
            let shots = p.class_shots(class);
            (id.clone(), shots.iter().filter(|s| s.made).count() as f64 / shots.len() as f64)
        })
        .collect();

    let mut curve = Vec::with_capacity(fractions.len());
    for (i, &fraction) in fractions.iter().enumerate() {
        let take = ((fraction * games.len() as f64).ceil() as usize).clamp(1, games.len());
        let mut shuffled = games.clone();
        {
            use rand::seq::SliceRandom;
            let mut rng = stream_rng(seed, &[0xf8ac, i as u64]);
            shuffled.shuffle(&mut rng);
        }
        let picked: BTreeSet<u32> = shuffled.into_iter().take(take).collect();
        let subset = season.player_shots(|s| s.class == class && picked.contains(&s.game_id));

        let mut sq = Vec::new();
        for (id, p) in &subset {
            let shots = p.class_shots(class);
            if shots.len() < min_attempts.max(1) {
                continue;
            }
            if let Some(target) = targets.get(id) {
                let est = class_estimate(shots, kind, prior);
                sq.push((est - target) * (est - target));
            }
        }
        let rmse = if sq.is_empty() { f64::NAN } else { mean(&sq).sqrt() };
        curve.push((fraction, rmse));
    }
    Ok(curve)
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Tied block [i, j] shares the average of its would-be ranks.
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[order[k]] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation over players present in both maps, with ties
/// assigned average ranks.
pub fn spearman_rank(
    a: &BTreeMap<String, f64>,
    b: &BTreeMap<String, f64>,
) -> Result<f64, EvalError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (id, va) in a {
        if let Some(vb) = b.get(id) {
            xs.push(*va);
            ys.push(*vb);
        }
    }
    if xs.len() < 3 {
        return Err(EvalError::TooFewPlayers { got: xs.len(), need: 3 });
    }
    let rx = average_ranks(&xs);
    let ry = average_ranks(&ys);
    let mx = mean(&rx);
    let my = mean(&ry);
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for (x, y) in rx.iter().zip(&ry) {
        num += (x - mx) * (y - my);
        dx += (x - mx) * (x - mx);
        dy += (y - my) * (y - my);
    }
    let denom = (dx * dy).sqrt();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(num / denom)
}

/// Fraction of the between-player variance in a metric attributable to true
/// skill differences: `1 - mean(sampling variance) / var(metric)`, clipped
/// to [0, 1]. Input pairs are `(metric value, sampling variance)` per player.
pub fn discrimination(players: &[(f64, f64)]) -> Result<f64, EvalError> {
    if players.len() < 3 {
        return Err(EvalError::TooFewPlayers { got: players.len(), need: 3 });
    }
    let values: Vec<f64> = players.iter().map(|(v, _)| *v).collect();
    let total = sample_variance(&values);
    if total <= 0.0 {
        return Err(EvalError::ZeroTotalVariance);
    }
    let noise: Vec<f64> = players.iter().map(|(_, v)| *v).collect();
    Ok((1.0 - mean(&noise) / total).clamp(0.0, 1.0))
}

/// Everything needed to resample one shot's factors from its fit posterior.
#[derive(Debug, Clone)]
pub struct PosteriorDetail {
    pub fit: QuadraticFit,
    pub path: LinePath,
    pub ctx: ShotContext,
}

/// A scored shot carrying its trajectory-fit posterior (absent for filled
/// shots, whose probability never varies).
#[derive(Debug, Clone)]
pub struct ShotPosterior {
    pub player_id: String,
    pub shot_id: String,
    pub detail: Option<PosteriorDetail>,
    /// 0/1 outcome value, used when a resampled surface misses the rim.
    pub fill_value: f64,
    pub baseline_p: f64,
}

#[derive(Debug, Clone)]
pub struct SdCfg {
    pub repeats: usize,
    pub seed: u64,
    /// Multiplier on the posterior covariance; 0 degenerates to the
    /// unperturbed estimator, larger values widen the resampling.
    pub cov_scale: f64,
}

impl Default for SdCfg {
    fn default() -> Self {
        Self { repeats: 10, seed: 0, cov_scale: 1.0 }
    }
}

/// Standard deviation of each player's RB estimator with trajectory-fit
/// uncertainty folded in: coefficients are redrawn from each shot's
/// posterior, factors and probabilities recomputed, and the empirical
/// standard deviation of the resampled estimator recorded; the mean over
/// `repeats` passes is returned per player.
pub fn simulated_rb_sd(
    model: &ProbModel,
    shots: &[ShotPosterior],
    cfg: &SdCfg,
) -> BTreeMap<String, f64> {
    let mut by_player: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, s) in shots.iter().enumerate() {
        by_player.entry(s.player_id.clone()).or_default().push(i);
    }

    let nd = Normal::standard();
    let mut sums: BTreeMap<String, f64> = by_player.keys().map(|k| (k.clone(), 0.0)).collect();
    for rep in 0..cfg.repeats.max(1) {
        let resampled: Vec<f64> = shots
            .iter()
            .enumerate()
            .map(|(idx, shot)| {
                let Some(detail) = &shot.detail else {
                    return shot.baseline_p;
                };
                let mut rng = stream_rng(cfg.seed, &[0x5d, rep as u64, idx as u64]);
                let scale = (cfg.cov_scale * detail.fit.sigma2).max(0.0).sqrt();
                let mut beta = detail.fit.beta;
                if scale > 0.0 {
                    // beta + scale * L^-T eps has covariance scale^2 * P^-1
                    // for precision P = L L^T.
                    let mut precision = detail.fit.precision;
                    let chol = loop {
                        match nalgebra::Cholesky::new(precision) {
                            Some(c) => break c,
                            None => {
                                let jitter = precision.trace().abs().max(1.0) * 1e-12;
                                for j in 0..6 {
                                    precision[(j, j)] += jitter;
                                }
                            }
                        }
                    };
                    let eps = Vector6::from_fn(|_, _| nd.sample(&mut rng));
                    let delta = chol
                        .l()
                        .transpose()
                        .solve_upper_triangular(&eps)
                        .unwrap_or_else(Vector6::zeros);
                    beta += delta * scale;
                }
                let fit = QuadraticFit { beta, ..detail.fit.clone() };
                match rim_crossing(&fit, &detail.path, &detail.ctx) {
                    Ok(crossing) => {
                        let rim = compute_shot_factors(&crossing, &detail.ctx);
                        model.predict(&FeatureVector::from_factors(&rim))
                    }
                    Err(_) => shot.fill_value,
                }
            })
            .collect();

        for (player, idxs) in &by_player {
            let ps: Vec<f64> = idxs.iter().map(|&i| resampled[i]).collect();
            let sd = sample_sd(&ps) / (ps.len() as f64).sqrt();
            *sums.get_mut(player).unwrap() += sd;
        }
    }
    sums.into_iter().map(|(k, v)| (k, v / cfg.repeats.max(1) as f64)).collect()
}

/// Pick the prior strength that minimizes the shrunk-RB prediction error on
/// a season split, holding the prior mean fixed.
pub fn tune_shrinkage(
    split: &SplitDataset,
    class: ShotClass,
    prior_mean: f64,
    alpha0_grid: &[f64],
    min_attempts: usize,
) -> Result<f64, EvalError> {
    if alpha0_grid.is_empty() {
        return Err(EvalError::EmptyGrid);
    }
    let targets = half_estimates(&split.second, class, EstKind::Raw, ShrinkPrior::default());
    let mut best: Option<(f64, f64)> = None;
    for &alpha0 in alpha0_grid {
        let prior = ShrinkPrior::with_alpha0(alpha0, prior_mean);
        let estimates = half_estimates(&split.first, class, EstKind::ShrunkRb, prior);
        let mae = prediction_mae(&estimates, &targets, min_attempts)?;
        if best.map(|(_, b)| mae < b).unwrap_or(true) {
            best = Some((alpha0, mae));
        }
    }
    Ok(best.unwrap().0)
}

/// One row of the prediction-error table.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MaeRow {
    pub raw: f64,
    pub grand_mean: f64,
    pub rb: f64,
    pub shrunk_raw: f64,
    pub shrunk_rb: f64,
    pub players: usize,
}

/// Prediction-error table: shot classes plus true shooting, by estimator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaeTable {
    pub rows: BTreeMap<String, Option<MaeRow>>,
    pub min_attempts: usize,
    /// Players are weighted equally, not by attempts.
    pub equal_player_weights: bool,
}

fn class_mae_row(
    split: &SplitDataset,
    class: ShotClass,
    prior: ShrinkPrior,
    min_attempts: usize,
) -> Option<MaeRow> {
    let targets = half_estimates(&split.second, class, EstKind::Raw, prior);
    let mae_of = |kind: EstKind| -> Option<f64> {
        prediction_mae(&half_estimates(&split.first, class, kind, prior), &targets, min_attempts)
            .ok()
    };

    // Grand-mean baseline: the training half's league make rate for this
    // class, used as a constant prediction.
    let (mut made, mut total) = (0usize, 0usize);
    for p in split.first.values() {
        let shots = p.class_shots(class);
        made += shots.iter().filter(|s| s.made).count();
        total += shots.len();
    }
    if total == 0 {
        return None;
    }
    let league = made as f64 / total as f64;
    let first = half_estimates(&split.first, class, EstKind::Raw, prior);
    let constant: BTreeMap<String, PlayerStat> = first
        .iter()
        .map(|(id, s)| (id.clone(), PlayerStat { value: league, n: s.n }))
        .collect();
    let grand_mean = prediction_mae(&constant, &targets, min_attempts).ok()?;

    let players = first
        .iter()
        .filter(|(id, s)| {
            s.n >= min_attempts && targets.get(*id).map(|t| t.n >= min_attempts).unwrap_or(false)
        })
        .count();
    Some(MaeRow {
        raw: mae_of(EstKind::Raw)?,
        grand_mean,
        rb: mae_of(EstKind::Rb)?,
        shrunk_raw: mae_of(EstKind::ShrunkRaw)?,
        shrunk_rb: mae_of(EstKind::ShrunkRb)?,
        players,
    })
}

fn ts_stats(half: &BTreeMap<String, PlayerShots>, kind: TsKind) -> BTreeMap<String, PlayerStat> {
    half.iter()
        .filter_map(|(id, p)| {
            let n = p.field_goal_attempts() + p.free_throw_attempts();
            true_shooting_pct(kind, p).ok().map(|v| (id.clone(), PlayerStat { value: v, n }))
        })
        .collect()
}

fn ts_mae_row(split: &SplitDataset, prior: ShrinkPrior, min_attempts: usize) -> Option<MaeRow> {
    let targets = ts_stats(&split.second, TsKind::Raw);
    let raw = ts_stats(&split.first, TsKind::Raw);
    let rb = ts_stats(&split.first, TsKind::Rb);
    if raw.is_empty() {
        return None;
    }

    // League true shooting of the training half as the constant baseline
    // and as the shrinkage center; weights follow the TS denominator.
    let league = {
        let mut points = 0.0;
        let mut weight = 0.0;
        for p in split.first.values() {
            for class in ShotClass::ALL {
                for s in p.class_shots(class) {
                    if s.made {
                        points += class.points();
                    }
                }
            }
            weight += p.field_goal_attempts() as f64 + 0.44 * p.free_throw_attempts() as f64;
        }
        if weight <= 0.0 {
            return None;
        }
        points / (2.0 * weight)
    };

    let shrink_ts = |stats: &BTreeMap<String, PlayerStat>| -> BTreeMap<String, PlayerStat> {
        stats
            .iter()
            .map(|(id, s)| {
                let p = &split.first[id];
                let w = p.field_goal_attempts() as f64 + 0.44 * p.free_throw_attempts() as f64;
                let strength = prior.strength();
                let value = (strength * league + w * s.value) / (strength + w);
                (id.clone(), PlayerStat { value, n: s.n })
            })
            .collect()
    };

    let constant: BTreeMap<String, PlayerStat> = raw
        .iter()
        .map(|(id, s)| (id.clone(), PlayerStat { value: league, n: s.n }))
        .collect();

    let players = raw
        .iter()
        .filter(|(id, s)| {
            s.n >= min_attempts && targets.get(*id).map(|t| t.n >= min_attempts).unwrap_or(false)
        })
        .count();
    Some(MaeRow {
        raw: prediction_mae(&raw, &targets, min_attempts).ok()?,
        grand_mean: prediction_mae(&constant, &targets, min_attempts).ok()?,
        rb: prediction_mae(&rb, &targets, min_attempts).ok()?,
        shrunk_raw: prediction_mae(&shrink_ts(&raw), &targets, min_attempts).ok()?,
        shrunk_rb: prediction_mae(&shrink_ts(&rb), &targets, min_attempts).ok()?,
        players,
    })
}

/// Build the full prediction-error table: one row per shot class plus true
/// shooting. Rows without qualifying players are present but empty.
pub fn mae_table(split: &SplitDataset, prior: ShrinkPrior, min_attempts: usize) -> MaeTable {
    let mut rows = BTreeMap::new();
    for class in ShotClass::ALL {
        rows.insert(class.label().to_string(), class_mae_row(split, class, prior, min_attempts));
    }
    rows.insert("TS".to_string(), ts_mae_row(split, prior, min_attempts));
    MaeTable { rows, min_attempts, equal_player_weights: true }
}
