//! Synthetic-league generator with known ground truth.
//!
//! Every estimator claim in this crate is verifiable because the simulator
//! controls the whole generative chain: player skill comes from a Beta
//! prior, skill maps to how tightly a player's shots cluster around the
//! ideal rim-plane factors (11 inches deep, centered, 45 degrees), each
//! shot's true make probability is a fixed logistic in its true factors,
//! and the emitted tracking samples are an exact parabola through the true
//! rim crossing plus configurable Gaussian noise.
//!
//! The skill-to-spread link is calibrated numerically: the expected make
//! probability as a function of factor spread is tabulated by Gauss-Hermite
//! quadrature and inverted per player, so a player's true percentage equals
//! the mean of their per-shot probabilities by construction.
//!
//! All randomness flows through per-player and per-shot streams derived
//! from the master seed, so generation is reproducible regardless of
//! scheduling or thread count.

use rand::distr::Distribution;
use rand::{Rng, RngExt};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, Normal};
use thiserror::Error;

use crate::estimators::ShotClass;
use crate::shotmodel::{sigmoid, FeatureVector};
use crate::trajectory::{RimFactors, ShotContext, TrackingSample};
use crate::util::stream_rng;

/// Rim-center court position used by the simulator, in feet.
pub const HOOP_XY: [f64; 2] = [5.25, 25.0];
/// Free-throw release point: 13.75 ft from the rim center.
pub const FT_RELEASE_XY: [f64; 2] = [19.0, 25.0];

const GRAVITY_HALF: f64 = 16.1; // ft/s^2, half of g
const PLAYER_STREAM: u64 = 1;
const SHOT_STREAM: u64 = 2;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("factors cannot produce a descending trajectory (angle {angle_deg} deg, path {path_ft} ft)")]
    InfeasibleFactors { angle_deg: f64, path_ft: f64 },
    #[error("invalid simulator configuration: {0}")]
    InvalidConfig(String),
}

/// Generative logistic coefficients over the 10-term factor basis; peaks
/// near 0.96 at (11", 0", 45deg) and decays toward zero far from it.
pub const DEFAULT_OUTCOME_COEF: [f64; 10] = [
    -114.3165, 2.794, 0.0, 4.473, -0.127, -0.199, -0.0497, 0.004, 0.003, -0.002,
];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub n_players: usize,
    /// Inclusive range of season shot counts per player.
    pub shots_per_player: [usize; 2],
    pub n_games: u32,
    /// Beta prior over player skill (true shooting percentage).
    pub skill_alpha: f64,
    pub skill_beta: f64,
    /// Shot-class mixture: three-pointers, twos, free throws.
    pub class_mix: [f64; 3],
    /// Center of the factor distribution: depth (in), left-right (in),
    /// entry angle (deg).
    pub factor_mean: [f64; 3],
    /// Factor standard deviations at spread scale 1.
    pub factor_base_sd: [f64; 3],
    /// Range of the per-player spread scale; lower spread means better
    /// shots. Skill is mapped into this range by calibration.
    pub spread_range: [f64; 2],
    pub noise_xy_sd: f64,
    pub noise_z_sd: f64,
    pub sample_rate_hz: f64,
    pub release_height_ft: f64,
    /// True make-probability model over the factor basis.
    pub outcome_coef: [f64; 10],
    /// Replace the Bernoulli(logistic) outcome with a deterministic
    /// rim-geometry make rule (for robustness experiments).
    pub geometric_outcomes: bool,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_players: 260,
            shots_per_player: [40, 160],
            n_games: 82,
            skill_alpha: 3.5,
            skill_beta: 6.5,
            class_mix: [0.45, 0.35, 0.20],
            factor_mean: [11.0, 0.0, 45.0],
            factor_base_sd: [3.2, 2.2, 2.3],
            spread_range: [0.22, 4.2],
            noise_xy_sd: 0.15,
            noise_z_sd: 0.4,
            sample_rate_hz: 25.0,
            release_height_ft: 7.0,
            outcome_coef: DEFAULT_OUTCOME_COEF,
            geometric_outcomes: false,
            seed: 7,
        }
    }
}

impl SimConfig {
    fn validate(&self) -> Result<(), SimError> {
        if self.n_players == 0 {
            return Err(SimError::InvalidConfig("n_players must be positive".into()));
        }
        if self.shots_per_player[0] == 0 || self.shots_per_player[0] > self.shots_per_player[1] {
            return Err(SimError::InvalidConfig("bad shots_per_player range".into()));
        }
        if self.n_games < 2 {
            return Err(SimError::InvalidConfig("need at least two games".into()));
        }
        if self.skill_alpha <= 0.0 || self.skill_beta <= 0.0 {
            return Err(SimError::InvalidConfig("skill prior shapes must be positive".into()));
        }
        if self.spread_range[0] <= 0.0 || self.spread_range[0] >= self.spread_range[1] {
            return Err(SimError::InvalidConfig("bad spread_range".into()));
        }
        if self.sample_rate_hz <= 0.0 {
            return Err(SimError::InvalidConfig("sample rate must be positive".into()));
        }
        if self.noise_xy_sd < 0.0 || self.noise_z_sd < 0.0 {
            return Err(SimError::InvalidConfig("noise sd must be nonnegative".into()));
        }
        Ok(())
    }

    /// True make probability of a shot with the given factors.
    pub fn true_p(&self, factors: &RimFactors) -> f64 {
        let fv = FeatureVector::from_factors(factors);
        let eta: f64 = fv.0.iter().zip(&self.outcome_coef).map(|(x, c)| x * c).sum();
        sigmoid(eta)
    }
}

/// One simulated player's ground truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlayerTruth {
    pub player_id: String,
    /// True make percentage: the mean of this player's per-shot
    /// probabilities under the generative model.
    pub theta: f64,
    /// Calibrated factor spread scale realizing that percentage.
    pub spread: f64,
}

/// One simulated shot with its complete ground truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimShot {
    pub shot_id: String,
    pub player_id: String,
    pub game_id: u32,
    /// 1 for the first half of the season's games, 2 for the second.
    pub half: u8,
    pub class: ShotClass,
    pub release_xy: [f64; 2],
    pub hoop_xy: [f64; 2],
    pub made: bool,
    pub points: f64,
    pub true_factors: RimFactors,
    pub true_p: f64,
}

impl SimShot {
    pub fn context(&self) -> ShotContext {
        ShotContext::new(self.release_xy, self.hoop_xy)
    }
}

/// A full synthetic season: truth plus tracking samples, aligned
/// index-by-index with `shots`.
#[derive(Debug, Clone)]
pub struct SimDataset {
    pub players: Vec<PlayerTruth>,
    pub shots: Vec<SimShot>,
    pub tracking: Vec<Vec<TrackingSample>>,
}

/// Gauss-Hermite nodes and normalized weights: `E[g(Z)]` for standard
/// normal `Z` is `sum_i w_i * g(sqrt(2) * t_i)`.
fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    use nalgebra::{DMatrix, SymmetricEigen};
    let mut jacobi = DMatrix::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let v0 = eig.eigenvectors[(0, i)];
            (node, v0 * v0) // already normalized: weights sum to 1
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Tabulated expected make probability as a function of factor spread,
/// monotonically decreasing; invertible to map a target percentage to the
/// spread that realizes it.
#[derive(Debug, Clone)]
pub struct SkillCurve {
    spreads: Vec<f64>,
    means: Vec<f64>,
}

impl SkillCurve {
    pub fn build(cfg: &SimConfig) -> SkillCurve {
        const GRID: usize = 160;
        const QUAD: usize = 16;
        let (nodes, weights) = gauss_hermite(QUAD);
        let scaled: Vec<f64> = nodes.iter().map(|t| std::f64::consts::SQRT_2 * t).collect();

        let log_lo = cfg.spread_range[0].ln();
        let log_hi = cfg.spread_range[1].ln();
        let spreads: Vec<f64> = (0..GRID)
            .map(|i| (log_lo + (log_hi - log_lo) * i as f64 / (GRID - 1) as f64).exp())
            .collect();

        let means: Vec<f64> = spreads
            .iter()
            .map(|s| {
                let sd = [
                    s * cfg.factor_base_sd[0],
                    s * cfg.factor_base_sd[1],
                    s * cfg.factor_base_sd[2],
                ];
                let mut acc = 0.0;
                for (i, zi) in scaled.iter().enumerate() {
                    let d = cfg.factor_mean[0] + sd[0] * zi;
                    for (j, zj) in scaled.iter().enumerate() {
                        let lr = cfg.factor_mean[1] + sd[1] * zj;
                        let wij = weights[i] * weights[j];
                        for (k, zk) in scaled.iter().enumerate() {
                            let a = cfg.factor_mean[2] + sd[2] * zk;
                            let p = cfg.true_p(&RimFactors {
                                depth_in: d,
                                left_right_in: lr,
                                entry_angle_deg: a,
                            });
                            acc += wij * weights[k] * p;
                        }
                    }
                }
                acc
            })
            .collect();

        // Enforce strict decrease against quadrature rounding.
        let mut monotone = means.clone();
        for i in 1..monotone.len() {
            if monotone[i] >= monotone[i - 1] {
                monotone[i] = monotone[i - 1] - 1e-12;
            }
        }
        SkillCurve { spreads, means: monotone }
    }

    /// Expected make probability at a given spread (clamped to the table).
    pub fn mean_make_prob(&self, spread: f64) -> f64 {
        let n = self.spreads.len();
        if spread <= self.spreads[0] {
            return self.means[0];
        }
        if spread >= self.spreads[n - 1] {
            return self.means[n - 1];
        }
        let idx = self.spreads.partition_point(|s| *s < spread).max(1);
        let (s0, s1) = (self.spreads[idx - 1], self.spreads[idx]);
        let t = (spread - s0) / (s1 - s0);
        self.means[idx - 1] * (1.0 - t) + self.means[idx] * t
    }

    /// Achievable percentage range `(lo, hi)`.
    pub fn theta_range(&self) -> (f64, f64) {
        (*self.means.last().unwrap(), self.means[0])
    }

    /// Spread realizing the target percentage (clamped to the range).
    pub fn spread_for_theta(&self, theta: f64) -> f64 {
        let n = self.means.len();
        if theta >= self.means[0] {
            return self.spreads[0];
        }
        if theta <= self.means[n - 1] {
            return self.spreads[n - 1];
        }
        // means is decreasing; find the bracketing segment.
        let idx = self.means.partition_point(|m| *m > theta).clamp(1, n - 1);
        let (m0, m1) = (self.means[idx - 1], self.means[idx]);
        let t = (theta - m0) / (m1 - m0);
        self.spreads[idx - 1] * (1.0 - t) + self.spreads[idx] * t
    }
}

/// Draw the league: player skills from the Beta prior (clamped into the
/// achievable range) with their calibrated factor spreads. Deterministic
/// per seed.
pub fn gen_league(cfg: &SimConfig) -> Result<Vec<PlayerTruth>, SimError> {
    cfg.validate()?;
    let curve = SkillCurve::build(cfg);
    let (lo, hi) = curve.theta_range();
    let skill = Beta::new(cfg.skill_alpha, cfg.skill_beta)
        .map_err(|e| SimError::InvalidConfig(format!("skill prior: {e}")))?;
    Ok((0..cfg.n_players)
        .map(|j| {
            let mut rng = stream_rng(cfg.seed, &[PLAYER_STREAM, j as u64]);
            let theta = skill.sample(&mut rng).clamp(lo + 1e-9, hi - 1e-9);
            PlayerTruth {
                player_id: format!("p{j:05}"),
                theta,
                spread: curve.spread_for_theta(theta),
            }
        })
        .collect())
}

/// Exact parabolic trajectory through the true rim crossing, sampled at the
/// configured rate, plus Gaussian measurement noise. With zero noise the
/// factor pipeline recovers the true factors exactly.
pub fn gen_trajectory(
    shot: &SimShot,
    cfg: &SimConfig,
    rng: &mut impl Rng,
) -> Result<Vec<TrackingSample>, SimError> {
    let ctx = shot.context();
    let u = ctx.shooter_axis();
    let u_perp = [u[1], -u[0]];
    let f = &shot.true_factors;
    let along = f.depth_in / 12.0 - ctx.rim_radius_ft;
    let lateral = f.left_right_in / 12.0;
    let crossing = [
        ctx.hoop_xy[0] + along * u[0] + lateral * u_perp[0],
        ctx.hoop_xy[1] + along * u[1] + lateral * u_perp[1],
    ];

    let dx = crossing[0] - shot.release_xy[0];
    let dy = crossing[1] - shot.release_xy[1];
    let len = (dx * dx + dy * dy).sqrt();
    let angle = f.entry_angle_deg;
    if !(0.0..90.0).contains(&angle) || len < 1.0 {
        return Err(SimError::InfeasibleFactors { angle_deg: angle, path_ft: len });
    }
    let dir = [dx / len, dy / len];

    let rise = ctx.hoop_height_ft - cfg.release_height_ft;
    let tan_a = angle.to_radians().tan();
    let quad = -(len * tan_a + rise) / (len * len);
    let lin = (2.0 * rise + len * tan_a) / len;
    if quad >= 0.0 {
        return Err(SimError::InfeasibleFactors { angle_deg: angle, path_ft: len });
    }
    // Horizontal speed implied by gravity acting on the height profile.
    let speed = (GRAVITY_HALF / -quad).sqrt();
    let flight = len / speed;
    let n = (flight * cfg.sample_rate_hz).floor() as usize + 1;

    let nd = Normal::standard();
    let gauss =
        |sd: f64, rng: &mut dyn rand::Rng| if sd > 0.0 { sd * nd.sample(rng) } else { 0.0 };
    Ok((0..n)
        .map(|i| {
            let t = i as f64 / cfg.sample_rate_hz;
            let s = speed * t;
            TrackingSample {
                t,
                x: shot.release_xy[0] + s * dir[0] + gauss(cfg.noise_xy_sd, rng),
                y: shot.release_xy[1] + s * dir[1] + gauss(cfg.noise_xy_sd, rng),
                z: (cfg.release_height_ft + lin * s + quad * s * s + gauss(cfg.noise_z_sd, rng))
                    .max(0.0),
            }
        })
        .collect())
}

fn release_geometry(class: ShotClass, rng: &mut impl Rng) -> [f64; 2] {
    match class {
        ShotClass::Ft => FT_RELEASE_XY,
        ShotClass::ThreePt => {
            let dist = rng.random_range(23.25..25.5);
            let theta: f64 = rng.random_range(-1.05..1.05); // radians about +x
            [HOOP_XY[0] + dist * theta.cos(), HOOP_XY[1] + dist * theta.sin()]
        }
        ShotClass::TwoPt => {
            let dist = rng.random_range(8.0..20.0);
            let theta: f64 = rng.random_range(-1.3..1.3);
            [HOOP_XY[0] + dist * theta.cos(), HOOP_XY[1] + dist * theta.sin()]
        }
    }
}

/// Deterministic rim-geometry make rule: the ball clears the rim when its
/// center stays at least a ball radius inside the rim circle, with the
/// usable window shrinking at shallow entry angles.
fn geometric_make(f: &RimFactors, rim_radius_ft: f64) -> bool {
    const BALL_RADIUS_FT: f64 = 0.39;
    let sin_a = f.entry_angle_deg.to_radians().sin();
    let effective = rim_radius_ft - BALL_RADIUS_FT / sin_a.max(1e-6);
    if effective <= 0.0 {
        return false;
    }
    let along = f.depth_in / 12.0 - rim_radius_ft;
    let lateral = f.left_right_in / 12.0;
    (along * along + lateral * lateral).sqrt() <= effective
}

/// Generate the season's ground truth without tracking samples.
pub fn gen_truth(cfg: &SimConfig) -> Result<(Vec<PlayerTruth>, Vec<SimShot>), SimError> {
    let players = gen_league(cfg)?;
    let mut shots = Vec::new();
    let mut shot_seq = 0usize;
    let mix_total: f64 = cfg.class_mix.iter().sum();
    for (j, player) in players.iter().enumerate() {
        let mut rng = stream_rng(cfg.seed, &[PLAYER_STREAM, j as u64]);
        // Skip the skill draw so shot draws continue the same stream.
        let _: f64 = rng.random();
        let n_shots = rng.random_range(cfg.shots_per_player[0]..=cfg.shots_per_player[1]);
        for _ in 0..n_shots {
            let class_draw: f64 = rng.random::<f64>() * mix_total;
            let class = if class_draw < cfg.class_mix[0] {
                ShotClass::ThreePt
            } else if class_draw < cfg.class_mix[0] + cfg.class_mix[1] {
                ShotClass::TwoPt
            } else {
                ShotClass::Ft
            };
            let game_id = rng.random_range(0..cfg.n_games);
            let release_xy = release_geometry(class, &mut rng);

            // Factor draws are clamped to physically representable shots
            // (the make probability out there is effectively zero anyway,
            // so calibration is unaffected).
            let nd = Normal::standard();
            let factors = RimFactors {
                depth_in: (cfg.factor_mean[0]
                    + player.spread * cfg.factor_base_sd[0] * nd.sample(&mut rng))
                .clamp(-36.0, 58.0),
                left_right_in: (cfg.factor_mean[1]
                    + player.spread * cfg.factor_base_sd[1] * nd.sample(&mut rng))
                .clamp(-36.0, 36.0),
                entry_angle_deg: (cfg.factor_mean[2]
                    + player.spread * cfg.factor_base_sd[2] * nd.sample(&mut rng))
                .clamp(1.0, 89.0),
            };
            let (true_p, made) = if cfg.geometric_outcomes {
                let made = geometric_make(&factors, crate::trajectory::RIM_RADIUS_FT);
                (if made { 1.0 } else { 0.0 }, made)
            } else {
                let p = cfg.true_p(&factors);
                (p, rng.random::<f64>() < p)
            };

            shots.push(SimShot {
                shot_id: format!("s{shot_seq:07}"),
                player_id: player.player_id.clone(),
                game_id,
                half: if game_id < cfg.n_games / 2 { 1 } else { 2 },
                class,
                release_xy,
                hoop_xy: HOOP_XY,
                made,
                points: if made { class.points() } else { 0.0 },
                true_factors: factors,
                true_p,
            });
            shot_seq += 1;
        }
    }
    Ok((players, shots))
}

/// Generate the full season: ground truth plus noisy tracking samples.
/// Trajectories are built in parallel, one RNG stream per shot.
pub fn gen_dataset(cfg: &SimConfig) -> Result<SimDataset, SimError> {
    let (players, shots) = gen_truth(cfg)?;
    let tracking: Vec<Vec<TrackingSample>> = shots
        .par_iter()
        .enumerate()
        .map(|(idx, shot)| {
            let mut rng = stream_rng(cfg.seed, &[SHOT_STREAM, idx as u64]);
            gen_trajectory(shot, cfg, &mut rng)
        })
        .collect::<Result<_, _>>()?;
    Ok(SimDataset { players, shots, tracking })
}
