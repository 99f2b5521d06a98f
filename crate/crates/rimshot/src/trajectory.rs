//! Per-shot trajectory fitting and rim-plane shot factors.
//!
//! Each shot is a short sequence of noisy ball positions. The height of the
//! ball is modeled as a quadratic surface over court position,
//!
//! `z = b0 + b1*x + b2*y + b3*x^2 + b4*y^2 + b5*x*y`,
//!
//! fitted either by ordinary least squares or by a two-stage conjugate
//! Bayesian update that first absorbs four pseudo-observations (two at the
//! release point at 7 ft, two at the hoop center at 10 ft) and then the real
//! samples. The fitted surface is restricted to a least-squares horizontal
//! line of travel, and the point where it descends through rim height yields
//! the three shot factors: depth, left-right accuracy, and entry angle.
//!
//! All fitting is numerically performed in a shifted coordinate frame (the
//! sample centroid for OLS, the hoop for the Bayesian fit) and mapped back,
//! which keeps the normal equations well conditioned and makes the reported
//! factors exactly translation-equivariant. Coefficients and precision
//! matrices are always reported in the absolute court frame.

use nalgebra::{DMatrix, DVector, Matrix6, Vector6};
use thiserror::Error;

/// Rim height in feet.
pub const HOOP_HEIGHT_FT: f64 = 10.0;
/// Rim radius in feet; the hoop center sits 9 inches behind the adjusted front.
pub const RIM_RADIUS_FT: f64 = 0.75;
/// Nominal ball release height in feet, used for the Bayesian pseudo-data.
pub const RELEASE_HEIGHT_FT: f64 = 7.0;
/// A crossing is only accepted when the surface descends strictly faster
/// than this slope; tangent grazes do not count.
pub const TANGENCY_TOL: f64 = 1e-6;
/// Condition-number limit on the 6x6 normal matrix before an OLS fit is
/// declared rank deficient.
pub const GRAM_COND_LIMIT: f64 = 1e12;

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("normal matrix is rank deficient or ill conditioned (cond {cond:.3e})")]
    RankDeficient { cond: f64 },
    #[error("no tracking samples supplied")]
    NoSamples,
    #[error("samples have no usable horizontal path")]
    DegeneratePath,
    #[error("fitted surface never descends through rim height along the path")]
    NoDescendingCrossing,
}

/// One ball position: seconds since release plus court coordinates in feet
/// (`z` is height). Within a shot, samples are strictly increasing in `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Shot geometry: shooter position at release and rim center, in feet.
#[derive(Debug, Clone, Copy)]
pub struct ShotContext {
    pub release_xy: [f64; 2],
    pub hoop_xy: [f64; 2],
    pub hoop_height_ft: f64,
    pub rim_radius_ft: f64,
}

impl ShotContext {
    pub fn new(release_xy: [f64; 2], hoop_xy: [f64; 2]) -> Self {
        Self { release_xy, hoop_xy, hoop_height_ft: HOOP_HEIGHT_FT, rim_radius_ft: RIM_RADIUS_FT }
    }

    /// Unit vector from the shooter toward the hoop.
    pub fn shooter_axis(&self) -> [f64; 2] {
        let dx = self.hoop_xy[0] - self.release_xy[0];
        let dy = self.hoop_xy[1] - self.release_xy[1];
        let norm = (dx * dx + dy * dy).sqrt();
        [dx / norm, dy / norm]
    }
}

/// A fitted quadratic height surface with its posterior precision.
#[derive(Debug, Clone)]
pub struct QuadraticFit {
    /// Coefficients `[b0, b1, b2, b3, b4, b5]` in the absolute court frame.
    pub beta: Vector6<f64>,
    /// Posterior precision of `beta` (for OLS, the raw normal matrix X'X).
    pub precision: Matrix6<f64>,
    /// Root mean squared height residual against the real samples, in feet.
    pub residual_rmse: f64,
    /// Number of real tracking samples used.
    pub n_samples: usize,
    /// Point estimate of the observation noise variance; scales `precision`
    /// inverse when resampling coefficients.
    pub sigma2: f64,
}

impl QuadraticFit {
    pub fn design_row(xy: [f64; 2]) -> Vector6<f64> {
        let [x, y] = xy;
        Vector6::new(1.0, x, y, x * x, y * y, x * y)
    }

    pub fn height_at(&self, xy: [f64; 2]) -> f64 {
        self.beta.dot(&Self::design_row(xy))
    }
}

/// Prior configuration for the two-stage Bayesian fit.
///
/// The prior mean and the isotropic prior precision apply in a hoop-centered
/// polynomial basis, which makes the fit translation-equivariant. The four
/// pseudo-observations are weighted by `pseudo_weight` (duplicated counts
/// exactly as specified; the weight scales their contribution).
#[derive(Debug, Clone)]
pub struct BayesCfg {
    pub prior_mean: Vector6<f64>,
    /// Scale of the initial prior precision `lambda0 * I`; a numerical
    /// regularizer only, the pseudo-data play the role of the real prior.
    pub prior_precision: f64,
    pub pseudo_weight: f64,
    /// Inverse-gamma prior shape/rate for the noise variance.
    pub sigma2_shape: f64,
    pub sigma2_rate: f64,
}

impl Default for BayesCfg {
    fn default() -> Self {
        Self {
            prior_mean: Vector6::zeros(),
            // Small enough that the ridge leaves no measurable footprint on
            // the recovered factors (a 1e-6 ridge already shifts noise-free
            // recovery by ~1e-4 inches on realistic shot geometry).
            prior_precision: 1e-9,
            pseudo_weight: 1.0,
            sigma2_shape: 1e-3,
            sigma2_rate: 1e-3,
        }
    }
}

/// Thresholds deciding whether a fitted trajectory is trusted.
#[derive(Debug, Clone)]
pub struct ValidityCfg {
    pub min_samples: usize,
    pub max_rmse_ft: f64,
    /// Shots whose sampled horizontal path is shorter than this are dropped
    /// (close-range or bank-like attempts); 0 disables the filter.
    pub min_path_len_ft: f64,
}

impl Default for ValidityCfg {
    fn default() -> Self {
        Self { min_samples: 8, max_rmse_ft: 1.5, min_path_len_ft: 0.0 }
    }
}

/// Least-squares straight-line horizontal path of the ball.
#[derive(Debug, Clone, Copy)]
pub struct LinePath {
    pub origin_xy: [f64; 2],
    /// Unit direction of travel, oriented from the shooter toward the hoop.
    pub direction_xy: [f64; 2],
    pub speed_fps: f64,
    pub t_range: [f64; 2],
}

impl LinePath {
    pub fn point_at(&self, s: f64) -> [f64; 2] {
        [
            self.origin_xy[0] + s * self.direction_xy[0],
            self.origin_xy[1] + s * self.direction_xy[1],
        ]
    }

    /// Horizontal distance covered over the sampled time range.
    pub fn sampled_length_ft(&self) -> f64 {
        self.speed_fps * (self.t_range[1] - self.t_range[0])
    }
}

/// Where the fitted surface descends through rim height along the path.
#[derive(Debug, Clone, Copy)]
pub struct RimCrossing {
    pub crossing_xy: [f64; 2],
    /// Height slope per foot of horizontal travel at the crossing; negative.
    pub dz_ds: f64,
    /// Arc length from the path origin to the crossing.
    pub arc_length_ft: f64,
}

/// The three rim-plane factors of a successfully measured shot.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RimFactors {
    /// Distance past the shooter-adjusted front of the rim, in inches;
    /// the hoop center is 9 inches deep.
    pub depth_in: f64,
    /// Signed lateral miss in inches, positive toward the shooter's right.
    pub left_right_in: f64,
    /// Angle between the descending ball path and the rim plane, degrees.
    pub entry_angle_deg: f64,
}

/// Factor measurement outcome for one shot. Shots whose trajectory cannot be
/// trusted carry a 0/1 fill probability (1 if the shot was made) instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShotFactors {
    Valid(RimFactors),
    Invalid { fill_prob: f64 },
}

impl ShotFactors {
    pub fn is_valid(&self) -> bool {
        matches!(self, ShotFactors::Valid(_))
    }

    pub fn rim(&self) -> Option<&RimFactors> {
        match self {
            ShotFactors::Valid(f) => Some(f),
            ShotFactors::Invalid { .. } => None,
        }
    }

    pub fn fill_prob(&self) -> Option<f64> {
        match self {
            ShotFactors::Valid(_) => None,
            ShotFactors::Invalid { fill_prob } => Some(*fill_prob),
        }
    }
}

/// Why a shot was marked invalid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvalidReason {
    TooFewSamples,
    HighRmse,
    NoCrossing,
    ShortArc,
    FitFailed,
}

impl InvalidReason {
    pub fn label(&self) -> &'static str {
        match self {
            InvalidReason::TooFewSamples => "too_few_samples",
            InvalidReason::HighRmse => "high_rmse",
            InvalidReason::NoCrossing => "no_crossing",
            InvalidReason::ShortArc => "short_arc",
            InvalidReason::FitFailed => "fit_failed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    Ols,
    Bayes,
}

/// Full per-shot configuration for the factor pipeline.
#[derive(Debug, Clone)]
pub struct TrajectoryCfg {
    pub method: FitMethod,
    pub bayes: BayesCfg,
    pub validity: ValidityCfg,
}

impl Default for TrajectoryCfg {
    fn default() -> Self {
        Self { method: FitMethod::Bayes, bayes: BayesCfg::default(), validity: ValidityCfg::default() }
    }
}

/// Everything produced while measuring one shot.
#[derive(Debug, Clone)]
pub struct FittedShot {
    pub fit: Option<QuadraticFit>,
    pub path: Option<LinePath>,
    pub crossing: Option<RimCrossing>,
    pub factors: ShotFactors,
    pub invalid_reason: Option<InvalidReason>,
}

/// Change of basis between the absolute polynomial basis and the same basis
/// recentered at `(cx, cy)`: returns `B` with `phi_centered(p) = B * phi_abs(p)`.
fn recentre_matrix(cx: f64, cy: f64) -> Matrix6<f64> {
    let mut b = Matrix6::identity();
    // u = x - cx, v = y - cy
    b[(1, 0)] = -cx;
    b[(2, 0)] = -cy;
    b[(3, 0)] = cx * cx;
    b[(3, 1)] = -2.0 * cx;
    b[(4, 0)] = cy * cy;
    b[(4, 2)] = -2.0 * cy;
    b[(5, 0)] = cx * cy;
    b[(5, 1)] = -cy;
    b[(5, 2)] = -cx;
    b
}

/// Coefficients over the centered basis mapped to the absolute frame.
fn beta_to_absolute(beta_centered: &Vector6<f64>, cx: f64, cy: f64) -> Vector6<f64> {
    recentre_matrix(cx, cy).transpose() * beta_centered
}

fn centered_row(x: f64, y: f64, cx: f64, cy: f64) -> [f64; 6] {
    let u = x - cx;
    let v = y - cy;
    [1.0, u, v, u * u, v * v, u * v]
}

fn gram_of_rows(rows: &[[f64; 6]], weights: &[f64]) -> Matrix6<f64> {
    let mut g = Matrix6::zeros();
    for (row, &w) in rows.iter().zip(weights) {
        for i in 0..6 {
            for j in 0..6 {
                g[(i, j)] += w * row[i] * row[j];
            }
        }
    }
    g
}

/// Ordinary least-squares fit of the quadratic height surface.
///
/// Requires at least six samples whose horizontal positions make the design
/// numerically full rank; samples collinear in the court plane cannot
/// identify all six coefficients.
pub fn fit_quadratic_ols(samples: &[TrackingSample]) -> Result<QuadraticFit, TrajectoryError> {
    let n = samples.len();
    if n < 6 {
        return Err(TrajectoryError::RankDeficient { cond: f64::INFINITY });
    }
    let cx = samples.iter().map(|s| s.x).sum::<f64>() / n as f64;
    let cy = samples.iter().map(|s| s.y).sum::<f64>() / n as f64;

    let mut design = DMatrix::zeros(n, 6);
    let mut z = DVector::zeros(n);
    for (i, s) in samples.iter().enumerate() {
        let row = centered_row(s.x, s.y, cx, cy);
        for j in 0..6 {
            design[(i, j)] = row[j];
        }
        z[i] = s.z;
    }

    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond = if smin > 0.0 { (smax / smin).powi(2) } else { f64::INFINITY };
    if !cond.is_finite() || cond > GRAM_COND_LIMIT {
        return Err(TrajectoryError::RankDeficient { cond });
    }
    let beta_c = svd
        .solve(&z, 0.0)
        .map_err(|_| TrajectoryError::RankDeficient { cond })?;

    let residuals = &design * &beta_c - &z;
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let rmse = (rss / n as f64).sqrt();

    let abs_rows: Vec<[f64; 6]> = samples.iter().map(|s| centered_row(s.x, s.y, 0.0, 0.0)).collect();
    let precision = gram_of_rows(&abs_rows, &vec![1.0; n]);
    let sigma2 = if n > 6 { rss / (n - 6) as f64 } else { 0.0 };

    Ok(QuadraticFit {
        beta: beta_to_absolute(&Vector6::from_column_slice(beta_c.as_slice()), cx, cy),
        precision,
        residual_rmse: rmse,
        n_samples: n,
        sigma2,
    })
}

/// Two-stage conjugate Bayesian fit of the quadratic height surface.
///
/// The posterior is updated first with four pseudo-observations (two at the
/// release point at 7 ft, two at the hoop center at 10 ft, each weighted by
/// `cfg.pseudo_weight`) and then with the real samples; the returned `beta`
/// is the final posterior mean and `precision` the final posterior
/// precision. The prior regularization guarantees the fit exists for any
/// nonempty sample set.
pub fn fit_quadratic_bayes(
    samples: &[TrackingSample],
    ctx: &ShotContext,
    cfg: &BayesCfg,
) -> Result<QuadraticFit, TrajectoryError> {
    let n = samples.len();
    if n == 0 {
        return Err(TrajectoryError::NoSamples);
    }
    let [cx, cy] = ctx.hoop_xy;
    let lambda0 = cfg.prior_precision.max(0.0);
    let w = cfg.pseudo_weight.max(0.0);

    let pseudo: [([f64; 2], f64); 4] = [
        (ctx.release_xy, RELEASE_HEIGHT_FT),
        (ctx.release_xy, RELEASE_HEIGHT_FT),
        (ctx.hoop_xy, ctx.hoop_height_ft),
        (ctx.hoop_xy, ctx.hoop_height_ft),
    ];

    // One augmented least-squares solve; algebraically identical to the two
    // sequential conjugate updates because the precision and the right-hand
    // side both accumulate additively.
    let rows = n + 4 + 6;
    let mut design = DMatrix::zeros(rows, 6);
    let mut rhs = DVector::zeros(rows);
    for (i, s) in samples.iter().enumerate() {
        let row = centered_row(s.x, s.y, cx, cy);
        for j in 0..6 {
            design[(i, j)] = row[j];
        }
        rhs[i] = s.z;
    }
    let sw = w.sqrt();
    for (k, (xy, zp)) in pseudo.iter().enumerate() {
        let row = centered_row(xy[0], xy[1], cx, cy);
        for j in 0..6 {
            design[(n + k, j)] = sw * row[j];
        }
        rhs[n + k] = sw * zp;
    }
    let sl = lambda0.sqrt();
    for j in 0..6 {
        design[(n + 4 + j, j)] = sl;
        rhs[n + 4 + j] = sl * cfg.prior_mean[j];
    }

    let svd = design.clone().svd(true, true);
    let beta_c = svd
        .solve(&rhs, 0.0)
        .map_err(|_| TrajectoryError::RankDeficient { cond: f64::INFINITY })?;
    let beta_c6 = Vector6::from_column_slice(beta_c.as_slice());

    // Posterior precision in the centered basis, then mapped to the absolute
    // frame through the change of basis.
    let real_rows: Vec<[f64; 6]> = samples.iter().map(|s| centered_row(s.x, s.y, cx, cy)).collect();
    let pseudo_rows: Vec<[f64; 6]> =
        pseudo.iter().map(|(xy, _)| centered_row(xy[0], xy[1], cx, cy)).collect();
    let mut precision_c = gram_of_rows(&real_rows, &vec![1.0; n])
        + gram_of_rows(&pseudo_rows, &vec![w; 4])
        + Matrix6::identity() * lambda0;

    let b = recentre_matrix(cx, cy);
    let b_inv = b.try_inverse().expect("recentre matrix is unipotent");
    let precision = b_inv * precision_c * b_inv.transpose();
    precision_c = 0.5 * (precision_c + precision_c.transpose());

    let rss: f64 = samples
        .iter()
        .map(|s| {
            let row = centered_row(s.x, s.y, cx, cy);
            let zhat: f64 = (0..6).map(|j| row[j] * beta_c6[j]).sum();
            (s.z - zhat) * (s.z - zhat)
        })
        .sum();
    let rmse = (rss / n as f64).sqrt();

    // Conjugate inverse-gamma update for the noise variance, telescoped over
    // the two stages.
    let shape_n = cfg.sigma2_shape + (n as f64 + 4.0 * w) / 2.0;
    let zz: f64 = samples.iter().map(|s| s.z * s.z).sum::<f64>()
        + w * pseudo.iter().map(|(_, zp)| zp * zp).sum::<f64>();
    let quad = (precision_c * beta_c6).dot(&beta_c6);
    let prior_quad = lambda0 * cfg.prior_mean.dot(&cfg.prior_mean);
    let rate_n = (cfg.sigma2_rate + 0.5 * (zz + prior_quad - quad)).max(1e-12);
    let sigma2 = if shape_n > 1.0 { rate_n / (shape_n - 1.0) } else { rate_n / shape_n };

    Ok(QuadraticFit {
        beta: beta_to_absolute(&beta_c6, cx, cy),
        precision: 0.5 * (precision + precision.transpose()),
        residual_rmse: rmse,
        n_samples: n,
        sigma2,
    })
}

/// Least-squares straight horizontal path `x(t), y(t)`, oriented from the
/// shooter toward the hoop regardless of sample order.
///
/// Samples with no horizontal motion fall back to the release-to-hoop line;
/// if that line is degenerate too the path cannot be defined.
pub fn fit_horizontal_path(
    samples: &[TrackingSample],
    ctx: &ShotContext,
) -> Result<LinePath, TrajectoryError> {
    if samples.len() < 2 {
        return Err(TrajectoryError::DegeneratePath);
    }
    let n = samples.len() as f64;
    let tbar = samples.iter().map(|s| s.t).sum::<f64>() / n;
    let xbar = samples.iter().map(|s| s.x).sum::<f64>() / n;
    let ybar = samples.iter().map(|s| s.y).sum::<f64>() / n;
    let stt: f64 = samples.iter().map(|s| (s.t - tbar) * (s.t - tbar)).sum();
    if stt <= 0.0 {
        return Err(TrajectoryError::DegeneratePath);
    }
    let vx = samples.iter().map(|s| (s.t - tbar) * (s.x - xbar)).sum::<f64>() / stt;
    let vy = samples.iter().map(|s| (s.t - tbar) * (s.y - ybar)).sum::<f64>() / stt;

    let t0 = samples.iter().map(|s| s.t).fold(f64::INFINITY, f64::min);
    let t1 = samples.iter().map(|s| s.t).fold(f64::NEG_INFINITY, f64::max);
    let speed = (vx * vx + vy * vy).sqrt();

    let axis = [
        ctx.hoop_xy[0] - ctx.release_xy[0],
        ctx.hoop_xy[1] - ctx.release_xy[1],
    ];
    let axis_norm = (axis[0] * axis[0] + axis[1] * axis[1]).sqrt();

    if speed < 1e-9 {
        // No horizontal information in the samples; use the shooter-to-hoop
        // line when the context provides one.
        if axis_norm < 1e-9 {
            return Err(TrajectoryError::DegeneratePath);
        }
        let dt = (t1 - t0).max(1e-9);
        return Ok(LinePath {
            origin_xy: ctx.release_xy,
            direction_xy: [axis[0] / axis_norm, axis[1] / axis_norm],
            speed_fps: axis_norm / dt,
            t_range: [t0, t1],
        });
    }

    let mut dir = [vx / speed, vy / speed];
    if dir[0] * axis[0] + dir[1] * axis[1] < 0.0 {
        dir = [-dir[0], -dir[1]];
    }
    let origin = [xbar + vx * (t0 - tbar), ybar + vy * (t0 - tbar)];
    Ok(LinePath { origin_xy: origin, direction_xy: dir, speed_fps: speed, t_range: [t0, t1] })
}

/// Restrict the fitted surface to the path and solve for the point where it
/// descends through rim height.
///
/// Restricting the quadratic surface to a line gives a quadratic in arc
/// length; the descending root is the one with `dz/ds < -TANGENCY_TOL`
/// (the larger root when the quadratic opens downward).
pub fn rim_crossing(
    fit: &QuadraticFit,
    path: &LinePath,
    ctx: &ShotContext,
) -> Result<RimCrossing, TrajectoryError> {
    let [dx, dy] = path.direction_xy;
    // Re-anchor the parameterization at the path point nearest the hoop so
    // the root solve happens at small arc lengths.
    let s_h = (ctx.hoop_xy[0] - path.origin_xy[0]) * dx + (ctx.hoop_xy[1] - path.origin_xy[1]) * dy;
    let [ox, oy] = path.point_at(s_h);

    let b = &fit.beta;
    let c0 = b[0] + b[1] * ox + b[2] * oy + b[3] * ox * ox + b[4] * oy * oy + b[5] * ox * oy;
    let c1 = b[1] * dx + b[2] * dy
        + 2.0 * b[3] * ox * dx
        + 2.0 * b[4] * oy * dy
        + b[5] * (ox * dy + oy * dx);
    let c2 = b[3] * dx * dx + b[4] * dy * dy + b[5] * dx * dy;

    let c = c0 - ctx.hoop_height_ft;
    let scale = c2.abs().max(c1.abs()).max(c.abs()).max(1e-300);

    let mut roots: Vec<f64> = Vec::with_capacity(2);
    if c2.abs() <= 1e-14 * scale {
        if c1.abs() <= 1e-14 * scale {
            return Err(TrajectoryError::NoDescendingCrossing);
        }
        roots.push(-c / c1);
    } else {
        let disc = c1 * c1 - 4.0 * c2 * c;
        if disc < 0.0 {
            return Err(TrajectoryError::NoDescendingCrossing);
        }
        let sq = disc.sqrt();
        let q = -0.5 * (c1 + c1.signum() * sq);
        if q.abs() > 0.0 {
            roots.push(q / c2);
            roots.push(c / q);
        } else {
            roots.push(0.0);
        }
    }

    for &s in &roots {
        let slope = c1 + 2.0 * c2 * s;
        if slope < -TANGENCY_TOL {
            return Ok(RimCrossing {
                crossing_xy: [ox + s * dx, oy + s * dy],
                dz_ds: slope,
                arc_length_ft: s_h + s,
            });
        }
    }
    Err(TrajectoryError::NoDescendingCrossing)
}

/// Convert a rim-plane crossing into the three shot factors.
///
/// With `u` the shooter axis: depth is the along-axis distance from the
/// adjusted front of the rim (the hoop center is `12 * rim_radius` = 9 inches
/// deep), left-right is the signed perpendicular offset (positive toward the
/// shooter's right), and the entry angle is `atan(-dz/ds)`.
pub fn compute_shot_factors(crossing: &RimCrossing, ctx: &ShotContext) -> RimFactors {
    debug_assert!(crossing.dz_ds < 0.0);
    let u = ctx.shooter_axis();
    let u_perp = [u[1], -u[0]]; // shooter's right
    let d = [
        crossing.crossing_xy[0] - ctx.hoop_xy[0],
        crossing.crossing_xy[1] - ctx.hoop_xy[1],
    ];
    let along = d[0] * u[0] + d[1] * u[1];
    let lateral = d[0] * u_perp[0] + d[1] * u_perp[1];
    RimFactors {
        depth_in: 12.0 * (ctx.rim_radius_ft + along),
        left_right_in: 12.0 * lateral,
        entry_angle_deg: (-crossing.dz_ds).atan().to_degrees(),
    }
}

/// Trajectory trust rule: enough samples, residuals within bounds, and a
/// rim-plane crossing found.
pub fn validate_trajectory(fit: &QuadraticFit, crossed: bool, cfg: &ValidityCfg) -> bool {
    fit.n_samples >= cfg.min_samples && fit.residual_rmse <= cfg.max_rmse_ft && crossed
}

/// Run the full factor pipeline for one shot. Never fails: shots that cannot
/// be measured come back invalid with the 0/1 fill probability implied by
/// their outcome.
pub fn process_shot(
    samples: &[TrackingSample],
    ctx: &ShotContext,
    made: bool,
    cfg: &TrajectoryCfg,
) -> FittedShot {
    let fill = if made { 1.0 } else { 0.0 };
    let invalid = |fit: Option<QuadraticFit>,
                   path: Option<LinePath>,
                   crossing: Option<RimCrossing>,
                   reason: InvalidReason| FittedShot {
        fit,
        path,
        crossing,
        factors: ShotFactors::Invalid { fill_prob: fill },
        invalid_reason: Some(reason),
    };

    if samples.len() < cfg.validity.min_samples.max(2) {
        return invalid(None, None, None, InvalidReason::TooFewSamples);
    }
    let path = match fit_horizontal_path(samples, ctx) {
        Ok(p) => p,
        Err(_) => return invalid(None, None, None, InvalidReason::FitFailed),
    };
    let fit = match cfg.method {
        FitMethod::Ols => fit_quadratic_ols(samples),
        FitMethod::Bayes => fit_quadratic_bayes(samples, ctx, &cfg.bayes),
    };
    let fit = match fit {
        Ok(f) => f,
        Err(_) => return invalid(None, Some(path), None, InvalidReason::FitFailed),
    };
    let crossing = rim_crossing(&fit, &path, ctx).ok();

    if fit.residual_rmse > cfg.validity.max_rmse_ft {
        return invalid(Some(fit), Some(path), crossing, InvalidReason::HighRmse);
    }
    let crossing = match crossing {
        Some(c) => c,
        None => return invalid(Some(fit), Some(path), None, InvalidReason::NoCrossing),
    };
    if path.sampled_length_ft() < cfg.validity.min_path_len_ft {
        return invalid(Some(fit), Some(path), Some(crossing), InvalidReason::ShortArc);
    }

    let factors = compute_shot_factors(&crossing, ctx);
    FittedShot {
        fit: Some(fit),
        path: Some(path),
        crossing: Some(crossing),
        factors: ShotFactors::Valid(factors),
        invalid_reason: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::distr::Distribution;
    use rand::Rng;
    use statrs::distribution::Normal;

    const TRUE_BETA: [f64; 6] = [7.0, 8.0, 0.0, -4.0, 0.0, 0.0];

    fn gauss(rng: &mut impl Rng, sd: f64) -> f64 {
        if sd > 0.0 {
            Normal::new(0.0, sd).unwrap().sample(rng)
        } else {
            0.0
        }
    }

    fn surface_z(beta: &[f64; 6], x: f64, y: f64) -> f64 {
        beta[0] + beta[1] * x + beta[2] * y + beta[3] * x * x + beta[4] * y * y + beta[5] * x * y
    }

    /// Samples along a curved horizontal path so the quadratic design has
    /// full rank.
    fn curved_samples(beta: &[f64; 6], n: usize) -> Vec<TrackingSample> {
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64 * 2.0;
                let x = t;
                let y = 0.8 * t + 0.5 * (3.0 * t).sin();
                TrackingSample { t, x, y, z: surface_z(beta, x, y) }
            })
            .collect()
    }

    /// Straight-line shot sampled from an exact parabola plus optional noise:
    /// release at `release` (7 ft high), crossing rim height at `crossing`
    /// with entry angle `angle_deg`.
    fn parabola_shot(
        release: [f64; 2],
        crossing: [f64; 2],
        angle_deg: f64,
        sigma_xy: f64,
        sigma_z: f64,
        rng: &mut impl Rng,
    ) -> Vec<TrackingSample> {
        let dx = crossing[0] - release[0];
        let dy = crossing[1] - release[1];
        let len = (dx * dx + dy * dy).sqrt();
        let dir = [dx / len, dy / len];
        let tan_a = angle_deg.to_radians().tan();
        let a = -(len * tan_a + 3.0) / (len * len);
        let b = (6.0 + len * tan_a) / len;
        let speed = (16.1 / -a).sqrt();
        let flight = len / speed;
        let n = (flight * 25.0).floor() as usize + 1;
        (0..n)
            .map(|i| {
                let t = i as f64 / 25.0;
                let s = speed * t;
                TrackingSample {
                    t,
                    x: release[0] + s * dir[0] + gauss(rng, sigma_xy),
                    y: release[1] + s * dir[1] + gauss(rng, sigma_xy),
                    z: 7.0 + b * s + a * s * s + gauss(rng, sigma_z),
                }
            })
            .collect()
    }

    fn test_ctx() -> ShotContext {
        ShotContext::new([30.0, 25.0], [5.25, 25.0])
    }

    #[test]
    fn ols_recovers_exact_interpolation() {
        let samples = curved_samples(&TRUE_BETA, 25);
        let fit = fit_quadratic_ols(&samples).unwrap();
        for j in 0..6 {
            assert!((fit.beta[j] - TRUE_BETA[j]).abs() < 1e-9, "beta[{j}] = {}", fit.beta[j]);
        }
        assert!(fit.residual_rmse < 1e-9);
        assert_eq!(fit.n_samples, 25);
    }

    #[test]
    fn ols_rejects_fewer_samples_than_parameters() {
        let samples = curved_samples(&TRUE_BETA, 5);
        assert!(matches!(
            fit_quadratic_ols(&samples),
            Err(TrajectoryError::RankDeficient { .. })
        ));
    }

    #[test]
    fn ols_rejects_collinear_court_positions() {
        let samples: Vec<TrackingSample> = (0..25)
            .map(|i| {
                let t = i as f64 * 0.04;
                TrackingSample { t, x: t * 10.0, y: 2.0 * t * 10.0 + 1.0, z: 7.0 + 8.0 * t - 4.0 * t * t }
            })
            .collect();
        assert!(matches!(
            fit_quadratic_ols(&samples),
            Err(TrajectoryError::RankDeficient { .. })
        ));
    }

    #[test]
    fn ols_noisy_recovery_is_unbiased_within_three_standard_errors() {
        // Fixed design, fresh z-noise each trial; the mean estimate over 100
        // trials should sit within 3 standard errors of the truth.
        let sigma = 0.4;
        let trials = 100;
        let base = curved_samples(&TRUE_BETA, 25);
        let mut rng = crate::util::stream_rng(1101, &[0]);
        let mut sum = [0.0; 6];
        for _ in 0..trials {
            let noisy: Vec<TrackingSample> = base
                .iter()
                .map(|s| TrackingSample { z: s.z + gauss(&mut rng, sigma), ..*s })
                .collect();
            let fit = fit_quadratic_ols(&noisy).unwrap();
            for j in 0..6 {
                sum[j] += fit.beta[j];
            }
        }
        // Standard errors from the exact normal matrix.
        let rows: Vec<[f64; 6]> = base.iter().map(|s| centered_row(s.x, s.y, 0.0, 0.0)).collect();
        let gram = gram_of_rows(&rows, &vec![1.0; rows.len()]);
        let cov = gram.try_inverse().unwrap() * (sigma * sigma);
        for j in 0..6 {
            let mean_j = sum[j] / trials as f64;
            let se_mean = (cov[(j, j)] / trials as f64).sqrt();
            assert!(
                (mean_j - TRUE_BETA[j]).abs() < 3.0 * se_mean,
                "beta[{j}]: mean {mean_j} truth {} se {se_mean}",
                TRUE_BETA[j]
            );
        }
    }

    #[test]
    fn bayes_with_vanishing_prior_matches_ols() {
        // Well-conditioned design: a dense grid keeps the smallest normal
        // matrix eigenvalue far above the 1e-6 regularizer.
        let beta = [7.0, 8.0, 2.0, -4.0, 1.5, 0.8];
        let mut samples = Vec::new();
        for i in 0..15 {
            for j in 0..15 {
                let x = -3.0 + 6.0 * i as f64 / 14.0;
                let y = -3.0 + 6.0 * j as f64 / 14.0;
                samples.push(TrackingSample {
                    t: (i * 15 + j) as f64 * 0.01,
                    x,
                    y,
                    z: surface_z(&beta, x, y),
                });
            }
        }
        let ctx = ShotContext::new([-3.0, 0.0], [0.0, 0.0]);
        let ols = fit_quadratic_ols(&samples).unwrap();
        let cfg = BayesCfg { pseudo_weight: 0.0, prior_precision: 1e-6, ..Default::default() };
        let bayes = fit_quadratic_bayes(&samples, &ctx, &cfg).unwrap();
        for j in 0..6 {
            let rel = (bayes.beta[j] - ols.beta[j]).abs() / ols.beta[j].abs();
            assert!(rel < 1e-6, "beta[{j}] rel err {rel}");
        }

        // Limit check on realistic shot geometry: prior precision pushed to
        // zero makes the two fits agree even on a skinny design.
        let mut rng = crate::util::stream_rng(1102, &[0]);
        let ctx = test_ctx();
        let shot = parabola_shot(ctx.release_xy, [5.0, 25.2], 45.0, 0.2, 0.3, &mut rng);
        let ols = fit_quadratic_ols(&shot).unwrap();
        let cfg = BayesCfg { pseudo_weight: 0.0, prior_precision: 1e-12, ..Default::default() };
        let bayes = fit_quadratic_bayes(&shot, &ctx, &cfg).unwrap();
        for j in 0..6 {
            let rel = (bayes.beta[j] - ols.beta[j]).abs() / ols.beta[j].abs().max(1e-3);
            assert!(rel < 1e-6, "limit beta[{j}] rel err {rel}");
        }
    }

    #[test]
    fn bayes_dominant_pseudo_weight_pins_anchor_points() {
        let ctx = test_ctx();
        let mut rng = crate::util::stream_rng(1103, &[0]);
        let samples = parabola_shot(ctx.release_xy, [5.0, 25.2], 45.0, 0.05, 0.4, &mut rng);
        let cfg = BayesCfg { pseudo_weight: 1e6, ..Default::default() };
        let fit = fit_quadratic_bayes(&samples, &ctx, &cfg).unwrap();
        assert!((fit.height_at(ctx.release_xy) - RELEASE_HEIGHT_FT).abs() < 1e-3);
        assert!((fit.height_at(ctx.hoop_xy) - HOOP_HEIGHT_FT).abs() < 1e-3);
    }

    #[test]
    fn bayes_depth_spread_below_ols_depth_spread() {
        // Same noisy shots measured under both fits; the pseudo-data anchors
        // stabilize where the surface reaches rim height.
        let ctx = test_ctx();
        let truth_crossing = [5.25 - 2.0 / 12.0, 25.0]; // 7" deep
        let mut depths_ols = Vec::new();
        let mut depths_bayes = Vec::new();
        for rep in 0..400 {
            let mut rng = crate::util::stream_rng(1104, &[rep]);
            let samples = parabola_shot(ctx.release_xy, truth_crossing, 45.0, 0.15, 0.4, &mut rng);
            let path = fit_horizontal_path(&samples, &ctx).unwrap();
            if let Ok(fit) = fit_quadratic_ols(&samples) {
                if let Ok(cross) = rim_crossing(&fit, &path, &ctx) {
                    depths_ols.push(compute_shot_factors(&cross, &ctx).depth_in);
                }
            }
            let fit = fit_quadratic_bayes(&samples, &ctx, &BayesCfg::default()).unwrap();
            if let Ok(cross) = rim_crossing(&fit, &path, &ctx) {
                depths_bayes.push(compute_shot_factors(&cross, &ctx).depth_in);
            }
        }
        assert!(depths_ols.len() > 300 && depths_bayes.len() > 380);
        let sd_ols = crate::util::sample_sd(&depths_ols);
        let sd_bayes = crate::util::sample_sd(&depths_bayes);
        assert!(sd_bayes < sd_ols, "bayes sd {sd_bayes} vs ols sd {sd_ols}");
    }

    #[test]
    fn path_fit_recovers_exact_line_and_ignores_sample_order() {
        let ctx = test_ctx();
        let samples: Vec<TrackingSample> = (0..20)
            .map(|i| {
                let t = i as f64 * 0.04;
                TrackingSample { t, x: 30.0 - 18.0 * t, y: 25.0 + 1.5 * t, z: 8.0 }
            })
            .collect();
        let path = fit_horizontal_path(&samples, &ctx).unwrap();
        let expected = {
            let norm = (18.0f64 * 18.0 + 1.5 * 1.5).sqrt();
            [-18.0 / norm, 1.5 / norm]
        };
        assert_relative_eq!(path.direction_xy[0], expected[0], epsilon = 1e-12);
        assert_relative_eq!(path.direction_xy[1], expected[1], epsilon = 1e-12);
        assert_relative_eq!(path.origin_xy[0], 30.0, epsilon = 1e-9);

        let mut reversed = samples.clone();
        reversed.reverse();
        let path_rev = fit_horizontal_path(&reversed, &ctx).unwrap();
        assert_relative_eq!(path.direction_xy[0], path_rev.direction_xy[0], epsilon = 1e-12);
        assert_relative_eq!(path.direction_xy[1], path_rev.direction_xy[1], epsilon = 1e-12);
        assert_relative_eq!(path.origin_xy[0], path_rev.origin_xy[0], epsilon = 1e-9);
        assert_relative_eq!(path.speed_fps, path_rev.speed_fps, epsilon = 1e-12);
    }

    #[test]
    fn path_fit_direction_within_two_degrees_under_noise() {
        let ctx = test_ctx();
        let true_dir = ctx.shooter_axis();
        for rep in 0..100 {
            let mut rng = crate::util::stream_rng(1105, &[rep]);
            let samples = parabola_shot(ctx.release_xy, ctx.hoop_xy, 45.0, 0.1, 0.0, &mut rng);
            let path = fit_horizontal_path(&samples, &ctx).unwrap();
            let cosang = path.direction_xy[0] * true_dir[0] + path.direction_xy[1] * true_dir[1];
            let err_deg = cosang.clamp(-1.0, 1.0).acos().to_degrees();
            assert!(err_deg < 2.0, "rep {rep}: direction error {err_deg} deg");
        }
    }

    #[test]
    fn vertical_path_falls_back_to_shooter_axis() {
        let ctx = test_ctx();
        let samples: Vec<TrackingSample> = (0..10)
            .map(|i| TrackingSample { t: i as f64 * 0.04, x: 5.25, y: 25.0, z: 9.0 })
            .collect();
        let path = fit_horizontal_path(&samples, &ctx).unwrap();
        let axis = ctx.shooter_axis();
        assert_relative_eq!(path.direction_xy[0], axis[0], epsilon = 1e-12);
        assert!(path.speed_fps > 0.0);
    }

    fn fit_from_beta(beta: [f64; 6]) -> QuadraticFit {
        QuadraticFit {
            beta: Vector6::from_column_slice(&beta),
            precision: Matrix6::identity(),
            residual_rmse: 0.0,
            n_samples: 25,
            sigma2: 0.0,
        }
    }

    fn x_axis_path() -> LinePath {
        LinePath { origin_xy: [0.0, 0.0], direction_xy: [1.0, 0.0], speed_fps: 18.0, t_range: [0.0, 1.0] }
    }

    #[test]
    fn crossing_picks_descending_root_of_restricted_quadratic() {
        // z(s) = 7 + 8s - 4s^2 crosses 10 at s in {0.5, 1.5}; the descent is
        // at the larger root with slope -4.
        let fit = fit_from_beta([7.0, 8.0, 0.0, -4.0, 0.0, 0.0]);
        let ctx = ShotContext::new([-10.0, 0.0], [0.0, 0.0]);
        let cross = rim_crossing(&fit, &x_axis_path(), &ctx).unwrap();
        assert_relative_eq!(cross.arc_length_ft, 1.5, epsilon = 1e-12);
        assert_relative_eq!(cross.crossing_xy[0], 1.5, epsilon = 1e-12);
        assert_relative_eq!(cross.dz_ds, -4.0, epsilon = 1e-12);
    }

    #[test]
    fn tangent_graze_at_rim_height_is_rejected() {
        let fit = fit_from_beta([10.0, 0.0, 0.0, -1.0, 0.0, 0.0]);
        let ctx = ShotContext::new([-10.0, 0.0], [0.0, 0.0]);
        assert!(matches!(
            rim_crossing(&fit, &x_axis_path(), &ctx),
            Err(TrajectoryError::NoDescendingCrossing)
        ));
    }

    #[test]
    fn surface_below_rim_height_is_rejected() {
        let fit = fit_from_beta([9.0, 0.0, 0.0, -1.0, 0.0, 0.0]);
        let ctx = ShotContext::new([-10.0, 0.0], [0.0, 0.0]);
        assert!(matches!(
            rim_crossing(&fit, &x_axis_path(), &ctx),
            Err(TrajectoryError::NoDescendingCrossing)
        ));
    }

    #[test]
    fn factor_conventions_at_reference_points() {
        let ctx = ShotContext::new([30.0, 25.0], [5.25, 25.0]);
        let u = ctx.shooter_axis(); // (-1, 0)

        // Dead-center crossing, near-vertical descent.
        let center = RimCrossing { crossing_xy: ctx.hoop_xy, dz_ds: -1e9, arc_length_ft: 0.0 };
        let f = compute_shot_factors(&center, &ctx);
        assert_relative_eq!(f.depth_in, 9.0, epsilon = 1e-9);
        assert_relative_eq!(f.left_right_in, 0.0, epsilon = 1e-9);
        assert!(f.entry_angle_deg > 89.9999);

        // Two inches past center along the shooter axis, unit descent slope.
        let deeper = RimCrossing {
            crossing_xy: [ctx.hoop_xy[0] + u[0] * 2.0 / 12.0, ctx.hoop_xy[1] + u[1] * 2.0 / 12.0],
            dz_ds: -1.0,
            arc_length_ft: 0.0,
        };
        let f = compute_shot_factors(&deeper, &ctx);
        assert_relative_eq!(f.depth_in, 11.0, epsilon = 1e-9);
        assert_relative_eq!(f.entry_angle_deg, 45.0, epsilon = 1e-9);

        // Three inches to the shooter's left.
        let left = [-u[1], u[0]];
        let off = RimCrossing {
            crossing_xy: [
                ctx.hoop_xy[0] + left[0] * 3.0 / 12.0,
                ctx.hoop_xy[1] + left[1] * 3.0 / 12.0,
            ],
            dz_ds: -1.0,
            arc_length_ft: 0.0,
        };
        let f = compute_shot_factors(&off, &ctx);
        assert_relative_eq!(f.left_right_in, -3.0, epsilon = 1e-9);

        // Crossing exactly on the adjusted front of the rim has depth zero.
        let front = RimCrossing {
            crossing_xy: [
                ctx.hoop_xy[0] - u[0] * ctx.rim_radius_ft,
                ctx.hoop_xy[1] - u[1] * ctx.rim_radius_ft,
            ],
            dz_ds: -1.0,
            arc_length_ft: 0.0,
        };
        let f = compute_shot_factors(&front, &ctx);
        assert_relative_eq!(f.depth_in, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn validity_thresholds() {
        let cfg = ValidityCfg::default();
        let mut fit = fit_from_beta(TRUE_BETA);
        fit.n_samples = 7;
        assert!(!validate_trajectory(&fit, true, &cfg));
        fit.n_samples = 25;
        fit.residual_rmse = 1.6;
        assert!(!validate_trajectory(&fit, true, &cfg));
        fit.residual_rmse = 0.3;
        assert!(!validate_trajectory(&fit, false, &cfg));
        assert!(validate_trajectory(&fit, true, &cfg));
    }

    #[test]
    fn process_shot_marks_invalid_shots_with_outcome_fill() {
        let ctx = test_ctx();
        let cfg = TrajectoryCfg::default();
        let mut rng = crate::util::stream_rng(1106, &[0]);
        let short = parabola_shot(ctx.release_xy, ctx.hoop_xy, 45.0, 0.0, 0.0, &mut rng)
            .into_iter()
            .take(7)
            .collect::<Vec<_>>();
        let shot = process_shot(&short, &ctx, true, &cfg);
        assert_eq!(shot.invalid_reason, Some(InvalidReason::TooFewSamples));
        assert_eq!(shot.factors.fill_prob(), Some(1.0));

        let clean = parabola_shot(ctx.release_xy, [5.0, 25.1], 44.0, 0.0, 0.0, &mut rng);
        let shot = process_shot(&clean, &ctx, false, &cfg);
        assert!(shot.factors.is_valid(), "reason {:?}", shot.invalid_reason);
    }

    #[test]
    fn factors_are_translation_equivariant() {
        let ctx = test_ctx();
        let mut rng = crate::util::stream_rng(1107, &[0]);
        let samples = parabola_shot(ctx.release_xy, [5.0, 25.2], 46.0, 0.1, 0.3, &mut rng);
        let cfg = TrajectoryCfg::default();
        let base = process_shot(&samples, &ctx, true, &cfg);

        for (shift_idx, shift) in [[13.0, -7.0], [-4.5, 21.0]].iter().enumerate() {
            let moved: Vec<TrackingSample> = samples
                .iter()
                .map(|s| TrackingSample { t: s.t, x: s.x + shift[0], y: s.y + shift[1], z: s.z })
                .collect();
            let moved_ctx = ShotContext::new(
                [ctx.release_xy[0] + shift[0], ctx.release_xy[1] + shift[1]],
                [ctx.hoop_xy[0] + shift[0], ctx.hoop_xy[1] + shift[1]],
            );
            let shifted = process_shot(&moved, &moved_ctx, true, &cfg);
            let (a, b) = (base.factors.rim().unwrap(), shifted.factors.rim().unwrap());
            assert!((a.depth_in - b.depth_in).abs() < 1e-9, "shift {shift_idx} depth");
            assert!((a.left_right_in - b.left_right_in).abs() < 1e-9, "shift {shift_idx} lr");
            assert!((a.entry_angle_deg - b.entry_angle_deg).abs() < 1e-9, "shift {shift_idx} angle");
        }
    }

    #[test]
    fn factors_are_rotation_equivariant_and_reflection_flips_left_right() {
        // OLS is exactly rotation-equivariant. The Bayesian fit carries a
        // tiny basis anchor through the isotropic 1e-6 monomial-basis prior,
        // so it gets a looser (still micrometer-scale) tolerance.
        for (method, tol) in [(FitMethod::Ols, 1e-6), (FitMethod::Bayes, 5e-3)] {
            let ctx = test_ctx();
            let mut rng = crate::util::stream_rng(1108, &[0]);
            let samples = parabola_shot(ctx.release_xy, [5.1, 25.3], 45.5, 0.1, 0.3, &mut rng);
            let cfg = TrajectoryCfg { method, ..Default::default() };
            let base = process_shot(&samples, &ctx, true, &cfg);
            let bf = base.factors.rim().unwrap();

            let rotate = |p: [f64; 2], th: f64| -> [f64; 2] {
                let (s, c) = th.sin_cos();
                let dx = p[0] - ctx.hoop_xy[0];
                let dy = p[1] - ctx.hoop_xy[1];
                [ctx.hoop_xy[0] + c * dx - s * dy, ctx.hoop_xy[1] + s * dx + c * dy]
            };
            let th = 0.83;
            let rotated: Vec<TrackingSample> = samples
                .iter()
                .map(|s| {
                    let p = rotate([s.x, s.y], th);
                    TrackingSample { t: s.t, x: p[0], y: p[1], z: s.z }
                })
                .collect();
            let rctx = ShotContext::new(rotate(ctx.release_xy, th), ctx.hoop_xy);
            let rshot = process_shot(&rotated, &rctx, true, &cfg);
            let rf = rshot.factors.rim().unwrap();
            assert!((bf.depth_in - rf.depth_in).abs() < tol, "{method:?} depth {} vs {}", bf.depth_in, rf.depth_in);
            assert!((bf.left_right_in.abs() - rf.left_right_in.abs()).abs() < tol, "{method:?} lr");
            assert!((bf.entry_angle_deg - rf.entry_angle_deg).abs() < tol, "{method:?} angle");

            // Reflect across the shooter axis (it runs along y = 25).
            let reflected: Vec<TrackingSample> = samples
                .iter()
                .map(|s| TrackingSample { t: s.t, x: s.x, y: 50.0 - s.y, z: s.z })
                .collect();
            let fctx = ShotContext::new(
                [ctx.release_xy[0], 50.0 - ctx.release_xy[1]],
                [ctx.hoop_xy[0], 50.0 - ctx.hoop_xy[1]],
            );
            let fshot = process_shot(&reflected, &fctx, true, &cfg);
            let ff = fshot.factors.rim().unwrap();
            assert!((bf.depth_in - ff.depth_in).abs() < tol, "{method:?} reflected depth");
            assert!(
                (bf.left_right_in + ff.left_right_in).abs() < tol,
                "{method:?} lr {} vs {}",
                bf.left_right_in,
                ff.left_right_in
            );
            assert!((bf.entry_angle_deg - ff.entry_angle_deg).abs() < tol, "{method:?} reflected angle");
        }
    }
}
