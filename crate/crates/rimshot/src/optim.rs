//! Nelder-Mead simplex minimization.
//!
//! Used by the beta-binomial maximum-likelihood fit in [`crate::estimators`];
//! exposed publicly because it is a self-contained derivative-free minimizer.

/// Simplex coefficients and stopping rules.
///
/// Defaults: reflection 1.0, expansion 2.0, contraction 0.5, shrink 0.5,
/// tolerance 1e-8 on the simplex spread, 500 iterations max.
#[derive(Debug, Clone)]
pub struct NelderMeadCfg {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Convergence when both the coordinate spread and the objective spread
    /// of the simplex fall below this value.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NelderMeadCfg {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            tol: 1e-8,
            max_iter: 500,
        }
    }
}

/// Outcome of a minimization. `converged = false` means the iteration limit
/// was hit; the best point found so far is still returned.
#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

// Initial simplex displacement, relative for nonzero coordinates and
// absolute for zero ones (same constants scipy uses).
const NONZERO_STEP: f64 = 0.05;
const ZERO_STEP: f64 = 0.00025;

/// Minimize `f` starting from `x0` with the downhill simplex method.
/// Deterministic for a fixed starting point and configuration.
pub fn nelder_mead_minimize<F>(f: F, x0: &[f64], cfg: &NelderMeadCfg) -> NelderMeadResult
where
    F: Fn(&[f64]) -> f64,
{
    let dim = x0.len();
    assert!(dim > 0, "nelder_mead_minimize needs at least one dimension");

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        if v[i] != 0.0 {
            v[i] *= 1.0 + NONZERO_STEP;
        } else {
            v[i] = ZERO_STEP;
        }
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        // Order vertices best-first. Sorting by value keeps ties stable.
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        let simplex_sorted: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let values_sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = simplex_sorted;
        values = values_sorted;

        let x_spread = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0_f64, f64::max)
            })
            .fold(0.0_f64, f64::max);
        let f_spread = values[dim] - values[0];
        if x_spread <= cfg.tol && f_spread.abs() <= cfg.tol {
            converged = true;
            break;
        }

        iterations += 1;

        // Centroid of all vertices except the worst.
        let mut centroid = vec![0.0; dim];
        for v in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x;
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let worst = simplex[dim].clone();
        let f_worst = values[dim];
        let f_best = values[0];
        let f_second_worst = values[dim - 1];

        let blend = |a: &[f64], b: &[f64], coeff: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(ai, bi)| ai + coeff * (ai - bi)).collect()
        };

        let reflected = blend(&centroid, &worst, cfg.reflection);
        let f_reflected = f(&reflected);

        if f_reflected < f_best {
            let expanded = blend(&centroid, &worst, cfg.expansion);
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                simplex[dim] = expanded;
                values[dim] = f_expanded;
            } else {
                simplex[dim] = reflected;
                values[dim] = f_reflected;
            }
            continue;
        }

        if f_reflected < f_second_worst {
            simplex[dim] = reflected;
            values[dim] = f_reflected;
            continue;
        }

        // Contraction, outside or inside depending on the reflected value.
        let contracted = if f_reflected < f_worst {
            blend(&centroid, &worst, cfg.reflection * cfg.contraction)
        } else {
            blend(&centroid, &worst, -cfg.contraction)
        };
        let f_contracted = f(&contracted);
        if f_contracted < f_worst.min(f_reflected) {
            simplex[dim] = contracted;
            values[dim] = f_contracted;
            continue;
        }

        // Shrink everything toward the best vertex.
        let best = simplex[0].clone();
        for (v, val) in simplex.iter_mut().zip(values.iter_mut()).skip(1) {
            for (x, b) in v.iter_mut().zip(&best) {
                *x = b + cfg.shrink * (*x - b);
            }
            *val = f(v);
        }
    }

    let mut best_idx = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best_idx] {
            best_idx = i;
        }
    }
    NelderMeadResult {
        x: simplex[best_idx].clone(),
        fx: values[best_idx],
        iterations,
        converged,
    }
}
