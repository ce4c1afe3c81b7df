use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::optimize::trace::{Method, OptimizationTrace, Tracker};
use crate::optimize::Objective;

/// Simplex coefficients and stopping tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadSettings {
    pub initial_step: f64,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Stop when the spread of simplex costs falls below this...
    pub f_tol: f64,
    /// ...and every vertex lies within this distance of the best one.
    pub x_tol: f64,
    /// Rebuild the simplex around the best point after convergence while
    /// budget remains.
    pub restart: bool,
}

impl Default for NelderMeadSettings {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            f_tol: 1e-12,
            x_tol: 1e-8,
            restart: false,
        }
    }
}

/// Gains `a_k = a/(k + 1 + A)^α`, `c_k = c/(k + 1)^γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpsaSettings {
    pub a: f64,
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Stability constant `A`; `None` means `budget / 20`.
    pub stability: Option<f64>,
}

impl Default for SpsaSettings {
    fn default() -> Self {
        Self {
            a: 0.2,
            c: 0.1,
            alpha: 0.602,
            gamma: 0.101,
            stability: None,
        }
    }
}

/// Adam over central-difference gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamSettings {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// Finite-difference half-width `Δλ`.
    pub delta: f64,
    /// Stop when every gradient component is below this.
    pub grad_tol: f64,
}

impl Default for AdamSettings {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            delta: 1e-4,
            grad_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OptimizerSettings {
    pub nelder_mead: NelderMeadSettings,
    pub spsa: SpsaSettings,
    pub adam: AdamSettings,
}

/// Minimizes `obj` from `x0` with at most `budget` evaluations. Requires
/// `budget ≥ dim + 1`. Deterministic for a given seed.
pub fn optimize<O: Objective + ?Sized>(
    obj: &mut O,
    x0: &[f64],
    method: Method,
    budget: u64,
    seed: u64,
    settings: &OptimizerSettings,
) -> Result<OptimizationTrace> {
    let d = obj.dim();
    if x0.len() != d {
        return Err(Error::ParameterCount {
            expected: d,
            found: x0.len(),
        });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("initial parameters"));
    }
    let required = d as u64 + 1;
    if budget < required {
        return Err(Error::BudgetTooSmall { budget, required });
    }
    match method {
        Method::NelderMead => nelder_mead(obj, x0, budget, seed, &settings.nelder_mead),
        Method::Spsa => spsa(obj, x0, budget, seed, &settings.spsa),
        Method::GradientDescent => adam(obj, x0, budget, seed, &settings.adam),
    }
}

fn nelder_mead<O: Objective + ?Sized>(
    obj: &mut O,
    x0: &[f64],
    budget: u64,
    seed: u64,
    s: &NelderMeadSettings,
) -> Result<OptimizationTrace> {
    let d = x0.len();
    let mut t = Tracker::new(obj, budget);
    let mut converged = false;
    let mut start = x0.to_vec();

    'outer: loop {
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
        for i in 0..=d {
            let mut x = start.clone();
            if i > 0 {
                x[i - 1] += s.initial_step;
            }
            let Some(f) = t.eval(&x)? else { break 'outer };
            simplex.push((x, f));
        }

        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (best, worst) = (simplex[0].1, simplex[d].1);
            let spread_x = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if worst - best <= s.f_tol && spread_x <= s.x_tol {
                converged = true;
                break;
            }

            let mut centroid = vec![0.0; d];
            for (x, _) in &simplex[..d] {
                for (c, v) in centroid.iter_mut().zip(x) {
                    *c += v / d as f64;
                }
            }
            let along = |coef: f64, from: &[f64]| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(from)
                    .map(|(c, v)| c + coef * (v - c))
                    .collect()
            };

            let xr = along(-s.reflection, &simplex[d].0);
            let Some(fr) = t.eval(&xr)? else { break 'outer };
            if fr < best {
                let xe = along(-s.reflection * s.expansion, &simplex[d].0);
                let Some(fe) = t.eval(&xe)? else { break 'outer };
                simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[d - 1].1 {
                simplex[d] = (xr, fr);
                continue;
            }
            let accepted = if fr < worst {
                let xc = along(s.contraction, &xr);
                let Some(fc) = t.eval(&xc)? else { break 'outer };
                (fc <= fr).then_some((xc, fc))
            } else {
                let xc = along(s.contraction, &simplex[d].0);
                let Some(fc) = t.eval(&xc)? else { break 'outer };
                (fc < worst).then_some((xc, fc))
            };
            match accepted {
                Some(v) => simplex[d] = v,
                None => {
                    let anchor = simplex[0].0.clone();
                    for vertex in simplex.iter_mut().skip(1) {
                        let x: Vec<f64> = anchor
                            .iter()
                            .zip(&vertex.0)
                            .map(|(a, v)| a + s.shrink * (v - a))
                            .collect();
                        let Some(f) = t.eval(&x)? else { break 'outer };
                        *vertex = (x, f);
                    }
                }
            }
        }

        if !s.restart || t.remaining() < d as u64 + 1 {
            break;
        }
        start = simplex[0].0.clone();
    }
    Ok(t.finish(Method::NelderMead, seed, x0, converged))
}

fn spsa<O: Objective + ?Sized>(
    obj: &mut O,
    x0: &[f64],
    budget: u64,
    seed: u64,
    s: &SpsaSettings,
) -> Result<OptimizationTrace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let big_a = s.stability.unwrap_or(budget as f64 / 20.0);
    let mut x = x0.to_vec();
    let mut t = Tracker::new(obj, budget);
    let mut k = 0u64;
    // one call is held back for the final iterate, which is never probed
    while t.remaining() >= 3 {
        let ak = s.a / (k as f64 + 1.0 + big_a).powf(s.alpha);
        let ck = s.c / (k as f64 + 1.0).powf(s.gamma);
        let delta: Vec<f64> = (0..x.len())
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let plus: Vec<f64> = x.iter().zip(&delta).map(|(v, d)| v + ck * d).collect();
        let minus: Vec<f64> = x.iter().zip(&delta).map(|(v, d)| v - ck * d).collect();
        let (Some(fp), Some(fm)) = (t.eval(&plus)?, t.eval(&minus)?) else {
            break;
        };
        let scale = (fp - fm) / (2.0 * ck);
        for (v, d) in x.iter_mut().zip(&delta) {
            // Rademacher entries are their own inverses
            *v -= ak * scale * d;
        }
        k += 1;
    }
    t.eval(&x)?;
    Ok(t.finish(Method::Spsa, seed, x0, false))
}

fn adam<O: Objective + ?Sized>(
    obj: &mut O,
    x0: &[f64],
    budget: u64,
    seed: u64,
    s: &AdamSettings,
) -> Result<OptimizationTrace> {
    let d = x0.len();
    let mut x = x0.to_vec();
    let mut m = vec![0.0; d];
    let mut v = vec![0.0; d];
    let mut grad = vec![0.0; d];
    let mut t = Tracker::new(obj, budget);
    let mut converged = false;
    let mut step = 0i32;
    while t.remaining() >= 2 * d as u64 {
        for k in 0..d {
            let mut probe = x.clone();
            probe[k] = x[k] + s.delta;
            let fp = t.eval(&probe)?.expect("budget checked");
            probe[k] = x[k] - s.delta;
            let fm = t.eval(&probe)?.expect("budget checked");
            grad[k] = (fp - fm) / (2.0 * s.delta);
        }
        if grad.iter().all(|g| g.abs() < s.grad_tol) {
            converged = true;
            break;
        }
        step += 1;
        let (c1, c2) = (1.0 - s.beta1.powi(step), 1.0 - s.beta2.powi(step));
        for k in 0..d {
            m[k] = s.beta1 * m[k] + (1.0 - s.beta1) * grad[k];
            v[k] = s.beta2 * v[k] + (1.0 - s.beta2) * grad[k] * grad[k];
            x[k] -= s.learning_rate * (m[k] / c1) / ((v[k] / c2).sqrt() + s.eps);
        }
    }
    // the last iterate itself is only probed at ±Δλ; spend one call on it
    t.eval(&x)?;
    Ok(t.finish(Method::GradientDescent, seed, x0, converged))
}
