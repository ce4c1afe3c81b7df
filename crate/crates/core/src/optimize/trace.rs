use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::optimize::Objective;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    NelderMead,
    Spsa,
    GradientDescent,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::NelderMead, Method::Spsa, Method::GradientDescent];

    pub fn name(self) -> &'static str {
        match self {
            Method::NelderMead => "nelder-mead",
            Method::Spsa => "spsa",
            Method::GradientDescent => "gradient-descent",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nelder-mead" | "neldermead" | "nm" => Ok(Method::NelderMead),
            "spsa" => Ok(Method::Spsa),
            "gradient-descent" | "gradientdescent" | "adam" | "gd" => Ok(Method::GradientDescent),
            other => Err(Error::InvalidArgument(format!("unknown optimizer '{other}'"))),
        }
    }
}

/// Result of one optimization run. `history` holds `(N_lea, cost)` for
/// every evaluation in order, `N_lea` counting from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTrace {
    pub method: Method,
    pub seed: u64,
    pub best_params: Vec<f64>,
    pub best_cost: f64,
    pub history: Vec<(u64, f64)>,
    pub converged: bool,
}

impl OptimizationTrace {
    pub fn evaluations(&self) -> u64 {
        self.history.last().map_or(0, |&(n, _)| n)
    }

    /// Running minimum of the recorded costs.
    pub fn best_so_far(&self) -> Vec<(u64, f64)> {
        let mut best = f64::INFINITY;
        self.history
            .iter()
            .map(|&(n, c)| {
                best = best.min(c);
                (n, best)
            })
            .collect()
    }

    /// Mean of the last `k` recorded costs (all of them if fewer).
    pub fn tail_mean(&self, k: usize) -> f64 {
        let k = k.min(self.history.len()).max(1);
        let tail = &self.history[self.history.len().saturating_sub(k)..];
        tail.iter().map(|&(_, c)| c).sum::<f64>() / tail.len() as f64
    }
}

/// Budgeted access to an objective: counts evaluations, records the
/// history and tracks the best point.
pub(crate) struct Tracker<'a, O: Objective + ?Sized> {
    obj: &'a mut O,
    budget: u64,
    used: u64,
    history: Vec<(u64, f64)>,
    best: Option<(f64, Vec<f64>)>,
}

impl<'a, O: Objective + ?Sized> Tracker<'a, O> {
    pub(crate) fn new(obj: &'a mut O, budget: u64) -> Self {
        Self {
            obj,
            budget,
            used: 0,
            history: Vec::with_capacity(budget.min(1 << 20) as usize),
            best: None,
        }
    }

    pub(crate) fn remaining(&self) -> u64 {
        self.budget - self.used
    }

    /// `None` once the budget is spent.
    pub(crate) fn eval(&mut self, x: &[f64]) -> Result<Option<f64>> {
        if self.used >= self.budget {
            return Ok(None);
        }
        let f = self.obj.evaluate(x)?;
        if f.is_nan() {
            return Err(Error::NonFinite("cost"));
        }
        self.used += 1;
        self.history.push((self.used, f));
        if self.best.as_ref().is_none_or(|(b, _)| f < *b) {
            self.best = Some((f, x.to_vec()));
        }
        Ok(Some(f))
    }

    pub(crate) fn finish(
        self,
        method: Method,
        seed: u64,
        fallback: &[f64],
        converged: bool,
    ) -> OptimizationTrace {
        let (best_cost, best_params) = self.best.unwrap_or((f64::INFINITY, fallback.to_vec()));
        OptimizationTrace {
            method,
            seed,
            best_params,
            best_cost,
            history: self.history,
            converged,
        }
    }
}
