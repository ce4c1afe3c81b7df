use crate::error::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 4.0;

/// Log-infidelity basis `x = clamp(log10(1 − F), −ε, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalityConfig {
    epsilon: f64,
}

impl Default for OptimalityConfig {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
        }
    }
}

impl OptimalityConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Maps a fidelity to the clamped log-infidelity.
    pub fn log_infidelity(&self, fidelity: f64) -> Result<f64> {
        // tolerate round-off just outside [0, 1]
        if !fidelity.is_finite() || !(-1e-9..=1.0 + 1e-9).contains(&fidelity) {
            return Err(Error::InvalidArgument(format!(
                "fidelity {fidelity} outside [0, 1]"
            )));
        }
        let infid = (1.0 - fidelity).max(0.0);
        Ok(infid.log10().clamp(-self.epsilon, 0.0))
    }

    pub fn log_infidelities(&self, fidelities: &[f64]) -> Result<Vec<f64>> {
        fidelities.iter().map(|&f| self.log_infidelity(f)).collect()
    }
}

/// Sorted samples with a right-continuous step CDF on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl EmpiricalDistribution {
    /// Clamps samples into `[lo, hi]` and sorts them.
    pub fn new(samples: &[f64], lo: f64, hi: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        if samples.iter().any(|x| x.is_nan()) || lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidArgument("bad samples or domain".into()));
        }
        let mut s: Vec<f64> = samples.iter().map(|x| x.clamp(lo, hi)).collect();
        s.sort_by(f64::total_cmp);
        Ok(Self { samples: s, lo, hi })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Fraction of samples `≤ x`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x >= self.hi {
            return 1.0;
        }
        self.samples.partition_point(|&s| s <= x) as f64 / self.samples.len() as f64
    }
}

/// Empirical distribution whose domain spans the samples.
pub fn empirical_cdf(samples: &[f64]) -> Result<EmpiricalDistribution> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::NonFinite("samples"));
    }
    EmpiricalDistribution::new(samples, lo, hi)
}

/// `∫ |P(x) − Q(x)| dx` over the merged breakpoints of both step CDFs.
pub fn wasserstein1(p: &EmpiricalDistribution, q: &EmpiricalDistribution) -> f64 {
    let mut points: Vec<f64> = p.samples.iter().chain(&q.samples).copied().collect();
    points.sort_by(f64::total_cmp);
    points
        .windows(2)
        .map(|w| (p.cdf(w[0]) - q.cdf(w[0])).abs() * (w[1] - w[0]))
        .sum()
}

/// Normalized distance of the clamped log-infidelities from a point mass
/// at `−ε`, in closed form `(mean(x) + ε)/ε`. Lies in `[0, 1]`.
pub fn w1_optimality(fidelities: &[f64], epsilon: f64) -> Result<f64> {
    let cfg = OptimalityConfig::new(epsilon)?;
    if fidelities.is_empty() {
        return Err(Error::EmptySamples);
    }
    let xs = cfg.log_infidelities(fidelities)?;
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    Ok(((mean + epsilon) / epsilon).clamp(0.0, 1.0))
}

/// Same quantity through the CDF integral against the point-mass reference.
pub fn w1_optimality_cdf(fidelities: &[f64], epsilon: f64) -> Result<f64> {
    let cfg = OptimalityConfig::new(epsilon)?;
    if fidelities.is_empty() {
        return Err(Error::EmptySamples);
    }
    let xs = cfg.log_infidelities(fidelities)?;
    let learned = EmpiricalDistribution::new(&xs, -epsilon, 0.0)?;
    let reference = EmpiricalDistribution::new(&[-epsilon], -epsilon, 0.0)?;
    Ok(wasserstein1(&learned, &reference) / epsilon)
}
