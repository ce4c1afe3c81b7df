//! TOML experiment configuration. Unknown keys are rejected; every section
//! and field except `experiment` has a default.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use vqoc_core::noise::MAX_DENSITY_QUBITS;
use vqoc_core::optimize::{AdamSettings, NelderMeadSettings, SpsaSettings};
use vqoc_core::{
    AnsatzKind, ChainSetup, Interpolation, Method, NoiseConfig, OptimizerSettings, Shots, StepConvention,
};

use crate::error::{ExpError, Result};

/// Largest noiseless register the harness accepts.
pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    MaxFidelity,
    TimeOptimal,
    OptimalityGrid,
    Expressibility,
    Gradvar,
    TrotterError,
    Noisy,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::MaxFidelity => "max-fidelity",
            ExperimentKind::TimeOptimal => "time-optimal",
            ExperimentKind::OptimalityGrid => "optimality-grid",
            ExperimentKind::Expressibility => "expressibility",
            ExperimentKind::Gradvar => "gradvar",
            ExperimentKind::TrotterError => "trotter-error",
            ExperimentKind::Noisy => "noisy",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A core enum (de)serialized through its `Display`/`FromStr` names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Named<T>(pub T);

impl<T: fmt::Display> Serialize for Named<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de, T: FromStr> Deserialize<'de> for Named<T>
where
    T::Err: fmt::Display,
{
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map(Named).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `Δt = T / (N_t − 1)`.
    #[default]
    Knots,
    /// `Δt = T / N_t`.
    Layers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldInterpolation {
    #[default]
    Hold,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainConfig {
    pub qubits: usize,
    pub trotter_steps: usize,
    /// Total time `T` in units of `1/J0`. Mutually exclusive with `h`.
    pub time: Option<f64>,
    /// Speed-limit factor: `T = h (N − 1) / J0`.
    pub h: Option<f64>,
    pub coupling: f64,
    pub convention: Convention,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            qubits: 6,
            trotter_steps: 6,
            time: None,
            h: None,
            coupling: 1.0,
            convention: Convention::Knots,
        }
    }
}

impl ChainConfig {
    /// `T` for a chain of `qubits` sites, from `time` or `h`.
    pub fn total_time(&self, qubits: usize) -> Option<f64> {
        self.time
            .or_else(|| self.h.map(|h| speed_limit_time(h, qubits, self.coupling)))
    }

    /// Chain with the configured coupling and step convention.
    pub fn setup(&self, qubits: usize, trotter_steps: usize, time: f64) -> Result<ChainSetup> {
        let convention = match self.convention {
            Convention::Knots => StepConvention::Knots,
            Convention::Layers => StepConvention::Layers,
        };
        Ok(ChainSetup::new(qubits, trotter_steps, time)?
            .with_coupling(self.coupling)?
            .with_convention(convention)?)
    }
}

/// `T = h (N − 1) / J0`.
pub fn speed_limit_time(h: f64, qubits: usize, coupling: f64) -> f64 {
    h * (qubits as f64 - 1.0) / coupling.abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NelderMeadConfig {
    pub initial_step: f64,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub f_tol: f64,
    pub x_tol: f64,
    pub restart: bool,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        let d = NelderMeadSettings::default();
        Self {
            initial_step: d.initial_step,
            reflection: d.reflection,
            expansion: d.expansion,
            contraction: d.contraction,
            shrink: d.shrink,
            f_tol: d.f_tol,
            x_tol: d.x_tol,
            restart: d.restart,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpsaConfig {
    pub a: f64,
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Stability constant `A`; defaults to `budget / 20`.
    pub stability: Option<f64>,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        let d = SpsaSettings::default();
        Self {
            a: d.a,
            c: d.c,
            alpha: d.alpha,
            gamma: d.gamma,
            stability: d.stability,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub delta: f64,
    pub grad_tol: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        let d = AdamSettings::default();
        Self {
            learning_rate: d.learning_rate,
            beta1: d.beta1,
            beta2: d.beta2,
            eps: d.eps,
            delta: d.delta,
            grad_tol: d.grad_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub methods: Vec<Named<Method>>,
    /// Cost evaluations per run (`N_lea`); 0 skips optimization.
    pub budget: u64,
    pub nelder_mead: NelderMeadConfig,
    pub spsa: SpsaConfig,
    pub adam: AdamConfig,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            methods: vec![Named(Method::GradientDescent)],
            budget: 10_000,
            nelder_mead: NelderMeadConfig::default(),
            spsa: SpsaConfig::default(),
            adam: AdamConfig::default(),
        }
    }
}

impl OptimizerConfig {
    pub fn methods(&self) -> Vec<Method> {
        self.methods.iter().map(|m| m.0).collect()
    }

    pub fn settings(&self) -> OptimizerSettings {
        let (nm, sp, ad) = (&self.nelder_mead, &self.spsa, &self.adam);
        OptimizerSettings {
            nelder_mead: NelderMeadSettings {
                initial_step: nm.initial_step,
                reflection: nm.reflection,
                expansion: nm.expansion,
                contraction: nm.contraction,
                shrink: nm.shrink,
                f_tol: nm.f_tol,
                x_tol: nm.x_tol,
                restart: nm.restart,
            },
            spsa: SpsaSettings {
                a: sp.a,
                c: sp.c,
                alpha: sp.alpha,
                gamma: sp.gamma,
                stability: sp.stability,
            },
            adam: AdamSettings {
                learning_rate: ad.learning_rate,
                beta1: ad.beta1,
                beta2: ad.beta2,
                eps: ad.eps,
                delta: ad.delta,
                grad_tol: ad.grad_tol,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsConfig {
    /// Reference depth of the optimality metric, `F_ref = 1 − 10^−ε`.
    pub epsilon: f64,
    /// Histogram bins of the expressibility estimate.
    pub bins: usize,
    /// Parameter pairs of the expressibility estimate; 0 disables it.
    pub pairs: usize,
    /// Substeps per interval of the reference propagator.
    pub substeps: usize,
    pub interpolation: FieldInterpolation,
    /// Finite-difference half-width for gradient sampling.
    pub delta: f64,
    /// Gradient samples per point of a variance estimate.
    pub gradient_samples: usize,
    /// Infidelity at or below which a run counts as successful.
    pub threshold: f64,
    /// Fraction of successful replications that makes a time feasible.
    pub feasible_fraction: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            epsilon: vqoc_core::metrics::DEFAULT_EPSILON,
            bins: vqoc_core::metrics::DEFAULT_BINS,
            pairs: 10_000,
            substeps: vqoc_core::propagator::DEFAULT_SUBSTEPS,
            interpolation: FieldInterpolation::Hold,
            delta: vqoc_core::optimize::DEFAULT_DELTA,
            gradient_samples: 2_000,
            threshold: 1e-3,
            feasible_fraction: 0.8,
        }
    }
}

impl MetricsConfig {
    pub fn interpolation(&self) -> Interpolation {
        match self.interpolation {
            FieldInterpolation::Hold => Interpolation::Hold,
            FieldInterpolation::Linear => Interpolation::Linear,
        }
    }
}

/// `"exact"` or a positive shot count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ShotSpec(pub Shots);

impl Serialize for ShotSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            Shots::Exact => s.serialize_str("exact"),
            Shots::Count(n) => s.serialize_u64(n),
        }
    }
}

impl<'de> Deserialize<'de> for ShotSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Count(u64),
            Label(String),
        }
        match Raw::deserialize(d)? {
            Raw::Count(n) => Ok(ShotSpec(Shots::Count(n))),
            Raw::Label(s) if s == "exact" => Ok(ShotSpec(Shots::Exact)),
            Raw::Label(s) => Err(D::Error::custom(format!(
                "shots must be \"exact\" or a count, got '{s}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub p_spam: f64,
    pub p_gate: f64,
    pub shots: ShotSpec,
    /// SPAM probabilities of the final-loss sweep.
    pub probabilities: Vec<f64>,
    /// Recorded costs averaged into the final loss.
    pub tail: usize,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            p_spam: 0.0,
            p_gate: 0.0,
            shots: ShotSpec(Shots::Exact),
            probabilities: Vec::new(),
            tail: 10,
        }
    }
}

impl NoiseSection {
    pub fn model(&self) -> NoiseConfig {
        NoiseConfig::new(self.p_spam, self.p_gate, self.shots.0)
    }

    pub fn with_spam(&self, p_spam: f64) -> NoiseConfig {
        NoiseConfig::new(p_spam, self.p_gate, self.shots.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BisectionConfig {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_tolerance() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub qubits: Vec<usize>,
    pub h: Vec<f64>,
    pub times: Vec<f64>,
    pub trotter_steps: Vec<usize>,
    pub budgets: Vec<u64>,
    pub bisection: Option<BisectionConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default = "default_ansatz")]
    pub ansatz: Vec<Named<AnsatzKind>>,
    #[serde(default)]
    pub chain: ChainConfig,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub metrics: MetricsConfig,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub sweep: SweepConfig,
}

fn default_replications() -> usize {
    20
}

fn default_ansatz() -> Vec<Named<AnsatzKind>> {
    vec![Named(AnsatzKind::FreeField)]
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
    pub replications: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| ExpError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExpError::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Canonical TOML of the effective configuration.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of the canonical TOML, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml_string().as_bytes()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(p) = &o.output {
            self.output = Some(p.clone());
        }
        if let Some(t) = o.threads {
            self.threads = Some(t);
        }
        if let Some(r) = o.replications {
            self.replications = r;
        }
    }

    pub fn kinds(&self) -> Vec<AnsatzKind> {
        self.ansatz.iter().map(|k| k.0).collect()
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output
            .clone()
            .unwrap_or_else(|| PathBuf::from("results").join(self.experiment.name()))
    }

    /// Checks every module precondition that can be decided before running.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(ExpError::Config(m));
        let chain = &self.chain;
        let kind = self.experiment;

        if self.replications == 0 {
            return fail("replications must be at least 1".into());
        }
        if self.threads == Some(0) {
            return fail("threads must be at least 1".into());
        }
        if self.ansatz.is_empty() {
            return fail("at least one ansatz required".into());
        }
        if self.optimizer.methods.is_empty() {
            return fail("at least one optimizer method required".into());
        }
        if chain.time.is_some() && chain.h.is_some() {
            return fail("chain.time and chain.h are mutually exclusive".into());
        }
        if !(chain.coupling.is_finite() && chain.coupling != 0.0) {
            return fail("chain.coupling must be finite and non-zero".into());
        }
        for t in chain
            .time
            .iter()
            .chain(chain.h.iter())
            .chain(&self.sweep.h)
            .chain(&self.sweep.times)
        {
            if !(t.is_finite() && *t >= 0.0) {
                return fail(format!(
                    "times and h factors must be finite and non-negative, got {t}"
                ));
            }
        }
        let m = &self.metrics;
        if !(m.epsilon.is_finite() && m.epsilon > 0.0) {
            return fail(format!("metrics.epsilon must be positive, got {}", m.epsilon));
        }
        if m.bins == 0 {
            return fail("metrics.bins must be positive".into());
        }
        if m.pairs != 0 && m.pairs < 10 * m.bins {
            return fail(format!("metrics.pairs = {} is fewer than 10 per bin", m.pairs));
        }
        if m.substeps == 0 {
            return fail("metrics.substeps must be positive".into());
        }
        if !(m.delta > 0.0 && m.delta <= 0.1) {
            return fail(format!("metrics.delta must lie in (0, 0.1], got {}", m.delta));
        }
        if !(0.0..=1.0).contains(&m.threshold) || !(0.0..=1.0).contains(&m.feasible_fraction) {
            return fail("metrics.threshold and metrics.feasible_fraction must lie in [0, 1]".into());
        }

        // every chain the run will build
        let needs_time = matches!(
            kind,
            ExperimentKind::MaxFidelity
                | ExperimentKind::OptimalityGrid
                | ExperimentKind::Expressibility
                | ExperimentKind::Noisy
        );
        let base_time = chain.total_time(chain.qubits);
        if needs_time && base_time.is_none() {
            return fail(format!("{kind} needs chain.time or chain.h"));
        }
        let max_qubits = if kind == ExperimentKind::Noisy {
            MAX_DENSITY_QUBITS
        } else {
            MAX_QUBITS
        };
        let mut chains: Vec<(usize, usize, f64)> = Vec::new();
        let sw = &self.sweep;
        let nonempty = |name: &str, len: usize| {
            if len == 0 {
                Err(ExpError::Config(format!("{kind} needs a non-empty sweep.{name}")))
            } else {
                Ok(())
            }
        };
        match kind {
            ExperimentKind::MaxFidelity | ExperimentKind::Noisy => {
                chains.push((chain.qubits, chain.trotter_steps, base_time.unwrap_or(0.0)));
                for &t in &sw.times {
                    chains.push((chain.qubits, chain.trotter_steps, t));
                }
            }
            ExperimentKind::Expressibility => {
                if m.pairs == 0 {
                    return fail("expressibility needs metrics.pairs > 0".into());
                }
                for &nt in steps_or(&sw.trotter_steps, chain.trotter_steps).iter() {
                    chains.push((chain.qubits, nt, base_time.unwrap_or(0.0)));
                }
            }
            ExperimentKind::OptimalityGrid => {
                nonempty("trotter_steps", sw.trotter_steps.len())?;
                nonempty("budgets", sw.budgets.len())?;
                if self.replications < 20 {
                    return fail(format!(
                        "optimality-grid needs at least 20 replications per cell, got {}",
                        self.replications
                    ));
                }
                for &nt in &sw.trotter_steps {
                    chains.push((chain.qubits, nt, base_time.unwrap_or(0.0)));
                }
            }
            ExperimentKind::TimeOptimal => {
                nonempty("qubits", sw.qubits.len())?;
                nonempty("h", sw.h.len())?;
                for &n in &sw.qubits {
                    for &h in &sw.h {
                        chains.push((n, n, speed_limit_time(h, n, chain.coupling)));
                    }
                }
                if let Some(b) = &sw.bisection {
                    if !(b.lo.is_finite() && b.hi.is_finite() && 0.0 <= b.lo && b.lo < b.hi) {
                        return fail(format!(
                            "bisection bracket [{}, {}] is not an interval",
                            b.lo, b.hi
                        ));
                    }
                    if b.tolerance.is_nan() || b.tolerance <= 0.0 {
                        return fail("bisection tolerance must be positive".into());
                    }
                    chains.push((chain.qubits, chain.trotter_steps, b.hi));
                }
            }
            ExperimentKind::Gradvar => {
                if sw.qubits.is_empty() && sw.times.is_empty() {
                    return fail("gradvar needs sweep.qubits or sweep.times".into());
                }
                if !sw.qubits.is_empty() && chain.h.is_none() {
                    return fail("gradvar over qubits needs chain.h".into());
                }
                if m.gradient_samples < 30 {
                    return fail("metrics.gradient_samples must be at least 30".into());
                }
                for &n in &sw.qubits {
                    chains.push((n, n, chain.total_time(n).unwrap_or(0.0)));
                }
                for &t in &sw.times {
                    chains.push((chain.qubits, 2 * chain.qubits, t));
                }
            }
            ExperimentKind::TrotterError => {
                if sw.times.is_empty() && sw.trotter_steps.is_empty() {
                    return fail("trotter-error needs sweep.times or sweep.trotter_steps".into());
                }
                for &t in &sw.times {
                    chains.push((chain.qubits, chain.trotter_steps, t));
                }
                let t = base_time.unwrap_or(speed_limit_time(0.5, chain.qubits, chain.coupling));
                for &nt in &sw.trotter_steps {
                    chains.push((chain.qubits, nt, t));
                }
            }
        }
        for (n, nt, t) in chains {
            if n > max_qubits {
                return fail(format!("{n} qubits exceeds the {kind} cap of {max_qubits}"));
            }
            let setup = chain
                .setup(n, nt, t)
                .map_err(|e| ExpError::Config(e.to_string()))?;
            let budget = self.optimizer.budget;
            let uses_budget = !matches!(kind, ExperimentKind::Expressibility | ExperimentKind::Gradvar);
            if uses_budget && budget > 0 {
                for k in self.kinds() {
                    let d = k.param_count(n, setup.trotter_steps) as u64;
                    let budgets: Vec<u64> = if kind == ExperimentKind::OptimalityGrid {
                        sw.budgets.clone()
                    } else {
                        vec![budget]
                    };
                    if let Some(&b) = budgets.iter().find(|&&b| b > 0 && b < d + 1) {
                        return fail(format!(
                            "budget {b} is below {} evaluations needed by {k} at N={n}",
                            d + 1
                        ));
                    }
                }
            }
        }

        if kind == ExperimentKind::Noisy {
            let n = chain.qubits;
            let mut all = vec![self.noise.model()];
            all.extend(self.noise.probabilities.iter().map(|&p| self.noise.with_spam(p)));
            for cfg in all {
                cfg.validate(n).map_err(|e| ExpError::Config(e.to_string()))?;
            }
            if self.noise.tail == 0 {
                return fail("noise.tail must be positive".into());
            }
            if self.optimizer.budget == 0 {
                return fail("noisy runs need a positive optimizer.budget".into());
            }
        }
        Ok(())
    }
}

pub(crate) fn steps_or(list: &[usize], fallback: usize) -> Vec<usize> {
    if list.is_empty() {
        vec![fallback]
    } else {
        list.to_vec()
    }
}
