//! Control strategies and their mapping onto `Rz` gate angles.
//!
//! Three strategies drive the chain through the on-site field:
//!
//! * [`AnsatzKind::ParabolicFixed`]: a harmonic trap of fixed strength
//!   `A0 = J0` whose centre `d_j` is trainable at every Trotter step.
//! * [`AnsatzKind::ParabolicVariable`]: the same trap with a trainable
//!   strength `A_j` as well.
//! * [`AnsatzKind::FreeField`]: every `Rz` angle is an independent parameter.
//!
//! For the trap ansatze the angle is the field integrated over one step,
//! `θ_{n,j} = −½ A_j (x_n − d_j)² Δt` with `x_n = n + 1`. For the free field
//! the angle itself is the parameter.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::GateSequence;
use crate::error::{Error, Result};
use crate::state::check_width;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AnsatzKind {
    ParabolicFixed,
    ParabolicVariable,
    FreeField,
}

impl AnsatzKind {
    pub const ALL: [AnsatzKind; 3] = [
        AnsatzKind::ParabolicFixed,
        AnsatzKind::ParabolicVariable,
        AnsatzKind::FreeField,
    ];

    /// Number of trainable parameters for `N` qubits and `N_t` steps.
    pub fn param_count(self, num_qubits: usize, trotter_steps: usize) -> usize {
        match self {
            AnsatzKind::ParabolicFixed => trotter_steps,
            AnsatzKind::ParabolicVariable => 2 * trotter_steps,
            AnsatzKind::FreeField => num_qubits * trotter_steps,
        }
    }

    /// Short letter label: `a`, `b` or `c`.
    pub fn label(self) -> &'static str {
        match self {
            AnsatzKind::ParabolicFixed => "a",
            AnsatzKind::ParabolicVariable => "b",
            AnsatzKind::FreeField => "c",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AnsatzKind::ParabolicFixed => "parabolic-fixed",
            AnsatzKind::ParabolicVariable => "parabolic-variable",
            AnsatzKind::FreeField => "free-field",
        }
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnsatzKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parabolic-fixed" | "a" => Ok(AnsatzKind::ParabolicFixed),
            "parabolic-variable" | "b" => Ok(AnsatzKind::ParabolicVariable),
            "free-field" | "c" => Ok(AnsatzKind::FreeField),
            other => Err(Error::InvalidArgument(format!("unknown ansatz kind '{other}'"))),
        }
    }
}

/// How the step length relates to the total time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepConvention {
    /// `Δt = T/(N_t − 1)`: knots at `0, Δt, …, (N_t − 1)Δt = T`.
    #[default]
    Knots,
    /// `Δt = T/N_t`: the layers exactly tile `[0, T]`.
    Layers,
}

/// Physical and discretization parameters shared by every policy of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSetup {
    pub num_qubits: usize,
    pub trotter_steps: usize,
    /// Total time `T` in units of `1/J0`.
    pub total_time: f64,
    /// Exchange coupling `J0`.
    pub coupling: f64,
    pub convention: StepConvention,
}

impl ChainSetup {
    pub fn new(num_qubits: usize, trotter_steps: usize, total_time: f64) -> Result<Self> {
        let setup = Self {
            num_qubits,
            trotter_steps,
            total_time,
            coupling: 1.0,
            convention: StepConvention::Knots,
        };
        setup.validate()?;
        Ok(setup)
    }

    pub fn with_coupling(mut self, coupling: f64) -> Result<Self> {
        self.coupling = coupling;
        self.validate()?;
        Ok(self)
    }

    pub fn with_convention(mut self, convention: StepConvention) -> Result<Self> {
        self.convention = convention;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_qubits < 2 {
            return Err(Error::TooFewQubits {
                min: 2,
                found: self.num_qubits,
            });
        }
        check_width(self.num_qubits)?;
        let min_steps = match self.convention {
            StepConvention::Knots => 2,
            StepConvention::Layers => 1,
        };
        if self.trotter_steps < min_steps {
            return Err(Error::InvalidArgument(format!(
                "at least {min_steps} Trotter steps required, got {}",
                self.trotter_steps
            )));
        }
        if !(self.total_time.is_finite() && self.total_time >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "total time must be finite and non-negative, got {}",
                self.total_time
            )));
        }
        if !self.coupling.is_finite() {
            return Err(Error::NonFinite("coupling"));
        }
        Ok(())
    }

    /// Step length `Δt`.
    pub fn dt(&self) -> f64 {
        match self.convention {
            StepConvention::Knots => self.total_time / (self.trotter_steps - 1) as f64,
            StepConvention::Layers => self.total_time / self.trotter_steps as f64,
        }
    }

    /// Exchange angle of every `Rxy` gate, `α = −J0 Δt / 2`.
    pub fn exchange_angle(&self) -> f64 {
        -self.coupling * self.dt() / 2.0
    }

    /// Knot time `t_j = jΔt` as a fraction of `T`.
    pub fn knot_fraction(&self, step: usize) -> f64 {
        match self.convention {
            StepConvention::Knots => step as f64 / (self.trotter_steps - 1) as f64,
            StepConvention::Layers => step as f64 / self.trotter_steps as f64,
        }
    }

    /// Total simulated time, `N_t · Δt`.
    pub fn simulated_time(&self) -> f64 {
        self.trotter_steps as f64 * self.dt()
    }
}

/// Discretized control policy: an ansatz kind plus its trainable vector.
///
/// Parameter layout: `[d_0 … d_{N_t−1}]` for the fixed trap,
/// `[d_0 … d_{N_t−1}, A_0 … A_{N_t−1}]` for the variable trap, and
/// `θ_{n,j}` at index `j·N + n` for the free field.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPolicy {
    kind: AnsatzKind,
    setup: ChainSetup,
    params: Vec<f64>,
}

impl ControlPolicy {
    pub fn new(kind: AnsatzKind, setup: ChainSetup, params: Vec<f64>) -> Result<Self> {
        setup.validate()?;
        check_params(kind, &setup, &params)?;
        Ok(Self { kind, setup, params })
    }

    /// Policy with freshly drawn parameters, see [`init_params`].
    pub fn random(kind: AnsatzKind, setup: ChainSetup, seed: u64) -> Result<Self> {
        setup.validate()?;
        let params = init_params(kind, &setup, seed);
        Self::new(kind, setup, params)
    }

    pub fn kind(&self) -> AnsatzKind {
        self.kind
    }

    pub fn setup(&self) -> &ChainSetup {
        &self.setup
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn num_qubits(&self) -> usize {
        self.setup.num_qubits
    }

    pub fn trotter_steps(&self) -> usize {
        self.setup.trotter_steps
    }

    pub fn dt(&self) -> f64 {
        self.setup.dt()
    }

    /// Same ansatz and setup with a different parameter vector.
    pub fn with_params(&self, params: Vec<f64>) -> Result<Self> {
        check_params(self.kind, &self.setup, &params)?;
        Ok(Self {
            kind: self.kind,
            setup: self.setup,
            params,
        })
    }

    /// Overwrites the parameters in place.
    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        check_params(self.kind, &self.setup, params)?;
        self.params.copy_from_slice(params);
        Ok(())
    }

    /// `Rz` angles `θ_{n,j}` of Trotter step `j`.
    pub fn angles_for_step(&self, step: usize) -> Result<Vec<f64>> {
        let steps = self.setup.trotter_steps;
        if step >= steps {
            return Err(Error::StepOutOfRange { step, steps });
        }
        let mut out = vec![0.0; self.setup.num_qubits];
        self.write_angles(step, &mut out);
        Ok(out)
    }

    pub(crate) fn write_angles(&self, step: usize, out: &mut [f64]) {
        let n = self.setup.num_qubits;
        let steps = self.setup.trotter_steps;
        match self.kind {
            AnsatzKind::ParabolicFixed => {
                trap_angles(self.params[step], self.setup.coupling, self.setup.dt(), out)
            }
            AnsatzKind::ParabolicVariable => {
                trap_angles(self.params[step], self.params[steps + step], self.setup.dt(), out)
            }
            AnsatzKind::FreeField => out.copy_from_slice(&self.params[step * n..(step + 1) * n]),
        }
    }

    /// Angles at a fractional step position `s ∈ [0, N_t − 1]`, with the
    /// controllers linearly interpolated between neighbouring knots.
    pub fn interpolated_angles(&self, s: f64) -> Vec<f64> {
        let steps = self.setup.trotter_steps;
        let s = s.clamp(0.0, (steps - 1) as f64);
        let lo = s.floor() as usize;
        let hi = (lo + 1).min(steps - 1);
        let w = s - lo as f64;
        let lerp = |a: f64, b: f64| a + w * (b - a);
        let n = self.setup.num_qubits;
        let mut out = vec![0.0; n];
        match self.kind {
            AnsatzKind::ParabolicFixed => trap_angles(
                lerp(self.params[lo], self.params[hi]),
                self.setup.coupling,
                self.setup.dt(),
                &mut out,
            ),
            AnsatzKind::ParabolicVariable => trap_angles(
                lerp(self.params[lo], self.params[hi]),
                lerp(self.params[steps + lo], self.params[steps + hi]),
                self.setup.dt(),
                &mut out,
            ),
            AnsatzKind::FreeField => {
                for (k, o) in out.iter_mut().enumerate() {
                    *o = lerp(self.params[lo * n + k], self.params[hi * n + k]);
                }
            }
        }
        out
    }

    /// All `Rz` angles, one row per step.
    pub fn all_angles(&self) -> Vec<Vec<f64>> {
        (0..self.setup.trotter_steps)
            .map(|j| {
                let mut row = vec![0.0; self.setup.num_qubits];
                self.write_angles(j, &mut row);
                row
            })
            .collect()
    }

    /// Free-field policy producing exactly the same gate sequence.
    pub fn to_free_field(&self) -> ControlPolicy {
        ControlPolicy {
            kind: AnsatzKind::FreeField,
            setup: self.setup,
            params: self.all_angles().concat(),
        }
    }

    /// Variable-strength trap with `A_j = J0`, equal gate-for-gate to a
    /// fixed-strength policy.
    pub fn to_parabolic_variable(&self) -> Result<ControlPolicy> {
        if self.kind != AnsatzKind::ParabolicFixed {
            return Err(Error::InvalidArgument(
                "only a fixed-strength trap can be lifted to a variable one".into(),
            ));
        }
        let mut params = self.params.clone();
        params.extend(std::iter::repeat_n(self.setup.coupling, self.setup.trotter_steps));
        ControlPolicy::new(AnsatzKind::ParabolicVariable, self.setup, params)
    }
}

fn trap_angles(centre: f64, strength: f64, dt: f64, out: &mut [f64]) {
    for (n, o) in out.iter_mut().enumerate() {
        let x = (n + 1) as f64;
        *o = -0.5 * strength * (x - centre).powi(2) * dt;
    }
}

fn check_params(kind: AnsatzKind, setup: &ChainSetup, params: &[f64]) -> Result<()> {
    let expected = kind.param_count(setup.num_qubits, setup.trotter_steps);
    if params.len() != expected {
        return Err(Error::ParameterCount {
            expected,
            found: params.len(),
        });
    }
    if params.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite("control parameters"));
    }
    Ok(())
}

/// Random initial parameters.
///
/// Trap centres are uniform on `[−N, N]`, trap strengths on `[−J0, J0]`
/// and free-field angles on `[0, 2π J0]`.
pub fn init_params(kind: AnsatzKind, setup: &ChainSetup, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    init_params_with(kind, setup, &mut rng)
}

pub fn init_params_with<R: Rng + ?Sized>(kind: AnsatzKind, setup: &ChainSetup, rng: &mut R) -> Vec<f64> {
    let n = setup.num_qubits as f64;
    let steps = setup.trotter_steps;
    let j0 = setup.coupling.abs();
    let centres = |rng: &mut R| -> Vec<f64> { (0..steps).map(|_| rng.random_range(-n..=n)).collect() };
    match kind {
        AnsatzKind::ParabolicFixed => centres(rng),
        AnsatzKind::ParabolicVariable => {
            let mut p = centres(rng);
            p.extend((0..steps).map(|_| uniform(rng, -j0, j0)));
            p
        }
        AnsatzKind::FreeField => (0..setup.num_qubits * steps)
            .map(|_| uniform(rng, 0.0, 2.0 * PI * j0))
            .collect(),
    }
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

/// Trotterized circuit of a policy: per step an `Rz` layer with
/// [`ControlPolicy::angles_for_step`] followed by the `Rxy` layer with
/// `α = −J0 Δt / 2`.
pub fn build_circuit(policy: &ControlPolicy) -> Result<GateSequence> {
    let setup = policy.setup();
    GateSequence::trotterized(
        setup.num_qubits,
        setup.dt(),
        &policy.all_angles(),
        setup.exchange_angle(),
    )
}

/// Policy whose controllers are smooth random functions of normalized time
/// `s = t_j / T`. Used as a fixed reference shape when `T` or `N_t` is varied.
///
/// Trap centres follow `d(s) = c + a₁cos(πs + φ₁) + a₂cos(2πs + φ₂)` around the
/// chain centre, strengths `A(s) = J0(½ + ½cos(πs + φ))`, and free fields
/// `B_n(s) = J0(b_n + b'_n cos(πs + φ_n))` with `θ = B Δt`.
pub fn smooth_policy(kind: AnsatzKind, setup: ChainSetup, seed: u64) -> Result<ControlPolicy> {
    setup.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = setup.num_qubits;
    let j0 = setup.coupling;
    let steps = setup.trotter_steps;
    let knot_s: Vec<f64> = (0..steps).map(|j| setup.knot_fraction(j)).collect();
    let phase = |rng: &mut ChaCha8Rng| rng.random_range(0.0..2.0 * PI);
    let centre = (n as f64 + 1.0) / 2.0;
    let (a1, a2) = (rng.random_range(0.5..1.5), rng.random_range(0.0..0.5));
    let (p1, p2, pa) = (phase(&mut rng), phase(&mut rng), phase(&mut rng));
    let d = |s: f64| centre + a1 * (PI * s + p1).cos() + a2 * (2.0 * PI * s + p2).cos();
    let a = |s: f64| j0 * (0.5 + 0.5 * (PI * s + pa).cos());
    let params = match kind {
        AnsatzKind::ParabolicFixed => knot_s.iter().map(|&s| d(s)).collect(),
        AnsatzKind::ParabolicVariable => {
            let mut p: Vec<f64> = knot_s.iter().map(|&s| d(s)).collect();
            p.extend(knot_s.iter().map(|&s| a(s)));
            p
        }
        AnsatzKind::FreeField => {
            let coeffs: Vec<(f64, f64, f64)> = (0..n)
                .map(|_| {
                    (
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                        phase(&mut rng),
                    )
                })
                .collect();
            let dt = setup.dt();
            knot_s
                .iter()
                .flat_map(|&s| {
                    coeffs
                        .iter()
                        .map(move |&(b0, b1, ph)| j0 * (b0 + b1 * (PI * s + ph).cos()) * dt)
                })
                .collect()
        }
    };
    ControlPolicy::new(kind, setup, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::Gate;

    fn setup(n: usize, steps: usize, t: f64) -> ChainSetup {
        ChainSetup::new(n, steps, t).unwrap()
    }

    #[test]
    fn trap_centre_has_zero_angle() {
        let s = setup(6, 3, 1.0);
        let p = ControlPolicy::new(AnsatzKind::ParabolicFixed, s, vec![1.0, 4.0, 6.0]).unwrap();
        assert_eq!(p.angles_for_step(0).unwrap()[0], 0.0);
        assert_eq!(p.angles_for_step(1).unwrap()[3], 0.0);
        assert_eq!(p.angles_for_step(2).unwrap()[5], 0.0);
    }

    #[test]
    fn trap_angle_hand_value() {
        // Δt = 0.5 with Knots: T = 0.5 (N_t − 1)
        let s = setup(6, 3, 1.0);
        assert_eq!(s.dt(), 0.5);
        let p = ControlPolicy::new(AnsatzKind::ParabolicFixed, s, vec![3.0; 3]).unwrap();
        let theta = p.angles_for_step(0).unwrap();
        let x = 1.0f64;
        let oracle = -(1.0 / 2.0) * 1.0 * (x - 3.0) * (x - 3.0) * 0.5;
        assert_eq!(oracle, -1.0);
        assert!((theta[0] - oracle).abs() < 1e-15);
    }

    #[test]
    fn free_field_is_identity_map() {
        let s = setup(3, 2, 1.0);
        let params: Vec<f64> = (0..6).map(|i| i as f64 * 0.1).collect();
        let p = ControlPolicy::new(AnsatzKind::FreeField, s, params.clone()).unwrap();
        assert_eq!(p.angles_for_step(1).unwrap(), params[3..6].to_vec());
        assert!(matches!(p.angles_for_step(2), Err(Error::StepOutOfRange { .. })));
    }

    #[test]
    fn parameter_counts() {
        let s = setup(6, 12, 4.0);
        assert_eq!(init_params(AnsatzKind::ParabolicFixed, &s, 0).len(), 12);
        assert_eq!(init_params(AnsatzKind::ParabolicVariable, &s, 0).len(), 24);
        assert_eq!(init_params(AnsatzKind::FreeField, &s, 0).len(), 72);
        for n in 2..=12 {
            for steps in 2..=64 {
                for kind in AnsatzKind::ALL {
                    let expected = match kind {
                        AnsatzKind::ParabolicFixed => steps,
                        AnsatzKind::ParabolicVariable => 2 * steps,
                        AnsatzKind::FreeField => n * steps,
                    };
                    assert_eq!(kind.param_count(n, steps), expected);
                }
            }
        }
    }

    #[test]
    fn init_is_deterministic_and_in_support() {
        let s = setup(6, 10_000, 4.0);
        let a = init_params(AnsatzKind::ParabolicVariable, &s, 7);
        assert_eq!(a, init_params(AnsatzKind::ParabolicVariable, &s, 7));
        assert_ne!(a, init_params(AnsatzKind::ParabolicVariable, &s, 8));
        let (d, amp) = a.split_at(10_000);
        assert!(d.iter().all(|&x| (-6.0..=6.0).contains(&x)));
        assert!(amp.iter().all(|&x| (-1.0..=1.0).contains(&x)));
        // the draws should actually reach near the edges
        assert!(d.iter().cloned().fold(f64::INFINITY, f64::min) < -5.9);
        assert!(d.iter().cloned().fold(f64::NEG_INFINITY, f64::max) > 5.9);
        let c = init_params(AnsatzKind::FreeField, &setup(2, 5000, 1.0), 1);
        assert!(c.iter().all(|&x| (0.0..=2.0 * PI).contains(&x)));
    }

    #[test]
    fn circuit_structure() {
        let s = setup(4, 5, 2.0);
        let p = ControlPolicy::random(AnsatzKind::ParabolicVariable, s, 3).unwrap();
        let c = build_circuit(&p).unwrap();
        assert_eq!(c.len(), 5 * (4 + 3));
        let alpha = -s.dt() / 2.0;
        for layer in c.layers() {
            for g in &layer[4..] {
                assert!(matches!(g, Gate::Rxy { alpha: a, .. } if *a == alpha));
            }
        }
    }

    #[test]
    fn fixed_trap_is_restriction_of_variable() {
        let s = setup(5, 7, 3.0);
        let a = ControlPolicy::random(AnsatzKind::ParabolicFixed, s, 11).unwrap();
        let b = a.to_parabolic_variable().unwrap();
        assert_eq!(build_circuit(&a).unwrap(), build_circuit(&b).unwrap());
        assert_eq!(
            build_circuit(&a).unwrap(),
            build_circuit(&a.to_free_field()).unwrap()
        );
        assert_eq!(
            build_circuit(&b).unwrap(),
            build_circuit(&b.to_free_field()).unwrap()
        );
    }

    #[test]
    fn layer_convention_flag() {
        let k = setup(4, 5, 2.0);
        let l = k.with_convention(StepConvention::Layers).unwrap();
        assert_eq!(k.dt(), 0.5);
        assert_eq!(l.dt(), 0.4);
        assert!(ChainSetup::new(4, 1, 1.0).is_err());
        assert!(setup(4, 2, 1.0).with_convention(StepConvention::Layers).is_ok());
    }

    #[test]
    fn rejects_bad_params() {
        let s = setup(3, 2, 1.0);
        assert!(matches!(
            ControlPolicy::new(AnsatzKind::FreeField, s, vec![0.0; 5]),
            Err(Error::ParameterCount {
                expected: 6,
                found: 5
            })
        ));
        assert!(ControlPolicy::new(AnsatzKind::ParabolicFixed, s, vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn interpolation_hits_knots() {
        let s = setup(4, 4, 2.0);
        for kind in AnsatzKind::ALL {
            let p = ControlPolicy::random(kind, s, 5).unwrap();
            for j in 0..4 {
                assert_eq!(p.interpolated_angles(j as f64), p.angles_for_step(j).unwrap());
            }
        }
    }
}
