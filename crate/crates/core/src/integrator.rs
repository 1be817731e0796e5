//! Time stepping: the hybrid leap-frog scheme, a classical RK4 reference and
//! closed-form oracles for the linearly damped oscillator.

use crate::error::{ContactError, Result};
use crate::field::{contact_vector_field, partials_checked, StateDerivative};
use crate::state::ContactState;
use crate::system::ContactSystem;

/// Denominators `1 -+ (h/2) K_z` below this magnitude abort the step.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    HybridLeapfrog,
    Rk4Reference,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::HybridLeapfrog => "HybridLeapfrog",
            Scheme::Rk4Reference => "RK4Reference",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hybridleapfrog" | "leapfrog" | "hybrid" => Some(Scheme::HybridLeapfrog),
            "rk4reference" | "rk4" => Some(Scheme::Rk4Reference),
            _ => None,
        }
    }

    pub fn step(self, sys: &dyn ContactSystem, s: &ContactState, h: f64) -> Result<ContactState> {
        match self {
            Scheme::HybridLeapfrog => hybrid_leapfrog_step(sys, s, h),
            Scheme::Rk4Reference => rk4_reference_step(sys, s, h),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub h: f64,
    pub n_steps: usize,
    pub record_every: usize,
    pub scheme: Scheme,
}

impl IntegratorConfig {
    pub fn new(h: f64, n_steps: usize) -> Self {
        Self {
            h,
            n_steps,
            record_every: 1,
            scheme: Scheme::HybridLeapfrog,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(ContactError::InvalidConfig(format!(
                "time step must be positive, got {}",
                self.h
            )));
        }
        if !(self.h * self.n_steps as f64).is_finite() {
            return Err(ContactError::InvalidConfig("h * n_steps overflows".into()));
        }
        if self.record_every == 0 {
            return Err(ContactError::InvalidConfig("record_every must be >= 1".into()));
        }
        if self.n_steps > 0 && self.record_every > self.n_steps {
            return Err(ContactError::InvalidConfig(format!(
                "record_every {} exceeds n_steps {}",
                self.record_every, self.n_steps
            )));
        }
        Ok(())
    }
}

/// Recorded states with `K` and `H = lambda K` alongside.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub states: Vec<ContactState>,
    pub k: Vec<f64>,
    pub h: Vec<f64>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, sys: &dyn ContactSystem, s: ContactState) {
        let k = sys.k_at(&s);
        self.k.push(k);
        self.h.push(s.lambda * k);
        self.states.push(s);
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&ContactState> {
        self.states.last()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(|s| s.t)
    }

    /// Column of `q_i`.
    pub fn q(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.q[i]).collect()
    }

    pub fn p(&self, i: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.p[i]).collect()
    }
}

/// A failed integration: the step that failed and everything recorded before it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("step {step} failed: {source}")]
pub struct IntegrationError {
    pub step: usize,
    #[source]
    pub source: ContactError,
    pub partial: Trajectory,
}

/// One step of the hybrid leap-frog scheme.
///
/// With `P = K - p.K_p`, the update is
///
/// ```text
/// z+  = z + (h/2) P(n)                  q+ = q + (h/2) K_p(n)
/// p+  = (p - (h/2) K_q(n)) / (1 - (h/2) K_z(n))
/// z'  = z + h P(q+, p+, z+)             q' = q + h K_p(q+, p+, z+)
/// l+  = l (1 - (h/2) K_z(n))            l' = l+ / (1 + (h/2) K_z(q', p+, z'))
/// p'  = p+ (1 + (h/2) K_z(q', p+, z')) - (h/2) K_q(q', p+, z')
/// ```
///
/// The `(q, p, z)` path never reads `lambda`.
pub fn hybrid_leapfrog_step(
    sys: &dyn ContactSystem,
    s: &ContactState,
    h: f64,
) -> Result<ContactState> {
    s.validate()?;
    if sys.dof() != s.dof() {
        return Err(ContactError::DimensionMismatch {
            expected: sys.dof(),
            found: s.dof(),
        });
    }
    let half = 0.5 * h;
    let d0 = partials_checked(sys, &s.q, &s.p, s.z)?;

    let z_half = s.z + half * (d0.k - d0.p_dot_kp(&s.p));
    let q_half: Vec<f64> = s.q.iter().zip(&d0.k_p).map(|(q, kp)| q + half * kp).collect();

    let shrink = 1.0 - half * d0.k_z;
    if shrink.abs() <= SINGULAR_THRESHOLD {
        return Err(ContactError::StepSingular { denominator: shrink });
    }
    let p_half: Vec<f64> = s
        .p
        .iter()
        .zip(&d0.k_q)
        .map(|(p, kq)| (p - half * kq) / shrink)
        .collect();

    let dm = partials_checked(sys, &q_half, &p_half, z_half)?;
    let z_new = s.z + h * (dm.k - dm.p_dot_kp(&p_half));
    let q_new: Vec<f64> = s.q.iter().zip(&dm.k_p).map(|(q, kp)| q + h * kp).collect();

    let d1 = partials_checked(sys, &q_new, &p_half, z_new)?;
    let grow = 1.0 + half * d1.k_z;
    if grow.abs() <= SINGULAR_THRESHOLD {
        return Err(ContactError::StepSingular { denominator: grow });
    }
    let p_new: Vec<f64> = p_half
        .iter()
        .zip(&d1.k_q)
        .map(|(p, kq)| p * grow - half * kq)
        .collect();

    let lambda_half = s.lambda * shrink;
    let lambda_new = lambda_half / grow;

    let next = ContactState {
        q: q_new,
        p: p_new,
        z: z_new,
        lambda: lambda_new,
        t: s.t + h,
    };
    next.validate()?;
    Ok(next)
}

fn axpy(s: &ContactState, v: &StateDerivative, a: f64) -> ContactState {
    ContactState {
        q: s.q.iter().zip(&v.dq).map(|(x, d)| x + a * d).collect(),
        p: s.p.iter().zip(&v.dp).map(|(x, d)| x + a * d).collect(),
        z: s.z + a * v.dz,
        lambda: s.lambda + a * v.dlambda,
        t: s.t + a,
    }
}

/// Classical fourth-order Runge-Kutta on the full `(q, p, z, lambda)` field.
pub fn rk4_reference_step(sys: &dyn ContactSystem, s: &ContactState, h: f64) -> Result<ContactState> {
    let k1 = contact_vector_field(sys, s)?;
    let k2 = contact_vector_field(sys, &axpy(s, &k1, 0.5 * h))?;
    let k3 = contact_vector_field(sys, &axpy(s, &k2, 0.5 * h))?;
    let k4 = contact_vector_field(sys, &axpy(s, &k3, h))?;
    let w = h / 6.0;
    let comb = |a: f64, b: f64, c: f64, d: f64| a + 2.0 * b + 2.0 * c + d;
    let next = ContactState {
        q: (0..s.dof())
            .map(|i| s.q[i] + w * comb(k1.dq[i], k2.dq[i], k3.dq[i], k4.dq[i]))
            .collect(),
        p: (0..s.dof())
            .map(|i| s.p[i] + w * comb(k1.dp[i], k2.dp[i], k3.dp[i], k4.dp[i]))
            .collect(),
        z: s.z + w * comb(k1.dz, k2.dz, k3.dz, k4.dz),
        lambda: s.lambda + w * comb(k1.dlambda, k2.dlambda, k3.dlambda, k4.dlambda),
        t: s.t + h,
    };
    next.validate()?;
    Ok(next)
}

/// Runs `cfg.n_steps` steps from `s0`, recording every `record_every`-th state
/// and the final one. Times are `t0 + k h` exactly.
pub fn integrate(
    sys: &dyn ContactSystem,
    s0: &ContactState,
    cfg: &IntegratorConfig,
) -> std::result::Result<Trajectory, IntegrationError> {
    let fail = |step, source, partial| IntegrationError {
        step,
        source,
        partial,
    };
    let mut traj = Trajectory::new();
    if let Err(e) = s0.validate().and_then(|_| cfg.validate()) {
        return Err(fail(0, e, traj));
    }
    traj.push(sys, s0.clone());
    let mut current = s0.clone();
    for step in 1..=cfg.n_steps {
        match cfg.scheme.step(sys, &current, cfg.h) {
            Ok(mut next) => {
                next.t = s0.t + step as f64 * cfg.h;
                current = next;
            }
            Err(e) => return Err(fail(step, e, traj)),
        }
        if step % cfg.record_every == 0 || step == cfg.n_steps {
            traj.push(sys, current.clone());
        }
    }
    Ok(traj)
}

/// Closed-form solution of `q'' + gamma q' + omega^2 q = 0` in the
/// underdamped regime, with `lambda = lambda0 e^{gamma t}` and `z` from RK4
/// quadrature of `z' + gamma z = (omega^2 q^2 - p^2)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DampedOscillatorSolution {
    pub omega: f64,
    pub gamma: f64,
    pub initial: ContactState,
    /// Step of the `z` quadrature.
    pub z_step: f64,
    omega_d: f64,
}

impl DampedOscillatorSolution {
    pub fn new(omega: f64, gamma: f64, initial: ContactState) -> Result<Self> {
        initial.validate()?;
        if initial.dof() != 1 {
            return Err(ContactError::DimensionMismatch {
                expected: 1,
                found: initial.dof(),
            });
        }
        if !(gamma < 2.0 * omega) {
            return Err(ContactError::OverdampedUnsupported { omega, gamma });
        }
        Ok(Self {
            omega,
            gamma,
            initial,
            z_step: 1e-4,
            omega_d: (omega * omega - 0.25 * gamma * gamma).sqrt(),
        })
    }

    /// `(q, p)` at time `t` (absolute, measured from `initial.t`).
    pub fn qp(&self, t: f64) -> (f64, f64) {
        let tau = t - self.initial.t;
        let (q0, p0) = (self.initial.q[0], self.initial.p[0]);
        let a = q0;
        let b = (p0 + 0.5 * self.gamma * q0) / self.omega_d;
        let (sin, cos) = (self.omega_d * tau).sin_cos();
        let env = (-0.5 * self.gamma * tau).exp();
        let q = env * (a * cos + b * sin);
        let p = env * (-0.5 * self.gamma * (a * cos + b * sin) + self.omega_d * (b * cos - a * sin));
        (q, p)
    }

    pub fn lambda(&self, t: f64) -> f64 {
        self.initial.lambda * (self.gamma * (t - self.initial.t)).exp()
    }

    fn z_rate(&self, t: f64, z: f64) -> f64 {
        let (q, p) = self.qp(t);
        0.5 * (self.omega * self.omega * q * q - p * p) - self.gamma * z
    }

    fn advance_z(&self, mut t: f64, mut z: f64, t_end: f64) -> f64 {
        let span = t_end - t;
        if span == 0.0 {
            return z;
        }
        let n = (span.abs() / self.z_step).ceil().max(1.0) as usize;
        let dt = span / n as f64;
        for _ in 0..n {
            let k1 = self.z_rate(t, z);
            let k2 = self.z_rate(t + 0.5 * dt, z + 0.5 * dt * k1);
            let k3 = self.z_rate(t + 0.5 * dt, z + 0.5 * dt * k2);
            let k4 = self.z_rate(t + dt, z + dt * k3);
            z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += dt;
        }
        z
    }

    pub fn state_at(&self, t: f64) -> ContactState {
        if t == self.initial.t {
            return self.initial.clone();
        }
        let (q, p) = self.qp(t);
        let z = self.advance_z(self.initial.t, self.initial.z, t);
        ContactState::new(vec![q], vec![p], z, self.lambda(t), t)
    }

    /// States at ascending `times`, integrating `z` incrementally.
    pub fn sample(&self, times: &[f64]) -> Vec<ContactState> {
        let mut out = Vec::with_capacity(times.len());
        let (mut t_prev, mut z) = (self.initial.t, self.initial.z);
        for &t in times {
            z = self.advance_z(t_prev, z, t);
            t_prev = t;
            if t == self.initial.t {
                out.push(self.initial.clone());
                continue;
            }
            let (q, p) = self.qp(t);
            out.push(ContactState::new(vec![q], vec![p], z, self.lambda(t), t));
        }
        out
    }
}

/// Analytic state of the linearly damped oscillator at time `t`.
pub fn analytic_damped_ho(
    omega: f64,
    gamma: f64,
    initial: &ContactState,
    t: f64,
) -> Result<ContactState> {
    Ok(DampedOscillatorSolution::new(omega, gamma, initial.clone())?.state_at(t))
}

/// Result of a step-size refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceEstimate {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log(error)` against `log(h)`; `NaN` when degenerate.
    pub order: f64,
    /// Set when some error is zero or non-finite so no slope can be fitted.
    pub degenerate: bool,
}

/// Final-time error `max_i(|q_i - q_ref_i|, |p_i - p_ref_i|)`.
pub fn final_error(state: &ContactState, reference: &ContactState) -> f64 {
    state
        .q
        .iter()
        .zip(&reference.q)
        .chain(state.p.iter().zip(&reference.p))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Integrates to `t_end` with each step in `steps` and fits the observed order
/// against `reference` (the state at `t_end`).
pub fn convergence_order(
    sys: &dyn ContactSystem,
    s0: &ContactState,
    t_end: f64,
    steps: &[f64],
    scheme: Scheme,
    reference: &ContactState,
) -> Result<ConvergenceEstimate> {
    if steps.len() < 2 {
        return Err(ContactError::InsufficientData("need at least two step sizes"));
    }
    let mut errors = Vec::with_capacity(steps.len());
    for &h in steps {
        let n_steps = ((t_end - s0.t) / h).round() as usize;
        let cfg = IntegratorConfig::new(h, n_steps).with_scheme(scheme);
        let cfg = IntegratorConfig {
            record_every: n_steps.max(1),
            ..cfg
        };
        let traj = integrate(sys, s0, &cfg).map_err(|e| e.source)?;
        errors.push(final_error(traj.last().expect("initial state recorded"), reference));
    }
    let degenerate = errors.iter().any(|e| !(*e > 0.0) || !e.is_finite());
    let order = if degenerate {
        f64::NAN
    } else {
        let lx: Vec<f64> = steps.iter().map(|h| h.ln()).collect();
        let ly: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
        fit_slope(&lx, &ly)
    };
    Ok(ConvergenceEstimate {
        steps: steps.to_vec(),
        errors,
        order,
        degenerate,
    })
}
