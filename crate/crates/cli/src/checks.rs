//! Self-checks run by `contact check`.
//!
//! Each check is a scaled-down version of one property of the integrator or
//! the bracket. `Fault` swaps in a deliberately broken model so the suite can
//! be shown to catch real mistakes.

use std::str::FromStr;
use std::sync::Arc;

use contact_core::bracket::{contact_bracket, observable_rate, Observable, Polynomial};
use contact_core::diagnostics::{
    action_residual, hamiltonian_drift, herglotz_residual, symmetry_check_space_inversion,
    sync_metric, DEFAULT_DRIFT_THRESHOLD,
};
use contact_core::field::{contact_vector_field, k_rate_identity};
use contact_core::integrator::{convergence_order, DampedOscillatorSolution};
use contact_core::models::{default_experiment, default_experiments, ModelKind};
use contact_core::sampling::StateSampler;
use contact_core::system::partials_fd_discrepancy;
use contact_core::{integrate, ContactSystem, Result, Scheme, Trajectory};
use rand::Rng;

use crate::error::CliError;

pub const CHECK_NAMES: [&str; 9] = [
    "bracket",
    "field",
    "decoupling",
    "drift",
    "convergence",
    "symmetry",
    "sync",
    "action",
    "herglotz",
];

/// A deliberate defect applied to `DampedHO_Linear` in every check that uses it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Reports `K_z = +gamma` instead of `-gamma`.
    KzSign,
}

impl FromStr for Fault {
    type Err = CliError;

    fn from_str(s: &str) -> std::result::Result<Self, CliError> {
        match s {
            "kz-sign" => Ok(Fault::KzSign),
            _ => Err(CliError::Config(format!("unknown fault `{s}`"))),
        }
    }
}

struct FlippedKz(contact_core::Model);

impl ContactSystem for FlippedKz {
    fn dof(&self) -> usize {
        self.0.dof()
    }
    fn label(&self) -> &str {
        "DampedHO_Linear (K_z sign flipped)"
    }
    fn k(&self, q: &[f64], p: &[f64], z: f64) -> f64 {
        self.0.k(q, p, z)
    }
    fn k_q(&self, q: &[f64], p: &[f64], z: f64, out: &mut [f64]) {
        self.0.k_q(q, p, z, out)
    }
    fn k_p(&self, q: &[f64], p: &[f64], z: f64, out: &mut [f64]) {
        self.0.k_p(q, p, z, out)
    }
    fn k_z(&self, q: &[f64], p: &[f64], z: f64) -> f64 {
        -self.0.k_z(q, p, z)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    /// Run only these checks; all of them when empty.
    pub only: Vec<String>,
    pub fault: Option<Fault>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

struct Ctx {
    fault: Option<Fault>,
}

impl Ctx {
    fn system(&self, kind: ModelKind) -> Arc<dyn ContactSystem> {
        let m = default_experiment(kind).spec.build().expect("preset specs are valid");
        match (kind, self.fault) {
            (ModelKind::DampedHoLinear, Some(Fault::KzSign)) => Arc::new(FlippedKz(m)),
            _ => Arc::new(m),
        }
    }

    fn preset_run(&self, kind: ModelKind) -> Result<(Arc<dyn ContactSystem>, Trajectory)> {
        let exp = default_experiment(kind);
        let sys = self.system(kind);
        let traj = integrate(sys.as_ref(), &exp.initial, &exp.config).map_err(|e| e.source)?;
        Ok((sys, traj))
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn bracket(_: &Ctx) -> Result<(bool, String)> {
    let mut sampler = StateSampler::new(7);
    let (mut anti, mut leib, mut fund): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..50 {
        let n = sampler.rng().gen_range(1..=2);
        let pa = Polynomial::random(sampler.rng(), n, 3, 2);
        let pb = Polynomial::random(sampler.rng(), n, 3, 2);
        let pc = Polynomial::random(sampler.rng(), n, 3, 2);
        let (a, b, c) = (pa.to_observable("A"), pb.to_observable("B"), pc.to_observable("C"));
        let bc = pb.product(&pc).to_observable("BC");
        let s = sampler.state(n);
        let ab = contact_bracket(&a, &b, &s)?;
        anti = anti.max(rel(ab, -contact_bracket(&b, &a, &s)?));
        let rhs = ab * c.value(&s) + b.value(&s) * contact_bracket(&a, &c, &s)?;
        leib = leib.max(rel(contact_bracket(&a, &bc, &s)?, rhs));
        let qp = contact_bracket(&Observable::q(0), &Observable::p(0), &s)?;
        let zl = contact_bracket(&Observable::z(), &Observable::lambda(), &s)?;
        fund = fund.max((qp - 1.0).abs()).max((zl - s.lambda).abs());
    }
    Ok((
        anti <= 1e-10 && leib <= 1e-10 && fund <= 1e-12,
        format!("antisym {anti:.1e}, leibniz {leib:.1e}, fundamental {fund:.1e}"),
    ))
}

fn field(ctx: &Ctx) -> Result<(bool, String)> {
    let mut sampler = StateSampler::new(8);
    let (mut fd, mut rate, mut equiv): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for kind in ModelKind::ALL {
        let sys = ctx.system(kind);
        let sys = sys.as_ref();
        for _ in 0..20 {
            let s = sampler.state(kind.dof());
            fd = fd.max(partials_fd_discrepancy(sys, &s));
            let (lhs, rhs) = k_rate_identity(sys, &s)?;
            rate = rate.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
            let v = contact_vector_field(sys, &s)?;
            equiv = equiv
                .max(rel(observable_rate(&Observable::z(), sys, &s)?, v.dz))
                .max(rel(observable_rate(&Observable::lambda(), sys, &s)?, v.dlambda))
                .max(rel(observable_rate(&Observable::p(0), sys, &s)?, v.dp[0]));
        }
    }
    Ok((
        fd <= 1e-6 && rate <= 1e-10 && equiv <= 1e-12,
        format!("partials vs FD {fd:.1e}, dK/dt identity {rate:.1e}, bracket vs field {equiv:.1e}"),
    ))
}

fn decoupling(ctx: &Ctx) -> Result<(bool, String)> {
    let mut identical = true;
    for kind in ModelKind::ALL {
        let exp = default_experiment(kind);
        let sys = ctx.system(kind);
        let mut other = exp.initial.clone();
        other.lambda *= 3.0;
        let a = integrate(sys.as_ref(), &exp.initial, &exp.config).map_err(|e| e.source)?;
        let b = integrate(sys.as_ref(), &other, &exp.config).map_err(|e| e.source)?;
        identical &= a.states.iter().zip(&b.states).all(|(x, y)| {
            x.z.to_bits() == y.z.to_bits()
                && x.q.iter().chain(&x.p).zip(y.q.iter().chain(&y.p)).all(|(u, v)| u.to_bits() == v.to_bits())
        });
    }
    Ok((identical, format!("(q, p, z) independent of lambda: {identical}")))
}

fn drift(ctx: &Ctx) -> Result<(bool, String)> {
    let (_, traj) = ctx.preset_run(ModelKind::DampedHoLinear)?;
    let r = hamiltonian_drift(&traj, DEFAULT_DRIFT_THRESHOLD)?;
    Ok((r.pass, format!("relative H drift {:.2e} (<= {:.0e})", r.metric, r.threshold)))
}

fn convergence(ctx: &Ctx) -> Result<(bool, String)> {
    let exp = default_experiment(ModelKind::DampedHoLinear);
    let sys = ctx.system(ModelKind::DampedHoLinear);
    let t_end = 10.0;
    let sol = DampedOscillatorSolution::new(exp.spec.omega, exp.spec.gamma, exp.initial.clone())?;
    let est = convergence_order(
        sys.as_ref(),
        &exp.initial,
        t_end,
        &[0.04, 0.02, 0.01],
        Scheme::HybridLeapfrog,
        &sol.state_at(t_end),
    )?;
    Ok((
        (1.8..=2.2).contains(&est.order),
        format!("observed order {:.3} (expected 2)", est.order),
    ))
}

fn symmetry(ctx: &Ctx) -> Result<(bool, String)> {
    let sys = ctx.system(ModelKind::DampedDoubleWell);
    let runs = default_experiments(ModelKind::DampedDoubleWell)
        .iter()
        .map(|e| integrate(sys.as_ref(), &e.initial, &e.config).map_err(|e| e.source))
        .collect::<Result<Vec<_>>>()?;
    let r = symmetry_check_space_inversion(&runs[0], &runs[1], 1e-12)?;
    Ok((r.report.pass, format!("mirror residual {:.1e} (<= 1e-12)", r.report.metric)))
}

fn sync(_: &Ctx) -> Result<(bool, String)> {
    let mut scores = Vec::new();
    for exp in default_experiments(ModelKind::CoupledOscillators) {
        let m = exp.spec.build()?;
        let traj = integrate(&m, &exp.initial, &exp.config).map_err(|e| e.source)?;
        scores.push((exp.spec.g, sync_metric(&traj)?.score));
    }
    let (g_free, free) = scores[0];
    let (g_coupled, coupled) = scores[1];
    Ok((
        coupled >= 0.99 && free <= 0.95,
        format!("score g={g_coupled}: {coupled:.4} (>= 0.99), g={g_free}: {free:.4} (<= 0.95)"),
    ))
}

fn action(ctx: &Ctx) -> Result<(bool, String)> {
    let (sys, traj) = ctx.preset_run(ModelKind::DampedHoLinear)?;
    let r = action_residual(&traj, sys.as_ref(), 1e-3)?;
    Ok((
        r.quadrature.pass,
        format!("|z(T) - z0 + int J| = {:.2e} (<= 1e-3)", r.quadrature.metric),
    ))
}

fn herglotz(ctx: &Ctx) -> Result<(bool, String)> {
    let (sys, traj) = ctx.preset_run(ModelKind::DampedHoLinear)?;
    let lf = herglotz_residual(&traj, sys.as_ref(), f64::INFINITY)?.metric;
    let exp = default_experiment(ModelKind::DampedHoLinear);
    let sol = DampedOscillatorSolution::new(exp.spec.omega, exp.spec.gamma, exp.initial.clone())?;
    let times: Vec<f64> = traj.times().collect();
    let mut exact = Trajectory::new();
    let truth = exp.spec.build()?;
    for s in sol.sample(&times) {
        exact.push(&truth, s);
    }
    let reference = herglotz_residual(&exact, &truth, f64::INFINITY)?.metric;
    Ok((
        lf <= 2.0 * reference,
        format!("residual {lf:.2e} vs exact-solution {reference:.2e} (<= 2x)"),
    ))
}

type CheckFn = fn(&Ctx) -> Result<(bool, String)>;

fn lookup(name: &str) -> Option<(&'static str, CheckFn)> {
    let f: CheckFn = match name {
        "bracket" => bracket,
        "field" => field,
        "decoupling" => decoupling,
        "drift" => drift,
        "convergence" => convergence,
        "symmetry" => symmetry,
        "sync" => sync,
        "action" => action,
        "herglotz" => herglotz,
        _ => return None,
    };
    CHECK_NAMES.iter().find(|n| **n == name).map(|n| (*n, f))
}

/// Runs the selected checks in canonical order. A check that errors counts as
/// a failure with the error as its detail.
pub fn run_checks(opts: &CheckOptions) -> std::result::Result<Vec<CheckResult>, CliError> {
    for name in &opts.only {
        if lookup(name).is_none() {
            return Err(CliError::Config(format!(
                "unknown check `{name}` (expected one of {})",
                CHECK_NAMES.join(", ")
            )));
        }
    }
    let ctx = Ctx { fault: opts.fault };
    let selected = CHECK_NAMES
        .iter()
        .filter(|n| opts.only.is_empty() || opts.only.iter().any(|o| o == *n));
    Ok(selected
        .map(|n| {
            let (name, f) = lookup(n).expect("canonical name");
            let (pass, detail) = f(&ctx).unwrap_or_else(|e| (false, format!("error: {e}")));
            CheckResult { name, pass, detail }
        })
        .collect())
}

pub fn format_table(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(5).max(5);
    let mut out = format!("{:<width$}  {:<6}  detail\n", "check", "result");
    for r in results {
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!("{:<width$}  {verdict:<6}  {}\n", r.name, r.detail));
    }
    out
}

