//! Trajectory-level checks: conservation of `H = lambda K`, the action
//! identity `z' + J = 0`, the Herglotz residual, mirror symmetry and a
//! frequency-lock score for two oscillators.

use crate::error::{ContactError, Result};
use crate::integrator::Trajectory;
use crate::state::ContactState;
use crate::system::{ContactSystem, Partials};

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticReport {
    pub name: String,
    /// `(t, value)` per recorded state (interior records only for stencils).
    pub series: Vec<(f64, f64)>,
    pub max_abs: f64,
    /// The scalar compared against `threshold`.
    pub metric: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl DiagnosticReport {
    fn new(name: &str, series: Vec<(f64, f64)>, metric: f64, threshold: f64) -> Self {
        let max_abs = series.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
        Self {
            name: name.to_string(),
            series,
            max_abs,
            metric,
            threshold,
            pass: metric <= threshold,
        }
    }
}

fn drift_report(name: &str, times: Vec<f64>, values: &[f64], threshold: f64) -> Result<DiagnosticReport> {
    let Some(&v0) = values.first() else {
        return Err(ContactError::EmptyTrajectory);
    };
    let series: Vec<(f64, f64)> = times.into_iter().zip(values).map(|(t, v)| (t, v - v0)).collect();
    let max_abs = series.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    let relative = if v0 != 0.0 { max_abs / v0.abs() } else { max_abs };
    Ok(DiagnosticReport::new(name, series, relative, threshold))
}

/// Default relative drift bound for `H` at `h = 0.01`.
pub const DEFAULT_DRIFT_THRESHOLD: f64 = 1e-3;

/// Series of `lambda K - lambda0 K0`; the metric is the maximum relative drift.
pub fn hamiltonian_drift(traj: &Trajectory, threshold: f64) -> Result<DiagnosticReport> {
    drift_report("hamiltonian_drift", traj.times().collect(), &traj.h, threshold)
}

/// Series of `K - K0`; only meaningful when `K_z = 0`.
pub fn k_drift(traj: &Trajectory, threshold: f64) -> Result<DiagnosticReport> {
    drift_report("k_drift", traj.times().collect(), &traj.k, threshold)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionReport {
    /// Largest `|(K - p.K_p) + J|` with `J = p.K_p - K`; zero by construction.
    pub algebraic_max: f64,
    /// `z(t) - (z0 - int_0^t J)` with trapezoid quadrature over the records;
    /// metric is the value at the final record.
    pub quadrature: DiagnosticReport,
}

/// Contact Lagrangian `J = p.q' - K` with `q' = K_p`.
pub fn contact_lagrangian(sys: &dyn ContactSystem, s: &ContactState) -> f64 {
    let d = Partials::eval(sys, &s.q, &s.p, s.z);
    d.p_dot_kp(&s.p) - d.k
}

pub fn action_residual(traj: &Trajectory, sys: &dyn ContactSystem, threshold: f64) -> Result<ActionReport> {
    let first = traj.states.first().ok_or(ContactError::EmptyTrajectory)?;
    let mut algebraic_max: f64 = 0.0;
    let mut series = Vec::with_capacity(traj.len());
    let mut integral = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for s in &traj.states {
        let d = Partials::eval(sys, &s.q, &s.p, s.z);
        let zdot = d.k - d.p_dot_kp(&s.p);
        let j = d.p_dot_kp(&s.p) - d.k;
        algebraic_max = algebraic_max.max((zdot + j).abs());
        if let Some((t_prev, j_prev)) = prev {
            integral += 0.5 * (s.t - t_prev) * (j + j_prev);
        }
        prev = Some((s.t, j));
        series.push((s.t, s.z - (first.z - integral)));
    }
    let metric = series.last().map_or(0.0, |(_, v)| v.abs());
    Ok(ActionReport {
        algebraic_max,
        quadrature: DiagnosticReport::new("action_residual", series, metric, threshold),
    })
}

/// Herglotz residual `q'' + U'(q) - q' f'(z)` for `K = |p|^2/2 + U(q) + f(z)`,
/// with `U' = K_q` and `f' = K_z`, using centered differences of the recorded
/// `q` on a uniform time grid. Per record the value is the largest component.
pub fn herglotz_residual(traj: &Trajectory, sys: &dyn ContactSystem, threshold: f64) -> Result<DiagnosticReport> {
    if traj.is_empty() {
        return Err(ContactError::EmptyTrajectory);
    }
    if traj.len() < 3 {
        return Err(ContactError::TooShort(format!(
            "herglotz stencil needs 3 records, got {}",
            traj.len()
        )));
    }
    let st = &traj.states;
    let dt = st[1].t - st[0].t;
    let uniform = st
        .windows(2)
        .all(|w| ((w[1].t - w[0].t) - dt).abs() <= 1e-9 * dt.abs().max(1.0));
    if !uniform {
        return Err(ContactError::TooShort("records are not uniformly spaced".into()));
    }
    for s in st {
        let d = Partials::eval(sys, &s.q, &s.p, s.z);
        let separable = d
            .k_p
            .iter()
            .zip(&s.p)
            .all(|(kp, p)| (kp - p).abs() <= 1e-12 * p.abs().max(1.0));
        if !separable {
            return Err(ContactError::UnsupportedModel(format!(
                "{}: K_p != p, kinetic term is not |p|^2/2",
                sys.label()
            )));
        }
    }
    let mut series = Vec::with_capacity(st.len() - 2);
    for w in st.windows(3) {
        let (a, b, c) = (&w[0], &w[1], &w[2]);
        let d = Partials::eval(sys, &b.q, &b.p, b.z);
        let worst = (0..b.dof())
            .map(|i| {
                let qdd = (c.q[i] - 2.0 * b.q[i] + a.q[i]) / (dt * dt);
                let qd = (c.q[i] - a.q[i]) / (2.0 * dt);
                (qdd + d.k_q[i] - qd * d.k_z).abs()
            })
            .fold(0.0, f64::max);
        series.push((b.t, worst));
    }
    let metric = series.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    Ok(DiagnosticReport::new("herglotz_residual", series, metric, threshold))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MirrorReport {
    /// `max |q+ + q-|`
    pub q_residual: f64,
    /// `max |p+ + p-|`
    pub p_residual: f64,
    /// `max(|z+ - z-|, |lambda+ - lambda-|)`
    pub even_residual: f64,
    pub report: DiagnosticReport,
}

/// Compares two runs whose initial states are related by `(q, p) -> (-q, -p)`.
pub fn symmetry_check_space_inversion(
    plus: &Trajectory,
    minus: &Trajectory,
    threshold: f64,
) -> Result<MirrorReport> {
    if plus.len() != minus.len() {
        return Err(ContactError::LengthMismatch(plus.len(), minus.len()));
    }
    let (mut qr, mut pr, mut er): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut series = Vec::with_capacity(plus.len());
    for (a, b) in plus.states.iter().zip(&minus.states) {
        if a.dof() != b.dof() {
            return Err(ContactError::DimensionMismatch {
                expected: a.dof(),
                found: b.dof(),
            });
        }
        let q = a.q.iter().zip(&b.q).map(|(x, y)| (x + y).abs()).fold(0.0, f64::max);
        let p = a.p.iter().zip(&b.p).map(|(x, y)| (x + y).abs()).fold(0.0, f64::max);
        let e = (a.z - b.z).abs().max((a.lambda - b.lambda).abs());
        qr = qr.max(q);
        pr = pr.max(p);
        er = er.max(e);
        series.push((a.t, q.max(p).max(e)));
    }
    let metric = qr.max(pr).max(er);
    Ok(MirrorReport {
        q_residual: qr,
        p_residual: pr,
        even_residual: er,
        report: DiagnosticReport::new("space_inversion", series, metric, threshold),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyncScore {
    /// `1 - |T1 - T2| / max(T1, T2)`
    pub score: f64,
    /// Mean zero-crossing periods of the two oscillators over the final half.
    pub periods: [f64; 2],
}

/// Linearly interpolated zero crossings of `x(t)`.
pub fn zero_crossings(t: &[f64], x: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 1..x.len() {
        let (x0, x1) = (x[k - 1], x[k]);
        if (x0 < 0.0) != (x1 < 0.0) {
            let frac = x0 / (x0 - x1);
            out.push(t[k - 1] + frac * (t[k] - t[k - 1]));
        }
    }
    out
}

/// Frequency-lock score of a two-oscillator run, from the mean zero-crossing
/// period of each `q_i` over the second half of the records.
pub fn sync_metric(traj: &Trajectory) -> Result<SyncScore> {
    let first = traj.states.first().ok_or(ContactError::EmptyTrajectory)?;
    if first.dof() != 2 {
        return Err(ContactError::DimensionMismatch {
            expected: 2,
            found: first.dof(),
        });
    }
    if traj.len() < 4 {
        return Err(ContactError::TooShort(format!("{} records", traj.len())));
    }
    let start = traj.len() / 2;
    let t: Vec<f64> = traj.states[start..].iter().map(|s| s.t).collect();
    let mut periods = [0.0; 2];
    for (i, period) in periods.iter_mut().enumerate() {
        let x: Vec<f64> = traj.states[start..].iter().map(|s| s.q[i]).collect();
        let c = zero_crossings(&t, &x);
        if c.len() < 2 {
            return Err(ContactError::NoCrossings(i + 1));
        }
        *period = 2.0 * (c[c.len() - 1] - c[0]) / (c.len() - 1) as f64;
    }
    let score = 1.0 - (periods[0] - periods[1]).abs() / periods[0].max(periods[1]);
    Ok(SyncScore { score, periods })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::{integrate, DampedOscillatorSolution, IntegratorConfig};
    use crate::models::{default_experiment, default_experiments, ModelKind, ModelSpec};
    use crate::system::FnSystem;

    fn run(kind: ModelKind) -> (crate::models::Model, Trajectory) {
        let exp = default_experiment(kind);
        let m = exp.spec.build().unwrap();
        let traj = integrate(&m, &exp.initial, &exp.config).unwrap();
        (m, traj)
    }

    #[test]
    fn single_state_has_zero_drift() {
        let m = ModelSpec::new(ModelKind::DampedHoLinear).build().unwrap();
        let mut traj = Trajectory::new();
        traj.push(&m, ContactState::scalar(1.0, 0.0, 1.0, 1.0));
        let r = hamiltonian_drift(&traj, 1e-3).unwrap();
        assert_eq!(r.max_abs, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn empty_trajectory_errors() {
        let traj = Trajectory::new();
        let m = FnSystem::free_particle(1);
        assert_eq!(hamiltonian_drift(&traj, 1.0), Err(ContactError::EmptyTrajectory));
        assert_eq!(action_residual(&traj, &m, 1.0).map(|_| ()), Err(ContactError::EmptyTrajectory));
        assert_eq!(herglotz_residual(&traj, &m, 1.0), Err(ContactError::EmptyTrajectory));
        assert_eq!(sync_metric(&traj), Err(ContactError::EmptyTrajectory));
    }

    #[test]
    fn model_a_drift_within_default_bound() {
        let (_, traj) = run(ModelKind::DampedHoLinear);
        let r = hamiltonian_drift(&traj, DEFAULT_DRIFT_THRESHOLD).unwrap();
        assert!(r.pass, "relative drift {}", r.metric);
        assert_eq!(r.series.len(), traj.len());
    }

    #[test]
    fn drift_shrinks_with_step() {
        let exp = default_experiment(ModelKind::DampedHoLinear);
        let m = exp.spec.build().unwrap();
        let drift = |h: f64| {
            let cfg = IntegratorConfig::new(h, (50.0 / h).round() as usize);
            let traj = integrate(&m, &exp.initial, &cfg).unwrap();
            hamiltonian_drift(&traj, 1.0).unwrap().metric
        };
        let ratio = drift(0.02) / drift(0.01);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn free_particle_action_is_exact() {
        let sys = FnSystem::free_particle(1);
        let s0 = ContactState::scalar(0.0, 1.5, 0.0, 1.0);
        let traj = integrate(&sys, &s0, &IntegratorConfig::new(0.1, 30)).unwrap();
        let r = action_residual(&traj, &sys, 1e-12).unwrap();
        let end = traj.last().unwrap();
        assert!((end.z + 3.0 * 1.125).abs() < 1e-12);
        assert_eq!(r.algebraic_max, 0.0);
        assert!(r.quadrature.metric < 1e-12);
    }

    #[test]
    fn model_a_action_quadrature() {
        let (m, traj) = run(ModelKind::DampedHoLinear);
        let r = action_residual(&traj, &m, 1e-3).unwrap();
        assert_eq!(r.algebraic_max, 0.0);
        assert!(r.quadrature.pass, "{}", r.quadrature.metric);
    }

    #[test]
    fn herglotz_residual_model_a_vs_analytic() {
        let (m, traj) = run(ModelKind::DampedHoLinear);
        let r = herglotz_residual(&traj, &m, 5e-3).unwrap();
        assert!(r.pass, "{}", r.metric);

        let sol = DampedOscillatorSolution::new(1.0, 0.1, traj.states[0].clone()).unwrap();
        let times: Vec<f64> = traj.times().collect();
        let mut exact = Trajectory::new();
        for s in sol.sample(&times) {
            exact.push(&m, s);
        }
        let reference = herglotz_residual(&exact, &m, 5e-3).unwrap();
        assert!(r.metric <= 2.0 * reference.metric, "{} vs {}", r.metric, reference.metric);
    }

    #[test]
    fn herglotz_conservative_limit() {
        // gamma = 0: Stormer-Verlet satisfies q'' + U'(q) = 0 on the grid.
        let spec = ModelSpec {
            gamma: 0.0,
            ..ModelSpec::new(ModelKind::DampedHoLinear)
        };
        let m = spec.build().unwrap();
        let s0 = ContactState::scalar(1.0, 0.0, 1.0, 1.0);
        let traj = integrate(&m, &s0, &IntegratorConfig::new(0.01, 2000)).unwrap();
        let r = herglotz_residual(&traj, &m, 1e-9).unwrap();
        assert!(r.pass, "{}", r.metric);
    }

    #[test]
    fn herglotz_rejects_nonseparable() {
        let sys = FnSystem::new(
            "cubic kinetic",
            1,
            |_, p, _| p[0].powi(4) / 4.0,
            |_, _, _, out| out[0] = 0.0,
            |_, p, _, out| out[0] = p[0].powi(3),
            |_, _, _| 0.0,
        );
        let s0 = ContactState::scalar(0.0, 2.0, 0.0, 1.0);
        let traj = integrate(&sys, &s0, &IntegratorConfig::new(0.01, 10)).unwrap();
        assert!(matches!(
            herglotz_residual(&traj, &sys, 1.0),
            Err(ContactError::UnsupportedModel(_))
        ));
    }

    #[test]
    fn double_well_mirror_runs() {
        let runs: Vec<Trajectory> = default_experiments(ModelKind::DampedDoubleWell)
            .iter()
            .map(|e| integrate(&e.spec.build().unwrap(), &e.initial, &e.config).unwrap())
            .collect();
        let r = symmetry_check_space_inversion(&runs[0], &runs[1], 1e-12).unwrap();
        assert!(r.report.pass, "{r:?}");
        assert_eq!(r.even_residual, 0.0);
    }

    #[test]
    fn mirror_negative_control() {
        let (_, traj) = run(ModelKind::DampedHoLinear);
        let r = symmetry_check_space_inversion(&traj, &traj, 1e-12).unwrap();
        let max_q = traj.states.iter().map(|s| s.q[0].abs()).fold(0.0, f64::max);
        assert_eq!(r.q_residual, 2.0 * max_q);
        assert!(!r.report.pass);
    }

    #[test]
    fn mirror_single_record_and_length_mismatch() {
        let m = ModelSpec::new(ModelKind::DampedDoubleWell).build().unwrap();
        let (mut a, mut b) = (Trajectory::new(), Trajectory::new());
        a.push(&m, ContactState::scalar(2.0, 0.5, 1.0, 1.0));
        b.push(&m, ContactState::scalar(-2.0, -0.25, 1.0, 1.0));
        let r = symmetry_check_space_inversion(&a, &b, 1e-12).unwrap();
        assert_eq!((r.q_residual, r.p_residual), (0.0, 0.25));
        b.push(&m, ContactState::scalar(-2.0, 0.0, 1.0, 1.0));
        assert_eq!(
            symmetry_check_space_inversion(&a, &b, 1e-12).map(|_| ()),
            Err(ContactError::LengthMismatch(1, 2))
        );
    }

    #[test]
    fn identical_twins_are_locked() {
        let spec = ModelSpec {
            g: 0.0,
            omega1_sq: 1.0,
            omega2_sq: 1.0,
            ..ModelSpec::new(ModelKind::CoupledOscillators)
        };
        let m = spec.build().unwrap();
        let s0 = ContactState::new(vec![1.0, -1.0], vec![0.0, 0.0], 1.0, 1.0, 0.0);
        let traj = integrate(&m, &s0, &IntegratorConfig::new(0.01, 10_000)).unwrap();
        let s = sync_metric(&traj).unwrap();
        assert!((s.score - 1.0).abs() < 1e-12, "{s:?}");
    }

    #[test]
    fn default_coupling_contrast() {
        let runs: Vec<SyncScore> = default_experiments(ModelKind::CoupledOscillators)
            .iter()
            .map(|e| {
                let traj = integrate(&e.spec.build().unwrap(), &e.initial, &e.config).unwrap();
                sync_metric(&traj).unwrap()
            })
            .collect();
        assert!(runs[0].score <= 0.95, "g=0: {:?}", runs[0]);
        assert!(runs[1].score >= 0.99, "g=0.8: {:?}", runs[1]);
    }

    #[test]
    fn sync_errors() {
        let (_, traj) = run(ModelKind::DampedHoLinear);
        assert!(matches!(sync_metric(&traj), Err(ContactError::DimensionMismatch { .. })));

        let d = ModelSpec::new(ModelKind::CoupledOscillators).build().unwrap();
        let s0 = ContactState::new(vec![1.0, -1.0], vec![0.0, 0.0], 1.0, 1.0, 0.0);
        let short = integrate(&d, &s0, &IntegratorConfig::new(0.01, 2)).unwrap();
        assert!(matches!(sync_metric(&short), Err(ContactError::TooShort(_))));
        let no_cross = integrate(&d, &s0, &IntegratorConfig::new(0.01, 50)).unwrap();
        assert!(matches!(sync_metric(&no_cross), Err(ContactError::NoCrossings(_))));
    }

    #[test]
    fn zero_crossing_interpolation() {
        let c = zero_crossings(&[0.0, 1.0, 2.0, 3.0], &[1.0, -1.0, -1.0, 3.0]);
        assert_eq!(c, vec![0.5, 2.25]);
    }

    #[test]
    fn reports_are_deterministic() {
        let (m, a) = run(ModelKind::DampedHoQuadratic);
        let (_, b) = run(ModelKind::DampedHoQuadratic);
        assert_eq!(hamiltonian_drift(&a, 1e-3), hamiltonian_drift(&b, 1e-3));
        assert_eq!(herglotz_residual(&a, &m, 1.0), herglotz_residual(&b, &m, 1.0));
    }
}
