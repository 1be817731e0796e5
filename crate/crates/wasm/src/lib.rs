//! WebAssembly bindings used by the demo page in `www/`.
//!
//! Three operations are exported: a single simulation of a preset model, a
//! synchronization scan over the coupling `g`, and a step-size convergence
//! study of the damped oscillator. The computations live in plain Rust
//! functions so they can be tested natively; the `#[wasm_bindgen]` wrappers
//! only convert errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use contact_core::diagnostics::{hamiltonian_drift, sync_metric};
use contact_core::integrator::{convergence_order, DampedOscillatorSolution};
use contact_core::models::{default_experiment, ModelKind};
use contact_core::{integrate, Scheme};
use wasm_bindgen::prelude::*;

/// Upper bound on points handed to the page per series.
pub const MAX_PLOT_POINTS: usize = 2000;

#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    times: Vec<f64>,
    q1: Vec<f64>,
    q2: Vec<f64>,
    h: Vec<f64>,
    drift: f64,
    sync: f64,
}

#[wasm_bindgen]
impl Simulation {
    #[wasm_bindgen(getter)]
    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn q1(&self) -> Vec<f64> {
        self.q1.clone()
    }
    /// Empty for one-degree-of-freedom models.
    #[wasm_bindgen(getter)]
    pub fn q2(&self) -> Vec<f64> {
        self.q2.clone()
    }
    /// `H = lambda K` at each plotted time.
    #[wasm_bindgen(getter)]
    pub fn h(&self) -> Vec<f64> {
        self.h.clone()
    }
    /// Maximum relative drift of `H` over the run.
    #[wasm_bindgen(getter)]
    pub fn drift(&self) -> f64 {
        self.drift
    }
    /// Frequency-lock score for the coupled model, `NaN` otherwise.
    #[wasm_bindgen(getter)]
    pub fn sync(&self) -> f64 {
        self.sync
    }
}

#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct SyncScan {
    g: Vec<f64>,
    score: Vec<f64>,
}

#[wasm_bindgen]
impl SyncScan {
    #[wasm_bindgen(getter)]
    pub fn g(&self) -> Vec<f64> {
        self.g.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn score(&self) -> Vec<f64> {
        self.score.clone()
    }
}

#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    steps: Vec<f64>,
    errors: Vec<f64>,
    order: f64,
}

#[wasm_bindgen]
impl Convergence {
    #[wasm_bindgen(getter)]
    pub fn steps(&self) -> Vec<f64> {
        self.steps.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn errors(&self) -> Vec<f64> {
        self.errors.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn order(&self) -> f64 {
        self.order
    }
}

pub fn simulate_preset(preset: &str, gamma: f64, g: f64, h: f64, t_end: f64) -> Result<Simulation, String> {
    let kind: ModelKind = preset.parse().map_err(|e| format!("{e}"))?;
    let mut exp = default_experiment(kind);
    exp.spec.gamma = gamma;
    if kind == ModelKind::CoupledOscillators {
        exp.spec.g = g;
    }
    if !(h > 0.0) || !(t_end > 0.0) || t_end / h > 1e7 {
        return Err(format!("need h > 0 and 0 < t_end <= 1e7 h, got h={h}, t_end={t_end}"));
    }
    let model = exp.spec.build().map_err(|e| e.to_string())?;
    let n_steps = (t_end / h).round().max(1.0) as usize;
    let record_every = n_steps.div_ceil(MAX_PLOT_POINTS).max(1);
    exp.config.h = h;
    exp.config.n_steps = n_steps;
    // The sync score needs the full record; only the plotted series are thinned.
    let traj = integrate(&model, &exp.initial, &exp.config).map_err(|e| e.to_string())?;
    let drift = hamiltonian_drift(&traj, f64::INFINITY).map_err(|e| e.to_string())?.metric;
    let sync = if kind.dof() == 2 {
        sync_metric(&traj).map(|s| s.score).unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    let keep = |v: Vec<f64>| -> Vec<f64> {
        let last = v.len() - 1;
        v.into_iter()
            .enumerate()
            .filter(|(i, _)| i % record_every == 0 || *i == last)
            .map(|(_, x)| x)
            .collect()
    };
    Ok(Simulation {
        times: keep(traj.times().collect()),
        q1: keep(traj.q(0)),
        q2: if kind.dof() == 2 { keep(traj.q(1)) } else { Vec::new() },
        h: keep(traj.h.clone()),
        drift,
        sync,
    })
}

pub fn sync_scan_values(g_max: f64, count: usize, gamma: f64) -> Result<SyncScan, String> {
    if !(2..=200).contains(&count) || !(g_max >= 0.0) {
        return Err(format!("need 2 <= count <= 200 and g_max >= 0, got {count}, {g_max}"));
    }
    let exp = default_experiment(ModelKind::CoupledOscillators);
    let mut out = SyncScan { g: Vec::with_capacity(count), score: Vec::with_capacity(count) };
    for i in 0..count {
        let g = g_max * i as f64 / (count - 1) as f64;
        let mut spec = exp.spec;
        spec.g = g;
        spec.gamma = gamma;
        let model = spec.build().map_err(|e| e.to_string())?;
        let traj = integrate(&model, &exp.initial, &exp.config).map_err(|e| e.to_string())?;
        out.g.push(g);
        out.score.push(sync_metric(&traj).map(|s| s.score).unwrap_or(f64::NAN));
    }
    Ok(out)
}

pub fn convergence_values(gamma: f64, t_end: f64, scheme: &str) -> Result<Convergence, String> {
    let scheme = Scheme::parse(scheme).ok_or_else(|| format!("unknown scheme `{scheme}`"))?;
    let mut exp = default_experiment(ModelKind::DampedHoLinear);
    exp.spec.gamma = gamma;
    let model = exp.spec.build().map_err(|e| e.to_string())?;
    let sol = DampedOscillatorSolution::new(exp.spec.omega, gamma, exp.initial.clone())
        .map_err(|e| e.to_string())?;
    let steps = [0.2, 0.1, 0.05, 0.025, 0.0125];
    let est = convergence_order(&model, &exp.initial, t_end, &steps, scheme, &sol.state_at(t_end))
        .map_err(|e| e.to_string())?;
    Ok(Convergence { steps: est.steps, errors: est.errors, order: est.order })
}

/// Integrates preset `A`-`D` with damping `gamma` (and coupling `g` for `D`).
#[wasm_bindgen]
pub fn simulate(preset: &str, gamma: f64, g: f64, h: f64, t_end: f64) -> Result<Simulation, JsError> {
    simulate_preset(preset, gamma, g, h, t_end).map_err(|e| JsError::new(&e))
}

/// Synchronization score of the coupled pair for `count` values of `g` in `[0, g_max]`.
#[wasm_bindgen]
pub fn sync_scan(g_max: f64, count: usize, gamma: f64) -> Result<SyncScan, JsError> {
    sync_scan_values(g_max, count, gamma).map_err(|e| JsError::new(&e))
}

/// Final-time error against the closed-form damped oscillator for halving steps.
#[wasm_bindgen]
pub fn convergence_study(gamma: f64, t_end: f64, scheme: &str) -> Result<Convergence, JsError> {
    convergence_values(gamma, t_end, scheme).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simulate_thins_long_runs() {
        let sim = simulate_preset("A", 0.1, 0.0, 0.001, 50.0).unwrap();
        assert!(sim.times.len() <= MAX_PLOT_POINTS + 1);
        assert_eq!(sim.times.len(), sim.q1.len());
        assert_eq!(*sim.times.last().unwrap(), 50.0);
        assert!(sim.q2.is_empty());
        assert!(sim.drift < 1e-5);
        assert!(sim.sync.is_nan());
    }

    #[test]
    fn simulate_coupled_reports_sync() {
        let sim = simulate_preset("D", 0.01, 0.8, 0.01, 100.0).unwrap();
        assert_eq!(sim.q2.len(), sim.q1.len());
        assert!(sim.sync >= 0.99);
    }

    #[test]
    fn simulate_rejects_bad_input() {
        assert!(simulate_preset("Q", 0.1, 0.0, 0.01, 1.0).is_err());
        assert!(simulate_preset("A", 0.1, 0.0, 0.0, 1.0).is_err());
        assert!(simulate_preset("A", 0.1, 0.0, 0.01, -1.0).is_err());
    }

    #[test]
    fn scan_crosses_threshold() {
        let scan = sync_scan_values(0.8, 3, 0.01).unwrap();
        assert_eq!(scan.g, vec![0.0, 0.4, 0.8]);
        assert!(scan.score[0] <= 0.95);
        assert!(scan.score[2] >= 0.99);
        assert!(sync_scan_values(0.8, 1, 0.01).is_err());
    }

    #[test]
    fn convergence_is_second_order() {
        let c = convergence_values(0.1, 10.0, "HybridLeapfrog").unwrap();
        assert!((c.order - 2.0).abs() < 0.1, "{}", c.order);
        let c = convergence_values(0.1, 10.0, "Rk4Reference").unwrap();
        assert!((c.order - 4.0).abs() < 0.3, "{}", c.order);
    }
}
