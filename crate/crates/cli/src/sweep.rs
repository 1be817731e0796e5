//! Parameter sweeps over one or two parameters.
//!
//! Each grid point is an independent run. Points are computed in parallel and
//! written in grid order (first parameter outermost). A failing point still
//! gets a row, with empty numeric fields and the error in the last column.

use rayon::prelude::*;

use contact_core::diagnostics::{hamiltonian_drift, sync_metric};
use contact_core::integrator::{final_error, DampedOscillatorSolution};
use contact_core::models::ModelKind;
use contact_core::{integrate, ContactState, IntegratorConfig, Scheme};

use crate::config::{parse_f64, RunConfig, PARAM_NAMES};
use crate::csv::fmt_f64;
use crate::error::CliError;

/// Refinement factor of the RK4 reference run.
pub const REFERENCE_REFINEMENT: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ParamAxis {
    pub name: String,
    pub values: Vec<f64>,
}

impl ParamAxis {
    /// Parses `name=v1,v2,...` or `name=start:stop:count` (inclusive ends).
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = |msg: String| CliError::Config(format!("--param `{text}`: {msg}"));
        let (name, spec) = text
            .split_once('=')
            .ok_or_else(|| bad("expected name=values".into()))?;
        let name = name.trim().to_string();
        let spec = spec.trim();
        let values = if spec.contains(':') {
            let parts: Vec<&str> = spec.split(':').collect();
            let [start, stop, count] = parts[..] else {
                return Err(bad("range must be start:stop:count".into()));
            };
            let (start, stop) = (parse_f64(&name, start)?, parse_f64(&name, stop)?);
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad count `{count}`")))?;
            match count {
                0 => Vec::new(),
                1 => vec![start],
                _ => (0..count)
                    .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                    .collect(),
            }
        } else if spec.is_empty() {
            Vec::new()
        } else {
            spec.split(',').map(|v| parse_f64(&name, v)).collect::<Result<_, _>>()?
        };
        Ok(Self { name, values })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: Vec<f64>,
    pub outcome: Result<SweepPoint, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub final_state: ContactState,
    pub k: f64,
    pub h: f64,
    pub drift: f64,
    pub sync: Option<f64>,
    pub ref_error: f64,
}

/// Cartesian product of the axes, first axis outermost.
pub fn grid(axes: &[ParamAxis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(*v);
                    p
                })
            })
            .collect()
    })
}

fn reference_state(cfg: &RunConfig) -> Result<ContactState, String> {
    let t_end = cfg.initial.t + cfg.t_end();
    if cfg.model.kind == ModelKind::DampedHoLinear && cfg.model.gamma < 2.0 * cfg.model.omega {
        let sol = DampedOscillatorSolution::new(cfg.model.omega, cfg.model.gamma, cfg.initial.clone())
            .map_err(|e| e.to_string())?;
        return Ok(sol.state_at(t_end));
    }
    let model = cfg.model.build().map_err(|e| e.to_string())?;
    let n = cfg.integ.n_steps * REFERENCE_REFINEMENT;
    let fine = IntegratorConfig {
        record_every: n.max(1),
        ..IntegratorConfig::new(cfg.integ.h / REFERENCE_REFINEMENT as f64, n)
            .with_scheme(Scheme::Rk4Reference)
    };
    let traj = integrate(&model, &cfg.initial, &fine)
        .map_err(|e| format!("reference run: {e}"))?;
    Ok(traj.last().expect("initial state recorded").clone())
}

fn evaluate(base: &RunConfig, names: &[String], params: &[f64]) -> Result<SweepPoint, String> {
    let mut cfg = base.clone();
    for (name, v) in names.iter().zip(params) {
        cfg.set_param(name, *v).map_err(|e| e.to_string())?;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    let model = cfg.model.build().map_err(|e| e.to_string())?;
    let traj = integrate(&model, &cfg.initial, &cfg.integ).map_err(|e| e.to_string())?;
    let drift = hamiltonian_drift(&traj, f64::INFINITY).map_err(|e| e.to_string())?.metric;
    let sync = (model.spec().kind.dof() == 2)
        .then(|| sync_metric(&traj).map(|s| s.score).unwrap_or(f64::NAN));
    let last = traj.last().expect("initial state recorded").clone();
    let ref_error = final_error(&last, &reference_state(&cfg)?);
    Ok(SweepPoint {
        k: *traj.k.last().expect("non-empty"),
        h: *traj.h.last().expect("non-empty"),
        final_state: last,
        drift,
        sync,
        ref_error,
    })
}

/// Checks the axis count and names before any work is done.
pub fn validate_axes(axes: &[ParamAxis]) -> Result<(), CliError> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(CliError::Config(format!(
            "sweep takes one or two --param axes, got {}",
            axes.len()
        )));
    }
    for axis in axes {
        if !PARAM_NAMES.contains(&axis.name.as_str()) {
            return Err(CliError::Config(format!(
                "unknown parameter `{}` (expected one of {})",
                axis.name,
                PARAM_NAMES.join(", ")
            )));
        }
    }
    Ok(())
}

pub fn run_sweep(base: &RunConfig, axes: &[ParamAxis]) -> Result<Vec<SweepRow>, CliError> {
    validate_axes(axes)?;
    let names: Vec<String> = axes.iter().map(|a| a.name.clone()).collect();
    Ok(grid(axes)
        .into_par_iter()
        .map(|params| SweepRow {
            outcome: evaluate(base, &names, &params),
            params,
        })
        .collect())
}

pub fn header(names: &[String], n: usize) -> String {
    let mut cols: Vec<String> = names.to_vec();
    cols.push("t_final".into());
    cols.extend((1..=n).map(|i| format!("q{i}")));
    cols.extend((1..=n).map(|i| format!("p{i}")));
    cols.extend(["z", "lambda", "K", "H", "drift"].map(String::from));
    if n == 2 {
        cols.push("sync".into());
    }
    cols.extend(["ref_error", "error"].map(String::from));
    cols.join(",")
}

pub fn format_row(row: &SweepRow, n: usize) -> String {
    let mut fields: Vec<String> = row.params.iter().map(|v| fmt_f64(*v)).collect();
    let numeric = 2 * n + 7 + usize::from(n == 2);
    match &row.outcome {
        Ok(pt) => {
            let s = &pt.final_state;
            let mut vals = vec![s.t];
            vals.extend(&s.q);
            vals.extend(&s.p);
            vals.extend([s.z, s.lambda, pt.k, pt.h, pt.drift]);
            vals.extend(pt.sync);
            vals.push(pt.ref_error);
            fields.extend(vals.into_iter().map(fmt_f64));
            fields.push(String::new());
        }
        Err(msg) => {
            fields.extend(std::iter::repeat_n(String::new(), numeric));
            fields.push(format!("\"{}\"", msg.replace('"', "'")));
        }
    }
    fields.join(",")
}

pub fn to_csv(names: &[String], n: usize, rows: &[SweepRow]) -> String {
    let mut out = header(names, n);
    out.push('\n');
    for row in rows {
        out.push_str(&format_row(row, n));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_list_and_range() {
        let a = ParamAxis::parse("g=0,0.8").unwrap();
        assert_eq!(a.name, "g");
        assert_eq!(a.values, vec![0.0, 0.8]);
        let b = ParamAxis::parse("gamma=0:1:5").unwrap();
        assert_eq!(b.values, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(ParamAxis::parse("gamma=0:1:0").unwrap().values.is_empty());
        assert!(ParamAxis::parse("gamma").is_err());
        assert!(ParamAxis::parse("gamma=0:1").is_err());
        assert!(ParamAxis::parse("gamma=a,b").is_err());
    }

    #[test]
    fn grid_is_row_major() {
        let axes = [
            ParamAxis { name: "a".into(), values: vec![1.0, 2.0] },
            ParamAxis { name: "b".into(), values: vec![10.0, 20.0, 30.0] },
        ];
        let g = grid(&axes);
        assert_eq!(g.len(), 6);
        assert_eq!(g[0], vec![1.0, 10.0]);
        assert_eq!(g[2], vec![1.0, 30.0]);
        assert_eq!(g[3], vec![2.0, 10.0]);
    }

    #[test]
    fn header_matches_row_width() {
        let names = vec!["gamma".to_string()];
        for n in [1, 2] {
            let width = header(&names, n).split(',').count();
            let failed = SweepRow { params: vec![0.1], outcome: Err("boom".into()) };
            assert_eq!(format_row(&failed, n).split(',').count(), width);
        }
    }

    #[test]
    fn unknown_axis_is_rejected_up_front() {
        let base = RunConfig::preset(ModelKind::DampedHoLinear);
        let axes = [ParamAxis::parse("spin=1,2").unwrap()];
        assert!(matches!(run_sweep(&base, &axes), Err(CliError::Config(_))));
    }
}
