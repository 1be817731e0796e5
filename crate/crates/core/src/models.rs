//! The dissipative model zoo and its default experiments.
//!
//! | kind | K |
//! |------|---|
//! | `DampedHoLinear` | `(p^2 + w^2 q^2)/2 - gamma z` |
//! | `DampedHoQuadratic` | `(p^2 + w^2 q^2)/2 - gamma z^2` |
//! | `DampedDoubleWell` | `p^2/2 + (q^2 - a^2)^2/2 - gamma z` |
//! | `CoupledOscillators` | `sum_i (p_i^2 + w_i^2 q_i^2)/2 + g q1^2 q2^2 - gamma z` |

use std::fmt;
use std::str::FromStr;

use crate::error::{ContactError, Result};
use crate::integrator::{IntegratorConfig, Scheme};
use crate::state::ContactState;
use crate::system::ContactSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    DampedHoLinear,
    DampedHoQuadratic,
    DampedDoubleWell,
    CoupledOscillators,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::DampedHoLinear,
        ModelKind::DampedHoQuadratic,
        ModelKind::DampedDoubleWell,
        ModelKind::CoupledOscillators,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::DampedHoLinear => "DampedHO_Linear",
            ModelKind::DampedHoQuadratic => "DampedHO_Quadratic",
            ModelKind::DampedDoubleWell => "DampedDoubleWell",
            ModelKind::CoupledOscillators => "CoupledOscillators",
        }
    }

    /// Preset letter `A`..`D`.
    pub fn preset(self) -> char {
        match self {
            ModelKind::DampedHoLinear => 'A',
            ModelKind::DampedHoQuadratic => 'B',
            ModelKind::DampedDoubleWell => 'C',
            ModelKind::CoupledOscillators => 'D',
        }
    }

    pub fn dof(self) -> usize {
        match self {
            ModelKind::CoupledOscillators => 2,
            _ => 1,
        }
    }

    /// Default run horizon.
    pub fn horizon(self) -> f64 {
        match self {
            ModelKind::CoupledOscillators => 100.0,
            _ => 50.0,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = ContactError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        ModelKind::ALL
            .into_iter()
            .find(|k| {
                k.name().eq_ignore_ascii_case(t)
                    || (t.len() == 1 && t.eq_ignore_ascii_case(&k.preset().to_string()))
            })
            .ok_or_else(|| ContactError::InvalidSpec(format!("unknown model kind `{t}`")))
    }
}

/// Parameters of one model. Fields not used by `kind` are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub omega: f64,
    pub gamma: f64,
    pub a: f64,
    pub omega1_sq: f64,
    pub omega2_sq: f64,
    pub g: f64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind) -> Self {
        match kind {
            ModelKind::DampedHoLinear | ModelKind::DampedHoQuadratic => Self {
                kind,
                omega: 1.0,
                gamma: 0.1,
                ..Self::BASE
            },
            ModelKind::DampedDoubleWell => Self {
                kind,
                a: 1.0,
                gamma: 0.1,
                ..Self::BASE
            },
            ModelKind::CoupledOscillators => Self {
                kind,
                gamma: 0.01,
                omega1_sq: 1.2,
                omega2_sq: 0.8,
                g: 0.8,
                ..Self::BASE
            },
        }
    }

    const BASE: ModelSpec = ModelSpec {
        kind: ModelKind::DampedHoLinear,
        omega: 1.0,
        gamma: 0.1,
        a: 1.0,
        omega1_sq: 1.2,
        omega2_sq: 0.8,
        g: 0.8,
    };

    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.omega,
            self.gamma,
            self.a,
            self.omega1_sq,
            self.omega2_sq,
            self.g,
        ];
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(ContactError::InvalidSpec("non-finite parameter".into()));
        }
        if self.gamma < 0.0 {
            return Err(ContactError::InvalidSpec(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        let positive: &[(&str, f64)] = match self.kind {
            ModelKind::DampedHoLinear | ModelKind::DampedHoQuadratic => &[("omega", self.omega)],
            ModelKind::DampedDoubleWell => &[("a", self.a)],
            ModelKind::CoupledOscillators => {
                &[("omega1_sq", self.omega1_sq), ("omega2_sq", self.omega2_sq)]
            }
        };
        for (name, v) in positive {
            if *v <= 0.0 {
                return Err(ContactError::InvalidSpec(format!(
                    "{name} must be > 0, got {v}"
                )));
            }
        }
        if self.g < 0.0 {
            return Err(ContactError::InvalidSpec(format!(
                "g must be >= 0, got {}",
                self.g
            )));
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Model> {
        self.validate()?;
        Ok(Model { spec: *self })
    }

    /// Sets a parameter by name; used by config files and sweeps.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        match key {
            "omega" => self.omega = value,
            "gamma" => self.gamma = value,
            "a" => self.a = value,
            "omega1_sq" => self.omega1_sq = value,
            "omega2_sq" => self.omega2_sq = value,
            "g" => self.g = value,
            _ => {
                return Err(ContactError::InvalidSpec(format!(
                    "unknown model parameter `{key}`"
                )))
            }
        }
        Ok(())
    }
}

/// A built model; implements [`ContactSystem`] with exact partials.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    spec: ModelSpec,
}

impl Model {
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }
}

impl ContactSystem for Model {
    fn dof(&self) -> usize {
        self.spec.kind.dof()
    }

    fn label(&self) -> &str {
        self.spec.kind.name()
    }

    fn k(&self, q: &[f64], p: &[f64], z: f64) -> f64 {
        let s = &self.spec;
        match s.kind {
            ModelKind::DampedHoLinear => {
                0.5 * (p[0] * p[0] + s.omega * s.omega * q[0] * q[0]) - s.gamma * z
            }
            ModelKind::DampedHoQuadratic => {
                0.5 * (p[0] * p[0] + s.omega * s.omega * q[0] * q[0]) - s.gamma * z * z
            }
            ModelKind::DampedDoubleWell => {
                let w = q[0] * q[0] - s.a * s.a;
                0.5 * p[0] * p[0] + 0.5 * w * w - s.gamma * z
            }
            ModelKind::CoupledOscillators => {
                0.5 * (p[0] * p[0] + s.omega1_sq * q[0] * q[0])
                    + 0.5 * (p[1] * p[1] + s.omega2_sq * q[1] * q[1])
                    + s.g * q[0] * q[0] * q[1] * q[1]
                    - s.gamma * z
            }
        }
    }

    fn k_q(&self, q: &[f64], _p: &[f64], _z: f64, out: &mut [f64]) {
        let s = &self.spec;
        match s.kind {
            ModelKind::DampedHoLinear | ModelKind::DampedHoQuadratic => {
                out[0] = s.omega * s.omega * q[0];
            }
            ModelKind::DampedDoubleWell => {
                out[0] = 2.0 * q[0] * (q[0] * q[0] - s.a * s.a);
            }
            ModelKind::CoupledOscillators => {
                out[0] = s.omega1_sq * q[0] + 2.0 * s.g * q[0] * q[1] * q[1];
                out[1] = s.omega2_sq * q[1] + 2.0 * s.g * q[0] * q[0] * q[1];
            }
        }
    }

    fn k_p(&self, _q: &[f64], p: &[f64], _z: f64, out: &mut [f64]) {
        out.copy_from_slice(p);
    }

    fn k_z(&self, _q: &[f64], _p: &[f64], z: f64) -> f64 {
        match self.spec.kind {
            ModelKind::DampedHoQuadratic => -2.0 * self.spec.gamma * z,
            _ => -self.spec.gamma,
        }
    }
}

/// A fully specified run: model, initial state and integrator settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub spec: ModelSpec,
    pub initial: ContactState,
    pub config: IntegratorConfig,
}

/// Default experiments for each model.
///
/// `DampedDoubleWell` yields two runs (`q(0) = +2` and `-2`);
/// `CoupledOscillators` yields two runs (`g = 0` and `g = 0.8`).
pub fn default_experiments(kind: ModelKind) -> Vec<Experiment> {
    let spec = ModelSpec::new(kind);
    let h = 0.01;
    let n_steps = (kind.horizon() / h).round() as usize;
    let config = IntegratorConfig {
        h,
        n_steps,
        record_every: 1,
        scheme: Scheme::HybridLeapfrog,
    };
    let run = |spec: ModelSpec, initial: ContactState| Experiment {
        spec,
        initial,
        config: config.clone(),
    };
    match kind {
        ModelKind::DampedHoLinear | ModelKind::DampedHoQuadratic => {
            vec![run(spec, ContactState::scalar(1.0, 0.0, 1.0, 1.0))]
        }
        ModelKind::DampedDoubleWell => vec![
            run(spec, ContactState::scalar(2.0, 0.0, 1.0, 1.0)),
            run(spec, ContactState::scalar(-2.0, 0.0, 1.0, 1.0)),
        ],
        ModelKind::CoupledOscillators => {
            let initial = ContactState::new(vec![1.0, -1.0], vec![0.0, 0.0], 1.0, 1.0, 0.0);
            vec![
                run(ModelSpec { g: 0.0, ..spec }, initial.clone()),
                run(ModelSpec { g: 0.8, ..spec }, initial),
            ]
        }
    }
}

/// First default experiment of `kind`.
pub fn default_experiment(kind: ModelKind) -> Experiment {
    default_experiments(kind).swap_remove(0)
}
