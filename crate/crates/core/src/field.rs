//! Continuous-time equations of motion.
//!
//! Contact form: `q' = K_p`, `p' = -K_q + p K_z`, `z' = K - p.K_p`,
//! `lambda' = -lambda K_z`. The lifted form is the canonical flow of
//! `H(q1, p1, q0, p0) = p0 K(q1, p1/p0, q0)`, whose partials follow from those
//! of `K` by the chain rule (`d/dp1 = (1/lambda) d/dp`).

use crate::error::{ContactError, Result};
use crate::state::{ContactState, LiftedState};
use crate::system::{ContactSystem, Partials};

#[derive(Debug, Clone, PartialEq)]
pub struct StateDerivative {
    pub dq: Vec<f64>,
    pub dp: Vec<f64>,
    pub dz: f64,
    pub dlambda: f64,
}

impl StateDerivative {
    pub fn is_finite(&self) -> bool {
        self.dz.is_finite()
            && self.dlambda.is_finite()
            && self.dq.iter().chain(&self.dp).all(|x| x.is_finite())
    }
}

fn check_dims(sys: &dyn ContactSystem, n: usize) -> Result<()> {
    if sys.dof() != n {
        return Err(ContactError::DimensionMismatch {
            expected: sys.dof(),
            found: n,
        });
    }
    Ok(())
}

pub(crate) fn partials_checked(
    sys: &dyn ContactSystem,
    q: &[f64],
    p: &[f64],
    z: f64,
) -> Result<Partials> {
    let d = Partials::eval(sys, q, p, z);
    if !d.is_finite() {
        return Err(ContactError::NonFinite("partials of K"));
    }
    Ok(d)
}

pub fn contact_vector_field(sys: &dyn ContactSystem, s: &ContactState) -> Result<StateDerivative> {
    s.validate()?;
    check_dims(sys, s.dof())?;
    let d = partials_checked(sys, &s.q, &s.p, s.z)?;
    let dp = s
        .p
        .iter()
        .zip(&d.k_q)
        .map(|(p, kq)| -kq + p * d.k_z)
        .collect();
    let out = StateDerivative {
        dz: d.k - d.p_dot_kp(&s.p),
        dlambda: -s.lambda * d.k_z,
        dq: d.k_p,
        dp,
    };
    if !out.is_finite() {
        return Err(ContactError::NonFinite("contact vector field"));
    }
    Ok(out)
}

/// Time derivative in lifted coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedDerivative {
    pub dq1: Vec<f64>,
    pub dp1: Vec<f64>,
    pub dq0: f64,
    pub dp0: f64,
}

impl LiftedDerivative {
    /// Maps a lifted velocity at `ls` back to `(q, p, z, lambda)` velocities,
    /// using `p = p1/p0` so `p' = (p1' - p p0') / p0`.
    pub fn pushforward(&self, ls: &LiftedState) -> StateDerivative {
        StateDerivative {
            dq: self.dq1.clone(),
            dp: self
                .dp1
                .iter()
                .zip(&ls.p1)
                .map(|(dp1, p1)| (dp1 - (p1 / ls.p0) * self.dp0) / ls.p0)
                .collect(),
            dz: self.dq0,
            dlambda: self.dp0,
        }
    }
}

/// Gradient of `H = p0 K` with respect to `(q1, p1, q0, p0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedGradient {
    pub h: f64,
    pub h_q1: Vec<f64>,
    pub h_p1: Vec<f64>,
    pub h_q0: f64,
    pub h_p0: f64,
}

impl LiftedGradient {
    pub fn eval(sys: &dyn ContactSystem, ls: &LiftedState) -> Result<Self> {
        if !(ls.p0 > 0.0) {
            return Err(ContactError::NonPositiveLambda(ls.p0));
        }
        check_dims(sys, ls.q1.len())?;
        let lambda = ls.p0;
        let p: Vec<f64> = ls.p1.iter().map(|p1| p1 / lambda).collect();
        let d = partials_checked(sys, &ls.q1, &p, ls.q0)?;
        Ok(Self {
            h: lambda * d.k,
            // dH/dq1 = lambda K_q
            h_q1: d.k_q.iter().map(|kq| lambda * kq).collect(),
            // dH/dp1 = lambda K_p (1/lambda) = K_p
            h_p1: d.k_p.clone(),
            // dH/dq0 = lambda K_z
            h_q0: lambda * d.k_z,
            // dH/dp0 = K + lambda K_p . d(p1/p0)/dp0 = K - p.K_p
            h_p0: d.k - d.p_dot_kp(&p),
        })
    }
}

pub fn lifted_vector_field(sys: &dyn ContactSystem, ls: &LiftedState) -> Result<LiftedDerivative> {
    let g = LiftedGradient::eval(sys, ls)?;
    let out = LiftedDerivative {
        dq1: g.h_p1,
        dp1: g.h_q1.iter().map(|x| -x).collect(),
        dq0: g.h_p0,
        dp0: -g.h_q0,
    };
    let finite = out.dq0.is_finite()
        && out.dp0.is_finite()
        && out.dq1.iter().chain(&out.dp1).all(|x| x.is_finite());
    if !finite {
        return Err(ContactError::NonFinite("lifted vector field"));
    }
    Ok(out)
}

/// `dH/dt` along the lifted field, `grad H . X_H`; zero up to rounding.
pub fn lifted_h_rate(sys: &dyn ContactSystem, ls: &LiftedState) -> Result<f64> {
    let g = LiftedGradient::eval(sys, ls)?;
    let v = lifted_vector_field(sys, ls)?;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    Ok(dot(&g.h_q1, &v.dq1) + dot(&g.h_p1, &v.dp1) + g.h_q0 * v.dq0 + g.h_p0 * v.dp0)
}

/// Both sides of `dK/dt = K K_z`: the chain rule `K_q.q' + K_p.p' + K_z z'`
/// using the supplied partials, and `K K_z`.
pub fn k_rate_identity(sys: &dyn ContactSystem, s: &ContactState) -> Result<(f64, f64)> {
    let v = contact_vector_field(sys, s)?;
    let d = partials_checked(sys, &s.q, &s.p, s.z)?;
    let lhs = d.k_q.iter().zip(&v.dq).map(|(a, b)| a * b).sum::<f64>()
        + d.k_p.iter().zip(&v.dp).map(|(a, b)| a * b).sum::<f64>()
        + d.k_z * v.dz;
    Ok((lhs, d.k * d.k_z))
}

/// `dH/dt = lambda dK/dt + lambda' K` along the contact field; zero up to rounding.
pub fn h_rate(sys: &dyn ContactSystem, s: &ContactState) -> Result<f64> {
    let (dk, _) = k_rate_identity(sys, s)?;
    let v = contact_vector_field(sys, s)?;
    Ok(s.lambda * dk + v.dlambda * sys.k_at(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ModelKind, ModelSpec};
    use crate::sampling::StateSampler;
    use crate::system::FnSystem;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn free_particle_field() {
        let sys = FnSystem::free_particle(1);
        let v = contact_vector_field(&sys, &ContactState::scalar(0.0, 1.0, 0.0, 1.0)).unwrap();
        assert_eq!(v.dq, vec![1.0]);
        assert_eq!(v.dp, vec![0.0]);
        assert_eq!(v.dz, -0.5);
        assert_eq!(v.dlambda, 0.0);
    }

    #[test]
    fn model_a_field_at_initial_state() {
        let m = ModelSpec::new(ModelKind::DampedHoLinear).build().unwrap();
        let v = contact_vector_field(&m, &ContactState::scalar(1.0, 0.0, 1.0, 1.0)).unwrap();
        assert_eq!(v.dq, vec![0.0]);
        assert_eq!(v.dp, vec![-1.0]);
        assert!((v.dz - 0.4).abs() < 1e-15);
        assert_eq!(v.dlambda, 0.1);
    }

    #[test]
    fn model_b_field_matches_direct_substitution() {
        let (w, g) = (1.0f64, 0.1f64);
        let (q, p, z, l) = (1.0f64, 1.0f64, 1.0f64, 1.0f64);
        // q' = p, p' = -w^2 q - 2 g z p, z' = (w^2 q^2 - p^2)/2 - g z^2, l' = 2 g z l
        let expected = [p, -w * w * q - 2.0 * g * z * p, 0.5 * (w * w * q * q - p * p) - g * z * z, 2.0 * g * z * l];
        let m = ModelSpec::new(ModelKind::DampedHoQuadratic).build().unwrap();
        let v = contact_vector_field(&m, &ContactState::scalar(q, p, z, l)).unwrap();
        let got = [v.dq[0], v.dp[0], v.dz, v.dlambda];
        for (a, b) in got.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{got:?} vs {expected:?}");
        }
        assert!((v.dp[0] + 1.2).abs() < 1e-15);
        assert!((v.dz + 0.1).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let m = ModelSpec::new(ModelKind::CoupledOscillators).build().unwrap();
        let err = contact_vector_field(&m, &ContactState::scalar(1.0, 0.0, 1.0, 1.0));
        assert!(matches!(err, Err(ContactError::DimensionMismatch { .. })));
    }

    #[test]
    fn non_finite_partial_reported() {
        let sys = FnSystem::new(
            "log",
            1,
            |q, _, _| q[0].ln(),
            |q, _, _, out| out[0] = 1.0 / q[0],
            |_, _, _, out| out[0] = 0.0,
            |_, _, _| 0.0,
        );
        let err = contact_vector_field(&sys, &ContactState::scalar(0.0, 0.0, 0.0, 1.0));
        assert!(matches!(err, Err(ContactError::NonFinite(_))));
    }

    #[test]
    fn free_particle_lifted_field() {
        let sys = FnSystem::free_particle(1);
        let ls = LiftedState {
            q1: vec![0.0],
            p1: vec![1.0],
            q0: 0.0,
            p0: 1.0,
            t: 0.0,
        };
        let v = lifted_vector_field(&sys, &ls).unwrap();
        assert_eq!(v.dq1, vec![1.0]);
        assert_eq!(v.dp1, vec![-0.0]);
        assert_eq!(v.dq0, -0.5);
        assert_eq!(v.dp0, -0.0);
    }

    #[test]
    fn lifted_field_pushes_forward_to_contact_field() {
        let mut sampler = StateSampler::new(21);
        for kind in ModelKind::ALL {
            let m = ModelSpec::new(kind).build().unwrap();
            for _ in 0..100 {
                let s = sampler.state(kind.dof());
                let ls = s.lift().unwrap();
                let pushed = lifted_vector_field(&m, &ls).unwrap().pushforward(&ls);
                let direct = contact_vector_field(&m, &s).unwrap();
                let pairs = pushed
                    .dq
                    .iter()
                    .zip(&direct.dq)
                    .chain(pushed.dp.iter().zip(&direct.dp))
                    .chain([(&pushed.dz, &direct.dz), (&pushed.dlambda, &direct.dlambda)]);
                for (a, b) in pairs {
                    assert!(rel(*a, *b) <= 1e-10, "{kind}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn lifted_h_is_conserved() {
        let mut sampler = StateSampler::new(3);
        for kind in ModelKind::ALL {
            let m = ModelSpec::new(kind).build().unwrap();
            for _ in 0..100 {
                let ls = sampler.state(kind.dof()).lift().unwrap();
                let h = LiftedGradient::eval(&m, &ls).unwrap();
                let rate = lifted_h_rate(&m, &ls).unwrap();
                let scale = h.h.abs().max(h.h_p0.abs() * h.h_q0.abs()).max(1.0);
                assert!(rate.abs() <= 1e-12 * scale, "{kind}: {rate}");
            }
        }
    }

    #[test]
    fn k_rate_identity_model_a_initial() {
        let m = ModelSpec::new(ModelKind::DampedHoLinear).build().unwrap();
        let (lhs, rhs) = k_rate_identity(&m, &ContactState::scalar(1.0, 0.0, 1.0, 1.0)).unwrap();
        assert!((rhs + 0.04).abs() < 1e-15);
        assert!((lhs + 0.04).abs() < 1e-15);
    }

    #[test]
    fn k_rate_identity_conservative_case() {
        let sys = FnSystem::free_particle(2);
        let s = ContactState::new(vec![1.0, 2.0], vec![0.5, -0.3], 0.2, 1.0, 0.0);
        assert_eq!(k_rate_identity(&sys, &s).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn k_rate_identity_random_states() {
        let mut sampler = StateSampler::new(8);
        for kind in ModelKind::ALL {
            let m = ModelSpec::new(kind).build().unwrap();
            for _ in 0..100 {
                let s = sampler.state(kind.dof());
                let (lhs, rhs) = k_rate_identity(&m, &s).unwrap();
                assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()), "{kind}");
            }
        }
    }

    #[test]
    fn h_rate_vanishes() {
        let mut sampler = StateSampler::new(9);
        for kind in ModelKind::ALL {
            let m = ModelSpec::new(kind).build().unwrap();
            for _ in 0..100 {
                let s = sampler.state(kind.dof());
                let scale = (s.lambda * m.k_at(&s)).abs().max(1.0);
                assert!(h_rate(&m, &s).unwrap().abs() <= 1e-12 * scale * 10.0);
            }
        }
    }

    #[test]
    fn first_three_components_ignore_lambda() {
        let mut sampler = StateSampler::new(10);
        for kind in ModelKind::ALL {
            let m = ModelSpec::new(kind).build().unwrap();
            for _ in 0..50 {
                let s = sampler.state(kind.dof());
                let mut s2 = s.clone();
                s2.lambda *= 3.7;
                let (a, b) = (
                    contact_vector_field(&m, &s).unwrap(),
                    contact_vector_field(&m, &s2).unwrap(),
                );
                assert_eq!((a.dq, a.dp, a.dz.to_bits()), (b.dq, b.dp, b.dz.to_bits()));
            }
        }
    }
}
