//! Phase-space data model.
//!
//! A [`ContactState`] is a point `(q, p, z, lambda)` at time `t`, where `q` and
//! `p` have `n` components, `z` is the contact variable and `lambda > 0` is the
//! integration factor. The [`LiftedState`] is the same point in the
//! even-dimensional symplectic coordinates `(q1, p1, q0, p0) = (q, lambda p, z, lambda)`.

use crate::error::{ContactError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ContactState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub z: f64,
    pub lambda: f64,
    pub t: f64,
}

impl ContactState {
    pub fn new(q: Vec<f64>, p: Vec<f64>, z: f64, lambda: f64, t: f64) -> Self {
        Self { q, p, z, lambda, t }
    }

    /// One degree of freedom at `t = 0`.
    pub fn scalar(q: f64, p: f64, z: f64, lambda: f64) -> Self {
        Self::new(vec![q], vec![p], z, lambda, 0.0)
    }

    pub fn dof(&self) -> usize {
        self.q.len()
    }

    /// Checks that `|q| = |p| >= 1`, every field is finite and `lambda > 0`.
    pub fn validate(&self) -> Result<()> {
        if self.q.len() != self.p.len() {
            return Err(ContactError::DimensionMismatch {
                expected: self.q.len(),
                found: self.p.len(),
            });
        }
        if self.q.is_empty() {
            return Err(ContactError::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        let finite = self.q.iter().chain(&self.p).all(|x| x.is_finite())
            && self.z.is_finite()
            && self.lambda.is_finite()
            && self.t.is_finite();
        if !finite {
            return Err(ContactError::NonFinite("state"));
        }
        if self.lambda <= 0.0 {
            return Err(ContactError::NonPositiveLambda(self.lambda));
        }
        Ok(())
    }

    /// Canonical lift `p1 = lambda p`, `q1 = q`, `p0 = lambda`, `q0 = z`.
    pub fn lift(&self) -> Result<LiftedState> {
        self.validate()?;
        Ok(LiftedState {
            q1: self.q.clone(),
            p1: self.p.iter().map(|p| self.lambda * p).collect(),
            q0: self.z,
            p0: self.lambda,
            t: self.t,
        })
    }

    /// Discrete time inversion `(q, p, z, lambda, t) -> (q, -p, -z, lambda, -t)`,
    /// applied componentwise for `n > 1`.
    pub fn time_inversion(&self) -> Result<ContactState> {
        self.validate()?;
        Ok(ContactState {
            q: self.q.clone(),
            p: self.p.iter().map(|p| -p).collect(),
            z: -self.z,
            lambda: self.lambda,
            t: -self.t,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftedState {
    pub q1: Vec<f64>,
    pub p1: Vec<f64>,
    pub q0: f64,
    pub p0: f64,
    pub t: f64,
}

impl LiftedState {
    pub fn unlift(&self) -> Result<ContactState> {
        if !(self.p0 > 0.0) {
            return Err(ContactError::NonPositiveLambda(self.p0));
        }
        if self.q1.len() != self.p1.len() {
            return Err(ContactError::DimensionMismatch {
                expected: self.q1.len(),
                found: self.p1.len(),
            });
        }
        let state = ContactState {
            q: self.q1.clone(),
            p: self.p1.iter().map(|p1| p1 / self.p0).collect(),
            z: self.q0,
            lambda: self.p0,
            t: self.t,
        };
        state.validate()?;
        Ok(state)
    }

    /// Time inversion induced on lifted coordinates: `p1 -> -p1`, `q0 -> -q0`.
    pub fn time_inversion(&self) -> LiftedState {
        LiftedState {
            q1: self.q1.clone(),
            p1: self.p1.iter().map(|p| -p).collect(),
            q0: -self.q0,
            p0: self.p0,
            t: -self.t,
        }
    }
}
