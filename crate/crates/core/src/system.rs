//! Contact Hamiltonians and their partial derivatives.

use crate::state::ContactState;

/// A contact Hamiltonian `K(q, p, z)` with exact partial derivatives.
///
/// `K` never depends on `lambda`. Implementations write `K_q` and `K_p` into
/// caller-provided buffers of length [`dof`](ContactSystem::dof).
pub trait ContactSystem: Send + Sync {
    fn dof(&self) -> usize;

    fn label(&self) -> &str;

    fn k(&self, q: &[f64], p: &[f64], z: f64) -> f64;

    fn k_q(&self, q: &[f64], p: &[f64], z: f64, out: &mut [f64]);

    fn k_p(&self, q: &[f64], p: &[f64], z: f64, out: &mut [f64]);

    fn k_z(&self, q: &[f64], p: &[f64], z: f64) -> f64;

    fn k_at(&self, s: &ContactState) -> f64 {
        self.k(&s.q, &s.p, s.z)
    }
}

type ScalarFn = dyn Fn(&[f64], &[f64], f64) -> f64 + Send + Sync;
type VectorFn = dyn Fn(&[f64], &[f64], f64, &mut [f64]) + Send + Sync;

/// A [`ContactSystem`] assembled from closures.
pub struct FnSystem {
    pub label: String,
    pub n: usize,
    k: Box<ScalarFn>,
    k_q: Box<VectorFn>,
    k_p: Box<VectorFn>,
    k_z: Box<ScalarFn>,
}

impl FnSystem {
    pub fn new(
        label: impl Into<String>,
        n: usize,
        k: impl Fn(&[f64], &[f64], f64) -> f64 + Send + Sync + 'static,
        k_q: impl Fn(&[f64], &[f64], f64, &mut [f64]) + Send + Sync + 'static,
        k_p: impl Fn(&[f64], &[f64], f64, &mut [f64]) + Send + Sync + 'static,
        k_z: impl Fn(&[f64], &[f64], f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            n,
            k: Box::new(k),
            k_q: Box::new(k_q),
            k_p: Box::new(k_p),
            k_z: Box::new(k_z),
        }
    }

    /// `K = |p|^2 / 2` in `n` dimensions.
    pub fn free_particle(n: usize) -> Self {
        Self::new(
            "free particle",
            n,
            |_, p, _| 0.5 * p.iter().map(|x| x * x).sum::<f64>(),
            |_, _, _, out| out.fill(0.0),
            |_, p, _, out| out.copy_from_slice(p),
            |_, _, _| 0.0,
        )
    }
}

impl std::fmt::Debug for FnSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnSystem")
            .field("label", &self.label)
            .field("n", &self.n)
            .finish_non_exhaustive()
    }
}

impl ContactSystem for FnSystem {
    fn dof(&self) -> usize {
        self.n
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn k(&self, q: &[f64], p: &[f64], z: f64) -> f64 {
        (self.k)(q, p, z)
    }

    fn k_q(&self, q: &[f64], p: &[f64], z: f64, out: &mut [f64]) {
        (self.k_q)(q, p, z, out)
    }

    fn k_p(&self, q: &[f64], p: &[f64], z: f64, out: &mut [f64]) {
        (self.k_p)(q, p, z, out)
    }

    fn k_z(&self, q: &[f64], p: &[f64], z: f64) -> f64 {
        (self.k_z)(q, p, z)
    }
}

/// All partials of `K` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Partials {
    pub k: f64,
    pub k_q: Vec<f64>,
    pub k_p: Vec<f64>,
    pub k_z: f64,
}

impl Partials {
    pub fn eval(sys: &dyn ContactSystem, q: &[f64], p: &[f64], z: f64) -> Self {
        let n = q.len();
        let mut k_q = vec![0.0; n];
        let mut k_p = vec![0.0; n];
        sys.k_q(q, p, z, &mut k_q);
        sys.k_p(q, p, z, &mut k_p);
        Self {
            k: sys.k(q, p, z),
            k_q,
            k_p,
            k_z: sys.k_z(q, p, z),
        }
    }

    /// `sum_i p_i K_{p_i}`
    pub fn p_dot_kp(&self, p: &[f64]) -> f64 {
        p.iter().zip(&self.k_p).map(|(p, kp)| p * kp).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.k.is_finite()
            && self.k_z.is_finite()
            && self.k_q.iter().chain(&self.k_p).all(|x| x.is_finite())
    }
}

/// Central finite-difference step `cbrt(eps) * max(1, |x|)`.
pub fn fd_step(x: f64) -> f64 {
    f64::EPSILON.cbrt() * x.abs().max(1.0)
}

/// Largest relative disagreement between the supplied partials of `sys` and
/// central finite differences of `K` at `s`, using `scale = max(1, |exact|)`
/// as the denominator.
pub fn partials_fd_discrepancy(sys: &dyn ContactSystem, s: &ContactState) -> f64 {
    let exact = Partials::eval(sys, &s.q, &s.p, s.z);
    let n = s.q.len();
    let mut worst: f64 = 0.0;
    let rel = |fd: f64, ex: f64| (fd - ex).abs() / ex.abs().max(1.0);

    for i in 0..n {
        let h = fd_step(s.q[i]);
        let (mut qp, mut qm) = (s.q.clone(), s.q.clone());
        qp[i] += h;
        qm[i] -= h;
        let fd = (sys.k(&qp, &s.p, s.z) - sys.k(&qm, &s.p, s.z)) / (qp[i] - qm[i]);
        worst = worst.max(rel(fd, exact.k_q[i]));

        let h = fd_step(s.p[i]);
        let (mut pp, mut pm) = (s.p.clone(), s.p.clone());
        pp[i] += h;
        pm[i] -= h;
        let fd = (sys.k(&s.q, &pp, s.z) - sys.k(&s.q, &pm, s.z)) / (pp[i] - pm[i]);
        worst = worst.max(rel(fd, exact.k_p[i]));
    }
    let h = fd_step(s.z);
    let (zp, zm) = (s.z + h, s.z - h);
    let fd = (sys.k(&s.q, &s.p, zp) - sys.k(&s.q, &s.p, zm)) / (zp - zm);
    worst.max(rel(fd, exact.k_z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_particle_partials() {
        let sys = FnSystem::free_particle(2);
        let d = Partials::eval(&sys, &[0.3, 0.4], &[1.0, -2.0], 7.0);
        assert_eq!(d.k, 2.5);
        assert_eq!(d.k_q, vec![0.0, 0.0]);
        assert_eq!(d.k_p, vec![1.0, -2.0]);
        assert_eq!(d.k_z, 0.0);
        assert_eq!(d.p_dot_kp(&[1.0, -2.0]), 5.0);
    }

    #[test]
    fn fd_discrepancy_detects_wrong_partial() {
        let good = FnSystem::free_particle(1);
        let s = ContactState::scalar(0.2, 1.3, 0.1, 1.0);
        assert!(partials_fd_discrepancy(&good, &s) < 1e-8);

        let bad = FnSystem::new(
            "bad",
            1,
            |_, p, _| 0.5 * p[0] * p[0],
            |_, _, _, out| out.fill(0.0),
            |_, p, _, out| out[0] = 2.0 * p[0],
            |_, _, _| 0.0,
        );
        assert!(partials_fd_discrepancy(&bad, &s) > 0.4);
    }
}
