//! Observables and the contact Poisson bracket.
//!
//! For observables `A(q, p, z, lambda)` and `B`,
//!
//! ```text
//! {A,B}_c = sum_i (A_qi B_pi - B_qi A_pi)
//!         + A_z (lambda B_lambda - p.B_p) - B_z (lambda A_lambda - p.A_p)
//! ```
//!
//! and any observable evolves as `dA/dt = {A,K}_c + A_z K`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{ContactError, Result};
use crate::state::{ContactState, LiftedState};
use crate::system::{fd_step, ContactSystem};

type ScalarFn = Arc<dyn Fn(&ContactState) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(&ContactState) -> Vec<f64> + Send + Sync>;

/// A scalar function of the state with its partial derivatives.
#[derive(Clone)]
pub struct Observable {
    pub name: String,
    value: ScalarFn,
    d_q: VectorFn,
    d_p: VectorFn,
    d_z: ScalarFn,
    d_lambda: ScalarFn,
    finite_difference: bool,
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable")
            .field("name", &self.name)
            .field("finite_difference", &self.finite_difference)
            .finish_non_exhaustive()
    }
}

/// Value and partials of one observable at one state.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d_q: Vec<f64>,
    pub d_p: Vec<f64>,
    pub d_z: f64,
    pub d_lambda: f64,
}

impl Jet {
    fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.d_z.is_finite()
            && self.d_lambda.is_finite()
            && self.d_q.iter().chain(&self.d_p).all(|x| x.is_finite())
    }
}

impl Observable {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(&ContactState) -> f64 + Send + Sync + 'static,
        d_q: impl Fn(&ContactState) -> Vec<f64> + Send + Sync + 'static,
        d_p: impl Fn(&ContactState) -> Vec<f64> + Send + Sync + 'static,
        d_z: impl Fn(&ContactState) -> f64 + Send + Sync + 'static,
        d_lambda: impl Fn(&ContactState) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            value: Arc::new(value),
            d_q: Arc::new(d_q),
            d_p: Arc::new(d_p),
            d_z: Arc::new(d_z),
            d_lambda: Arc::new(d_lambda),
            finite_difference: false,
        }
    }

    /// Observable whose partials are central finite differences of `value`
    /// with step `cbrt(eps) * max(1, |x|)`.
    pub fn from_value(
        name: impl Into<String>,
        value: impl Fn(&ContactState) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let value: ScalarFn = Arc::new(value);
        let (v1, v2, v3, v4) = (value.clone(), value.clone(), value.clone(), value.clone());
        Self {
            name: name.into(),
            d_q: Arc::new(move |s| fd_partials(&*v1, s, Coord::Q, 1.0)),
            d_p: Arc::new(move |s| fd_partials(&*v2, s, Coord::P, 1.0)),
            d_z: Arc::new(move |s| fd_partials(&*v3, s, Coord::Z, 1.0)[0]),
            d_lambda: Arc::new(move |s| fd_partials(&*v4, s, Coord::Lambda, 1.0)[0]),
            value,
            finite_difference: true,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(
            format!("{c}"),
            move |_| c,
            |s| vec![0.0; s.dof()],
            |s| vec![0.0; s.dof()],
            |_| 0.0,
            |_| 0.0,
        )
    }

    /// Coordinate `q_i` (zero-based index).
    pub fn q(i: usize) -> Self {
        Self::new(
            format!("q{}", i + 1),
            move |s| s.q[i],
            move |s| unit(s.dof(), i),
            |s| vec![0.0; s.dof()],
            |_| 0.0,
            |_| 0.0,
        )
    }

    /// Momentum `p_i` (zero-based index).
    pub fn p(i: usize) -> Self {
        Self::new(
            format!("p{}", i + 1),
            move |s| s.p[i],
            |s| vec![0.0; s.dof()],
            move |s| unit(s.dof(), i),
            |_| 0.0,
            |_| 0.0,
        )
    }

    pub fn z() -> Self {
        Self::new(
            "z",
            |s| s.z,
            |s| vec![0.0; s.dof()],
            |s| vec![0.0; s.dof()],
            |_| 1.0,
            |_| 0.0,
        )
    }

    pub fn lambda() -> Self {
        Self::new(
            "lambda",
            |s| s.lambda,
            |s| vec![0.0; s.dof()],
            |s| vec![0.0; s.dof()],
            |_| 0.0,
            |_| 1.0,
        )
    }

    /// `K` as an observable, with `K_lambda = 0`.
    pub fn from_system(sys: Arc<dyn ContactSystem>) -> Self {
        let (s1, s2, s3, s4) = (sys.clone(), sys.clone(), sys.clone(), sys.clone());
        Self::new(
            format!("K[{}]", sys.label()),
            move |s| s1.k_at(s),
            move |s| {
                let mut out = vec![0.0; s.dof()];
                s2.k_q(&s.q, &s.p, s.z, &mut out);
                out
            },
            move |s| {
                let mut out = vec![0.0; s.dof()];
                s3.k_p(&s.q, &s.p, s.z, &mut out);
                out
            },
            move |s| s4.k_z(&s.q, &s.p, s.z),
            |_| 0.0,
        )
    }

    /// Pointwise product with exact product-rule partials.
    pub fn product(&self, other: &Observable) -> Observable {
        let (a, b) = (self.clone(), other.clone());
        let (a1, b1, a2, b2, a3, b3, a4, b4) = (
            a.clone(),
            b.clone(),
            a.clone(),
            b.clone(),
            a.clone(),
            b.clone(),
            a.clone(),
            b.clone(),
        );
        let mut out = Self::new(
            format!("({})*({})", self.name, other.name),
            move |s| (a.value)(s) * (b.value)(s),
            move |s| combine(&(a1.d_q)(s), (b1.value)(s), &(b1.d_q)(s), (a1.value)(s)),
            move |s| combine(&(a2.d_p)(s), (b2.value)(s), &(b2.d_p)(s), (a2.value)(s)),
            move |s| (a3.d_z)(s) * (b3.value)(s) + (a3.value)(s) * (b3.d_z)(s),
            move |s| (a4.d_lambda)(s) * (b4.value)(s) + (a4.value)(s) * (b4.d_lambda)(s),
        );
        out.finite_difference = self.finite_difference || other.finite_difference;
        out
    }

    pub fn is_finite_difference(&self) -> bool {
        self.finite_difference
    }

    pub fn value(&self, s: &ContactState) -> f64 {
        (self.value)(s)
    }

    pub fn jet(&self, s: &ContactState) -> Jet {
        Jet {
            value: (self.value)(s),
            d_q: (self.d_q)(s),
            d_p: (self.d_p)(s),
            d_z: (self.d_z)(s),
            d_lambda: (self.d_lambda)(s),
        }
    }

    fn checked_jet(&self, s: &ContactState) -> Result<Jet> {
        let j = self.jet(s);
        if j.d_q.len() != s.dof() || j.d_p.len() != s.dof() {
            return Err(ContactError::DimensionMismatch {
                expected: s.dof(),
                found: j.d_q.len().min(j.d_p.len()),
            });
        }
        if !j.is_finite() {
            return Err(ContactError::NonFinite("observable partials"));
        }
        Ok(j)
    }

    /// Largest relative disagreement between central differences of the value
    /// at the standard step and at half that step, over all coordinates.
    pub fn richardson_discrepancy(&self, s: &ContactState) -> f64 {
        let f = &*self.value;
        let mut worst: f64 = 0.0;
        for coord in [Coord::Q, Coord::P, Coord::Z, Coord::Lambda] {
            let full = fd_partials(f, s, coord, 1.0);
            let half = fd_partials(f, s, coord, 0.5);
            for (a, b) in full.iter().zip(&half) {
                worst = worst.max((a - b).abs() / b.abs().max(1.0));
            }
        }
        worst
    }
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

fn combine(da: &[f64], b: f64, db: &[f64], a: f64) -> Vec<f64> {
    da.iter().zip(db).map(|(da, db)| da * b + a * db).collect()
}

#[derive(Clone, Copy)]
enum Coord {
    Q,
    P,
    Z,
    Lambda,
}

fn fd_partials(
    f: &(dyn Fn(&ContactState) -> f64 + Send + Sync),
    s: &ContactState,
    coord: Coord,
    scale: f64,
) -> Vec<f64> {
    let central = |set: &dyn Fn(&mut ContactState, f64), x: f64| {
        let h = scale * fd_step(x);
        let (mut plus, mut minus) = (s.clone(), s.clone());
        set(&mut plus, x + h);
        set(&mut minus, x - h);
        (f(&plus) - f(&minus)) / (2.0 * h)
    };
    match coord {
        Coord::Q => (0..s.dof())
            .map(|i| central(&|st, v| st.q[i] = v, s.q[i]))
            .collect(),
        Coord::P => (0..s.dof())
            .map(|i| central(&|st, v| st.p[i] = v, s.p[i]))
            .collect(),
        Coord::Z => vec![central(&|st, v| st.z = v, s.z)],
        Coord::Lambda => vec![central(&|st, v| st.lambda = v, s.lambda)],
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn contact_bracket(a: &Observable, b: &Observable, s: &ContactState) -> Result<f64> {
    s.validate()?;
    let ja = a.checked_jet(s)?;
    let jb = b.checked_jet(s)?;
    Ok(bracket_of_jets(&ja, &jb, s))
}

fn bracket_of_jets(a: &Jet, b: &Jet, s: &ContactState) -> f64 {
    let canonical = dot(&a.d_q, &b.d_p) - dot(&b.d_q, &a.d_p);
    let euler_b = s.lambda * b.d_lambda - dot(&s.p, &b.d_p);
    let euler_a = s.lambda * a.d_lambda - dot(&s.p, &a.d_p);
    canonical + (a.d_z * euler_b - b.d_z * euler_a)
}

/// `dA/dt = {A, K}_c + A_z K` along the flow of `sys`.
pub fn observable_rate(a: &Observable, sys: &dyn ContactSystem, s: &ContactState) -> Result<f64> {
    s.validate()?;
    if sys.dof() != s.dof() {
        return Err(ContactError::DimensionMismatch {
            expected: sys.dof(),
            found: s.dof(),
        });
    }
    let ja = a.checked_jet(s)?;
    let n = s.dof();
    let (mut k_q, mut k_p) = (vec![0.0; n], vec![0.0; n]);
    sys.k_q(&s.q, &s.p, s.z, &mut k_q);
    sys.k_p(&s.q, &s.p, s.z, &mut k_p);
    let jk = Jet {
        value: sys.k_at(s),
        d_q: k_q,
        d_p: k_p,
        d_z: sys.k_z(&s.q, &s.p, s.z),
        d_lambda: 0.0,
    };
    if !jk.is_finite() {
        return Err(ContactError::NonFinite("partials of K"));
    }
    let rate = bracket_of_jets(&ja, &jk, s) + ja.d_z * jk.value;
    if !rate.is_finite() {
        return Err(ContactError::NonFinite("observable rate"));
    }
    Ok(rate)
}

/// Canonical Poisson bracket in lifted coordinates `(q1, p1, q0, p0)` of the
/// pulled-back observables `A~(q1, p1, q0, p0) = A(q1, p1/p0, q0, p0)`.
///
/// The contact bracket equals `p0` times this value.
pub fn lifted_canonical_bracket(a: &Observable, b: &Observable, ls: &LiftedState) -> Result<f64> {
    let s = ls.unlift()?;
    let pull = |j: &Jet| {
        let lambda = ls.p0;
        // dA~/dq1 = A_q, dA~/dp1 = A_p / p0, dA~/dq0 = A_z,
        // dA~/dp0 = A_lambda - sum_i A_pi p1_i / p0^2
        let d_p1: Vec<f64> = j.d_p.iter().map(|x| x / lambda).collect();
        let d_p0 = j.d_lambda - dot(&j.d_p, &ls.p1) / (lambda * lambda);
        (j.d_q.clone(), d_p1, j.d_z, d_p0)
    };
    let (aq1, ap1, aq0, ap0) = pull(&a.checked_jet(&s)?);
    let (bq1, bp1, bq0, bp0) = pull(&b.checked_jet(&s)?);
    Ok(dot(&aq1, &bp1) - dot(&bq1, &ap1) + aq0 * bp0 - bq0 * ap0)
}

/// One monomial `c * prod q_i^a_i p_i^b_i * z^c * lambda^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub q_pow: Vec<u32>,
    pub p_pow: Vec<u32>,
    pub z_pow: u32,
    pub lambda_pow: u32,
}

/// Polynomial observable with exact partials.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub n: usize,
    pub terms: Vec<Monomial>,
}

fn powi(x: f64, k: u32) -> f64 {
    x.powi(k as i32)
}

impl Monomial {
    fn eval(&self, s: &ContactState) -> f64 {
        let mut v = self.coef * powi(s.z, self.z_pow) * powi(s.lambda, self.lambda_pow);
        for i in 0..s.dof() {
            v *= powi(s.q[i], self.q_pow[i]) * powi(s.p[i], self.p_pow[i]);
        }
        v
    }

    /// Derivative with respect to one variable, as another monomial.
    fn derive(&self, var: Var) -> Monomial {
        let mut m = self.clone();
        let pow = match var {
            Var::Q(i) => &mut m.q_pow[i],
            Var::P(i) => &mut m.p_pow[i],
            Var::Z => &mut m.z_pow,
            Var::Lambda => &mut m.lambda_pow,
        };
        if *pow == 0 {
            m.coef = 0.0;
        } else {
            m.coef *= *pow as f64;
            *pow -= 1;
        }
        m
    }
}

#[derive(Clone, Copy)]
enum Var {
    Q(usize),
    P(usize),
    Z,
    Lambda,
}

impl Polynomial {
    pub fn eval(&self, s: &ContactState) -> f64 {
        self.terms.iter().map(|m| m.eval(s)).sum()
    }

    fn eval_derivative(&self, var: Var, s: &ContactState) -> f64 {
        self.terms.iter().map(|m| m.derive(var).eval(s)).sum()
    }

    pub fn product(&self, other: &Polynomial) -> Polynomial {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(Monomial {
                    coef: a.coef * b.coef,
                    q_pow: a.q_pow.iter().zip(&b.q_pow).map(|(x, y)| x + y).collect(),
                    p_pow: a.p_pow.iter().zip(&b.p_pow).map(|(x, y)| x + y).collect(),
                    z_pow: a.z_pow + b.z_pow,
                    lambda_pow: a.lambda_pow + b.lambda_pow,
                });
            }
        }
        Polynomial { n: self.n, terms }
    }

    /// Random polynomial in `n` degrees of freedom with coefficients in
    /// `[-1, 1]` and per-variable degree at most `max_pow`.
    pub fn random<R: Rng>(rng: &mut R, n: usize, n_terms: usize, max_pow: u32) -> Self {
        let terms = (0..n_terms)
            .map(|_| Monomial {
                coef: rng.gen_range(-1.0..1.0),
                q_pow: (0..n).map(|_| rng.gen_range(0..=max_pow)).collect(),
                p_pow: (0..n).map(|_| rng.gen_range(0..=max_pow)).collect(),
                z_pow: rng.gen_range(0..=max_pow),
                lambda_pow: rng.gen_range(0..=max_pow),
            })
            .collect();
        Polynomial { n, terms }
    }

    pub fn to_observable(&self, name: impl Into<String>) -> Observable {
        let n = self.n;
        let p = Arc::new(self.clone());
        let (p1, p2, p3, p4, p5) = (p.clone(), p.clone(), p.clone(), p.clone(), p);
        Observable::new(
            name,
            move |s| p1.eval(s),
            move |s| (0..n).map(|i| p2.eval_derivative(Var::Q(i), s)).collect(),
            move |s| (0..n).map(|i| p3.eval_derivative(Var::P(i), s)).collect(),
            move |s| p4.eval_derivative(Var::Z, s),
            move |s| p5.eval_derivative(Var::Lambda, s),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::contact_vector_field;
    use crate::models::{ModelKind, ModelSpec};
    use crate::sampling::StateSampler;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn fundamental_brackets() {
        let mut sampler = StateSampler::new(1);
        for _ in 0..20 {
            let s = sampler.state(1);
            assert_eq!(contact_bracket(&Observable::q(0), &Observable::p(0), &s).unwrap(), 1.0);
        }
        let s = ContactState::scalar(0.3, 0.7, -0.2, 2.0);
        assert_eq!(contact_bracket(&Observable::z(), &Observable::lambda(), &s).unwrap(), 2.0);
        let s = ContactState::scalar(0.3, 3.0, -0.2, 1.5);
        assert_eq!(contact_bracket(&Observable::z(), &Observable::p(0), &s).unwrap(), -3.0);
    }

    #[test]
    fn self_bracket_vanishes() {
        let mut sampler = StateSampler::new(2);
        for _ in 0..50 {
            let a = Polynomial::random(sampler.rng(), 2, 4, 2).to_observable("A");
            let s = sampler.state(2);
            assert_eq!(contact_bracket(&a, &a, &s).unwrap(), 0.0);
        }
    }

    #[test]
    fn lambda_rate_model_a() {
        let m = ModelSpec::new(ModelKind::DampedHoLinear).build().unwrap();
        let s = ContactState::scalar(1.0, 0.0, 1.0, 1.0);
        let r = observable_rate(&Observable::lambda(), &m, &s).unwrap();
        assert!((r - 0.1).abs() < 1e-15);
        assert_eq!(r, contact_vector_field(&m, &s).unwrap().dlambda);
    }

    #[test]
    fn constant_rate_is_zero() {
        let m = ModelSpec::new(ModelKind::DampedDoubleWell).build().unwrap();
        let s = ContactState::scalar(0.4, -1.0, 0.3, 2.0);
        assert_eq!(observable_rate(&Observable::constant(5.0), &m, &s).unwrap(), 0.0);
    }

    #[test]
    fn coordinate_rates_reproduce_field() {
        let mut sampler = StateSampler::new(4);
        for kind in ModelKind::ALL {
            let m = ModelSpec::new(kind).build().unwrap();
            let n = kind.dof();
            for _ in 0..50 {
                let s = sampler.state(n);
                let v = contact_vector_field(&m, &s).unwrap();
                for i in 0..n {
                    let dq = observable_rate(&Observable::q(i), &m, &s).unwrap();
                    let dp = observable_rate(&Observable::p(i), &m, &s).unwrap();
                    assert!(rel(dq, v.dq[i]) <= 1e-12);
                    assert!(rel(dp, v.dp[i]) <= 1e-12);
                }
                assert!(rel(observable_rate(&Observable::z(), &m, &s).unwrap(), v.dz) <= 1e-12);
                assert!(
                    rel(observable_rate(&Observable::lambda(), &m, &s).unwrap(), v.dlambda) <= 1e-12
                );
            }
        }
    }

    #[test]
    fn k_observable_has_no_lambda_partial() {
        let m: Arc<dyn ContactSystem> = Arc::new(ModelSpec::new(ModelKind::DampedHoQuadratic).build().unwrap());
        let k = Observable::from_system(m);
        let j = k.jet(&ContactState::scalar(1.0, 1.0, 1.0, 3.0));
        assert_eq!(j.d_lambda, 0.0);
        assert!((j.d_z + 0.2).abs() < 1e-15);
    }

    #[test]
    fn bracket_is_antisymmetric_and_leibniz() {
        let mut sampler = StateSampler::new(6);
        for _ in 0..100 {
            let n = 1 + (sampler.rng().gen::<u8>() % 2) as usize;
            let pa = Polynomial::random(sampler.rng(), n, 3, 2);
            let pb = Polynomial::random(sampler.rng(), n, 3, 2);
            let pc = Polynomial::random(sampler.rng(), n, 3, 2);
            let (a, b, c) = (pa.to_observable("A"), pb.to_observable("B"), pc.to_observable("C"));
            let bc = pb.product(&pc).to_observable("BC");
            let s = sampler.state(n);

            let ab = contact_bracket(&a, &b, &s).unwrap();
            let ba = contact_bracket(&b, &a, &s).unwrap();
            assert!(rel(ab, -ba) <= 1e-12);

            let lhs = contact_bracket(&a, &bc, &s).unwrap();
            let rhs = ab * c.value(&s) + b.value(&s) * contact_bracket(&a, &c, &s).unwrap();
            assert!(rel(lhs, rhs) <= 1e-10, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn product_observable_matches_polynomial_product() {
        let mut sampler = StateSampler::new(12);
        let pa = Polynomial::random(sampler.rng(), 2, 3, 2);
        let pb = Polynomial::random(sampler.rng(), 2, 3, 2);
        let via_product = pa.to_observable("A").product(&pb.to_observable("B"));
        let via_poly = pa.product(&pb).to_observable("AB");
        let s = sampler.state(2);
        let (x, y) = (via_product.jet(&s), via_poly.jet(&s));
        assert!(rel(x.value, y.value) < 1e-13);
        assert!(rel(x.d_z, y.d_z) < 1e-12);
        assert!(rel(x.d_lambda, y.d_lambda) < 1e-12);
        for (u, v) in x.d_q.iter().zip(&y.d_q).chain(x.d_p.iter().zip(&y.d_p)) {
            assert!(rel(*u, *v) < 1e-12);
        }
    }

    #[test]
    fn contact_bracket_is_lambda_times_lifted_bracket() {
        let mut sampler = StateSampler::new(13);
        for _ in 0..100 {
            let a = Polynomial::random(sampler.rng(), 2, 3, 2).to_observable("A");
            let b = Polynomial::random(sampler.rng(), 2, 3, 2).to_observable("B");
            let s = sampler.state(2);
            let ls = s.lift().unwrap();
            let contact = contact_bracket(&a, &b, &s).unwrap();
            let lifted = lifted_canonical_bracket(&a, &b, &ls).unwrap();
            assert!(rel(contact, s.lambda * lifted) <= 1e-10, "{contact} vs {lifted}");
        }
    }

    #[test]
    fn finite_difference_observable_close_to_exact() {
        let mut sampler = StateSampler::new(14);
        let poly = Polynomial::random(sampler.rng(), 1, 4, 2);
        let exact = poly.to_observable("exact");
        let p2 = poly.clone();
        let fd = Observable::from_value("fd", move |s| p2.eval(s));
        assert!(fd.is_finite_difference());
        assert!(!exact.is_finite_difference());
        for _ in 0..50 {
            let s = sampler.state(1);
            assert!(fd.richardson_discrepancy(&s) <= 1e-4);
            let (a, b) = (fd.jet(&s), exact.jet(&s));
            assert!(rel(a.d_z, b.d_z) < 1e-6);
            assert!(rel(a.d_lambda, b.d_lambda) < 1e-6);
            assert!(rel(a.d_q[0], b.d_q[0]) < 1e-6);
            assert!(rel(a.d_p[0], b.d_p[0]) < 1e-6);
        }
    }

    #[test]
    fn richardson_flags_nonsmooth_value() {
        let kinked = Observable::from_value("kink", |s| (s.q[0] * 1e6).sin());
        let s = ContactState::scalar(0.3, 0.0, 0.0, 1.0);
        assert!(kinked.richardson_discrepancy(&s) > 1e-4);
    }

    #[test]
    fn non_finite_observable_rejected() {
        let bad = Observable::from_value("bad", |s| 1.0 / (s.q[0] - s.q[0]));
        let s = ContactState::scalar(0.3, 0.0, 0.0, 1.0);
        assert!(contact_bracket(&bad, &Observable::p(0), &s).is_err());
    }
}
