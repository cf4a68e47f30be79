//! Exact arithmetic for the counting bounds: the missing-color bound
//! `2p − 4q`, the iterated bound `μᵢ`, and the ratio thresholds derived
//! from small systems of linear inequalities.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fracsolve::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundParams {
    p: u64,
    q: u64,
}

impl BoundParams {
    /// Requires `q > 0` and `2q ≤ p ≤ 5q/2`.
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if q == 0 || p < 2 * q || 2 * p > 5 * q {
            return Err(Error::BoundParams { p, q });
        }
        Ok(BoundParams { p, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    fn pq(&self) -> (BigInt, BigInt) {
        (BigInt::from(self.p), BigInt::from(self.q))
    }
}

pub fn m_upper_bound(bp: BoundParams) -> i64 {
    2 * bp.p as i64 - 4 * bp.q as i64
}

/// Closed form `21ⁱ(41p − 83q)/20 − (p − 3q)/20`.
pub fn mu_bound(bp: BoundParams, i: u32) -> Rational {
    let (p, q) = bp.pq();
    let lead = num::pow(BigInt::from(21), i as usize) * (BigInt::from(41) * &p - BigInt::from(83) * &q);
    Rational::new(lead - (&p - BigInt::from(3) * &q), BigInt::from(20))
}

/// `μ₀ = 2p − 4q`, `μ_{i+1} = p − 3q + 21μᵢ`.
pub fn mu_recurrence(bp: BoundParams, i: u32) -> BigInt {
    let (p, q) = bp.pq();
    let step = &p - BigInt::from(3) * &q;
    let mut mu = BigInt::from(2) * &p - BigInt::from(4) * &q;
    for _ in 0..i {
        mu = &step + BigInt::from(21) * mu;
    }
    mu
}

/// Least `i` with `μᵢ < 0`, or `None` when the bound never turns negative,
/// which happens exactly when `41p ≥ 83q`.
pub fn first_infeasible_index(bp: BoundParams) -> Option<u32> {
    let (p, q) = bp.pq();
    if BigInt::from(41) * &p >= BigInt::from(83) * &q {
        return None;
    }
    // 41p − 83q ≤ −1, so the closed form drops below zero once
    // 21ⁱ > |p − 3q| + 1; the loop is short.
    let step = &p - BigInt::from(3) * &q;
    let mut mu = BigInt::from(2) * &p - BigInt::from(4) * &q;
    let mut i = 0;
    while !mu.is_negative() {
        mu = &step + BigInt::from(21) * mu;
        i += 1;
    }
    Some(i)
}

/// A linear form over named variables plus a constant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearForm {
    coeffs: BTreeMap<&'static str, Rational>,
    constant: Rational,
}

impl LinearForm {
    pub fn var(name: &'static str) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name, Rational::one());
        LinearForm {
            coeffs,
            constant: Rational::zero(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        LinearForm {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn coeff(&self, name: &str) -> Rational {
        self.coeffs.get(name).cloned().unwrap_or_else(Rational::zero)
    }

    fn tidy(mut self) -> Self {
        self.coeffs.retain(|_, c| !c.is_zero());
        self
    }

    pub fn eval(&self, values: &BTreeMap<&str, Rational>) -> Rational {
        self.coeffs
            .iter()
            .map(|(v, c)| c * values.get(v).unwrap_or_else(|| panic!("no value for {v}")))
            .fold(self.constant.clone(), |a, b| a + b)
    }

    /// Replaces `name` by `value`.
    pub fn substitute(&self, name: &str, value: &LinearForm) -> LinearForm {
        let c = self.coeff(name);
        let mut out = self.clone();
        out.coeffs.remove(name);
        out + value.clone() * c
    }
}

impl Add for LinearForm {
    type Output = LinearForm;
    fn add(mut self, rhs: LinearForm) -> LinearForm {
        for (v, c) in rhs.coeffs {
            *self.coeffs.entry(v).or_insert_with(Rational::zero) += c;
        }
        self.constant += rhs.constant;
        self.tidy()
    }
}

impl Neg for LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        self * -Rational::one()
    }
}

impl Sub for LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: LinearForm) -> LinearForm {
        self + -rhs
    }
}

impl Mul<Rational> for LinearForm {
    type Output = LinearForm;
    fn mul(mut self, k: Rational) -> LinearForm {
        for c in self.coeffs.values_mut() {
            *c *= &k;
        }
        self.constant *= k;
        self.tidy()
    }
}

impl Mul<LinearForm> for i64 {
    type Output = LinearForm;
    fn mul(self, f: LinearForm) -> LinearForm {
        f * Rational::from_integer(self.into())
    }
}

fn v(name: &'static str) -> LinearForm {
    LinearForm::var(name)
}

fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Fourier–Motzkin elimination of `name` from a system of `f ≥ 0` forms.
pub fn eliminate(system: &[LinearForm], name: &str) -> Vec<LinearForm> {
    let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
    for f in system {
        let c = f.coeff(name);
        if c.is_positive() {
            pos.push(f.clone() * c.recip());
        } else if c.is_negative() {
            neg.push(f.clone() * (-c).recip());
        } else {
            rest.push(f.clone());
        }
    }
    for a in &pos {
        for b in &neg {
            rest.push(a.clone() + b.clone());
        }
    }
    rest
}

/// Smallest `p/q` allowed by a homogeneous system in `p`, `q` and the
/// listed auxiliary variables (all constraints `f ≥ 0`).
pub fn ratio_threshold(system: &[LinearForm], aux: &[&str]) -> Rational {
    let one = LinearForm::constant(Rational::one());
    let mut sys: Vec<LinearForm> = system.iter().map(|f| f.substitute("q", &one)).collect();
    for name in aux {
        sys = eliminate(&sys, name);
    }
    sys.iter()
        .filter_map(|f| {
            let c = f.coeff("p");
            assert!(f.coeffs.keys().all(|&k| k == "p"), "unexpected variable left in {f:?}");
            c.is_positive().then(|| -f.constant.clone() / c)
        })
        .max()
        .expect("system bounds p/q from below")
}

/// Missing colors `m` on a negative outer face: `m ≤ 2p − 4q` for one
/// gadget, and `m ≤ p − 3q + 21m` when the face is built from gadgets.
pub fn system_83_41() -> Vec<LinearForm> {
    let (p, q, m) = (v("p"), v("q"), v("m"));
    vec![
        2 * p.clone() - 4 * q.clone() - m.clone(),
        p - 3 * q + 21 * m.clone() - m.clone(),
        m,
    ]
}

/// `c` colors shared by some pair of the main K4: at most `7(2p − 4q)`
/// and at least `(4q − p)/6`.
pub fn system_172_85() -> Vec<LinearForm> {
    let (p, q, c) = (v("p"), v("q"), v("c"));
    vec![
        7 * (2 * p.clone() - 4 * q.clone()) - c.clone(),
        c - (4 * q - p) * frac(1, 6),
    ]
}

/// The two counting inequalities for forest colorings of the arboricity
/// gadget, in terms of `a` (colors shared by `u` and each of `z, t, x1`)
/// and `a_uv` (colors shared by `u` and `v`).
pub fn forest_counting_forms() -> [LinearForm; 2] {
    let (p, q, a, auv) = (v("p"), v("q"), v("a"), v("a_uv"));
    let first = 2 * a.clone()
        + 4 * (q.clone() - a.clone())
        + 4 * (q.clone() - a.clone())
        + 5 * (p.clone() - 2 * q.clone() + a.clone())
        - 8 * q.clone();
    let second = 2 * auv.clone()
        + 4 * (a.clone() * frac(3, 2))
        + 3 * (q.clone() - auv.clone() - a * frac(3, 2))
        + 4 * (q.clone() - auv.clone())
        + 5 * (p - 2 * q.clone() + auv)
        - 8 * q;
    [first, second]
}

pub fn threshold_83_41() -> Rational {
    ratio_threshold(&system_83_41(), &["m"])
}

pub fn threshold_172_85() -> Rational {
    ratio_threshold(&system_172_85(), &["c"])
}

pub fn threshold_52_25() -> Rational {
    ratio_threshold(&forest_counting_forms(), &["a_uv", "a"])
}

/// Both forest counting inequalities at the given integers.
pub fn arboricity_counting_check(p: u64, q: u64, a: u64, a_uv: u64) -> bool {
    let values: BTreeMap<&str, Rational> = [("p", p), ("q", q), ("a", a), ("a_uv", a_uv)]
        .into_iter()
        .map(|(k, x)| (k, Rational::from_integer(x.into())))
        .collect();
    forest_counting_forms()
        .iter()
        .all(|f| !f.eval(&values).is_negative())
}
