//! Sparse multivariate polynomials over the rationals.
//!
//! Monomials pack up to [`MAX_VARS`] exponents of at most 255 into a single
//! `u128`, so monomial multiplication is one integer addition.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use crate::rational::{binomial, fmt_q, Q};

/// Index of a variable (`z0`, `z_{i,j}`, `w`, ...) inside one computation.
pub type Var = usize;

pub const MAX_VARS: usize = 16;
const BITS: u32 = 8;
const MASK: u128 = 0xff;
const HIGH_BITS: u128 = 0x8080_8080_8080_8080_8080_8080_8080_8080;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(u128);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: u32) -> Self {
        assert!(v < MAX_VARS, "variable index {v} out of range");
        assert!(e <= MASK as u32, "exponent {e} overflows packed monomial");
        Monomial((e as u128) << (BITS * v as u32))
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        exps.iter()
            .enumerate()
            .fold(Monomial::ONE, |m, (v, &e)| m * Monomial::var_pow(v, e))
    }

    #[inline]
    pub fn exp(self, v: Var) -> u32 {
        ((self.0 >> (BITS * v as u32)) & MASK) as u32
    }

    #[inline]
    pub fn without(self, v: Var) -> Self {
        Monomial(self.0 & !(MASK << (BITS * v as u32)))
    }

    pub fn degree(self) -> u32 {
        (0..MAX_VARS).map(|v| self.exp(v)).sum()
    }

    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    /// Divides by `other` when every exponent allows it.
    pub fn checked_div(self, other: Monomial) -> Option<Monomial> {
        (0..MAX_VARS)
            .all(|v| self.exp(v) >= other.exp(v))
            .then(|| Monomial(self.0 - other.0))
    }
}

impl Mul for Monomial {
    type Output = Monomial;
    #[inline]
    fn mul(self, rhs: Monomial) -> Monomial {
        // Lanes below 128 cannot carry; only check lane by lane otherwise.
        if (self.0 | rhs.0) & HIGH_BITS != 0 {
            assert!(
                (0..MAX_VARS).all(|v| self.exp(v) + rhs.exp(v) <= MASK as u32),
                "exponent overflow in packed monomial"
            );
        }
        Monomial(self.0 + rhs.0)
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..MAX_VARS)
            .filter(|&v| self.exp(v) > 0)
            .map(|v| match self.exp(v) {
                1 => format!("z{v}"),
                e => format!("z{v}^{e}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// A polynomial with exact rational coefficients. No zero coefficient is ever stored.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct SparsePoly {
    terms: FxHashMap<Monomial, Q>,
}

impl SparsePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(c, Monomial::ONE)
    }

    pub fn monomial(c: Q, m: Monomial) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Q::one(), Monomial::var(v))
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Q)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    #[inline]
    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::hash_map::Entry;
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Monomial) -> Q {
        self.terms.get(&m).cloned().unwrap_or_else(Q::zero)
    }

    /// The value when the polynomial is a constant.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Monomial::ONE).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        SparsePoly {
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, mono: Monomial) -> Self {
        SparsePoly {
            terms: self.terms.iter().map(|(m, a)| (*m * mono, a.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn min_degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(v)).min().unwrap_or(0)
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exp(v) > 0)
    }

    /// Total degree when homogeneous; `None` for inhomogeneous or zero polynomials.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|m| m.degree());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Splits `self = sum_e v^e * parts[e]` with each part free of `v`.
    pub fn split_by_var(&self, v: Var) -> Vec<SparsePoly> {
        let mut parts = vec![SparsePoly::zero(); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            parts[m.exp(v) as usize].terms.insert(m.without(v), c.clone());
        }
        parts
    }

    /// Taylor coefficients of `self` in `v` around `v = root`:
    /// `out[s] = (1/s!) d^s/dv^s self |_{v = root}` for `s < count`.
    pub fn taylor_at(&self, v: Var, root: &SparsePoly, count: usize) -> Vec<SparsePoly> {
        debug_assert!(!root.contains_var(v));
        let parts = self.split_by_var(v);
        if root.is_zero() {
            let mut out: Vec<SparsePoly> = parts.into_iter().take(count).collect();
            out.resize(count, SparsePoly::zero());
            return out;
        }
        let mut powers = vec![SparsePoly::one()];
        for i in 1..parts.len() {
            let next = &powers[i - 1] * root;
            powers.push(next);
        }
        (0..count)
            .map(|s| {
                let mut acc = SparsePoly::zero();
                for (e, part) in parts.iter().enumerate().skip(s) {
                    if part.is_zero() {
                        continue;
                    }
                    let c = Q::from_integer(binomial(e as u32, s as u32));
                    acc += &(&part.scale(&c) * &powers[e - s]);
                }
                acc
            })
            .collect()
    }

    /// Replaces `v` by `value`, which must not contain `v`.
    pub fn substitute(&self, v: Var, value: &SparsePoly) -> SparsePoly {
        self.taylor_at(v, value, 1).pop().unwrap_or_default()
    }

    /// Partial derivative in `v`.
    pub fn derivative(&self, v: Var) -> SparsePoly {
        SparsePoly::from_terms(self.terms.iter().filter(|(m, _)| m.exp(v) > 0).map(|(m, c)| {
            let e = m.exp(v);
            (m.without(v) * Monomial::var_pow(v, e - 1), c * Q::from_integer(e.into()))
        }))
    }

    /// Evaluates at a point given by one rational per variable.
    pub fn eval(&self, point: &[Q]) -> Q {
        self.terms
            .iter()
            .map(|(m, c)| {
                (0..point.len()).fold(c.clone(), |acc, v| match m.exp(v) {
                    0 => acc,
                    e => acc * num_traits::pow(point[v].clone(), e as usize),
                })
            })
            .fold(Q::zero(), |a, b| a + b)
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut exps = [u32::MAX; MAX_VARS];
        for m in self.terms.keys() {
            for (v, e) in exps.iter_mut().enumerate() {
                *e = (*e).min(m.exp(v));
            }
        }
        if self.terms.is_empty() {
            return Monomial::ONE;
        }
        Monomial::from_exponents(&exps)
    }

    pub fn div_monomial(&self, mono: Monomial) -> Option<SparsePoly> {
        let mut out = SparsePoly::zero();
        for (m, c) in &self.terms {
            out.terms.insert(m.checked_div(mono)?, c.clone());
        }
        Some(out)
    }

    pub fn sorted_terms(&self) -> Vec<(Monomial, Q)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        v.sort_by_key(|t| std::cmp::Reverse(t.0));
        v
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .sorted_terms()
            .iter()
            .map(|(m, c)| format!("({})*{:?}", fmt_q(c), m))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<'a> Add<&'a SparsePoly> for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: &'a SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> std::ops::AddAssign<&'a SparsePoly> for SparsePoly {
    fn add_assign(&mut self, rhs: &'a SparsePoly) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl<'a> Sub<&'a SparsePoly> for &SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: &'a SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        SparsePoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

impl<'a> Mul<&'a SparsePoly> for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: &'a SparsePoly) -> SparsePoly {
        let (small, large) = if self.len() <= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = SparsePoly {
            terms: FxHashMap::with_capacity_and_hasher(large.len() * small.len().min(8), Default::default()),
        };
        for (ma, ca) in &small.terms {
            for (mb, cb) in &large.terms {
                out.add_term(*ma * *mb, ca * cb);
            }
        }
        out
    }
}

impl Add for SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: SparsePoly) -> SparsePoly {
        &self + &rhs
    }
}

impl Mul for SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: SparsePoly) -> SparsePoly {
        &self * &rhs
    }
}
