//! Homogeneous linear forms `sum c_v * z_v`, used as denominator factors and pole roots.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::{Monomial, SparsePoly, Var};
use crate::rational::{fmt_q, Q};

/// Sparse linear form, sorted by variable, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LinearForm {
    coeffs: Vec<(Var, Q)>,
}

impl LinearForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn var(v: Var) -> Self {
        Self::from_pairs([(v, Q::one())])
    }

    pub fn from_pairs<I: IntoIterator<Item = (Var, Q)>>(pairs: I) -> Self {
        let mut coeffs: Vec<(Var, Q)> = Vec::new();
        for (v, c) in pairs {
            match coeffs.iter_mut().find(|(w, _)| *w == v) {
                Some((_, a)) => *a += c,
                None => coeffs.push((v, c)),
            }
        }
        coeffs.retain(|(_, c)| !c.is_zero());
        coeffs.sort_by_key(|(v, _)| *v);
        LinearForm { coeffs }
    }

    /// Integer-coefficient shorthand: `[(v, c), ...]`.
    pub fn int(pairs: &[(Var, i64)]) -> Self {
        Self::from_pairs(pairs.iter().map(|&(v, c)| (v, Q::from_integer(BigInt::from(c)))))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, v: Var) -> Q {
        self.coeffs
            .iter()
            .find(|(w, _)| *w == v)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Q::zero)
    }

    pub fn contains(&self, v: Var) -> bool {
        self.coeffs.iter().any(|(w, _)| *w == v)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.coeffs.iter().map(|(v, _)| *v)
    }

    pub fn pairs(&self) -> &[(Var, Q)] {
        &self.coeffs
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::from_pairs(self.coeffs.iter().map(|(v, a)| (*v, a * c)))
    }

    pub fn add(&self, other: &LinearForm) -> Self {
        Self::from_pairs(self.coeffs.iter().chain(other.coeffs.iter()).cloned())
    }

    /// Replaces `v` by the linear form `value`.
    pub fn substitute(&self, v: Var, value: &LinearForm) -> Self {
        let c = self.coeff(v);
        if c.is_zero() {
            return self.clone();
        }
        let rest = Self::from_pairs(self.coeffs.iter().filter(|(w, _)| *w != v).cloned());
        rest.add(&value.scale(&c))
    }

    /// Root of `self = 0` solved for `v`, or `None` when `v` does not occur.
    pub fn solve_for(&self, v: Var) -> Option<LinearForm> {
        let c = self.coeff(v);
        if c.is_zero() {
            return None;
        }
        let rest = Self::from_pairs(self.coeffs.iter().filter(|(w, _)| *w != v).cloned());
        Some(rest.scale(&(-c.recip())))
    }

    /// Splits `self = scale * normal` where `normal` has coprime integer
    /// coefficients and a positive leading coefficient.
    pub fn normalize(&self) -> (Q, LinearForm) {
        if self.is_zero() {
            return (Q::zero(), LinearForm::zero());
        }
        let lcm_den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let gcd_num = self
            .coeffs
            .iter()
            .fold(BigInt::zero(), |acc, (_, c)| acc.gcd(&(c.numer() * (&lcm_den / c.denom()))));
        let mut scale = Q::new(gcd_num, lcm_den);
        if self.coeffs[0].1.is_negative() {
            scale = -scale;
        }
        let normal = self.scale(&scale.recip());
        (scale, normal)
    }

    pub fn to_poly(&self) -> SparsePoly {
        SparsePoly::from_terms(self.coeffs.iter().map(|(v, c)| (Monomial::var(*v), c.clone())))
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        self.coeffs.iter().map(|(v, c)| c * &point[*v]).fold(Q::zero(), |a, b| a + b)
    }
}

impl fmt::Debug for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(v, c)| {
                if c.is_one() {
                    format!("z{v}")
                } else {
                    format!("{}*z{v}", fmt_q(c))
                }
            })
            .collect();
        write!(f, "({})", parts.join(" + "))
    }
}
