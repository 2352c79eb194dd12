//! Rational expressions with a factored denominator of linear forms, and
//! residue extraction at linear poles.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linear::LinearForm;
use crate::poly::{Monomial, SparsePoly, Var};
use crate::rational::{binomial, q_pow, Q};

/// `num / prod(factor^mult)`. Factors are normalized linear forms (primitive
/// integer coefficients, positive leading coefficient), sorted and distinct.
/// The denominator is never expanded.
#[derive(Clone, PartialEq, Eq)]
pub struct RatExpr {
    num: SparsePoly,
    den: Vec<(LinearForm, u32)>,
}

impl RatExpr {
    pub fn zero() -> Self {
        RatExpr { num: SparsePoly::zero(), den: Vec::new() }
    }

    pub fn from_poly(num: SparsePoly) -> Self {
        RatExpr { num, den: Vec::new() }
    }

    /// Builds `num / prod(factor^mult)`, normalizing every factor.
    pub fn new(num: SparsePoly, factors: Vec<(LinearForm, u32)>) -> Result<Self> {
        let mut scale = Q::one();
        let mut den: Vec<(LinearForm, u32)> = Vec::with_capacity(factors.len());
        for (f, e) in factors {
            if e == 0 {
                continue;
            }
            if f.is_zero() {
                return Err(Error::PoleOnPole(format!("{f:?}")));
            }
            let (s, n) = f.normalize();
            scale *= q_pow(&s, e as i32);
            push_factor(&mut den, n, e);
        }
        let mut out = RatExpr { num: num.scale(&scale.recip()), den };
        out.tidy();
        Ok(out)
    }

    pub fn numerator(&self) -> &SparsePoly {
        &self.num
    }

    pub fn denominator(&self) -> &[(LinearForm, u32)] {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The value when no variable is left.
    pub fn as_constant(&self) -> Option<Q> {
        if self.num.is_zero() {
            return Some(Q::zero());
        }
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.num.contains_var(v) || self.den.iter().any(|(f, _)| f.contains(v))
    }

    /// Total degree (numerator minus denominator) when homogeneous.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let nd = self.num.homogeneous_degree()? as i64;
        Some(nd - self.den.iter().map(|(_, e)| *e as i64).sum::<i64>())
    }

    pub fn scale(&self, c: &Q) -> Self {
        RatExpr { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &SparsePoly) -> Self {
        let mut out = RatExpr { num: &self.num * p, den: self.den.clone() };
        out.tidy();
        out
    }

    pub fn mul(&self, other: &RatExpr) -> Self {
        let mut den = self.den.clone();
        for (f, e) in &other.den {
            push_factor(&mut den, f.clone(), *e);
        }
        let mut out = RatExpr { num: &self.num * &other.num, den };
        out.tidy();
        out
    }

    /// Value at a point where no denominator factor vanishes.
    pub fn eval(&self, point: &[Q]) -> Option<Q> {
        let mut d = Q::one();
        for (f, e) in &self.den {
            let v = f.eval(point);
            if v.is_zero() {
                return None;
            }
            d *= q_pow(&v, *e as i32);
        }
        Some(self.num.eval(point) / d)
    }

    /// Eliminates `v` by the substitution `v = value`.
    pub fn substitute(&self, v: Var, value: &LinearForm) -> Result<RatExpr> {
        if value.contains(v) {
            return Err(Error::RootContainsVariable(v));
        }
        let num = self.num.substitute(v, &value.to_poly());
        let factors = self
            .den
            .iter()
            .map(|(f, e)| {
                let g = f.substitute(v, value);
                if g.is_zero() {
                    Err(Error::PoleOnPole(format!("{f:?} at z{v} = {value:?}")))
                } else {
                    Ok((g, *e))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        RatExpr::new(num, factors)
    }

    /// Residue in `v` at `v = root`.
    ///
    /// The pole order `m` is the total multiplicity of the factors that vanish
    /// at the root; the result is `1/(m-1)! d^{m-1}/dv^{m-1} [(v-root)^m f]`
    /// at `v = root`, computed as the `eps^{m-1}` coefficient of the Laurent
    /// expansion in `v = root + eps`. Returns zero when there is no pole.
    pub fn residue(&self, v: Var, root: &LinearForm) -> Result<RatExpr> {
        if root.contains(v) {
            return Err(Error::RootContainsVariable(v));
        }
        let mut order: u32 = 0;
        let mut pole_scale = Q::one();
        let mut kept: Vec<(LinearForm, u32)> = Vec::new();
        // (normalized shifted form, -a/mu, multiplicity)
        let mut expanded: Vec<(LinearForm, Q, u32)> = Vec::new();
        let mut scale = Q::one();
        for (f, e) in &self.den {
            let a = f.coeff(v);
            if a.is_zero() {
                kept.push((f.clone(), *e));
                continue;
            }
            let shifted = f.substitute(v, root);
            if shifted.is_zero() {
                order += e;
                pole_scale *= q_pow(&a, *e as i32);
            } else {
                let (mu, n) = shifted.normalize();
                scale *= q_pow(&mu, -(*e as i32));
                expanded.push((n, -(&a / &mu), *e));
            }
        }
        if order == 0 || self.num.is_zero() {
            return Ok(RatExpr::zero());
        }
        let m = order as usize;
        let taylor = self.num.taylor_at(v, &root.to_poly(), m);

        // h[t] = eps^t coefficient of prod_j sum_t C(e+t-1,t) (-a/mu)^t N^{m-1-t} eps^t
        let mut h: Vec<SparsePoly> = vec![SparsePoly::zero(); m];
        h[0] = SparsePoly::one();
        for (n, ratio, e) in &expanded {
            if m == 1 {
                break;
            }
            let npoly = n.to_poly();
            let mut npow = vec![SparsePoly::one()];
            for i in 1..m {
                let next = &npow[i - 1] * &npoly;
                npow.push(next);
            }
            let g: Vec<SparsePoly> = (0..m)
                .map(|t| {
                    let c = Q::from_integer(binomial(e + t as u32 - 1, t as u32)) * q_pow(ratio, t as i32);
                    npow[m - 1 - t].scale(&c)
                })
                .collect();
            let mut next = vec![SparsePoly::zero(); m];
            for (u, hu) in h.iter().enumerate() {
                if hu.is_zero() {
                    continue;
                }
                for (t, gt) in g.iter().enumerate().take(m - u) {
                    next[u + t] += &(hu * gt);
                }
            }
            h = next;
        }

        let mut num = SparsePoly::zero();
        for (s, ps) in taylor.iter().enumerate() {
            if ps.is_zero() {
                continue;
            }
            let hs = &h[m - 1 - s];
            if hs.is_zero() {
                continue;
            }
            num += &(ps * hs);
        }
        let num = num.scale(&(scale / pole_scale));
        let mut den = kept;
        for (n, _, e) in expanded {
            push_factor(&mut den, n, e + order - 1);
        }
        let mut out = RatExpr { num, den };
        out.tidy();
        Ok(out)
    }

    /// Cancels monomial factors shared by the numerator and single-variable
    /// denominator factors, and drops everything when the numerator is zero.
    fn tidy(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let content = self.num.monomial_content();
        if content.is_one() {
            return;
        }
        let mut cancel = Monomial::ONE;
        for (f, e) in self.den.iter_mut() {
            let pairs = f.pairs();
            if pairs.len() == 1 && pairs[0].1.is_one() {
                let v = pairs[0].0;
                let c = content.exp(v).min(*e);
                if c > 0 {
                    *e -= c;
                    cancel = cancel * Monomial::var_pow(v, c);
                }
            }
        }
        if !cancel.is_one() {
            self.num = self.num.div_monomial(cancel).expect("monomial content divides numerator");
            self.den.retain(|(_, e)| *e > 0);
        }
    }
}

fn push_factor(den: &mut Vec<(LinearForm, u32)>, f: LinearForm, e: u32) {
    match den.binary_search_by(|(g, _)| g.cmp(&f)) {
        Ok(i) => den[i].1 += e,
        Err(i) => den.insert(i, (f, e)),
    }
}

impl fmt::Debug for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}]", self.num)?;
        for (g, e) in &self.den {
            write!(f, " / {g:?}^{e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q_frac, q_int};
    use proptest::prelude::*;

    fn z(v: Var) -> LinearForm {
        LinearForm::var(v)
    }

    fn residue_all(mut f: RatExpr, vars: &[Var]) -> Q {
        for &v in vars {
            f = f.residue(v, &LinearForm::zero()).unwrap();
        }
        f.as_constant().unwrap()
    }

    #[test]
    fn simple_pole_at_zero() {
        let f = RatExpr::new(SparsePoly::one(), vec![(z(0), 1)]).unwrap();
        assert_eq!(residue_all(f, &[0]), q_int(1));
    }

    #[test]
    fn double_pole_takes_derivative() {
        // g(w) = w^3 + 2w, f = g / (w - a)^2 -> g'(a) = 3a^2 + 2
        let w = SparsePoly::var(0);
        let g = &w.pow(3) + &w.scale(&q_int(2));
        let f = RatExpr::new(g, vec![(LinearForm::int(&[(0, 1), (1, -1)]), 2)]).unwrap();
        let r = f.residue(0, &z(1)).unwrap();
        let a = SparsePoly::var(1);
        let expect = RatExpr::from_poly(&a.pow(2).scale(&q_int(3)) + &SparsePoly::constant(q_int(2)));
        assert_eq!(r, expect);
    }

    #[test]
    fn substitution_folds_constants() {
        // 1/(2 z1 - z2) with z1 -> 0 is -1/z2
        let f = RatExpr::new(SparsePoly::one(), vec![(LinearForm::int(&[(1, 2), (2, -1)]), 1)]).unwrap();
        let g = f.substitute(1, &LinearForm::zero()).unwrap();
        assert_eq!(g, RatExpr::new(SparsePoly::constant(q_int(-1)), vec![(z(2), 1)]).unwrap());
        let id = f.substitute(1, &z(1));
        assert!(id.is_err());
    }

    #[test]
    fn vanishing_factor_is_reported() {
        let f = RatExpr::new(SparsePoly::one(), vec![(LinearForm::int(&[(1, 1), (2, -1)]), 1)]).unwrap();
        assert!(matches!(f.substitute(1, &z(2)), Err(Error::PoleOnPole(_))));
    }

    #[test]
    fn genus0_point_integrand_toy() {
        // z0^{a-3} z1^{b-3}: residues at 0 give 1 iff a = b = 2
        for a in 0..4u32 {
            for b in 0..4u32 {
                let num = SparsePoly::monomial(q_int(1), Monomial::var_pow(0, a) * Monomial::var_pow(1, b));
                let f = RatExpr::new(num, vec![(z(0), 3), (z(1), 3)]).unwrap();
                let expect = if a == 2 && b == 2 { q_int(1) } else { q_int(0) };
                assert_eq!(residue_all(f, &[0, 1]), expect, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn no_pole_gives_zero() {
        let f = RatExpr::new(SparsePoly::var(0), vec![(z(1), 2)]).unwrap();
        assert!(f.residue(0, &LinearForm::zero()).unwrap().is_zero());
    }

    #[test]
    fn root_with_variable_is_rejected() {
        let f = RatExpr::new(SparsePoly::one(), vec![(z(0), 1)]).unwrap();
        assert!(matches!(f.residue(0, &z(0)), Err(Error::RootContainsVariable(0))));
    }

    #[test]
    fn coincident_factors_raise_pole_order() {
        // 1/((z1 - z2)(2 z2 - 2 z1) z1) at z1 = z2: -1/2 * d/dz1 (1/z1) = 1/(2 z2^2)
        let f = RatExpr::new(
            SparsePoly::one(),
            vec![
                (LinearForm::int(&[(1, 1), (2, -1)]), 1),
                (LinearForm::int(&[(2, 2), (1, -2)]), 1),
                (z(1), 1),
            ],
        )
        .unwrap();
        let r = f.residue(1, &z(2)).unwrap();
        assert_eq!(r, RatExpr::new(SparsePoly::constant(q_frac(1, 2)), vec![(z(2), 2)]).unwrap());
    }

    /// Residue via an independent route: expand in a Laurent series by
    /// evaluating `(v - root)^m f` at a shifted rational point and taking
    /// finite differences would be approximate, so instead compare against
    /// the explicit derivative formula with symbolic differentiation.
    fn residue_by_derivative(f: &RatExpr, v: Var, root: &LinearForm) -> RatExpr {
        // (v - root)^m f with the vanishing factors removed
        let mut order = 0u32;
        let mut scale = Q::one();
        let mut rest: Vec<(LinearForm, u32)> = Vec::new();
        for (g, e) in f.denominator() {
            if !g.coeff(v).is_zero() && g.substitute(v, root).is_zero() {
                order += e;
                scale *= q_pow(&g.coeff(v), *e as i32);
            } else {
                rest.push((g.clone(), *e));
            }
        }
        if order == 0 {
            return RatExpr::zero();
        }
        // d/dv (P / prod L^e) computed as a RatExpr with raised exponents
        let mut cur = RatExpr::new(f.numerator().scale(&scale.recip()), rest).unwrap();
        for _ in 1..order {
            let mut terms = RatExpr::new(cur.num.derivative(v), cur.den.clone()).unwrap();
            for (i, (g, e)) in cur.den.iter().enumerate() {
                let a = g.coeff(v);
                if a.is_zero() {
                    continue;
                }
                let mut den = cur.den.clone();
                den[i].1 += 1;
                let t = RatExpr::new(cur.num.scale(&(-a * q_int(*e as i64))), den).unwrap();
                terms = add_exprs(&terms, &t);
            }
            cur = terms;
        }
        let fact = crate::rational::factorial(order - 1);
        cur.substitute(v, root).unwrap().scale(&Q::from_integer(fact).recip())
    }

    fn add_exprs(a: &RatExpr, b: &RatExpr) -> RatExpr {
        // common denominator by taking the max exponent of each factor
        let mut den = a.den.clone();
        for (g, e) in &b.den {
            match den.iter_mut().find(|(h, _)| h == g) {
                Some((_, x)) => *x = (*x).max(*e),
                None => den.push((g.clone(), *e)),
            }
        }
        let lift = |x: &RatExpr| {
            let mut p = x.num.clone();
            for (g, e) in &den {
                let have = x.den.iter().find(|(h, _)| h == g).map(|(_, e)| *e).unwrap_or(0);
                p = &p * &g.to_poly().pow(e - have);
            }
            p
        };
        RatExpr::new(&lift(a) + &lift(b), den).unwrap()
    }

    fn eval_eq(a: &RatExpr, b: &RatExpr, vars: usize) -> bool {
        let pts = [[3, 5, 7, 11], [2, -9, 13, 4], [-6, 17, 1, 19], [23, -2, 29, 31]];
        let mut checked = 0;
        for p in &pts {
            let pt: Vec<Q> = p.iter().take(vars).map(|&x| q_int(x)).collect();
            if let (Some(x), Some(y)) = (a.eval(&pt), b.eval(&pt)) {
                if x != y {
                    return false;
                }
                checked += 1;
            }
        }
        checked > 0
    }

    fn arb_form() -> impl Strategy<Value = LinearForm> {
        proptest::collection::vec((0usize..4, -2i64..3), 1..3)
            .prop_map(|ps| LinearForm::int(&ps))
            .prop_filter("nonzero", |l| !l.is_zero())
    }

    fn arb_homogeneous_expr() -> impl Strategy<Value = RatExpr> {
        (
            proptest::collection::vec((0u32..3, 0u32..3, 0u32..3, -3i64..4), 1..4),
            proptest::collection::vec((arb_form(), 1u32..3), 1..4),
            1u32..3,
        )
            .prop_map(|(ts, dens, z0pow)| {
                // force a homogeneous numerator of total degree 4 by padding with z3
                let num = SparsePoly::from_terms(ts.into_iter().filter(|(a, b, c, _)| a + b + c <= 4).map(
                    |(a, b, c, k)| (Monomial::from_exponents(&[a, b, c, 4 - a - b - c]), q_int(k)),
                ));
                let mut den = dens;
                den.push((LinearForm::var(0), z0pow));
                RatExpr::new(num, den).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn residue_matches_derivative_formula(f in arb_homogeneous_expr(), root_c in -2i64..3) {
            let root = LinearForm::int(&[(1, root_c), (2, 1)]);
            let a = f.residue(0, &root).unwrap();
            let b = residue_by_derivative(&f, 0, &root);
            prop_assert!(eval_eq(&a, &b, 4));
            let a0 = f.residue(0, &LinearForm::zero()).unwrap();
            let b0 = residue_by_derivative(&f, 0, &LinearForm::zero());
            prop_assert!(eval_eq(&a0, &b0, 4));
        }

        #[test]
        fn residue_raises_homogeneous_degree(f in arb_homogeneous_expr()) {
            let d = f.homogeneous_degree();
            let r = f.residue(0, &LinearForm::zero()).unwrap();
            if let (Some(d), Some(dr)) = (d, r.homogeneous_degree()) {
                prop_assert_eq!(dr, d + 1);
                prop_assert!(!r.contains_var(0));
            }
        }

        #[test]
        fn substitution_commutes_with_residue(f in arb_homogeneous_expr(), c in 1i64..3) {
            // residue in z0 and substitution z3 -> c z2 touch disjoint variables
            let val = LinearForm::int(&[(2, c)]);
            let left = f.residue(0, &LinearForm::zero()).unwrap().substitute(3, &val);
            let right = f.substitute(3, &val).and_then(|g| g.residue(0, &LinearForm::zero()));
            if let (Ok(l), Ok(r)) = (left, right) {
                prop_assert!(eval_eq(&l, &r, 4));
            }
        }
    }
}
