//! Truncated power series in `q = e^{x^1}` and the block variables
//! `x^2, ..., x^{N-2}`, with `x^p` carrying weight `p - 1`.
//!
//! Truncation keeps q-degree `<= q_cap` and total block weight `<= weight_cap`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, q_from_parts, q_int, q_to_parts, Q};

/// Maximum number of block variables (so `N <= 11`).
pub const MAX_BLOCK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Key {
    pub d: u32,
    pub e: [u8; MAX_BLOCK],
}

impl Key {
    pub fn new(d: u32, exps: &[u32]) -> Result<Self> {
        if exps.len() > MAX_BLOCK {
            return Err(Error::Series(format!("at most {MAX_BLOCK} block variables supported")));
        }
        let mut e = [0u8; MAX_BLOCK];
        for (slot, &x) in e.iter_mut().zip(exps) {
            *slot = u8::try_from(x).map_err(|_| Error::Series(format!("block exponent {x} too large")))?;
        }
        Ok(Key { d, e })
    }

    fn mul(&self, other: &Key) -> Key {
        let mut e = [0u8; MAX_BLOCK];
        for (out, (a, b)) in e.iter_mut().zip(self.e.iter().zip(&other.e)) {
            *out = a + b;
        }
        Key { d: self.d + other.d, e }
    }
}

/// Caps and variable layout shared by all series taking part in one computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesShape {
    /// Block variables `x^2 .. x^{nblock+1}`.
    pub nblock: usize,
    pub q_cap: u32,
    pub weight_cap: u32,
}

impl SeriesShape {
    pub fn new(nblock: usize, q_cap: u32, weight_cap: u32) -> Result<Self> {
        if nblock > MAX_BLOCK {
            return Err(Error::Series(format!("at most {MAX_BLOCK} block variables supported, got {nblock}")));
        }
        if weight_cap > u8::MAX as u32 {
            return Err(Error::Series(format!("weight cap {weight_cap} exceeds {}", u8::MAX)));
        }
        Ok(SeriesShape { nblock, q_cap, weight_cap })
    }

    /// Series in `q` alone.
    pub fn q_only(q_cap: u32) -> Self {
        SeriesShape { nblock: 0, q_cap, weight_cap: 0 }
    }

    /// Weight of the block monomial of a key.
    pub fn weight(&self, key: &Key) -> u32 {
        (0..self.nblock).map(|i| (i as u32 + 1) * key.e[i] as u32).sum()
    }

    fn admits(&self, key: &Key) -> bool {
        key.d <= self.q_cap && self.weight(key) <= self.weight_cap
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    shape: SeriesShape,
    coeffs: BTreeMap<Key, Q>,
}

impl TruncatedSeries {
    pub fn zero(shape: SeriesShape) -> Self {
        TruncatedSeries { shape, coeffs: BTreeMap::new() }
    }

    pub fn constant(shape: SeriesShape, c: Q) -> Self {
        let mut s = Self::zero(shape);
        s.add_term(Key::default(), c);
        s
    }

    pub fn one(shape: SeriesShape) -> Self {
        Self::constant(shape, Q::one())
    }

    /// `c q^d prod (x^{p})^{exps[p-2]}`; silently zero beyond the caps.
    pub fn monomial(shape: SeriesShape, d: u32, exps: &[u32], c: Q) -> Result<Self> {
        if exps.len() > shape.nblock {
            return Err(Error::Series(format!("{} exponents for {} block variables", exps.len(), shape.nblock)));
        }
        let mut s = Self::zero(shape);
        s.add_term(Key::new(d, exps)?, c);
        Ok(s)
    }

    /// The block variable `x^p` (`p >= 2`).
    pub fn block_var(shape: SeriesShape, p: u32) -> Result<Self> {
        if p < 2 || (p - 2) as usize >= shape.nblock {
            return Err(Error::Series(format!("no block variable x^{p}")));
        }
        let mut exps = vec![0; shape.nblock];
        exps[(p - 2) as usize] = 1;
        Self::monomial(shape, 0, &exps, Q::one())
    }

    pub fn shape(&self) -> SeriesShape {
        self.shape
    }

    pub fn add_term(&mut self, key: Key, c: Q) {
        if c.is_zero() || !self.shape.admits(&key) {
            return;
        }
        match self.coeffs.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn coeff(&self, d: u32, exps: &[u32]) -> Q {
        Key::new(d, exps).ok().and_then(|k| self.coeffs.get(&k).cloned()).unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeffs.get(&Key::default()).cloned().unwrap_or_else(Q::zero)
    }

    /// Terms in key order.
    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Q)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::Series(format!("cap mismatch: {:?} vs {:?}", self.shape, other.shape)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.add_term(*k, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.shape);
        }
        TruncatedSeries { shape: self.shape, coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    /// Multiplies by `q^d`.
    pub fn shift_q(&self, d: u32) -> Self {
        let mut out = Self::zero(self.shape);
        for (k, c) in &self.coeffs {
            out.add_term(Key { d: k.d + d, e: k.e }, c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let shape = self.shape;
        let mut rhs: Vec<(Key, u32, &Q)> = other.coeffs.iter().map(|(k, c)| (*k, shape.weight(k), c)).collect();
        rhs.sort_by_key(|(_, w, _)| *w);
        let mut acc: FxHashMap<Key, Q> = FxHashMap::default();
        for (ka, ca) in &self.coeffs {
            let wa = shape.weight(ka);
            for (kb, wb, cb) in &rhs {
                if wa + wb > shape.weight_cap {
                    break;
                }
                if ka.d + kb.d > shape.q_cap {
                    continue;
                }
                let prod = *cb * ca;
                match acc.entry(ka.mul(kb)) {
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(prod);
                    }
                    std::collections::hash_map::Entry::Occupied(mut o) => {
                        *o.get_mut() += prod;
                    }
                }
            }
        }
        let coeffs = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(TruncatedSeries { shape, coeffs })
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::one(self.shape);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Largest `n` with a nonzero `u^n` when `u` has no constant term.
    fn nilpotency_bound(&self) -> u32 {
        self.shape.q_cap + self.shape.weight_cap + 1
    }

    /// `sum_n c_n u^n` for `u = self` without constant term.
    fn power_sum(&self, coeff: impl Fn(u32) -> Q) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::Series("power series argument must have zero constant term".into()));
        }
        let mut out = Self::constant(self.shape, coeff(0));
        let mut pw = Self::one(self.shape);
        for n in 1..=self.nilpotency_bound() {
            pw = pw.mul(self)?;
            if pw.is_zero() {
                break;
            }
            out = out.add(&pw.scale(&coeff(n)))?;
        }
        Ok(out)
    }

    /// `log(s)` for `s` with constant term 1.
    pub fn log(&self) -> Result<Self> {
        if self.constant_term() != Q::one() {
            return Err(Error::Series("log needs constant term 1".into()));
        }
        let u = self.sub(&Self::one(self.shape))?;
        u.power_sum(|n| if n == 0 { Q::zero() } else { Q::new(if n % 2 == 1 { 1.into() } else { (-1).into() }, n.into()) })
    }

    /// `exp(s)` for `s` with constant term 0.
    pub fn exp(&self) -> Result<Self> {
        let mut fact = vec![Q::one()];
        for n in 1..=self.nilpotency_bound() {
            let next = &fact[n as usize - 1] / q_int(n as i64);
            fact.push(next);
        }
        self.power_sum(|n| fact[n as usize].clone())
    }

    /// `1/s` for `s` with nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(Error::Series("inverse needs a nonzero constant term".into()));
        }
        let cinv = Q::one() / &c;
        // 1/(c (1 + u)) = c^{-1} sum (-u)^n
        let u = self.scale(&cinv).sub(&Self::one(self.shape))?;
        Ok(u.power_sum(|n| if n % 2 == 0 { Q::one() } else { -Q::one() })?.scale(&cinv))
    }

    /// `q d/dq`
    pub fn q_derivative(&self) -> Self {
        TruncatedSeries {
            shape: self.shape,
            coeffs: self.coeffs.iter().filter(|(k, _)| k.d > 0).map(|(k, c)| (*k, c * q_int(k.d as i64))).collect(),
        }
    }

    /// Keeps only the terms with q-degree `<= q_cap`.
    pub fn truncate_q(&self, q_cap: u32) -> Self {
        TruncatedSeries {
            shape: self.shape,
            coeffs: self.coeffs.iter().filter(|(k, _)| k.d <= q_cap).map(|(k, c)| (*k, c.clone())).collect(),
        }
    }

    /// Coefficients of a `q`-only series as `[c_0, ..., c_{q_cap}]`.
    pub fn q_coefficients(&self) -> Vec<Q> {
        let zeros = vec![0; self.shape.nblock];
        (0..=self.shape.q_cap).map(|d| self.coeff(d, &zeros)).collect()
    }

    pub fn from_q_coefficients(shape: SeriesShape, coeffs: &[Q]) -> Self {
        let mut s = Self::zero(shape);
        for (d, c) in coeffs.iter().enumerate() {
            s.add_term(Key { d: d as u32, e: [0; MAX_BLOCK] }, c.clone());
        }
        s
    }

    /// `self(q_x -> q_t exp(sub.q_exponent), x^p -> sub.blocks[p-2])`.
    pub fn substitute(&self, sub: &Substitution) -> Result<Self> {
        let shape = self.shape;
        if sub.blocks.len() != shape.nblock {
            return Err(Error::Series("substitution must cover every block variable".into()));
        }
        sub.q_exponent.check(self)?;
        for b in &sub.blocks {
            b.check(self)?;
        }
        let e1 = sub.q_exponent.exp()?;
        let mut by_d: BTreeMap<u32, Vec<(&Key, &Q)>> = BTreeMap::new();
        for (k, c) in &self.coeffs {
            by_d.entry(k.d).or_default().push((k, c));
        }
        let mut powers = PowerCache::new(&sub.blocks);
        let mut out = Self::zero(shape);
        let mut e_pow = Self::one(shape);
        let mut e_deg = 0;
        for (d, terms) in by_d {
            while e_deg < d {
                e_pow = e_pow.mul(&e1)?;
                e_deg += 1;
            }
            let poly = eval_block_poly(&terms, shape.nblock, &mut powers, shape)?;
            out = out.add(&poly.mul(&e_pow)?.shift_q(d))?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            nblock: self.shape.nblock,
            q_cap: self.shape.q_cap,
            weight_cap: self.shape.weight_cap,
            terms: self
                .coeffs
                .iter()
                .map(|(k, c)| {
                    let (num, den) = q_to_parts(c);
                    TermJson { d: k.d, exponents: k.e[..self.shape.nblock].iter().map(|&x| x as u32).collect(), num, den }
                })
                .collect(),
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self> {
        let shape = SeriesShape::new(j.nblock, j.q_cap, j.weight_cap)?;
        let mut s = Self::zero(shape);
        for t in &j.terms {
            if t.exponents.len() != shape.nblock {
                return Err(Error::Parse(format!("term has {} exponents, expected {}", t.exponents.len(), shape.nblock)));
            }
            let key = Key::new(t.d, &t.exponents)?;
            if !shape.admits(&key) {
                return Err(Error::Parse(format!("term {key:?} exceeds the caps")));
            }
            s.add_term(key, q_from_parts(&t.num, &t.den)?);
        }
        Ok(s)
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, c)| {
                let mut s = fmt_q(c);
                if k.d > 0 {
                    s += &format!("*q^{}", k.d);
                }
                for i in 0..self.shape.nblock {
                    if k.e[i] > 0 {
                        s += &format!("*x{}^{}", i + 2, k.e[i]);
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub d: u32,
    pub exponents: Vec<u32>,
    pub num: String,
    pub den: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub nblock: usize,
    pub q_cap: u32,
    pub weight_cap: u32,
    pub terms: Vec<TermJson>,
}

/// Substitution data: `q_x = q_t exp(q_exponent)` and `x^p = blocks[p-2]`.
#[derive(Debug, Clone)]
pub struct Substitution {
    pub q_exponent: TruncatedSeries,
    pub blocks: Vec<TruncatedSeries>,
}

impl Substitution {
    pub fn identity(shape: SeriesShape) -> Result<Self> {
        Ok(Substitution {
            q_exponent: TruncatedSeries::zero(shape),
            blocks: (0..shape.nblock).map(|i| TruncatedSeries::block_var(shape, i as u32 + 2)).collect::<Result<_>>()?,
        })
    }
}

struct PowerCache<'a> {
    base: &'a [TruncatedSeries],
    pows: Vec<Vec<TruncatedSeries>>,
}

impl<'a> PowerCache<'a> {
    fn new(base: &'a [TruncatedSeries]) -> Self {
        PowerCache { base, pows: base.iter().map(|b| vec![TruncatedSeries::one(b.shape())]).collect() }
    }

    fn get(&mut self, var: usize, e: usize) -> Result<&TruncatedSeries> {
        while self.pows[var].len() <= e {
            let next = self.pows[var].last().expect("nonempty").mul(&self.base[var])?;
            self.pows[var].push(next);
        }
        Ok(&self.pows[var][e])
    }
}

/// Evaluates `sum c prod x_i^{e_i}` by grouping on the last variable and
/// recursing, so only one multiplication per distinct exponent prefix is needed.
fn eval_block_poly(
    terms: &[(&Key, &Q)],
    nvars: usize,
    powers: &mut PowerCache<'_>,
    shape: SeriesShape,
) -> Result<TruncatedSeries> {
    if nvars == 0 {
        let c = terms.iter().fold(Q::zero(), |acc, (_, c)| acc + *c);
        return Ok(TruncatedSeries::constant(shape, c));
    }
    let var = nvars - 1;
    let mut groups: BTreeMap<u8, Vec<(&Key, &Q)>> = BTreeMap::new();
    for &(k, c) in terms {
        groups.entry(k.e[var]).or_default().push((k, c));
    }
    let mut out = TruncatedSeries::zero(shape);
    for (e, group) in groups {
        let inner = eval_block_poly(&group, var, powers, shape)?;
        let term = if e == 0 { inner } else { inner.mul(powers.get(var, e as usize)?)? };
        out = out.add(&term)?;
    }
    Ok(out)
}

/// `lin * x^1 + series`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearPlusSeries {
    pub lin: Q,
    pub series: TruncatedSeries,
}

impl LinearPlusSeries {
    pub fn new(lin: Q, series: TruncatedSeries) -> Self {
        LinearPlusSeries { lin, series }
    }

    /// Composition with `x^1 = t^1 + x1_correction` and the block substitution.
    pub fn compose(&self, sub: &Substitution) -> Result<Self> {
        let series = self.series.substitute(sub)?.add(&sub.q_exponent.scale(&self.lin))?;
        Ok(LinearPlusSeries { lin: self.lin.clone(), series })
    }
}

/// Inverts `t^1 = x^1 + c[0](x)`, `t^p = x^p + c[p-1](x)` (`p >= 2`), where every
/// correction has q-degree `>= 1`. Returns `x(t)` as a [`Substitution`].
pub fn invert_mirror_map(corrections: &[TruncatedSeries]) -> Result<Substitution> {
    let shape = corrections
        .first()
        .ok_or_else(|| Error::Series("mirror map needs the x^1 correction".into()))?
        .shape();
    if corrections.len() != shape.nblock + 1 {
        return Err(Error::Series(format!("expected {} corrections, got {}", shape.nblock + 1, corrections.len())));
    }
    for c in corrections {
        c.check(&corrections[0])?;
        if c.terms().any(|(k, _)| k.d == 0) {
            return Err(Error::Series("mirror-map corrections must have q-degree >= 1".into()));
        }
    }
    let mut sub = Substitution::identity(shape)?;
    for _ in 0..=shape.q_cap {
        let next_q = corrections[0].substitute(&sub)?.neg();
        let mut next_blocks = Vec::with_capacity(shape.nblock);
        for (i, c) in corrections[1..].iter().enumerate() {
            let t = TruncatedSeries::block_var(shape, i as u32 + 2)?;
            next_blocks.push(t.sub(&c.substitute(&sub)?)?);
        }
        let next = Substitution { q_exponent: next_q, blocks: next_blocks };
        let converged =
            next.q_exponent == sub.q_exponent && next.blocks.iter().zip(&sub.blocks).all(|(a, b)| a == b);
        sub = next;
        if converged {
            return Ok(sub);
        }
    }
    // One extra q-degree is fixed per step, so q_cap + 1 steps always suffice.
    let check = corrections[0].substitute(&sub)?.neg();
    if check != sub.q_exponent {
        return Err(Error::Series("mirror-map inversion did not converge".into()));
    }
    Ok(sub)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q_frac;
    use proptest::prelude::*;

    fn q1(cap: u32, coeffs: &[i64]) -> TruncatedSeries {
        let shape = SeriesShape::q_only(cap);
        TruncatedSeries::from_q_coefficients(shape, &coeffs.iter().map(|&c| q_int(c)).collect::<Vec<_>>())
    }

    #[test]
    fn arithmetic() {
        let a = q1(2, &[1, 1]);
        let b = q1(2, &[1, -1]);
        assert_eq!(a.mul(&b).unwrap(), q1(2, &[1, 0, -1]));
        assert!(a.mul(&TruncatedSeries::zero(a.shape())).unwrap().is_zero());
        assert!(a.mul(&q1(3, &[1])).is_err());
    }

    #[test]
    fn log_of_hypergeometric_prefix() {
        let s = q1(2, &[1, 120, 113400]);
        assert_eq!(s.log().unwrap(), q1(2, &[0, 120, 106200]));
        let l1 = q1(2, &[1, 770, 770 * 770 / 2 + 1139200]);
        let lg = l1.log().unwrap();
        assert_eq!(lg.q_coefficients(), vec![q_int(0), q_int(770), q_int(1139200)]);
    }

    #[test]
    fn inverse_roundtrip() {
        let s = q1(5, &[1, 120, 113400, 168168000, 305540235000, 623360743125120]);
        let prod = s.mul(&s.inverse().unwrap()).unwrap();
        assert_eq!(prod, TruncatedSeries::one(s.shape()));
    }

    #[test]
    fn identity_inversion() {
        let shape = SeriesShape::new(2, 3, 8).unwrap();
        let zero = TruncatedSeries::zero(shape);
        let sub = invert_mirror_map(&[zero.clone(), zero.clone(), zero]).unwrap();
        let id = Substitution::identity(shape).unwrap();
        assert!(sub.q_exponent.is_zero());
        assert_eq!(sub.blocks, id.blocks);
    }

    #[test]
    fn substitution_of_q() {
        // q_x = q_t e^{a q_t}: q_x = q + a q^2 + a^2/2 q^3
        let shape = SeriesShape::q_only(3);
        let a = q_frac(3, 2);
        let sub = Substitution { q_exponent: TruncatedSeries::monomial(shape, 1, &[], a.clone()).unwrap(), blocks: vec![] };
        let qx = TruncatedSeries::monomial(shape, 1, &[], Q::one()).unwrap().substitute(&sub).unwrap();
        let expect = TruncatedSeries::from_q_coefficients(shape, &[q_int(0), q_int(1), a.clone(), &a * &a / q_int(2)]);
        assert_eq!(qx, expect);
    }

    #[test]
    fn json_roundtrip() {
        let shape = SeriesShape::new(2, 2, 6).unwrap();
        let mut s = TruncatedSeries::zero(shape);
        s.add_term(Key::new(1, &[3, 0]).unwrap(), q_frac(-7, 80));
        s.add_term(Key::new(2, &[0, 1]).unwrap(), q_int(5));
        let text = serde_json::to_string(&s.to_json()).unwrap();
        let back = TruncatedSeries::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    fn arb_series() -> impl Strategy<Value = TruncatedSeries> {
        let shape = SeriesShape::new(2, 3, 5).unwrap();
        proptest::collection::vec(((0u32..4), (0u32..4), (0u32..3), (-20i64..20), (1i64..6)), 0..8).prop_map(move |ts| {
            let mut s = TruncatedSeries::zero(shape);
            for (d, a, b, n, m) in ts {
                s.add_term(Key::new(d, &[a, b]).unwrap(), q_frac(n, m));
            }
            s
        })
    }

    proptest! {
        #[test]
        fn exp_log_roundtrip(s in arb_series()) {
            let u = s.sub(&TruncatedSeries::constant(s.shape(), s.constant_term())).unwrap();
            let e = u.exp().unwrap();
            prop_assert_eq!(e.log().unwrap(), u.clone());
            let one_plus = u.add(&TruncatedSeries::one(u.shape())).unwrap();
            prop_assert_eq!(one_plus.log().unwrap().exp().unwrap(), one_plus);
        }

        #[test]
        fn multiplication_commutes_and_associates(a in arb_series(), b in arb_series(), c in arb_series()) {
            prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        }

        #[test]
        fn inversion_roundtrip(c1 in arb_series(), c2 in arb_series(), c3 in arb_series()) {
            // keep only q >= 1 parts of the corrections
            let strip = |s: &TruncatedSeries| {
                let mut out = TruncatedSeries::zero(s.shape());
                for (k, v) in s.terms() { if k.d >= 1 { out.add_term(*k, v.clone()); } }
                out
            };
            let cs = vec![strip(&c1), strip(&c2), strip(&c3)];
            let sub = invert_mirror_map(&cs).unwrap();
            // forward: x^1(t) + c1(x(t)) = t^1, x^p(t) + c_p(x(t)) = t^p
            prop_assert!(sub.q_exponent.add(&cs[0].substitute(&sub).unwrap()).unwrap().is_zero());
            for (i, c) in cs[1..].iter().enumerate() {
                let t = TruncatedSeries::block_var(sub.blocks[i].shape(), i as u32 + 2).unwrap();
                prop_assert_eq!(sub.blocks[i].add(&c.substitute(&sub).unwrap()).unwrap(), t);
            }
        }

        #[test]
        fn nested_substitution_associates(c1 in arb_series(), c2 in arb_series(), f in arb_series()) {
            let strip = |s: &TruncatedSeries| {
                let mut out = TruncatedSeries::zero(s.shape());
                for (k, v) in s.terms() { if k.d >= 1 { out.add_term(*k, v.clone()); } }
                out
            };
            let shape = f.shape();
            let s1 = Substitution { q_exponent: strip(&c1), blocks: Substitution::identity(shape).unwrap().blocks };
            let s2 = Substitution { q_exponent: strip(&c2), blocks: Substitution::identity(shape).unwrap().blocks };
            // composing two q-exponent shifts adds exponents: (q e^{a(q)}) e^{b(q e^{a})}
            let combined = Substitution {
                q_exponent: s1.q_exponent.add(&s2.q_exponent.substitute(&s1).unwrap()).unwrap(),
                blocks: Substitution::identity(shape).unwrap().blocks,
            };
            let lhs = f.substitute(&s2).unwrap().substitute(&s1).unwrap();
            let rhs = f.substitute(&combined).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
