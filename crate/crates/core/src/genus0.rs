//! Genus-0 multi-point virtual structure constants
//! `w(O_{h^a} O_{h^b} | prod_p (O_{h^p})^{m_p})_{0,d}` as iterated residues
//! over the line graph with `d` edges.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::branch::{evaluate, EvalOptions, PoleRule, Schedule};
use crate::error::{Error, Result};
use crate::linear::LinearForm;
use crate::params::{HypersurfaceParams, InsertionVector};
use crate::poly::{Monomial, SparsePoly, Var};
use crate::ratexpr::RatExpr;
use crate::rational::{q_int, q_pow, Q};

/// `e_k(x, y) = prod_{j=0}^{k} (j x + (k - j) y)`.
pub fn building_block_e(k: u32, x: Var, y: Var) -> SparsePoly {
    let mut acc = SparsePoly::one();
    for j in 0..=k {
        let f = LinearForm::int(&[(x, j as i64), (y, (k - j) as i64)]);
        acc = &acc * &f.to_poly();
    }
    acc
}

/// `w_a(x, y) = (x^a - y^a) / (x - y) = sum_{j<a} x^j y^{a-1-j}`.
pub fn building_block_w(a: u32, x: Var, y: Var) -> SparsePoly {
    SparsePoly::from_terms((0..a).map(|j| {
        let m = if x == y {
            Monomial::var_pow(x, a - 1)
        } else {
            Monomial::var_pow(x, j) * Monomial::var_pow(y, a - 1 - j)
        };
        (m, Q::one())
    }))
}

/// `prod_p (sum_edges w_p(edge))^{m_p}` for the insertions with `p >= 2`.
pub(crate) fn insertion_product(ins: &InsertionVector, edge_sum: impl Fn(u32) -> SparsePoly) -> SparsePoly {
    ins.iter().fold(SparsePoly::one(), |acc, (p, m)| &acc * &edge_sum(p).pow(m))
}

/// Elimination order for the line-graph residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Order {
    /// `z_0, z_1, ..., z_d` (the normative prescription).
    #[default]
    Ascending,
    /// `z_d, z_{d-1}, ..., z_0`.
    Descending,
}

/// The integrand of the degree-`d` line graph (`d >= 1`) and its schedule.
/// Only insertions with `p >= 2` are placed in the numerator.
pub fn genus0_integrand(
    params: &HypersurfaceParams,
    d: u32,
    a: i32,
    b: i32,
    ins: &InsertionVector,
    order: Order,
) -> Result<(RatExpr, Schedule)> {
    if d == 0 {
        return Err(Error::InvalidParams("the residue integrand needs d >= 1".into()));
    }
    let (n, k) = (params.n, params.k);
    let dd = d as usize;
    let z = |j: usize| j;

    let mut num = SparsePoly::constant(q_pow(&q_int(k as i64), -(d as i32 - 1)));
    let mut den: Vec<(LinearForm, u32)> = Vec::new();
    let mut endpoint = |v: Var, e: i32, num: &mut SparsePoly| {
        let pole = n as i32 - e;
        if pole >= 0 {
            den.push((LinearForm::var(v), pole as u32));
        } else {
            *num = num.mul_monomial(Monomial::var_pow(v, (-pole) as u32));
        }
    };
    endpoint(z(0), a, &mut num);
    endpoint(z(dd), b, &mut num);
    for j in 1..=dd {
        num = &num * &building_block_e(k, z(j - 1), z(j));
    }
    let (_, _, high) = ins.split_low();
    let ins_poly = insertion_product(&high, |p| {
        (1..=dd).fold(SparsePoly::zero(), |acc, j| &acc + &building_block_w(p, z(j - 1), z(j)))
    });
    num = &num * &ins_poly;
    for i in 1..dd {
        den.push((LinearForm::var(z(i)), n + 1));
        den.push((interior_factor(z(i - 1), z(i), z(i + 1)), 1));
    }
    let expr = RatExpr::new(num, den)?;

    let mut sched = Schedule::default();
    let interior = |j: usize| PoleRule::ZeroAndDesignated(interior_factor(z(j - 1), z(j), z(j + 1)));
    match order {
        Order::Ascending => {
            sched.push(z(0), PoleRule::Zero);
            for j in 1..dd {
                sched.push(z(j), interior(j));
            }
            sched.push(z(dd), PoleRule::Zero);
        }
        Order::Descending => {
            sched.push(z(dd), PoleRule::Zero);
            for j in (1..dd).rev() {
                sched.push(z(j), interior(j));
            }
            sched.push(z(0), PoleRule::Zero);
        }
    }
    Ok((expr, sched))
}

/// `2 z_mid - z_prev - z_next`
pub(crate) fn interior_factor(prev: Var, mid: Var, next: Var) -> LinearForm {
    LinearForm::int(&[(mid, 2), (prev, -1), (next, -1)])
}

/// Weighted-degree condition `a + b + sum (p-1) m_p = N - 3 + (N - k) d`.
pub fn genus0_selection_holds(params: &HypersurfaceParams, d: u32, a: i32, b: i32, ins: &InsertionVector) -> bool {
    let lhs = a as i64 + b as i64 + ins.weight();
    let rhs = params.n as i64 - 3 + params.index() as i64 * d as i64;
    lhs == rhs
}

/// Genus-0 multi-point virtual structure constant.
///
/// `p = 0, 1` insertions are resolved analytically: any `O_1` insertion gives
/// zero for `d >= 1`, each `O_h` multiplies by `d`.
pub fn genus0_vsc(params: &HypersurfaceParams, d: i64, a: i32, b: i32, ins: &InsertionVector) -> Result<Q> {
    genus0_vsc_ordered(params, d, a, b, ins, Order::Ascending)
}

pub fn genus0_vsc_ordered(
    params: &HypersurfaceParams,
    d: i64,
    a: i32,
    b: i32,
    ins: &InsertionVector,
    order: Order,
) -> Result<Q> {
    if d < 0 {
        return Err(Error::InvalidParams(format!("degree must be non-negative, got {d}")));
    }
    if a < 0 || b < -1 {
        return Err(Error::InvalidParams(format!("need a >= 0 and b >= -1, got a={a}, b={b}")));
    }
    ins.validate(params)?;
    let d = d as u32;
    if d == 0 {
        return Ok(degree_zero(params, a, b, ins));
    }
    if !genus0_selection_holds(params, d, a, b, ins) {
        return Ok(Q::zero());
    }
    let (m0, m1, high) = ins.split_low();
    if m0 > 0 {
        return Ok(Q::zero());
    }
    let (expr, sched) = genus0_integrand(params, d, a, b, &high, order)?;
    let value = evaluate(expr, &sched, EvalOptions { check_homogeneity: true })?;
    Ok(value * Q::from_integer(BigInt::from(d).pow(m1)))
}

/// Direct evaluation that feeds `p = 0, 1` insertions to the residue engine too.
pub fn genus0_vsc_direct(params: &HypersurfaceParams, d: u32, a: i32, b: i32, ins: &InsertionVector) -> Result<Q> {
    if d == 0 {
        return Ok(degree_zero(params, a, b, ins));
    }
    let (mut expr, sched) = genus0_integrand(params, d, a, b, &InsertionVector::empty(), Order::Ascending)?;
    let dd = d as usize;
    for (p, m) in ins.iter() {
        let sum = (1..=dd).fold(SparsePoly::zero(), |acc, j| &acc + &building_block_w(p, j - 1, j));
        expr = expr.mul_poly(&sum.pow(m));
    }
    evaluate(expr, &sched, EvalOptions::default())
}

/// `w(O_{h^a} O_{h^b} | O_{h^c})_{0,0} = k delta_{a+b+c, N-2}`; zero otherwise.
fn degree_zero(params: &HypersurfaceParams, a: i32, b: i32, ins: &InsertionVector) -> Q {
    if ins.total() != 1 {
        return Q::zero();
    }
    let (c, _) = ins.iter().next().expect("one insertion");
    if a + b + c as i32 == params.n as i32 - 2 {
        q_int(params.k as i64)
    } else {
        Q::zero()
    }
}

/// Two-point constant `w(O_{h^a} O_{h^b})_{0,d}`.
pub fn genus0_twopoint(params: &HypersurfaceParams, d: i64, a: i32, b: i32) -> Result<Q> {
    if d < 1 {
        return Err(Error::InvalidParams(format!("two-point constants need d >= 1, got {d}")));
    }
    genus0_vsc(params, d, a, b, &InsertionVector::empty())
}
