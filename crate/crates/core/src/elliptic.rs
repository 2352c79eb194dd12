//! Elliptic virtual structure constants `w(prod (O_{h^a})^{m_a})_{1,d}` as a
//! sum of graph residues.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::branch::{evaluate, EvalOptions, PoleRule, Schedule};
use crate::cache::{CacheKey, DiskCache};
use crate::error::{Error, Result};
use crate::genus0::{building_block_e, building_block_w, insertion_product, interior_factor};
use crate::graphs::{graphs_of_degree, r_factor, sym_factor, Graph, Partition};
use crate::linear::LinearForm;
use crate::parallel::par_map;
use crate::params::{HypersurfaceParams, InsertionVector};
use crate::poly::{Monomial, SparsePoly, Var};
use crate::ratexpr::RatExpr;
use crate::rational::{binomial, q_int, q_pow, Q};

/// Chern numbers entering the elliptic integrands and the linear term of `F_1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChernData {
    pub n: u32,
    pub k: u32,
    /// Coefficient of `h^{N-2}` in `(1+h)^N / (1+kh)`.
    pub ct_coeff: Q,
    /// `k * ct_coeff`
    pub euler: Q,
    /// `k * [h^{N-3}] (1+h)^N / (1+kh)`
    pub lin_coeff: Q,
}

/// `[h^j] (1+h)^N / (1+kh)`
fn chern_coefficient(n: u32, k: u32, j: u32) -> BigInt {
    let mk = BigInt::from(-(k as i64));
    (0..=j.min(n)).map(|i| binomial(n, i) * mk.pow(j - i)).sum()
}

pub fn chern_data(params: &HypersurfaceParams) -> ChernData {
    let (n, k) = (params.n, params.k);
    let ct = Q::from_integer(chern_coefficient(n, k, n - 2));
    let lin = Q::from_integer(chern_coefficient(n, k, n - 3) * BigInt::from(k));
    ChernData { n, k, euler: &ct * q_int(k as i64), ct_coeff: ct, lin_coeff: lin }
}

/// Star part shared by types (i) and (iii): tail variables, their factors and schedule.
struct Tails {
    /// `(variables of tail i)` in the order `j = 1..d_i`.
    vars: Vec<Vec<Var>>,
}

impl Tails {
    fn layout(sigma: &Partition, first: Var) -> Self {
        let mut next = first;
        let vars = sigma
            .parts()
            .iter()
            .map(|&len| {
                let v: Vec<Var> = (next..next + len as usize).collect();
                next += len as usize;
                v
            })
            .collect();
        Tails { vars }
    }

    /// Edges `(z_{i,j-1}, z_{i,j})` with `z_{i,0} = z0`.
    fn edges(&self, z0: Var) -> Vec<(Var, Var)> {
        let mut out = Vec::new();
        for tail in &self.vars {
            let mut prev = z0;
            for &v in tail {
                out.push((prev, v));
                prev = v;
            }
        }
        out
    }

    /// Numerator and denominator factors of the tails, without the centre
    /// prefactors: `e_k(z0, z_{i,1}) / (z_{i,1} - z0)`, interior
    /// `e_k / ((2z - ...) k z)` and `z^{-N}` for every tail vertex.
    fn factors(&self, params: &HypersurfaceParams, z0: Var) -> (SparsePoly, Q, Vec<(LinearForm, u32)>) {
        let (n, k) = (params.n, params.k);
        let mut num = SparsePoly::one();
        let mut interior_count = 0i32;
        let mut den = Vec::new();
        for tail in &self.vars {
            num = &num * &building_block_e(k, z0, tail[0]);
            den.push((LinearForm::int(&[(tail[0], 1), (z0, -1)]), 1));
            for j in 0..tail.len() {
                let v = tail[j];
                if j + 1 < tail.len() {
                    num = &num * &building_block_e(k, v, tail[j + 1]);
                    let prev = if j == 0 { z0 } else { tail[j - 1] };
                    den.push((interior_factor(prev, v, tail[j + 1]), 1));
                    den.push((LinearForm::var(v), n + 1));
                    interior_count += 1;
                } else {
                    den.push((LinearForm::var(v), n));
                }
            }
        }
        (num, q_pow(&q_int(k as i64), -interior_count), den)
    }

    fn schedule(&self, sched: &mut Schedule, z0: Var, tail_order: &[usize]) {
        for &i in tail_order {
            let tail = &self.vars[i];
            for j in 0..tail.len() {
                let v = tail[j];
                if j + 1 < tail.len() {
                    let prev = if j == 0 { z0 } else { tail[j - 1] };
                    sched.push(v, PoleRule::ZeroAndDesignated(interior_factor(prev, v, tail[j + 1])));
                } else {
                    sched.push(v, PoleRule::Zero);
                }
            }
        }
    }
}

fn edge_sum(edges: &[(Var, Var)], p: u32) -> SparsePoly {
    edges.iter().fold(SparsePoly::zero(), |acc, &(x, y)| &acc + &building_block_w(p, x, y))
}

/// Integrand and residue schedule of a type (i), (ii) or (iii) graph.
/// Tails are eliminated in `tail_order` (default `0..l`). All insertion
/// powers, including `p = 0, 1`, enter through the edge sums.
pub fn graph_integrand(
    params: &HypersurfaceParams,
    graph: &Graph,
    ins: &InsertionVector,
    tail_order: Option<&[usize]>,
) -> Result<(RatExpr, Schedule)> {
    let (n, k) = (params.n, params.k);
    let kq = q_int(k as i64);
    let mut sched = Schedule::default();
    let default_order: Vec<usize>;
    let order = |sigma: &Partition| -> Result<Vec<usize>> {
        match tail_order {
            Some(o) => {
                let mut sorted = o.to_vec();
                sorted.sort_unstable();
                if sorted != (0..sigma.len()).collect::<Vec<_>>() {
                    return Err(Error::InvalidParams(format!("tail order {o:?} is not a permutation")));
                }
                Ok(o.to_vec())
            }
            None => Ok((0..sigma.len()).collect()),
        }
    };
    let too_many = |vars: usize| {
        Err(Error::InvalidParams(format!(
            "graph {graph} needs {vars} variables, at most {} are supported",
            crate::poly::MAX_VARS
        )))
    };
    match graph {
        Graph::StarElliptic(sigma) => {
            let d = sigma.sum() as usize;
            if d + 1 > crate::poly::MAX_VARS {
                return too_many(d + 1);
            }
            let z0 = 0;
            let tails = Tails::layout(sigma, 1);
            let chern = chern_data(params);
            let l = sigma.len() as i32;
            let (mut num, scale, mut den) = tails.factors(params, z0);
            let c = sym_factor(sigma) * Q::new(1.into(), 24.into()) * &chern.ct_coeff * q_pow(&kq, -(l - 1)) * scale;
            // c_T(z0) / z0^{l-1} / z0^N
            let z0_power = n as i32 - 2 - (l - 1) - n as i32;
            push_power(&mut num, &mut den, z0, z0_power);
            let edges = tails.edges(z0);
            num = &num * &insertion_product(ins, |p| edge_sum(&edges, p));
            let expr = RatExpr::new(num.scale(&c), den)?;
            sched.push(z0, PoleRule::Zero);
            default_order = order(sigma)?;
            tails.schedule(&mut sched, z0, &default_order);
            Ok((expr, sched))
        }
        Graph::Loop(d) => {
            let d = *d as usize;
            if d < 2 {
                return Err(Error::InvalidParams("loop graphs need d >= 2".into()));
            }
            if d > crate::poly::MAX_VARS {
                return too_many(d);
            }
            // z_j is variable j-1; indices are cyclic.
            let z = |j: usize| (j + d - 1) % d;
            let mut num = SparsePoly::one();
            let mut den = Vec::new();
            for j in 1..=d {
                num = &num * &building_block_e(k, z(j), z(j + 1));
                den.push((interior_factor(z(j - 1), z(j), z(j + 1)), 1));
                den.push((LinearForm::var(z(j)), n + 1));
            }
            let edges: Vec<(Var, Var)> = (1..=d).map(|j| (z(j), z(j + 1))).collect();
            num = &num * &insertion_product(ins, |p| edge_sum(&edges, p));
            let c = Q::new(1.into(), BigInt::from(2 * d)) * q_pow(&kq, -(d as i32));
            let expr = RatExpr::new(num.scale(&c), den)?;
            for j in 1..=d {
                sched.push(z(j), PoleRule::ZeroAndDesignated(interior_factor(z(j - 1), z(j), z(j + 1))));
            }
            Ok((expr, sched))
        }
        Graph::ClusterStar { f, sigma } => {
            let f = *f;
            let dstar = sigma.sum() as usize;
            if dstar + 2 > crate::poly::MAX_VARS {
                return too_many(dstar + 2);
            }
            let (w, z0) = (0, 1);
            let tails = Tails::layout(sigma, 2);
            let l = sigma.len() as i32;
            let (mut num, scale, mut den) = tails.factors(params, z0);
            // -((N-1) z0^N + (N+1) w^N) / (N w^N z0^N)
            let pre = SparsePoly::from_terms([
                (Monomial::var_pow(z0, n), q_int(-(n as i64 - 1))),
                (Monomial::var_pow(w, n), q_int(-(n as i64 + 1))),
            ]);
            num = &num * &pre;
            num = &num * &building_block_e(k, w, z0);
            den.push((LinearForm::int(&[(w, 1), (z0, -1)]), 2));
            den.push((LinearForm::var(w), n + 1));
            // (e_k(z0,z0)/(k z0))^{f-1} = (k^k z0^k)^{f-1}; then z0^{-N} z0^{-N(f-1)} (k z0)^{-l}.
            // The tails carry (k z0)^{-l}, one power more than the star centre.
            let z0_power = k as i32 * (f as i32 - 1) - n as i32 - n as i32 * (f as i32 - 1) - l;
            push_power(&mut num, &mut den, z0, z0_power);
            let c = sym_factor(sigma) * Q::new(1.into(), 24.into()) / q_int(n as i64)
                * q_pow(&kq, -1 + k as i32 * (f as i32 - 1) - l)
                * scale;
            let edges = tails.edges(z0);
            num = &num * &insertion_product(ins, |p| {
                let cluster = &building_block_w(p, w, z0) + &building_block_w(p, z0, z0).scale(&q_int(f as i64 - 1));
                &cluster + &edge_sum(&edges, p)
            });
            let expr = RatExpr::new(num.scale(&c), den)?;
            sched.push(w, PoleRule::At(LinearForm::int(&[(w, 1), (z0, -1)])));
            sched.push(z0, PoleRule::Zero);
            default_order = order(sigma)?;
            tails.schedule(&mut sched, z0, &default_order);
            Ok((expr, sched))
        }
        Graph::Point(_) => Err(Error::InvalidParams("point graphs are evaluated in closed form".into())),
    }
}

fn push_power(num: &mut SparsePoly, den: &mut Vec<(LinearForm, u32)>, v: Var, e: i32) {
    if e >= 0 {
        *num = num.mul_monomial(Monomial::var_pow(v, e as u32));
    } else {
        den.push((LinearForm::var(v), (-e) as u32));
    }
}

/// Number of integration variables of a graph integrand.
pub fn variable_count(graph: &Graph) -> usize {
    match graph {
        Graph::StarElliptic(s) => s.sum() as usize + 1,
        Graph::Loop(d) => *d as usize,
        Graph::ClusterStar { sigma, .. } => sigma.sum() as usize + 2,
        Graph::Point(_) => 1,
    }
}

/// `(1/24) R_{N,k}(d) k^{kd} prod (d a)^{m_a}`
pub fn point_closed_form(params: &HypersurfaceParams, d: u32, ins: &InsertionVector) -> Q {
    let k = params.k as i64;
    let mut v = r_factor(params, d) * Q::new(1.into(), 24.into()) * q_pow(&q_int(k), (params.k * d) as i32);
    for (a, m) in ins.iter() {
        v *= q_pow(&q_int(d as i64 * a as i64), m as i32);
    }
    v
}

/// Product form of the point integrand, residue taken at `z0 = 0`.
pub fn point_product_form(params: &HypersurfaceParams, d: u32, ins: &InsertionVector) -> Result<Q> {
    let (n, k) = (params.n, params.k);
    let z0 = 0;
    let cluster = building_block_e(k, z0, z0).scale(&q_pow(&q_int(k as i64), -1));
    let mut num = cluster.pow(d);
    for (a, m) in ins.iter() {
        num = &num * &building_block_w(a, z0, z0).scale(&q_int(d as i64)).pow(m);
    }
    num = num.scale(&(r_factor(params, d) * Q::new(1.into(), 24.into())));
    let expr = RatExpr::new(num, vec![(LinearForm::var(z0), d + n * d + 1)])?;
    let mut sched = Schedule::default();
    sched.push(z0, PoleRule::Zero);
    evaluate(expr, &sched, EvalOptions { check_homogeneity: true })
}

/// Residue of one graph for insertions supported on `p >= 2`.
pub fn graph_residue(params: &HypersurfaceParams, graph: &Graph, ins: &InsertionVector) -> Result<Q> {
    graph_residue_ordered(params, graph, ins, None)
}

pub fn graph_residue_ordered(
    params: &HypersurfaceParams,
    graph: &Graph,
    ins: &InsertionVector,
    tail_order: Option<&[usize]>,
) -> Result<Q> {
    if let Graph::Point(d) = graph {
        return Ok(point_closed_form(params, *d, ins));
    }
    let (expr, sched) = graph_integrand(params, graph, ins, tail_order)?;
    if expr.is_zero() {
        return Ok(Q::zero());
    }
    let got = expr.homogeneous_degree();
    let want = -(variable_count(graph) as i64);
    if got != Some(want) {
        return Err(Error::Homogeneity(format!("integrand of {graph} has degree {got:?}, expected {want}")));
    }
    evaluate(expr, &sched, EvalOptions { check_homogeneity: true })
}

/// Weighted-degree condition `sum (p-1) m_p = (N-k) d`.
pub fn elliptic_selection_holds(params: &HypersurfaceParams, d: u32, ins: &InsertionVector) -> bool {
    ins.weight() == params.index() as i64 * d as i64
}

pub fn cache_key(params: &HypersurfaceParams, graph: &Graph, ins: &InsertionVector) -> CacheKey {
    CacheKey {
        n: params.n,
        k: params.k,
        d: graph.degree(),
        graph_type: graph.type_label().into(),
        sigma: graph.partition().map(Partition::key).unwrap_or_else(|| "-".into()),
        f: match graph {
            Graph::ClusterStar { f, .. } => *f,
            _ => 0,
        },
        ins: ins.key(),
    }
}

/// Residue of every graph of degree `d`, in catalog order.
pub fn elliptic_breakdown(
    params: &HypersurfaceParams,
    d: u32,
    ins: &InsertionVector,
    cache: Option<&DiskCache>,
) -> Result<Vec<(Graph, Q)>> {
    ins.validate(params)?;
    let (_, _, high) = ins.split_low();
    let graphs = graphs_of_degree(d);
    let values = par_map(graphs.clone(), |g| -> Result<Q> {
        let key = cache.map(|_| cache_key(params, &g, &high));
        if let (Some(c), Some(key)) = (cache, key.as_ref()) {
            if let Some(v) = c.get(key)? {
                return Ok(v);
            }
        }
        let v = graph_residue(params, &g, &high)?;
        if let (Some(c), Some(key)) = (cache, key.as_ref()) {
            c.put(key, &v)?;
        }
        Ok(v)
    });
    graphs.into_iter().zip(values).map(|(g, v)| Ok((g, v?))).collect()
}

/// Elliptic virtual structure constant of degree `d >= 1`.
///
/// `O_1` insertions give zero and each `O_h` multiplies by `d`; the remaining
/// insertions must satisfy the selection rule, otherwise the value is zero.
pub fn elliptic_vsc(params: &HypersurfaceParams, d: i64, ins: &InsertionVector) -> Result<Q> {
    elliptic_vsc_cached(params, d, ins, None)
}

pub fn elliptic_vsc_cached(
    params: &HypersurfaceParams,
    d: i64,
    ins: &InsertionVector,
    cache: Option<&DiskCache>,
) -> Result<Q> {
    if d < 1 {
        return Err(Error::InvalidParams(format!("elliptic constants need d >= 1, got {d}")));
    }
    ins.validate(params)?;
    let d = d as u32;
    let (m0, m1, high) = ins.split_low();
    if m0 > 0 || !elliptic_selection_holds(params, d, &high) {
        return Ok(Q::zero());
    }
    let total = elliptic_breakdown(params, d, &high, cache)?
        .into_iter()
        .fold(Q::zero(), |acc, (_, v)| acc + v);
    Ok(total * Q::from_integer(BigInt::from(d).pow(m1)))
}

/// Sums graph residues with every insertion (including `p = 0, 1`) placed in the integrands.
pub fn elliptic_vsc_direct(params: &HypersurfaceParams, d: u32, ins: &InsertionVector) -> Result<Q> {
    let mut total = Q::zero();
    for g in graphs_of_degree(d) {
        total += match &g {
            Graph::Point(d) => point_product_form(params, *d, ins)?,
            _ => {
                let (expr, sched) = graph_integrand(params, &g, ins, None)?;
                evaluate(expr, &sched, EvalOptions::default())?
            }
        };
    }
    Ok(total)
}
