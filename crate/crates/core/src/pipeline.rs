//! Mirror maps, generating functions and extraction of genus-0 and genus-1
//! Gromov-Witten invariants.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cache::DiskCache;
use crate::elliptic::{chern_data, elliptic_vsc_cached};
use crate::error::{Error, Result};
use crate::genus0::genus0_vsc;
use crate::parallel::par_map;
use crate::params::{HypersurfaceParams, InsertionVector};
use crate::rational::{fmt_q, is_integer, q_frac, q_int, q_pow, q_to_parts, Q};
use crate::series::{invert_mirror_map, Key, LinearPlusSeries, SeriesShape, Substitution, TruncatedSeries};

/// Shape with block variables `x^2..x^{N-2}` and weight cap `(N-k) q_cap + N - 3`.
pub fn series_shape(params: &HypersurfaceParams, q_cap: u32) -> Result<SeriesShape> {
    let nblock = params.n.saturating_sub(3) as usize;
    SeriesShape::new(nblock, q_cap, params.index() * q_cap + params.n - 3)
}

fn key_of(shape: &SeriesShape, d: u32, m: &InsertionVector) -> Result<Key> {
    let exps: Vec<u32> = (0..shape.nblock).map(|i| m.get(i as u32 + 2)).collect();
    Key::new(d, &exps)
}

fn insertion_of(key: &Key, nblock: usize) -> InsertionVector {
    InsertionVector::from_pairs((0..nblock).map(|i| (i as u32 + 2, key.e[i] as u32)))
}

fn factorial_q(m: &InsertionVector) -> Q {
    Q::from_integer(m.factorial_product())
}

/// Builds `sum_{d>=1} sum_m f(d, m) q^d x^m / m!` over insertion vectors of weight `weight(d)`.
fn assemble(
    params: &HypersurfaceParams,
    shape: SeriesShape,
    weight: impl Fn(u32) -> i64,
    f: impl Fn(u32, &InsertionVector) -> Result<Q> + Sync + Send,
) -> Result<TruncatedSeries> {
    let support = params.default_support();
    let mut jobs = Vec::new();
    for d in 1..=shape.q_cap {
        let w = weight(d);
        if w < 0 {
            continue;
        }
        for m in InsertionVector::enumerate(&support, w as u32) {
            jobs.push((d, m));
        }
    }
    let values = par_map(jobs.clone(), |(d, m)| f(d, &m).map(|v| v / factorial_q(&m)));
    let mut out = TruncatedSeries::zero(shape);
    for ((d, m), v) in jobs.into_iter().zip(values) {
        out.add_term(key_of(&shape, d, &m)?, v?);
    }
    Ok(out)
}

/// `t^p = x^p + corrections[p-1]` for `p = 1..N-2`.
#[derive(Debug, Clone)]
pub struct MirrorMap {
    pub params: HypersurfaceParams,
    pub shape: SeriesShape,
    pub corrections: Vec<TruncatedSeries>,
}

/// q-graded correction of `t^p`: `(1/k) w(O_{h^{N-2-p}} O_1 | m)_{0,d} / m!`.
pub fn mirror_correction(params: &HypersurfaceParams, shape: SeriesShape, p: u32) -> Result<TruncatedSeries> {
    let (n, k) = (params.n as i64, params.k as i64);
    let a = n as i32 - 2 - p as i32;
    assemble(
        params,
        shape,
        |d| p as i64 - 1 + (n - k) * d as i64,
        |d, m| Ok(genus0_vsc(params, d as i64, a, 0, m)? / q_int(k)),
    )
}

pub fn build_mirror_map(params: &HypersurfaceParams, q_cap: u32) -> Result<MirrorMap> {
    let shape = series_shape(params, q_cap)?;
    let corrections = (1..=params.n - 2).map(|p| mirror_correction(params, shape, p)).collect::<Result<_>>()?;
    Ok(MirrorMap { params: *params, shape, corrections })
}

impl MirrorMap {
    /// `t^p(x)` for `p = 1..N-2` (`p = 1` as a linear term plus series).
    pub fn t(&self, p: u32) -> Result<LinearPlusSeries> {
        let idx = (p as usize).checked_sub(1).filter(|&i| i < self.corrections.len());
        let i = idx.ok_or_else(|| Error::InvalidParams(format!("no mirror coordinate t^{p}")))?;
        if p == 1 {
            Ok(LinearPlusSeries::new(Q::one(), self.corrections[0].clone()))
        } else {
            let x = TruncatedSeries::block_var(self.shape, p)?;
            Ok(LinearPlusSeries::new(Q::zero(), x.add(&self.corrections[i])?))
        }
    }

    pub fn invert(&self) -> Result<Substitution> {
        invert_mirror_map(&self.corrections)
    }
}

/// `F_1^B = -(lin/24) x^1 + sum e^{d x^1} w(m)_{1,d} x^m / m!`.
pub fn genus1_b_function(
    params: &HypersurfaceParams,
    q_cap: u32,
    cache: Option<&DiskCache>,
) -> Result<LinearPlusSeries> {
    let shape = series_shape(params, q_cap)?;
    let lin = -chern_data(params).lin_coeff / q_int(24);
    let idx = params.index() as i64;
    let series = assemble(params, shape, |d| idx * d as i64, |d, m| elliptic_vsc_cached(params, d as i64, m, cache))?;
    Ok(LinearPlusSeries::new(lin, series))
}

/// Perturbed two-point function `w(O_{h^a} O_{h^b})_0(x)` composed with `x(t)`.
/// The degree-0 term `k x^{N-2-a-b}` contributes through `x^1`, a block variable,
/// or (for `a + b = N - 2`) the `x^0` correction; the `t^0` part itself is dropped.
pub fn twopoint_a_function(
    params: &HypersurfaceParams,
    mirror: &MirrorMap,
    sub: &Substitution,
    a: i32,
    b: i32,
) -> Result<LinearPlusSeries> {
    let shape = mirror.shape;
    let (n, k) = (params.n as i64, params.k as i64);
    let target = n - 3 - a as i64 - b as i64;
    let idx = params.index() as i64;
    let series = assemble(params, shape, |d| target + idx * d as i64, |d, m| genus0_vsc(params, d as i64, a, b, m))?;
    let p0 = n - 2 - a as i64 - b as i64;
    let kq = q_int(k);
    let mut b_fn = LinearPlusSeries::new(Q::zero(), series);
    let mut x0_part = None;
    match p0 {
        1 => b_fn.lin = kq.clone(),
        p if p >= 2 && p <= n - 2 => {
            let x = TruncatedSeries::block_var(shape, p as u32)?.scale(&kq);
            b_fn.series = b_fn.series.add(&x)?;
        }
        0 => {
            // x^0(t) = t^0 - C_0(x(t))
            let c0 = assemble(params, shape, |d| -1 + idx * d as i64, |d, m| {
                Ok(genus0_vsc(params, d as i64, n as i32 - 2, 0, m)? / q_int(k))
            })?;
            x0_part = Some(c0.substitute(sub)?.scale(&-kq));
        }
        _ => {}
    }
    let mut out = b_fn.compose(sub)?;
    if let Some(x0) = x0_part {
        out.series = out.series.add(&x0)?;
    }
    Ok(out)
}

/// One row of the output tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GwRecord {
    pub d: u32,
    pub ins: InsertionVector,
    /// Genus-0 invariant with the same insertions, when its selection rule matches.
    pub n0: Option<Q>,
    pub n1: Q,
    /// `((N-k)d - 2)/24 n0 + n1`
    pub combo: Option<Q>,
    /// `n1 / k^{sum m}`
    pub normalized: Q,
    /// Elliptic virtual structure constant.
    pub w: Q,
}

#[derive(Debug, Clone)]
pub struct GwTables {
    pub params: HypersurfaceParams,
    pub q_cap: u32,
    pub f1_b: LinearPlusSeries,
    pub f1_a: LinearPlusSeries,
    pub records: Vec<GwRecord>,
}

/// Genus-0 invariants `<prod (O_{h^p})^{m_p}>_{0,d}` for `d >= 1`, read off the
/// `(1,1)` two-point function divided by `d^2`. Keys are `(d, m)`.
pub fn genus0_gw(
    params: &HypersurfaceParams,
    mirror: &MirrorMap,
    sub: &Substitution,
) -> Result<Vec<(u32, InsertionVector, Q)>> {
    let f = twopoint_a_function(params, mirror, sub, 1, 1)?;
    let mut out = Vec::new();
    for (key, c) in f.series.terms() {
        if key.d == 0 {
            continue;
        }
        let m = insertion_of(key, mirror.shape.nblock);
        let v = c * factorial_q(&m) / q_int((key.d * key.d) as i64);
        out.push((key.d, m, v));
    }
    Ok(out)
}

/// Full genus-1 pipeline up to q-degree `q_cap`.
pub fn genus1_gw(params: &HypersurfaceParams, q_cap: u32, cache: Option<&DiskCache>) -> Result<GwTables> {
    let mirror = build_mirror_map(params, q_cap)?;
    let sub = mirror.invert()?;
    let f1_b = genus1_b_function(params, q_cap, cache)?;
    let f1_a = f1_b.compose(&sub)?;
    let g0 = genus0_gw(params, &mirror, &sub)?;
    let shape = mirror.shape;
    let idx = params.index() as i64;
    let support = params.default_support();
    let kq = q_int(params.k as i64);
    let mut records = Vec::new();
    for d in 1..=q_cap {
        for m in InsertionVector::enumerate(&support, (idx * d as i64) as u32) {
            let key = key_of(&shape, d, &m)?;
            let exps: Vec<u32> = (0..shape.nblock).map(|i| key.e[i] as u32).collect();
            let fact = factorial_q(&m);
            let n1 = f1_a.series.coeff(d, &exps) * &fact;
            let w = f1_b.series.coeff(d, &exps) * &fact;
            let n0 = if params.n == 5 {
                Some(g0.iter().find(|(dd, mm, _)| *dd == d && *mm == m).map(|t| t.2.clone()).unwrap_or_else(Q::zero))
            } else {
                None
            };
            let combo = n0.as_ref().map(|n0| q_frac(idx * d as i64 - 2, 24) * n0 + &n1);
            let normalized = &n1 / q_pow(&kq, m.total() as i32);
            records.push(GwRecord { d, ins: m, n0, n1, combo, normalized, w });
        }
    }
    Ok(GwTables { params: *params, q_cap, f1_b, f1_a, records })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralityReport {
    pub checked: usize,
    /// `(d, insertion key)` of rows whose combination is not an integer.
    pub failures: Vec<(u32, String)>,
}

impl IntegralityReport {
    pub fn all_integral(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn integrality_report(records: &[GwRecord]) -> IntegralityReport {
    let mut checked = 0;
    let mut failures = Vec::new();
    for r in records {
        if let Some(c) = &r.combo {
            checked += 1;
            if !is_integer(c) {
                failures.push((r.d, r.ins.key()));
            }
        }
    }
    IntegralityReport { checked, failures }
}

pub const TSV_HEADER: &str = "d\ta\tb\tn0\tn1\tcombo\tw";

/// Table rows `d a b n0 n1 combo w` with `a = m_2`, `b = m_3`; `-` marks absent values.
/// Only meaningful for `N <= 5`.
pub fn records_to_tsv(params: &HypersurfaceParams, records: &[GwRecord]) -> Result<String> {
    if params.n > 5 {
        return Err(Error::InvalidParams("TSV tables need N <= 5; use JSON".into()));
    }
    let opt = |q: &Option<Q>| q.as_ref().map(fmt_q).unwrap_or_else(|| "-".into());
    let mut out = String::from(TSV_HEADER);
    out.push('\n');
    for r in records {
        out += &format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.d,
            r.ins.get(2),
            r.ins.get(3),
            opt(&r.n0),
            fmt_q(&r.n1),
            opt(&r.combo),
            fmt_q(&r.w)
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

impl RationalJson {
    pub fn from_q(q: &Q) -> Self {
        let (num, den) = q_to_parts(q);
        RationalJson { num, den }
    }

    pub fn to_q(&self) -> Result<Q> {
        crate::rational::q_from_parts(&self.num, &self.den)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GwRecordJson {
    pub d: u32,
    /// Insertion key, e.g. `2:6,3:3`.
    pub ins: String,
    pub n0: Option<RationalJson>,
    pub n1: RationalJson,
    pub combo: Option<RationalJson>,
    pub normalized: RationalJson,
    pub w: RationalJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GwTablesJson {
    pub n: u32,
    pub k: u32,
    pub q_cap: u32,
    pub records: Vec<GwRecordJson>,
}

pub fn records_to_json(params: &HypersurfaceParams, q_cap: u32, records: &[GwRecord]) -> GwTablesJson {
    GwTablesJson {
        n: params.n,
        k: params.k,
        q_cap,
        records: records
            .iter()
            .map(|r| GwRecordJson {
                d: r.d,
                ins: r.ins.key(),
                n0: r.n0.as_ref().map(RationalJson::from_q),
                n1: RationalJson::from_q(&r.n1),
                combo: r.combo.as_ref().map(RationalJson::from_q),
                normalized: RationalJson::from_q(&r.normalized),
                w: RationalJson::from_q(&r.w),
            })
            .collect(),
    }
}

pub fn records_from_json(j: &GwTablesJson) -> Result<Vec<GwRecord>> {
    let opt = |o: &Option<RationalJson>| o.as_ref().map(RationalJson::to_q).transpose();
    j.records
        .iter()
        .map(|r| {
            Ok(GwRecord {
                d: r.d,
                ins: InsertionVector::parse(&r.ins)?,
                n0: opt(&r.n0)?,
                n1: r.n1.to_q()?,
                combo: opt(&r.combo)?,
                normalized: r.normalized.to_q()?,
                w: r.w.to_q()?,
            })
        })
        .collect()
}

/// Parses TSV emitted by [`records_to_tsv`] back into `(d, a, b, n0, n1, combo, w)` strings.
pub fn parse_tsv(text: &str) -> Result<Vec<Vec<String>>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == TSV_HEADER => {}
        other => return Err(Error::Parse(format!("unexpected TSV header {other:?}"))),
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let cols: Vec<String> = l.split('\t').map(str::to_string).collect();
            if cols.len() != 7 {
                return Err(Error::Parse(format!("TSV row has {} columns: {l:?}", cols.len())));
            }
            Ok(cols)
        })
        .collect()
}

/// Convenience for tests and reports: `prod m!` as a big integer.
pub fn insertion_factorial(m: &InsertionVector) -> BigInt {
    m.factorial_product()
}
