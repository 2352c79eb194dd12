//! Calabi-Yau case `N = k`: hypergeometric series, the closed genus-1 formula
//! and the loop/point identities.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::cache::DiskCache;
use crate::elliptic::{cache_key, chern_data, elliptic_breakdown, graph_residue};
use crate::error::{Error, Result};
use crate::genus0::genus0_twopoint;
use crate::graphs::{ordered_partitions, Graph};
use crate::params::{HypersurfaceParams, InsertionVector};
use crate::rational::{factorial, fmt_q, q_frac, q_int, Q};
use crate::series::{LinearPlusSeries, SeriesShape, TruncatedSeries};

fn cy_params(k: u32) -> Result<HypersurfaceParams> {
    if k < 3 {
        return Err(Error::InvalidParams(format!("Calabi-Yau series need k >= 3, got {k}")));
    }
    HypersurfaceParams::new(k, k)
}

fn from_coeffs(q_cap: u32, f: impl Fn(u32) -> Q) -> TruncatedSeries {
    let coeffs: Vec<Q> = (0..=q_cap).map(f).collect();
    TruncatedSeries::from_q_coefficients(SeriesShape::q_only(q_cap), &coeffs)
}

/// `(kd)! / (d!)^k`
pub fn hypergeom_coefficient(k: u32, d: u32) -> BigInt {
    factorial(k * d) / num_traits::pow(factorial(d), k as usize)
}

/// `sum_{d>=0} (kd)!/(d!)^k q^d`
pub fn hypergeom_l0(k: u32, q_cap: u32) -> Result<TruncatedSeries> {
    cy_params(k)?;
    Ok(from_coeffs(q_cap, |d| Q::from_integer(hypergeom_coefficient(k, d))))
}

/// `1 + sum_d (d/k) w(O_{h^{k-2-m}} O_{h^{m-1}})_{0,d} q^d` for `0 <= m <= k-2`.
pub fn ltilde(k: u32, m: u32, q_cap: u32) -> Result<TruncatedSeries> {
    let params = cy_params(k)?;
    if m > k - 2 {
        return Err(Error::InvalidParams(format!("L~_m needs m <= k-2, got m={m}")));
    }
    let (a, b) = (k as i32 - 2 - m as i32, m as i32 - 1);
    let mut coeffs = vec![Q::one()];
    for d in 1..=q_cap {
        coeffs.push(genus0_twopoint(&params, d as i64, a, b)? * q_frac(d as i64, k as i64));
    }
    Ok(TruncatedSeries::from_q_coefficients(SeriesShape::q_only(q_cap), &coeffs))
}

/// `C_d = sum over ordered partitions (-1)^{l-1} prod (k d_j)!/(d_j!)^k`, for `d = 1..=dmax`.
pub fn c_coefficients(k: u32, dmax: u32) -> Vec<Q> {
    (1..=dmax)
        .map(|d| {
            ordered_partitions(d).iter().fold(Q::zero(), |acc, tau| {
                let prod = tau.iter().fold(BigInt::one(), |p, &dj| p * hypergeom_coefficient(k, dj));
                let sign = if tau.len() % 2 == 1 { 1 } else { -1 };
                acc + Q::from_integer(prod * sign)
            })
        })
        .collect()
}

/// `log(1 - k^k q) = -sum k^{kd} q^d / d`
pub fn log_singular_series(k: u32, q_cap: u32) -> TruncatedSeries {
    from_coeffs(q_cap, |d| {
        if d == 0 {
            Q::zero()
        } else {
            -Q::new(num_traits::pow(BigInt::from(k), (k * d) as usize), BigInt::from(d))
        }
    })
}

/// Termwise antiderivative `int_{-inf}^x log(1 - k^k e^s) ds = -sum k^{kd} q^d / d^2`.
pub fn integrated_log_series(k: u32, q_cap: u32) -> TruncatedSeries {
    from_coeffs(q_cap, |d| {
        if d == 0 {
            Q::zero()
        } else {
            -Q::new(num_traits::pow(BigInt::from(k), (k * d) as usize), BigInt::from(d * d))
        }
    })
}

/// `-(k-1)/48 log(1 - k^k q) + (k^2-1)/(24k) int log(1 - k^k e^s) ds`
pub fn point_series_closed(k: u32, q_cap: u32) -> Result<TruncatedSeries> {
    cy_params(k)?;
    let k_i = k as i64;
    let a = log_singular_series(k, q_cap).scale(&q_frac(-(k_i - 1), 48));
    let b = integrated_log_series(k, q_cap).scale(&q_frac(k_i * k_i - 1, 24 * k_i));
    a.add(&b)
}

/// `(p, c_p)` with the right side of the loop identity equal to `-sum c_p log L~_p`.
pub fn log_weights(k: u32) -> Vec<(u32, Q)> {
    let k_i = k as i64;
    if k % 2 == 1 {
        (0..=(k - 3) / 2).map(|p| (p, q_frac((k_i - 1 - 2 * p as i64).pow(2), 8))).collect()
    } else {
        (0..=(k.saturating_sub(4)) / 2)
            .filter(|_| k >= 4)
            .map(|p| {
                let p = p as i64;
                (p as u32, q_frac((k_i - 2 * p) * (k_i - 2 * p - 2), 8))
            })
            .collect()
    }
}

/// `-sum_p c_p log L~_p`
pub fn weighted_log_series(k: u32, q_cap: u32) -> Result<TruncatedSeries> {
    let mut out = TruncatedSeries::zero(SeriesShape::q_only(q_cap));
    for (p, c) in log_weights(k) {
        out = out.sub(&ltilde(k, p, q_cap)?.log()?.scale(&c))?;
    }
    Ok(out)
}

/// Closed genus-1 B-model potential of `M_k^k`.
pub fn closed_form_f1b(k: u32, q_cap: u32) -> Result<LinearPlusSeries> {
    let params = cy_params(k)?;
    if k < 4 {
        return Err(Error::InvalidParams(format!("the closed genus-1 formula needs k >= 4, got {k}")));
    }
    let chern = chern_data(&params);
    let lin = -chern.lin_coeff / q_int(24);
    let star = hypergeom_l0(k, q_cap)?.log()?.scale(&(chern.euler / q_int(24)));
    let sing = if k % 2 == 1 { q_frac(-(k as i64 - 1), 48) } else { q_frac(-(k as i64 - 4), 48) };
    let series = star.add(&log_singular_series(k, q_cap).scale(&sing))?.add(&weighted_log_series(k, q_cap)?)?;
    Ok(LinearPlusSeries::new(lin, series))
}

/// Residue sums per graph family, as q-series without insertions.
#[derive(Debug, Clone)]
pub struct CySeriesBundle {
    pub k: u32,
    pub q_cap: u32,
    pub l0: TruncatedSeries,
    /// `L~_m` for `m = 0..=k-2`.
    pub lm: Vec<TruncatedSeries>,
    pub star: TruncatedSeries,
    pub loop_: TruncatedSeries,
    pub cluster: TruncatedSeries,
    pub point: TruncatedSeries,
    /// `C_1, ..., C_{q_cap}`
    pub c: Vec<Q>,
}

/// Graph-family series `(star, loop, cluster, point)` from residues.
pub fn graph_family_series(
    k: u32,
    q_cap: u32,
    cache: Option<&DiskCache>,
) -> Result<[TruncatedSeries; 4]> {
    let params = cy_params(k)?;
    let mut coeffs = vec![vec![Q::zero(); q_cap as usize + 1]; 4];
    for d in 1..=q_cap {
        for (g, v) in elliptic_breakdown(&params, d, &InsertionVector::empty(), cache)? {
            let slot = match g {
                Graph::StarElliptic(_) => 0,
                Graph::Loop(_) => 1,
                Graph::ClusterStar { .. } => 2,
                Graph::Point(_) => 3,
            };
            coeffs[slot][d as usize] += v;
        }
    }
    let shape = SeriesShape::q_only(q_cap);
    Ok([0, 1, 2, 3].map(|i| TruncatedSeries::from_q_coefficients(shape, &coeffs[i])))
}

pub fn cy_bundle(k: u32, q_cap: u32, cache: Option<&DiskCache>) -> Result<CySeriesBundle> {
    let [star, loop_, cluster, point] = graph_family_series(k, q_cap, cache)?;
    Ok(CySeriesBundle {
        k,
        q_cap,
        l0: hypergeom_l0(k, q_cap)?,
        lm: (0..=k - 2).map(|m| ltilde(k, m, q_cap)).collect::<Result<_>>()?,
        star,
        loop_,
        cluster,
        point,
        c: c_coefficients(k, q_cap),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityRow {
    pub d: u32,
    pub lhs: Q,
    pub rhs: Q,
}

impl IdentityRow {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub name: String,
    pub rows: Vec<IdentityRow>,
}

impl IdentityReport {
    fn compare(name: &str, lhs: &TruncatedSeries, rhs: &TruncatedSeries) -> Self {
        let (l, r) = (lhs.q_coefficients(), rhs.q_coefficients());
        let rows = l.into_iter().zip(r).enumerate().map(|(d, (lhs, rhs))| IdentityRow { d: d as u32, lhs, rhs }).collect();
        IdentityReport { name: name.into(), rows }
    }

    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(IdentityRow::holds)
    }

    /// `d lhs rhs equal` rows.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("d\tlhs\trhs\tequal\n");
        for r in &self.rows {
            out += &format!("{}\t{}\t{}\t{}\n", r.d, fmt_q(&r.lhs), fmt_q(&r.rhs), r.holds());
        }
        out
    }
}

/// Loop series plus the integrated log term (and `-1/16 log(1 - k^k q)` for even `k`)
/// against `-sum c_p log L~_p`.
pub fn check_loop_identity(k: u32, q_cap: u32, cache: Option<&DiskCache>) -> Result<IdentityReport> {
    let params = cy_params(k)?;
    let mut loop_ = TruncatedSeries::zero(SeriesShape::q_only(q_cap));
    for d in 2..=q_cap {
        let v = loop_residue(&params, d, cache)?;
        loop_ = loop_.add(&TruncatedSeries::monomial(loop_.shape(), d, &[], v)?)?;
    }
    let k_i = k as i64;
    let mut lhs = loop_.add(&integrated_log_series(k, q_cap).scale(&q_frac(k_i * k_i - 1, 24 * k_i)))?;
    if k.is_multiple_of(2) {
        lhs = lhs.add(&log_singular_series(k, q_cap).scale(&q_frac(-1, 16)))?;
    }
    Ok(IdentityReport::compare("loop identity", &lhs, &weighted_log_series(k, q_cap)?))
}

fn loop_residue(params: &HypersurfaceParams, d: u32, cache: Option<&DiskCache>) -> Result<Q> {
    let (g, ins) = (Graph::Loop(d), InsertionVector::empty());
    let key = cache_key(params, &g, &ins);
    if let Some(v) = cache.map(|c| c.get(&key)).transpose()?.flatten() {
        return Ok(v);
    }
    let v = graph_residue(params, &g, &ins)?;
    if let Some(c) = cache {
        c.put(&key, &v)?;
    }
    Ok(v)
}

/// Full elliptic sums `w(*)_{1,d}` against the closed formula.
pub fn check_closed_form(k: u32, q_cap: u32, cache: Option<&DiskCache>) -> Result<IdentityReport> {
    let [star, loop_, cluster, point] = graph_family_series(k, q_cap, cache)?;
    let lhs = star.add(&loop_)?.add(&cluster)?.add(&point)?;
    Ok(IdentityReport::compare("closed genus-1 formula", &lhs, &closed_form_f1b(k, q_cap)?.series))
}

/// `1 - sum C_d q^d` against `1 / L_0`.
pub fn check_c_inverse(k: u32, q_cap: u32) -> Result<IdentityReport> {
    let shape = SeriesShape::q_only(q_cap);
    let mut coeffs = vec![Q::one()];
    coeffs.extend(c_coefficients(k, q_cap).into_iter().map(|c| -c));
    let lhs = TruncatedSeries::from_q_coefficients(shape, &coeffs);
    Ok(IdentityReport::compare("C_d inverse", &lhs, &hypergeom_l0(k, q_cap)?.inverse()?))
}

/// Star sums against `chi/24 log L_0`.
pub fn check_star_sums(k: u32, q_cap: u32, cache: Option<&DiskCache>) -> Result<IdentityReport> {
    let params = cy_params(k)?;
    let [star, ..] = graph_family_series(k, q_cap, cache)?;
    let rhs = hypergeom_l0(k, q_cap)?.log()?.scale(&(chern_data(&params).euler / q_int(24)));
    Ok(IdentityReport::compare("star sums", &star, &rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::point_closed_form;

    #[test]
    fn hypergeometric_values() {
        let l0 = hypergeom_l0(5, 2).unwrap();
        assert_eq!(l0.q_coefficients(), vec![q_int(1), q_int(120), q_int(113400)]);
        assert_eq!(hypergeom_l0(3, 1).unwrap().q_coefficients()[1], q_int(6));
        assert!(hypergeom_l0(2, 1).is_err());
    }

    #[test]
    fn ltilde_zero_is_hypergeometric() {
        for k in [4, 5] {
            assert_eq!(ltilde(k, 0, 3).unwrap(), hypergeom_l0(k, 3).unwrap());
        }
        assert_eq!(ltilde(5, 1, 0).unwrap().q_coefficients(), vec![q_int(1)]);
    }

    #[test]
    fn quintic_ltilde_one() {
        // exp(770 q + 1139200 q^2) truncated
        let l1 = ltilde(5, 1, 2).unwrap();
        let expect = q_int(1139200) + q_int(770 * 770) / q_int(2);
        assert_eq!(l1.q_coefficients(), vec![q_int(1), q_int(770), expect]);
    }

    #[test]
    fn point_series_matches_residues() {
        let params = HypersurfaceParams::new(5, 5).unwrap();
        let s = point_series_closed(5, 3).unwrap().q_coefficients();
        for d in 1..=3 {
            assert_eq!(s[d as usize], point_closed_form(&params, d, &InsertionVector::empty()));
        }
        assert_eq!(s[1], q_frac(-4375, 12));
        let i = integrated_log_series(5, 2).scale(&q_frac(1, 5)).q_coefficients();
        assert_eq!(i[1..], [q_int(-625), q_frac(-1953125, 4)]);
    }

    #[test]
    fn weighted_logs() {
        assert_eq!(log_weights(5), vec![(0, q_int(2)), (1, q_frac(1, 2))]);
        assert_eq!(log_weights(4), vec![(0, q_int(1))]);
        let w = weighted_log_series(5, 2).unwrap().q_coefficients();
        assert_eq!(w, vec![q_int(0), q_int(-625), q_int(-782000)]);
    }

    #[test]
    fn c_inverse() {
        for k in [3, 4, 5] {
            assert!(check_c_inverse(k, 5).unwrap().all_hold());
        }
        assert_eq!(c_coefficients(5, 2), vec![q_int(120), q_int(113400 - 14400)]);
    }

    #[test]
    fn quintic_degree_one_closed_form() {
        let r = check_closed_form(5, 1, None).unwrap();
        assert!(r.all_hold());
        assert_eq!(r.rows[1].lhs, q_int(-1000) + q_frac(-4375, 12));
    }

    #[test]
    fn quartic_loop_identity() {
        assert!(check_loop_identity(4, 2, None).unwrap().all_hold());
        assert!(check_loop_identity(5, 2, None).unwrap().all_hold());
    }

    #[test]
    fn report_tsv() {
        let r = check_c_inverse(5, 1).unwrap();
        assert_eq!(r.to_tsv(), "d\tlhs\trhs\tequal\n0\t1\t1\ttrue\n1\t-120\t-120\ttrue\n");
    }
}
