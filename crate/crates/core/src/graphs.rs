//! Partitions and the four families of degree-`d` graphs.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::params::HypersurfaceParams;
use crate::rational::{factorial, q_frac, q_int, Q};

/// Non-increasing list of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition(pub Vec<u32>);

impl Partition {
    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Multiplicities of the distinct parts, in part order.
    pub fn multiplicities(&self) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::new();
        let mut prev = None;
        for &p in &self.0 {
            if prev == Some(p) {
                *out.last_mut().expect("nonempty") += 1;
            } else {
                out.push(1);
                prev = Some(p);
            }
        }
        out
    }

    pub fn key(&self) -> String {
        self.0.iter().map(u32::to_string).collect::<Vec<_>>().join("+")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
    }
}

/// All partitions of `d`, lexicographically descending. Empty for `d = 0`.
pub fn partitions(d: u32) -> Vec<Partition> {
    fn rec(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if left == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=left.min(max)).rev() {
            cur.push(p);
            rec(left - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if d > 0 {
        rec(d, d, &mut Vec::new(), &mut out);
    }
    out
}

/// Compositions of `d` (order significant), lexicographically descending.
pub fn ordered_partitions(d: u32) -> Vec<Vec<u32>> {
    fn rec(left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=left).rev() {
            cur.push(p);
            rec(left - p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if d > 0 {
        rec(d, &mut Vec::new(), &mut out);
    }
    out
}

/// `Sym(sigma) = (l-1)! / prod_j mul(sigma; j)!`
pub fn sym_factor(sigma: &Partition) -> Q {
    let den = sigma.multiplicities().iter().fold(BigInt::one(), |acc, m| acc * factorial(*m));
    Q::new(factorial(sigma.len() as u32 - 1), den)
}

/// `R_{N,k}(d) = (N-1)/(2d) - (N - 1/k)/d^2`
pub fn r_factor(params: &HypersurfaceParams, d: u32) -> Q {
    let (n, k, d) = (params.n as i64, params.k as i64, d as i64);
    q_frac(n - 1, 2 * d) - (q_int(n) - q_frac(1, k)) / q_int(d * d)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Graph {
    /// Type (i): elliptic vertex with tails of lengths `sigma`.
    StarElliptic(Partition),
    /// Type (ii): cycle with `d` edges.
    Loop(u32),
    /// Type (iii): cluster vertex of degree `f` with tails `sigma`.
    ClusterStar { f: u32, sigma: Partition },
    /// Type (iv): single cluster vertex of degree `d`.
    Point(u32),
}

impl Graph {
    pub fn degree(&self) -> u32 {
        match self {
            Graph::StarElliptic(s) => s.sum(),
            Graph::Loop(d) | Graph::Point(d) => *d,
            Graph::ClusterStar { f, sigma } => f + sigma.sum(),
        }
    }

    /// `"i"`, `"ii"`, `"iii"` or `"iv"`.
    pub fn type_label(&self) -> &'static str {
        match self {
            Graph::StarElliptic(_) => "i",
            Graph::Loop(_) => "ii",
            Graph::ClusterStar { .. } => "iii",
            Graph::Point(_) => "iv",
        }
    }

    pub fn partition(&self) -> Option<&Partition> {
        match self {
            Graph::StarElliptic(s) | Graph::ClusterStar { sigma: s, .. } => Some(s),
            _ => None,
        }
    }

    pub fn cluster_degree(&self) -> Option<u32> {
        match self {
            Graph::ClusterStar { f, .. } => Some(*f),
            Graph::Point(d) => Some(*d),
            _ => None,
        }
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Graph::StarElliptic(s) => write!(f, "star{s}"),
            Graph::Loop(d) => write!(f, "loop({d})"),
            Graph::ClusterStar { f: c, sigma } => write!(f, "cluster{c}{sigma}"),
            Graph::Point(d) => write!(f, "point({d})"),
        }
    }
}

/// Stars, the loop (`d >= 2`), cluster stars by increasing `f`, then the point graph.
pub fn graphs_of_degree(d: u32) -> Vec<Graph> {
    if d == 0 {
        return Vec::new();
    }
    let mut out: Vec<Graph> = partitions(d).into_iter().map(Graph::StarElliptic).collect();
    if d >= 2 {
        out.push(Graph::Loop(d));
    }
    for f in 1..d {
        out.extend(partitions(d - f).into_iter().map(|sigma| Graph::ClusterStar { f, sigma }));
    }
    out.push(Graph::Point(d));
    out
}
