//! Hypersurface parameters and operator-insertion vectors.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::factorial;

/// Degree-`k` hypersurface in projective `(N-1)`-space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HypersurfaceParams {
    pub n: u32,
    pub k: u32,
}

impl HypersurfaceParams {
    pub fn new(n: u32, k: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParams(format!("N must be at least 3, got {n}")));
        }
        if k < 1 || k > n {
            return Err(Error::InvalidParams(format!("need N >= k >= 1, got N={n}, k={k}")));
        }
        Ok(HypersurfaceParams { n, k })
    }

    /// Calabi-Yau case.
    pub fn is_cy(&self) -> bool {
        self.n == self.k
    }

    /// `N - k`, the first Chern class coefficient.
    pub fn index(&self) -> u32 {
        self.n - self.k
    }

    /// Default insertion support `{2, ..., N-2}`.
    pub fn default_support(&self) -> Vec<u32> {
        (2..=self.n.saturating_sub(2)).collect()
    }
}

impl fmt::Display for HypersurfaceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M_{}^{}", self.n, self.k)
    }
}

/// Counts `m_p` of `O_{h^p}` insertions. Zero counts are not stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InsertionVector {
    counts: BTreeMap<u32, u32>,
}

impl InsertionVector {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> Self {
        let mut counts = BTreeMap::new();
        for (p, m) in pairs {
            if m > 0 {
                *counts.entry(p).or_insert(0) += m;
            }
        }
        InsertionVector { counts }
    }

    /// Parses `p:m,p:m`; the empty string is the empty vector.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "-" {
            return Ok(Self::empty());
        }
        let mut pairs = Vec::new();
        for item in s.split(',') {
            let (p, m) = item
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("insertion {item:?} is not of the form p:m")))?;
            let p: u32 = p.trim().parse().map_err(|_| Error::Parse(format!("bad insertion power {p:?}")))?;
            let m: u32 = m.trim().parse().map_err(|_| Error::Parse(format!("bad insertion count {m:?}")))?;
            pairs.push((p, m));
        }
        Ok(Self::from_pairs(pairs))
    }

    pub fn get(&self, p: u32) -> u32 {
        self.counts.get(&p).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.counts.iter().map(|(p, m)| (*p, *m))
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.counts.values().sum()
    }

    /// `sum (p - 1) m_p`.
    pub fn weight(&self) -> i64 {
        self.iter().map(|(p, m)| (p as i64 - 1) * m as i64).sum()
    }

    pub fn max_power(&self) -> Option<u32> {
        self.counts.keys().next_back().copied()
    }

    /// Drops the `p = 0, 1` slots, returning `(m_0, m_1, rest)`.
    pub fn split_low(&self) -> (u32, u32, InsertionVector) {
        let rest = InsertionVector {
            counts: self.counts.iter().filter(|(p, _)| **p >= 2).map(|(p, m)| (*p, *m)).collect(),
        };
        (self.get(0), self.get(1), rest)
    }

    /// `prod m_p!`
    pub fn factorial_product(&self) -> BigInt {
        self.counts.values().fold(BigInt::one(), |acc, m| acc * factorial(*m))
    }

    pub fn validate(&self, params: &HypersurfaceParams) -> Result<()> {
        match self.max_power() {
            Some(p) if p > params.n - 2 => Err(Error::InvalidParams(format!(
                "insertion O_h^{p} exceeds the top power N-2 = {}",
                params.n - 2
            ))),
            _ => Ok(()),
        }
    }

    /// All vectors supported on `support` (powers >= 2) with `sum (p-1) m_p = weight`,
    /// in lexicographic order of the count tuple.
    pub fn enumerate(support: &[u32], weight: u32) -> Vec<InsertionVector> {
        let mut support: Vec<u32> = support.iter().copied().filter(|&p| p >= 2).collect();
        support.sort_unstable();
        support.dedup();
        let mut out = Vec::new();
        let mut counts = vec![0u32; support.len()];
        fn rec(i: usize, left: u32, support: &[u32], counts: &mut Vec<u32>, out: &mut Vec<InsertionVector>) {
            if i == support.len() {
                if left == 0 {
                    out.push(InsertionVector::from_pairs(support.iter().copied().zip(counts.iter().copied())));
                }
                return;
            }
            let w = support[i] - 1;
            for m in 0..=left / w {
                counts[i] = m;
                rec(i + 1, left - m * w, support, counts, out);
            }
            counts[i] = 0;
        }
        rec(0, weight, &support, &mut counts, &mut out);
        out
    }

    /// Compact key, e.g. `2:9,3:1`, or `-` when empty.
    pub fn key(&self) -> String {
        if self.is_empty() {
            return "-".into();
        }
        self.iter().map(|(p, m)| format!("{p}:{m}")).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for InsertionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key())
    }
}
