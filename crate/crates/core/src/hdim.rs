//! Finite-window estimators for Hausdorff dimensions of subgroups along a
//! filtration, and the closed-form dimension of product subgroups of direct
//! products of free pro-p groups.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::mixedlie::lambda_dim;

/// One filtration level: numerator = log_p |H G_i : G_i|,
/// denominator = log_p |G : G_i|.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogIndexEntry {
    pub index: u64,
    pub num: BigUint,
    pub den: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LogIndexSequence {
    pub entries: Vec<LogIndexEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Stable,
    Decreasing,
    Oscillating,
}

impl std::fmt::Display for Trend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Trend::Stable => "stable",
            Trend::Decreasing => "decreasing",
            Trend::Oscillating => "oscillating",
        };
        f.write_str(s)
    }
}

impl LogIndexSequence {
    pub fn new(entries: Vec<LogIndexEntry>) -> Result<Self> {
        for e in &entries {
            if e.num > e.den {
                return Err(Error::precondition(format!(
                    "entry {}: numerator exceeds denominator",
                    e.index
                )));
            }
        }
        for w in entries.windows(2) {
            if w[1].den <= w[0].den {
                return Err(Error::precondition(
                    "denominators must be strictly increasing",
                ));
            }
        }
        Ok(LogIndexSequence { entries })
    }

    pub fn ratios(&self) -> Vec<BigRational> {
        self.entries
            .iter()
            .map(|e| {
                BigRational::new(BigInt::from(e.num.clone()), BigInt::from(e.den.clone()))
            })
            .collect()
    }

    /// The last `n` entries as their own sequence.
    pub fn tail(&self, n: usize) -> LogIndexSequence {
        let start = self.entries.len().saturating_sub(n);
        LogIndexSequence { entries: self.entries[start..].to_vec() }
    }

    /// CSV export: (index, numerator, denominator, ratio).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,numerator,denominator,ratio\n");
        for (e, r) in self.entries.iter().zip(self.ratios()) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.index,
                e.num,
                e.den,
                crate::arith::rational_string(&r)
            ));
        }
        out
    }
}

/// Minimum ratio over the window plus a qualitative trend read off the last
/// third of the entries. Never a limit claim: the verdict kind is always
/// "window".
pub fn liminf_window(seq: &LogIndexSequence) -> Result<(BigRational, Trend)> {
    if seq.entries.is_empty() {
        return Err(Error::precondition("empty sequence"));
    }
    if seq.entries.len() < 3 {
        return Err(Error::precondition("need at least 3 entries for a window verdict"));
    }
    let ratios = seq.ratios();
    let min = ratios.iter().min().unwrap().clone();
    let tail_len = ratios.len().div_ceil(3).max(2);
    let tail = &ratios[ratios.len() - tail_len..];
    let mut rises = false;
    let mut falls = false;
    for w in tail.windows(2) {
        if w[1] > w[0] {
            rises = true;
        }
        if w[1] < w[0] {
            falls = true;
        }
    }
    let prefix_min = ratios[..ratios.len() - tail_len].iter().min();
    let new_min_in_tail = match prefix_min {
        Some(pm) => tail.iter().any(|r| r < pm),
        None => false,
    };
    let trend = if rises && falls {
        Trend::Oscillating
    } else if new_min_in_tail || (falls && !rises) {
        Trend::Decreasing
    } else {
        Trend::Stable
    };
    Ok((min, trend))
}

/// H = H_1 x F_2 x ... x F_k x 1 x ... x 1 inside F_1 x ... x F_r, with the
/// first t factors of maximal rank.
#[derive(Debug, Clone)]
pub struct ProductSubgroupSpec {
    /// free ranks d_1 >= d_2 >= ... >= d_r, with d_1 >= 2
    pub ranks: Vec<u32>,
    /// number of factors used by H (H_1 plus k-1 full factors), 1 <= k <= t
    pub k: u32,
    /// dimension of H_1 inside F_1, in [0, 1]
    pub inner_dim: BigRational,
}

impl ProductSubgroupSpec {
    pub fn t(&self) -> u32 {
        let top = self.ranks[0];
        self.ranks.iter().take_while(|&&d| d == top).count() as u32
    }

    pub fn validate(&self) -> Result<()> {
        if self.ranks.is_empty() {
            return Err(Error::precondition("need at least one factor"));
        }
        if self.ranks[0] < 2 {
            return Err(Error::precondition("the maximal rank must be at least 2"));
        }
        if self.ranks.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::precondition("ranks must be non-increasing"));
        }
        if self.ranks.iter().any(|&d| d < 1) {
            return Err(Error::precondition("ranks must be positive"));
        }
        let t = self.t();
        if self.k < 1 || self.k > t {
            return Err(Error::precondition(format!(
                "k = {} outside 1..={t}",
                self.k
            )));
        }
        if self.inner_dim < BigRational::zero()
            || self.inner_dim > BigRational::from(BigInt::from(1))
        {
            return Err(Error::precondition("inner dimension outside [0, 1]"));
        }
        Ok(())
    }
}

/// (inner_dim + (k - 1)) / t, exact.
pub fn product_hdim(spec: &ProductSubgroupSpec) -> Result<BigRational> {
    spec.validate()?;
    let t = BigRational::from(BigInt::from(spec.t()));
    let k1 = BigRational::from(BigInt::from(spec.k - 1));
    Ok((spec.inner_dim.clone() + k1) / t)
}

/// log_p |F : P_n(F)| for a free factor of rank d.
pub fn free_factor_logindex(d: u32, n: u32) -> BigUint {
    let mut acc = BigUint::zero();
    for m in 1..n {
        acc += lambda_dim(d, m);
    }
    acc
}

/// Assemble the exact window sequence for levels n in [n_start, n_end]:
/// numerator(n) = inner[n] + sum of the k-1 full factors' log-indices,
/// denominator(n) = sum over all factors. `inner_numerators[n]` must supply
/// log_p |H_1 P_n : P_n| for every n in the window.
pub fn product_logindex_sequence(
    spec: &ProductSubgroupSpec,
    inner_numerators: &[BigUint],
    n_start: u32,
    n_end: u32,
) -> Result<LogIndexSequence> {
    spec.validate()?;
    if n_start < 2 || n_start > n_end {
        return Err(Error::precondition("window must satisfy 2 <= n_start <= n_end"));
    }
    if inner_numerators.len() <= n_end as usize {
        return Err(Error::precondition(format!(
            "inner numerator table too short: have {}, need index {}",
            inner_numerators.len(),
            n_end
        )));
    }
    let mut entries = Vec::new();
    for n in n_start..=n_end {
        let mut num = inner_numerators[n as usize].clone();
        for j in 1..spec.k as usize {
            num += free_factor_logindex(spec.ranks[j], n);
        }
        let mut den = BigUint::zero();
        for &dj in &spec.ranks {
            den += free_factor_logindex(dj, n);
        }
        entries.push(LogIndexEntry { index: n as u64, num, den });
    }
    LogIndexSequence::new(entries)
}
