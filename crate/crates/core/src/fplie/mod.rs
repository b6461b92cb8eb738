//! The free F_p-Lie algebra on d generators: Hall basis enumeration, Witt
//! dimensions, bracket normalisation, graded subalgebra closure and density
//! sequences.

mod element;
mod closure;

pub use closure::{subalgebra_closure, density_sequence, GradedSubspace};
pub use element::{FreeLieAlgebra, LieElement};

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::arith::{divisors, moebius};
use crate::error::{Error, Result};

/// Position of a basic commutator in the global total order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rank(pub u32);

impl Rank {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// Structure of a basic commutator: a generator leaf or a bracket of two
/// earlier basis elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommNode {
    /// Generator x_{i+1} (indices are 0-based internally, printed 1-based).
    Gen(u32),
    Pair(Rank, Rank),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasicCommutator {
    pub node: CommNode,
    pub weight: u32,
}

/// dim L_n = (1/n) sum_{m | n} mu(m) d^{n/m}, exact in unbounded integers.
pub fn witt_dimension(d: u32, n: u32) -> BigUint {
    assert!(d >= 1 && n >= 1);
    let mut acc = num_bigint::BigInt::zero();
    for m in divisors(n as u64) {
        let mu = moebius(m);
        if mu == 0 {
            continue;
        }
        let term = num_bigint::BigInt::from(d).pow(n / m as u32);
        if mu > 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    let (sign, mag) = acc.into_parts();
    assert_ne!(sign, num_bigint::Sign::Minus, "Witt sum is never negative");
    &mag / BigUint::from(n)
}

/// All basic commutators of weight at most `max_weight`, in the fixed total
/// order: weight first, then creation order, where new commutators of a given
/// weight are created in lexicographic order of the top bracket's
/// (rank(u), rank(v)).
#[derive(Debug, Clone)]
pub struct HallBasis {
    pub d: u32,
    pub max_weight: u32,
    elems: Vec<BasicCommutator>,
    /// elems[weight_start[w-1] .. weight_start[w]] are the weight-w elements
    weight_start: Vec<usize>,
    pair_index: HashMap<(Rank, Rank), Rank>,
}

impl HallBasis {
    pub fn enumerate(d: u32, max_weight: u32, max_elems: usize) -> Result<Self> {
        if d < 1 || max_weight < 1 {
            return Err(Error::precondition("need d >= 1 and max_weight >= 1"));
        }
        let mut elems: Vec<BasicCommutator> = (0..d)
            .map(|i| BasicCommutator { node: CommNode::Gen(i), weight: 1 })
            .collect();
        let mut weight_start = vec![0usize, elems.len()];
        let mut pair_index = HashMap::new();
        for n in 2..=max_weight {
            let prior = elems.len();
            // scan (rank_u, rank_v) lexicographically
            for u in 0..prior {
                let wu = elems[u].weight;
                if wu >= n {
                    break;
                }
                let wv = n - wu;
                let (lo, hi) = (weight_start[wv as usize - 1], weight_start[wv as usize]);
                for v in lo..hi.min(u) {
                    let ok = match elems[u].node {
                        CommNode::Gen(_) => true,
                        CommNode::Pair(_, z) => v as u32 >= z.0,
                    };
                    if ok {
                        let rank = Rank(elems.len() as u32);
                        pair_index.insert((Rank(u as u32), Rank(v as u32)), rank);
                        elems.push(BasicCommutator {
                            node: CommNode::Pair(Rank(u as u32), Rank(v as u32)),
                            weight: n,
                        });
                        if elems.len() > max_elems {
                            return Err(Error::resource(format!(
                                "Hall basis exceeds cap of {max_elems} elements at weight {n}"
                            )));
                        }
                    }
                }
            }
            weight_start.push(elems.len());
        }
        Ok(HallBasis { d, max_weight, elems, weight_start, pair_index })
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn get(&self, r: Rank) -> &BasicCommutator {
        &self.elems[r.idx()]
    }

    pub fn weight(&self, r: Rank) -> u32 {
        self.elems[r.idx()].weight
    }

    /// Ranks of the weight-w elements.
    pub fn weight_range(&self, w: u32) -> std::ops::Range<usize> {
        assert!(w >= 1 && w <= self.max_weight);
        self.weight_start[w as usize - 1]..self.weight_start[w as usize]
    }

    /// Number of basis elements of weight <= w.
    pub fn count_weight_le(&self, w: u32) -> usize {
        assert!(w <= self.max_weight);
        self.weight_start[w as usize]
    }

    /// Is [u, v] a basic commutator as it stands?
    pub fn is_basic_pair(&self, u: Rank, v: Rank) -> bool {
        if u <= v {
            return false;
        }
        match self.elems[u.idx()].node {
            CommNode::Gen(_) => true,
            CommNode::Pair(_, z) => v >= z,
        }
    }

    /// Rank of the basic commutator [u, v], when defined within the cutoff.
    pub fn pair_rank(&self, u: Rank, v: Rank) -> Option<Rank> {
        self.pair_index.get(&(u, v)).copied()
    }

    /// Nested bracket string, e.g. `[[x2,x1],x1]`.
    pub fn to_string(&self, r: Rank) -> String {
        match self.elems[r.idx()].node {
            CommNode::Gen(i) => format!("x{}", i + 1),
            CommNode::Pair(u, v) => format!("[{},{}]", self.to_string(u), self.to_string(v)),
        }
    }

    /// Parse a nested bracket string into a rank; the commutator must be
    /// basic and within the weight cutoff.
    pub fn parse(&self, s: &str) -> Result<Rank> {
        let (rank, rest) = self.parse_inner(s.trim())?;
        if !rest.trim_start().is_empty() {
            return Err(Error::parse(format!("trailing input after commutator: {rest:?}")));
        }
        Ok(rank)
    }

    fn parse_inner<'a>(&self, s: &'a str) -> Result<(Rank, &'a str)> {
        let s = s.trim_start();
        if let Some(rest) = s.strip_prefix('[') {
            let (u, rest) = self.parse_inner(rest)?;
            let rest = rest.trim_start();
            let rest = rest
                .strip_prefix(',')
                .ok_or_else(|| Error::parse(format!("expected ',' in {s:?}")))?;
            let (v, rest) = self.parse_inner(rest)?;
            let rest = rest.trim_start();
            let rest = rest
                .strip_prefix(']')
                .ok_or_else(|| Error::parse(format!("expected ']' in {s:?}")))?;
            let rank = self.pair_rank(u, v).ok_or_else(|| {
                Error::parse(format!(
                    "[{},{}] is not a basic commutator within weight {}",
                    self.to_string(u),
                    self.to_string(v),
                    self.max_weight
                ))
            })?;
            Ok((rank, rest))
        } else if let Some(rest) = s.strip_prefix('x') {
            let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
            let idx: u32 = digits
                .parse()
                .map_err(|_| Error::parse(format!("bad generator in {s:?}")))?;
            if idx == 0 || idx > self.d {
                return Err(Error::parse(format!("generator x{idx} out of range 1..={}", self.d)));
            }
            Ok((Rank(idx - 1), &rest[digits.len()..]))
        } else {
            Err(Error::parse(format!("expected generator or '[' in {s:?}")))
        }
    }
}
