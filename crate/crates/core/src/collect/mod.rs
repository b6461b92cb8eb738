//! Hall collection in free groups: positive words in generalized basic
//! group commutators, ordered normal forms modulo the class-(r+1) lower
//! central term, a matrix soundness oracle, and the leading-term map into
//! the mixed Lie algebra.

mod magnus;
mod matrices;
mod phi;
mod process;

pub use matrices::{
    evaluate_normal_form, evaluate_word, random_assignment, Assignment, UtMatrix,
};
pub use phi::{phi, verify_phi_correspondence, PhiOutcome, PhiReport};
pub use process::{collect, collect_factors, random_rewrite};

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::valuation_int;
use crate::error::{Error, Result};
use crate::fp::FpCtx;
use crate::fplie::{HallBasis, Rank};

/// The ambient data for collection: the prime and the Hall basis of core
/// commutators up to the class cutoff.
#[derive(Clone)]
pub struct GroupContext {
    pub field: FpCtx,
    pub basis: Arc<HallBasis>,
}

impl GroupContext {
    pub fn new(p: u64, basis: Arc<HallBasis>) -> Result<Self> {
        Ok(GroupContext { field: FpCtx::new(p)?, basis })
    }

    pub fn p(&self) -> u64 {
        self.field.p
    }
}

/// c^{p^k} for a basic group commutator c; `exp_log` is k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenBasicGroupCommutator {
    pub exp_log: u32,
    pub core: Rank,
}

impl GenBasicGroupCommutator {
    pub fn new(exp_log: u32, core: Rank) -> Self {
        GenBasicGroupCommutator { exp_log, core }
    }
}

/// Positive word: product of powers of generalized basic group commutators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupWord {
    pub factors: Vec<(GenBasicGroupCommutator, u64)>,
}

impl GroupWord {
    /// Exponents must be positive and no core may carry two different
    /// decorations (the decoration must be a function of the core).
    pub fn new(factors: Vec<(GenBasicGroupCommutator, u64)>) -> Result<Self> {
        let mut seen: HashMap<Rank, u32> = HashMap::new();
        for &(g, e) in &factors {
            if e == 0 {
                return Err(Error::precondition("factor exponents must be positive"));
            }
            match seen.insert(g.core, g.exp_log) {
                Some(k) if k != g.exp_log => {
                    return Err(Error::precondition(
                        "a core appears with two different p-power decorations; \
                         decorations must be determined by the core",
                    ));
                }
                _ => {}
            }
        }
        Ok(GroupWord { factors })
    }

    pub fn identity() -> Self {
        GroupWord { factors: Vec::new() }
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// w^n by concatenation.
    pub fn pow(&self, n: u64) -> Self {
        let mut factors = Vec::with_capacity(self.factors.len() * n as usize);
        for _ in 0..n {
            factors.extend_from_slice(&self.factors);
        }
        GroupWord { factors }
    }

    /// Grammar: whitespace-separated factors; a factor is a bracket string
    /// optionally followed by `^n` (a positive power) or `^p^k` / `^p`
    /// (a p-power decoration).
    pub fn parse(ctx: &GroupContext, s: &str) -> Result<Self> {
        let mut factors = Vec::new();
        for token in s.split_whitespace() {
            let (core_str, suffix) = match token.find('^') {
                Some(i) => (&token[..i], &token[i + 1..]),
                None => (token, ""),
            };
            let core = ctx.basis.parse(core_str)?;
            let factor = if suffix.is_empty() {
                (GenBasicGroupCommutator::new(0, core), 1u64)
            } else if let Some(kpart) = suffix.strip_prefix('p') {
                let k: u32 = if kpart.is_empty() {
                    1
                } else if let Some(ks) = kpart.strip_prefix('^') {
                    ks.parse()
                        .map_err(|_| Error::parse(format!("bad p-power in {token:?}")))?
                } else {
                    return Err(Error::parse(format!("bad exponent suffix in {token:?}")));
                };
                (GenBasicGroupCommutator::new(k, core), 1)
            } else {
                let n: u64 = suffix
                    .parse()
                    .map_err(|_| Error::parse(format!("bad exponent in {token:?}")))?;
                (GenBasicGroupCommutator::new(0, core), n)
            };
            factors.push(factor);
        }
        GroupWord::new(factors)
    }

    pub fn display(&self, ctx: &GroupContext) -> String {
        self.factors
            .iter()
            .map(|&(g, e)| {
                let core = ctx.basis.to_string(g.core);
                let mut s = core;
                if g.exp_log == 1 {
                    s.push_str("^p");
                } else if g.exp_log > 1 {
                    s.push_str(&format!("^p^{}", g.exp_log));
                }
                if e > 1 {
                    s.push_str(&format!("^{e}"));
                }
                s
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Node of a factor tree: either one of the word's atoms or a bracket of
/// two earlier tree entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomNode {
    Atom(usize),
    Pair(u32, u32),
}

#[derive(Debug, Clone)]
pub struct AtomHallElem {
    pub node: AtomNode,
    /// total core weight of the flattened tree
    pub weight: u32,
    /// decoration sum: occurrences of each atom times its exp_log
    pub deco: u64,
    /// rank of the flattened tree in the core Hall basis, when it is basic
    pub flat: Option<Rank>,
}

/// Hall basis over the word's atoms, with atom weights given by their core
/// weights. The total order is by weight, atoms by core rank first inside a
/// weight, then created pairs in lexicographic creation order.
pub struct AtomHall {
    pub atoms: Vec<GenBasicGroupCommutator>,
    pub elems: Vec<AtomHallElem>,
    pub max_weight: u32,
    weight_start: Vec<usize>,
    pair_index: HashMap<(u32, u32), u32>,
}

impl AtomHall {
    pub fn build(
        ctx: &GroupContext,
        atoms: Vec<GenBasicGroupCommutator>,
        r: u32,
        max_elems: usize,
    ) -> Result<Self> {
        let basis = &ctx.basis;
        let mut elems: Vec<AtomHallElem> = Vec::new();
        let mut weight_start = vec![0usize];
        let mut pair_index = HashMap::new();
        let mut atom_of_weight: Vec<Vec<usize>> = vec![Vec::new(); r as usize + 1];
        for (i, a) in atoms.iter().enumerate() {
            let w = basis.weight(a.core);
            if w <= r {
                atom_of_weight[w as usize].push(i);
            }
        }
        for n in 1..=r {
            let prior = elems.len();
            for &i in &atom_of_weight[n as usize] {
                elems.push(AtomHallElem {
                    node: AtomNode::Atom(i),
                    weight: n,
                    deco: atoms[i].exp_log as u64,
                    flat: Some(atoms[i].core),
                });
            }
            for u in 0..prior {
                let wu = elems[u].weight;
                if wu >= n {
                    break;
                }
                let wv = n - wu;
                let (lo, hi) = (weight_start[wv as usize - 1], weight_start[wv as usize]);
                for v in lo..hi.min(u) {
                    let ok = match elems[u].node {
                        AtomNode::Atom(_) => true,
                        AtomNode::Pair(_, z) => v as u32 >= z,
                    };
                    if !ok {
                        continue;
                    }
                    let flat = match (elems[u].flat, elems[v].flat) {
                        (Some(fu), Some(fv)) => basis.pair_rank(fu, fv),
                        _ => None,
                    };
                    pair_index.insert((u as u32, v as u32), elems.len() as u32);
                    elems.push(AtomHallElem {
                        node: AtomNode::Pair(u as u32, v as u32),
                        weight: n,
                        deco: elems[u].deco + elems[v].deco,
                        flat,
                    });
                    if elems.len() > max_elems {
                        return Err(Error::resource(format!(
                            "atom Hall basis exceeds cap of {max_elems} elements"
                        )));
                    }
                }
            }
            weight_start.push(elems.len());
        }
        Ok(AtomHall { atoms, elems, max_weight: r, weight_start, pair_index })
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn weight(&self, rank: u32) -> u32 {
        self.elems[rank as usize].weight
    }

    pub fn weight_range(&self, w: u32) -> std::ops::Range<usize> {
        self.weight_start[w as usize - 1]..self.weight_start[w as usize]
    }

    pub fn atom_rank(&self, atom_idx: usize) -> u32 {
        self.elems
            .iter()
            .position(|e| e.node == AtomNode::Atom(atom_idx))
            .expect("atom within cutoff") as u32
    }

    /// Is [u, v] a basic commutator over the atoms as it stands?
    pub fn is_basic_pair(&self, u: u32, v: u32) -> bool {
        if u <= v {
            return false;
        }
        match self.elems[u as usize].node {
            AtomNode::Atom(_) => true,
            AtomNode::Pair(_, z) => v >= z,
        }
    }

    pub fn pair_rank(&self, u: u32, v: u32) -> Option<u32> {
        self.pair_index.get(&(u, v)).copied()
    }

    /// Bracket string of the flattened core tree.
    pub fn core_string(&self, ctx: &GroupContext, rank: u32) -> String {
        match self.elems[rank as usize].node {
            AtomNode::Atom(i) => ctx.basis.to_string(self.atoms[i].core),
            AtomNode::Pair(u, v) => format!(
                "[{},{}]",
                self.core_string(ctx, u),
                self.core_string(ctx, v)
            ),
        }
    }

    /// Bracket string with p-power decorations shown on the leaves.
    pub fn factor_string(&self, ctx: &GroupContext, rank: u32) -> String {
        match self.elems[rank as usize].node {
            AtomNode::Atom(i) => {
                let a = self.atoms[i];
                let core = ctx.basis.to_string(a.core);
                match a.exp_log {
                    0 => core,
                    1 => format!("{core}^p"),
                    k => format!("{core}^p^{k}"),
                }
            }
            AtomNode::Pair(u, v) => format!(
                "[{},{}]",
                self.factor_string(ctx, u),
                self.factor_string(ctx, v)
            ),
        }
    }
}

/// Ordered normal form modulo weight-(r+1) terms: entries carry the factor
/// tree (via its rank in the atom Hall basis) and a nonzero multiplicity.
pub struct NormalForm {
    pub p: u64,
    pub r: u32,
    pub atom_hall: Arc<AtomHall>,
    pub entries: Vec<NfEntry>,
}

#[derive(Debug, Clone)]
pub struct NfEntry {
    pub ah_rank: u32,
    pub mult: BigInt,
}

impl NfEntry {
    /// mult = sign * p^e * j with p coprime to j.
    pub fn e_and_j(&self, p: u64) -> (u64, BigInt) {
        debug_assert!(!self.mult.is_zero());
        let e = valuation_int(&self.mult, p).unwrap();
        let j = &self.mult / BigInt::from(p).pow(u32::try_from(e).unwrap());
        (e, j)
    }
}

impl NormalForm {
    pub fn deco(&self, entry: &NfEntry) -> u64 {
        self.atom_hall.elems[entry.ah_rank as usize].deco
    }

    pub fn core_weight(&self, entry: &NfEntry) -> u32 {
        self.atom_hall.elems[entry.ah_rank as usize].weight
    }

    pub fn flat_rank(&self, entry: &NfEntry) -> Option<Rank> {
        self.atom_hall.elems[entry.ah_rank as usize].flat
    }

    /// Are all entry cores basic commutators in the generators?
    pub fn all_cores_basic(&self) -> bool {
        self.entries.iter().all(|e| self.flat_rank(e).is_some())
    }

    pub fn display(&self, ctx: &GroupContext) -> String {
        if self.entries.is_empty() {
            return "1".into();
        }
        self.entries
            .iter()
            .map(|e| {
                let s = self.atom_hall.factor_string(ctx, e.ah_rank);
                if e.mult == BigInt::from(1) {
                    s
                } else if s.contains('^') {
                    format!("({})^{}", s, e.mult)
                } else {
                    format!("{}^{}", s, e.mult)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// JSON array of {core, e, j, deco}.
    pub fn to_json(&self, ctx: &GroupContext) -> serde_json::Value {
        let arr: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|en| {
                let (e, j) = en.e_and_j(self.p);
                serde_json::json!({
                    "core": self.atom_hall.core_string(ctx, en.ah_rank),
                    "e": e,
                    "j": j.to_string(),
                    "deco": self.deco(en),
                })
            })
            .collect();
        serde_json::json!(arr)
    }
}

/// Deduplicated atoms of a word (sorted by core rank) plus the expanded
/// factor sequence over atom indices, dropping factors beyond the cutoff.
pub(crate) fn word_atoms(
    ctx: &GroupContext,
    word: &GroupWord,
    r: u32,
) -> Result<(Vec<GenBasicGroupCommutator>, Vec<usize>)> {
    let mut atoms: Vec<GenBasicGroupCommutator> = word
        .factors
        .iter()
        .map(|&(g, _)| g)
        .filter(|g| ctx.basis.weight(g.core) <= r)
        .collect();
    atoms.sort_by_key(|g| g.core);
    atoms.dedup();
    let mut seq = Vec::new();
    for &(g, e) in &word.factors {
        if ctx.basis.weight(g.core) > r {
            continue;
        }
        let idx = atoms.binary_search_by_key(&g.core, |a| a.core).unwrap();
        for _ in 0..e {
            seq.push(idx);
        }
    }
    Ok((atoms, seq))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, d: u32, w: u32) -> GroupContext {
        let basis = Arc::new(HallBasis::enumerate(d, w, 100_000).unwrap());
        GroupContext::new(p, basis).unwrap()
    }

    #[test]
    fn parse_word_forms() {
        let c = ctx(3, 2, 4);
        let w = GroupWord::parse(&c, "x2 x1 [x2,x1]^p^2 x1^3 [x2,x1]^p^2").unwrap();
        assert_eq!(w.factors.len(), 5);
        assert_eq!(w.factors[2].0.exp_log, 2);
        assert_eq!(w.factors[3].1, 3);
        assert_eq!(w.display(&c), "x2 x1 [x2,x1]^p^2 x1^3 [x2,x1]^p^2");
    }

    #[test]
    fn decoration_must_be_core_function() {
        let c = ctx(3, 2, 4);
        assert!(GroupWord::parse(&c, "x1^p x1").is_err());
        assert!(GroupWord::parse(&c, "x1^p x1^p").is_ok());
    }

    #[test]
    fn atom_hall_over_unit_atoms_matches_plain_hall() {
        // atoms = the generators themselves: the weighted Hall basis over
        // the atoms must mirror the plain Hall basis
        let c = ctx(3, 2, 5);
        let atoms = vec![
            GenBasicGroupCommutator::new(0, Rank(0)),
            GenBasicGroupCommutator::new(0, Rank(1)),
        ];
        let ah = AtomHall::build(&c, atoms, 5, 100_000).unwrap();
        assert_eq!(ah.len(), c.basis.len());
        for (i, e) in ah.elems.iter().enumerate() {
            assert_eq!(e.flat, Some(Rank(i as u32)), "flat rank mismatch at {i}");
            assert_eq!(e.weight, c.basis.weight(Rank(i as u32)));
            assert_eq!(e.deco, 0);
        }
    }

    #[test]
    fn atom_hall_weighted_counts() {
        // one weight-1 atom and one weight-2 atom: dimensions follow the
        // two-generator weighted Witt numbers 1,1,1,1,2,2
        let c = ctx(3, 2, 6);
        let atoms = vec![
            GenBasicGroupCommutator::new(0, Rank(0)),
            GenBasicGroupCommutator::new(1, c.basis.parse("[x2,x1]").unwrap()),
        ];
        let ah = AtomHall::build(&c, atoms, 6, 100_000).unwrap();
        let dims: Vec<usize> = (1..=6).map(|w| ah.weight_range(w).len()).collect();
        assert_eq!(dims, vec![1, 1, 1, 1, 2, 2]);
        // decoration sums accumulate the weight-2 atom's exp_log
        let top = &ah.elems[ah.weight_range(5).start];
        assert!(top.deco >= 1);
    }
}
