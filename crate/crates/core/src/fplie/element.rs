//! Lie elements as F_p-combinations of Hall basis elements, and the
//! rewriting that expresses an arbitrary bracket in the basis.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::fp::FpCtx;

use super::{CommNode, HallBasis, Rank};

/// Finite F_p-combination of basic commutators. Zero has an empty term map;
/// all stored coefficients are nonzero and reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieElement {
    pub terms: BTreeMap<Rank, u64>,
}

impl LieElement {
    pub fn zero() -> Self {
        LieElement { terms: BTreeMap::new() }
    }

    pub fn basis(rank: Rank) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(rank, 1);
        LieElement { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiset of weights present.
    pub fn weights(&self, basis: &HallBasis) -> Vec<u32> {
        self.terms.keys().map(|&r| basis.weight(r)).collect()
    }

    /// The single weight of a homogeneous element, if homogeneous.
    pub fn homogeneous_weight(&self, basis: &HallBasis) -> Option<u32> {
        let mut it = self.terms.keys().map(|&r| basis.weight(r));
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    fn add_term(&mut self, field: FpCtx, rank: Rank, coeff: u64) {
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(rank).or_insert(0);
        *entry = field.add(*entry, coeff);
        if *entry == 0 {
            self.terms.remove(&rank);
        }
    }
}

type BasicExpansion = Arc<Vec<(Rank, u64)>>;

/// The free F_p-Lie algebra on d generators, truncated at a weight cutoff.
/// Brackets of basis elements are memoised; the structure is safe to share
/// across threads.
pub struct FreeLieAlgebra {
    pub field: FpCtx,
    pub basis: Arc<HallBasis>,
    memo: Mutex<HashMap<(Rank, Rank), BasicExpansion>>,
}

impl FreeLieAlgebra {
    pub fn new(p: u64, d: u32, max_weight: u32, max_basis: usize) -> Result<Self> {
        let field = FpCtx::new(p)?;
        let basis = Arc::new(HallBasis::enumerate(d, max_weight, max_basis)?);
        Ok(FreeLieAlgebra { field, basis, memo: Mutex::new(HashMap::new()) })
    }

    pub fn from_basis(p: u64, basis: Arc<HallBasis>) -> Result<Self> {
        let field = FpCtx::new(p)?;
        Ok(FreeLieAlgebra { field, basis, memo: Mutex::new(HashMap::new()) })
    }

    pub fn max_weight(&self) -> u32 {
        self.basis.max_weight
    }

    /// [b_i, b_j] expanded in the Hall basis, truncated at the cutoff.
    /// Requires i > j; the caller handles antisymmetry.
    fn bracket_basic_ordered(&self, i: Rank, j: Rank) -> BasicExpansion {
        debug_assert!(i > j);
        if let Some(hit) = self.memo.lock().unwrap().get(&(i, j)) {
            return hit.clone();
        }
        let w = self.basis.weight(i) + self.basis.weight(j);
        let result: Vec<(Rank, u64)> = if w > self.basis.max_weight {
            Vec::new()
        } else if let Some(rank) = self.basis.pair_rank(i, j) {
            vec![(rank, 1)]
        } else {
            // i = [y, z] with z > j; Jacobi: [[y,z],v] = [[y,v],z] + [y,[z,v]]
            let (y, z) = match self.basis.get(i).node {
                CommNode::Pair(y, z) => (y, z),
                CommNode::Gen(_) => unreachable!("generator pairs are always basic"),
            };
            let yv = self.bracket_basic(y, j);
            let zv = self.bracket_basic(z, j);
            let mut acc = LieElement::zero();
            self.accumulate_bracket_expansion(&mut acc, &yv, z, 1);
            self.accumulate_bracket_right(&mut acc, y, &zv, 1);
            acc.terms.into_iter().collect()
        };
        let arc: BasicExpansion = Arc::new(result);
        self.memo.lock().unwrap().insert((i, j), arc.clone());
        arc
    }

    /// [b_i, b_j] for any ranks, as a signed expansion (sign folded into
    /// coefficients).
    fn bracket_basic(&self, i: Rank, j: Rank) -> LieElement {
        if i == j {
            return LieElement::zero();
        }
        let (a, b, negate) = if i > j { (i, j, false) } else { (j, i, true) };
        let exp = self.bracket_basic_ordered(a, b);
        let mut out = LieElement::zero();
        for &(r, c) in exp.iter() {
            let c = if negate { self.field.neg(c) } else { c };
            out.add_term(self.field, r, c);
        }
        out
    }

    /// acc += c * [expansion, z]
    fn accumulate_bracket_expansion(
        &self,
        acc: &mut LieElement,
        left: &LieElement,
        z: Rank,
        c: u64,
    ) {
        for (&r, &cr) in &left.terms {
            let part = self.bracket_basic(r, z);
            for (&t, &ct) in &part.terms {
                acc.add_term(self.field, t, self.field.mul(c, self.field.mul(cr, ct)));
            }
        }
    }

    /// acc += c * [y, expansion]
    fn accumulate_bracket_right(
        &self,
        acc: &mut LieElement,
        y: Rank,
        right: &LieElement,
        c: u64,
    ) {
        for (&r, &cr) in &right.terms {
            let part = self.bracket_basic(y, r);
            for (&t, &ct) in &part.terms {
                acc.add_term(self.field, t, self.field.mul(c, self.field.mul(cr, ct)));
            }
        }
    }

    /// Bilinear bracket of two elements, normalised into the Hall basis and
    /// truncated at the weight cutoff.
    pub fn bracket(&self, a: &LieElement, b: &LieElement) -> LieElement {
        let mut acc = LieElement::zero();
        for (&ra, &ca) in &a.terms {
            for (&rb, &cb) in &b.terms {
                let exp = self.bracket_basic(ra, rb);
                let c = self.field.mul(ca, cb);
                for (&t, &ct) in &exp.terms {
                    acc.add_term(self.field, t, self.field.mul(c, ct));
                }
            }
        }
        acc
    }

    pub fn add(&self, a: &LieElement, b: &LieElement) -> LieElement {
        let mut out = a.clone();
        for (&r, &c) in &b.terms {
            out.add_term(self.field, r, c);
        }
        out
    }

    pub fn scale(&self, a: &LieElement, c: u64) -> LieElement {
        let mut out = LieElement::zero();
        for (&r, &cr) in &a.terms {
            out.add_term(self.field, r, self.field.mul(cr, c));
        }
        out
    }

    /// `c1*m1 + c2*m2` with coefficients in 0..p-1, terms in rank order;
    /// the zero element prints as "0".
    pub fn element_string(&self, a: &LieElement) -> String {
        if a.is_zero() {
            return "0".into();
        }
        a.terms
            .iter()
            .map(|(&r, &c)| format!("{}*{}", c, self.basis.to_string(r)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parse `c1*m1 + c2*m2`, bare monomials allowed.
    pub fn parse_element(&self, s: &str) -> Result<LieElement> {
        let s = s.trim();
        if s == "0" {
            return Ok(LieElement::zero());
        }
        let mut out = LieElement::zero();
        for part in s.split('+') {
            let part = part.trim();
            if part.is_empty() {
                return Err(Error::parse("empty term in element"));
            }
            let (coeff, mono) = match part.split_once('*') {
                Some((c, m)) => {
                    let c: u64 = c
                        .trim()
                        .parse()
                        .map_err(|_| Error::parse(format!("bad coefficient in {part:?}")))?;
                    (c % self.field.p, m.trim())
                }
                None => (1, part),
            };
            let rank = self.basis.parse(mono)?;
            out.add_term(self.field, rank, coeff);
        }
        Ok(out)
    }

    /// Convert a coordinate row over the weight-n basis into an element.
    pub fn element_from_row(&self, weight: u32, row: &[u64]) -> LieElement {
        let range = self.basis.weight_range(weight);
        debug_assert_eq!(row.len(), range.len());
        let mut out = LieElement::zero();
        for (off, &c) in row.iter().enumerate() {
            out.add_term(self.field, Rank((range.start + off) as u32), c);
        }
        out
    }

    /// Coordinates of a homogeneous element over the weight-n basis slice.
    pub fn row_from_element(&self, weight: u32, a: &LieElement) -> Vec<u64> {
        let range = self.basis.weight_range(weight);
        let mut row = vec![0u64; range.len()];
        for (&r, &c) in &a.terms {
            debug_assert_eq!(self.basis.weight(r), weight);
            row[r.idx() - range.start] = c;
        }
        row
    }
}
