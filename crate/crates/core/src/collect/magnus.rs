//! Truncated Magnus series for the free group on the word's atoms.
//!
//! Atom u maps to 1 + U in the free associative ring over Z, truncated at
//! total core weight r. For free groups the lower central series matches the
//! degree filtration of this embedding, so the truncated series is a faithful
//! model of the word modulo weight-(r+1) commutators and yields the canonical
//! ordered normal form by leading-term extraction, including the cases where
//! the surface collection process would create a bracket that is not basic.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

use super::{AtomHall, AtomNode, NfEntry};

type Mono = Vec<u16>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Series {
    terms: BTreeMap<Mono, BigInt>,
}

pub(crate) struct MagnusRing<'a> {
    ah: &'a AtomHall,
    weights: Vec<u32>,
    r: u32,
}

impl<'a> MagnusRing<'a> {
    pub fn new(ah: &'a AtomHall, ctx: &super::GroupContext, r: u32) -> Self {
        let weights = ah.atoms.iter().map(|a| ctx.basis.weight(a.core)).collect();
        MagnusRing { ah, weights, r }
    }

    fn mono_weight(&self, m: &Mono) -> u32 {
        m.iter().map(|&i| self.weights[i as usize]).sum()
    }

    pub fn one(&self) -> Series {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), BigInt::one());
        Series { terms }
    }

    pub fn atom(&self, i: usize) -> Series {
        let mut s = self.one();
        s.terms.insert(vec![i as u16], BigInt::one());
        s
    }

    pub fn mul(&self, a: &Series, b: &Series) -> Series {
        let mut out: BTreeMap<Mono, BigInt> = BTreeMap::new();
        for (ma, ca) in &a.terms {
            let wa = self.mono_weight(ma);
            for (mb, cb) in &b.terms {
                if wa + self.mono_weight(mb) > self.r {
                    continue;
                }
                let mut m = ma.clone();
                m.extend_from_slice(mb);
                let c = ca * cb;
                let e = out.entry(m).or_insert_with(BigInt::zero);
                *e += c;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Series { terms: out }
    }

    /// (1 + n)^{-1} = sum (-n)^i, finite under truncation.
    pub fn inv(&self, a: &Series) -> Series {
        let mut n = a.clone();
        let had_one = n.terms.remove(&Vec::new());
        debug_assert_eq!(had_one, Some(BigInt::one()), "series must be unipotent");
        let mut acc = self.one();
        let mut power = self.one();
        loop {
            // power *= -n
            let mut neg = n.clone();
            for c in neg.terms.values_mut() {
                *c = -c.clone();
            }
            power = self.mul(&power, &neg);
            if power.terms.is_empty() {
                break;
            }
            for (m, c) in &power.terms {
                let e = acc.terms.entry(m.clone()).or_insert_with(BigInt::zero);
                *e += c;
            }
            acc.terms.retain(|_, c| !c.is_zero());
        }
        acc
    }

    pub fn pow(&self, a: &Series, e: &BigInt) -> Series {
        let base = if e.is_negative() { self.inv(a) } else { a.clone() };
        let mut k = e.abs();
        let mut acc = self.one();
        let mut sq = base;
        while !k.is_zero() {
            if (&k & BigInt::one()) == BigInt::one() {
                acc = self.mul(&acc, &sq);
            }
            k >>= 1;
            if !k.is_zero() {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    pub fn commutator(&self, a: &Series, b: &Series) -> Series {
        let ia = self.inv(a);
        let ib = self.inv(b);
        self.mul(&self.mul(&ia, &ib), &self.mul(a, b))
    }

    /// Series of an atom-Hall tree.
    pub fn tree(&self, rank: u32) -> Series {
        match self.ah.elems[rank as usize].node {
            AtomNode::Atom(i) => self.atom(i),
            AtomNode::Pair(u, v) => self.commutator(&self.tree(u), &self.tree(v)),
        }
    }

    /// Series of a product of factors given by their atom-Hall ranks.
    pub fn product(&self, factors: &[u32]) -> Series {
        let mut acc = self.one();
        for &f in factors {
            match self.ah.elems[f as usize].node {
                AtomNode::Atom(i) => {
                    // multiplying by (1 + U_i): acc + acc * U_i
                    let mut extra: Vec<(Mono, BigInt)> = Vec::new();
                    for (m, c) in &acc.terms {
                        if self.mono_weight(m) + self.weights[i] <= self.r {
                            let mut m2 = m.clone();
                            m2.push(i as u16);
                            extra.push((m2, c.clone()));
                        }
                    }
                    for (m, c) in extra {
                        let e = acc.terms.entry(m).or_insert_with(BigInt::zero);
                        *e += c;
                    }
                    acc.terms.retain(|_, c| !c.is_zero());
                }
                AtomNode::Pair(_, _) => {
                    acc = self.mul(&acc, &self.tree(f));
                }
            }
        }
        acc
    }
}

/// The canonical ordered normal form of a positive word: extract, weight by
/// weight, the Lie coordinates of the remainder over the atom-Hall basis and
/// divide the corresponding factors off.
pub(crate) fn extract_normal_form(
    ring: &MagnusRing<'_>,
    ah: &AtomHall,
    factors: &[u32],
) -> Result<Vec<NfEntry>> {
    let mut remainder = ring.product(factors);
    let mut entries: Vec<NfEntry> = Vec::new();
    for w in 1..=ring.r {
        let lie_terms: Vec<(Mono, BigInt)> = remainder
            .terms
            .iter()
            .filter(|(m, _)| !m.is_empty() && ring.mono_weight(m) == w)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        if lie_terms.is_empty() {
            continue;
        }
        let range = ah.weight_range(w);
        if range.is_empty() {
            return Err(Error::precondition(
                "weight component without basis elements; remainder is not a Lie element",
            ));
        }
        // coordinates of the weight-w component over the basis expansions
        let coords = solve_lie_coordinates(ring, range.clone(), &lie_terms)?;
        let mut divisor = ring.one();
        for (offset, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let rank = (range.start + offset) as u32;
            entries.push(NfEntry { ah_rank: rank, mult: c.clone() });
            divisor = ring.mul(&divisor, &ring.pow(&ring.tree(rank), c));
        }
        remainder = ring.mul(&ring.inv(&divisor), &remainder);
    }
    if remainder != ring.one() {
        return Err(Error::precondition(
            "normal form extraction left a nontrivial remainder",
        ));
    }
    Ok(entries)
}

/// Solve target = sum coords[i] * expansion(basis_i) over the monomial
/// coordinates, exactly. The solution of a free-Lie-ring coordinate problem
/// is integral; anything else is an internal error.
fn solve_lie_coordinates(
    ring: &MagnusRing<'_>,
    range: std::ops::Range<usize>,
    target: &[(Mono, BigInt)],
) -> Result<Vec<BigInt>> {
    let nvars = range.len();
    // expansion of tree(rank) keeps only its top-weight homogeneous part,
    // which is the Lie polynomial of the bracket
    let mut cols: Vec<BTreeMap<Mono, BigInt>> = Vec::with_capacity(nvars);
    for rank in range.clone() {
        let s = ring.tree(rank as u32);
        let w = ring.ah.weight(rank as u32);
        let col: BTreeMap<Mono, BigInt> = s
            .terms
            .into_iter()
            .filter(|(m, _)| !m.is_empty() && ring.mono_weight(m) == w)
            .collect();
        cols.push(col);
    }
    let mut monos: Vec<Mono> = target.iter().map(|(m, _)| m.clone()).collect();
    for col in &cols {
        monos.extend(col.keys().cloned());
    }
    monos.sort();
    monos.dedup();
    let rows = monos.len();
    // dense rational elimination; sizes stay small because both the number
    // of atoms and the cutoff are small
    let mut a: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); nvars + 1]; rows];
    for (j, col) in cols.iter().enumerate() {
        for (m, c) in col {
            let i = monos.binary_search(m).unwrap();
            a[i][j] = BigRational::from(c.clone());
        }
    }
    for (m, c) in target {
        let i = monos.binary_search(m).unwrap();
        a[i][nvars] = BigRational::from(c.clone());
    }
    let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; nvars];
    let mut next_row = 0usize;
    for col in 0..nvars {
        let Some(pr) = (next_row..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(next_row, pr);
        let inv = a[next_row][col].recip();
        for x in a[next_row].iter_mut() {
            *x *= inv.clone();
        }
        for i in 0..rows {
            if i != next_row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..=nvars {
                    let sub = f.clone() * a[next_row][j].clone();
                    a[i][j] -= sub;
                }
            }
        }
        pivot_row_of_col[col] = Some(next_row);
        next_row += 1;
        if next_row == rows {
            break;
        }
    }
    // consistency: rows past the pivots must have zero RHS
    for i in next_row..rows {
        if !a[i][nvars].is_zero() {
            return Err(Error::precondition(
                "inconsistent Lie coordinate system; component is not in the span",
            ));
        }
    }
    let mut out = vec![BigInt::zero(); nvars];
    for (col, pr) in pivot_row_of_col.iter().enumerate() {
        if let Some(i) = pr {
            let v = &a[*i][nvars];
            if !v.denom().is_one() {
                return Err(Error::precondition(
                    "non-integral Lie coordinates; free Lie ring solve must be integral",
                ));
            }
            out[col] = v.numer().clone();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collect::{GenBasicGroupCommutator, GroupContext};
    use crate::fplie::{HallBasis, Rank};
    use std::sync::Arc;

    fn setup(d: u32, r: u32) -> (GroupContext, AtomHall) {
        let basis = Arc::new(HallBasis::enumerate(d, r, 100_000).unwrap());
        let ctx = GroupContext::new(3, basis).unwrap();
        let atoms: Vec<_> =
            (0..d).map(|i| GenBasicGroupCommutator::new(0, Rank(i))).collect();
        let ah = AtomHall::build(&ctx, atoms, r, 100_000).unwrap();
        (ctx, ah)
    }

    #[test]
    fn series_inverse_is_exact() {
        let (ctx, ah) = setup(2, 4);
        let ring = MagnusRing::new(&ah, &ctx, 4);
        let a = ring.product(&[0, 1, 0]);
        let ia = ring.inv(&a);
        assert_eq!(ring.mul(&a, &ia), ring.one());
        assert_eq!(ring.mul(&ia, &a), ring.one());
    }

    #[test]
    fn extraction_of_x2_x1() {
        // x2 x1 = x1 x2 [x2,x1] modulo weight >= 3
        let (ctx, ah) = setup(2, 2);
        let ring = MagnusRing::new(&ah, &ctx, 2);
        let entries = extract_normal_form(&ring, &ah, &[1, 0]).unwrap();
        let rendered: Vec<(String, String)> = entries
            .iter()
            .map(|e| (ah.core_string(&ctx, e.ah_rank), e.mult.to_string()))
            .collect();
        assert_eq!(
            rendered,
            vec![
                ("x1".into(), "1".into()),
                ("x2".into(), "1".into()),
                ("[x2,x1]".into(), "1".into())
            ]
        );
    }

    #[test]
    fn extraction_of_squared_pair() {
        // (x2 x1)^2 = x1^2 x2^2 [x2,x1]^3 modulo weight >= 3
        let (ctx, ah) = setup(2, 2);
        let ring = MagnusRing::new(&ah, &ctx, 2);
        let entries = extract_normal_form(&ring, &ah, &[1, 0, 1, 0]).unwrap();
        let rendered: Vec<(String, String)> = entries
            .iter()
            .map(|e| (ah.core_string(&ctx, e.ah_rank), e.mult.to_string()))
            .collect();
        assert_eq!(
            rendered,
            vec![
                ("x1".into(), "2".into()),
                ("x2".into(), "2".into()),
                ("[x2,x1]".into(), "3".into())
            ]
        );
    }

    #[test]
    fn extraction_is_rewriting_invariant() {
        // same group element, different spellings: w = x2 x1 x2 and
        // x2 x2 x1 [x1, x2]-free spelling via uv = vu[u,v] is exercised in
        // the process tests; here just check associativity of the series
        let (ctx, ah) = setup(2, 3);
        let ring = MagnusRing::new(&ah, &ctx, 3);
        let a = ring.product(&[1, 0, 1]);
        let b = ring.mul(&ring.product(&[1, 0]), &ring.product(&[1]));
        assert_eq!(a, b);
    }
}
