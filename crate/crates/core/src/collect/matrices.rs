//! Exact evaluation of words and normal forms under assignments of upper
//! unitriangular integer matrices. Groups of class at most r embed this way,
//! so agreement across random assignments is the soundness oracle for
//! collection.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::fplie::{CommNode, HallBasis, Rank};

use super::{AtomNode, GroupContext, GroupWord, NormalForm};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtMatrix {
    pub n: usize,
    pub a: Vec<Vec<BigInt>>,
}

impl UtMatrix {
    pub fn identity(n: usize) -> Self {
        let mut a = vec![vec![BigInt::zero(); n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = BigInt::one();
        }
        UtMatrix { n, a }
    }

    /// Validate: ones on the diagonal, zeros below.
    pub fn new(a: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = a.len();
        for (i, row) in a.iter().enumerate() {
            if row.len() != n {
                return Err(Error::precondition("matrix is not square"));
            }
            if !row[i].is_one() {
                return Err(Error::precondition("diagonal entries must be 1"));
            }
            for (j, x) in row.iter().enumerate() {
                if j < i && !x.is_zero() {
                    return Err(Error::precondition("entries below the diagonal must vanish"));
                }
            }
        }
        Ok(UtMatrix { n, a })
    }

    pub fn mul(&self, other: &UtMatrix) -> UtMatrix {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for k in i..n {
                if self.a[i][k].is_zero() {
                    continue;
                }
                for j in k..n {
                    if !other.a[k][j].is_zero() {
                        out[i][j] += &self.a[i][k] * &other.a[k][j];
                    }
                }
            }
        }
        UtMatrix { n, a: out }
    }

    /// (I + N)^{-1} = sum (-N)^i with N strictly upper, exact over Z.
    pub fn inv(&self) -> UtMatrix {
        let n = self.n;
        let mut neg_nil = self.clone();
        for i in 0..n {
            neg_nil.a[i][i] = BigInt::zero();
        }
        for row in neg_nil.a.iter_mut() {
            for x in row.iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        let mut acc = UtMatrix::identity(n);
        let mut power = UtMatrix::identity(n);
        for _ in 0..n {
            power = power.mul(&neg_nil);
            if power.a.iter().all(|r| r.iter().all(|x| x.is_zero())) {
                break;
            }
            for i in 0..n {
                for j in 0..n {
                    let add = power.a[i][j].clone();
                    acc.a[i][j] += add;
                }
            }
        }
        acc
    }

    pub fn pow_big(&self, e: &BigUint) -> UtMatrix {
        let mut acc = UtMatrix::identity(self.n);
        let mut sq = self.clone();
        let mut k = e.clone();
        while !k.is_zero() {
            if (&k & BigUint::one()) == BigUint::one() {
                acc = acc.mul(&sq);
            }
            k >>= 1;
            if !k.is_zero() {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    pub fn pow_int(&self, e: &BigInt) -> UtMatrix {
        let m = self.pow_big(e.magnitude());
        if e.is_negative() {
            m.inv()
        } else {
            m
        }
    }

    /// [a, b] = a^{-1} b^{-1} a b.
    pub fn commutator(&self, other: &UtMatrix) -> UtMatrix {
        self.inv().mul(&other.inv()).mul(self).mul(other)
    }
}

/// One matrix per generator, all of the same size.
#[derive(Debug, Clone)]
pub struct Assignment {
    pub mats: Vec<UtMatrix>,
}

impl Assignment {
    pub fn new(mats: Vec<UtMatrix>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::precondition("assignment needs at least one matrix"));
        }
        let n = mats[0].n;
        if mats.iter().any(|m| m.n != n) {
            return Err(Error::precondition("assignment matrices must share a size"));
        }
        Ok(Assignment { mats })
    }

    fn size(&self) -> usize {
        self.mats[0].n
    }
}

/// Uniform random unitriangular matrices with entries in [-bound, bound].
pub fn random_assignment(
    rng: &mut impl Rng,
    d: u32,
    size: usize,
    bound: i64,
) -> Assignment {
    let mats = (0..d)
        .map(|_| {
            let mut m = UtMatrix::identity(size);
            for i in 0..size {
                for j in (i + 1)..size {
                    m.a[i][j] = BigInt::from(rng.random_range(-bound..=bound));
                }
            }
            m
        })
        .collect();
    Assignment { mats }
}

fn eval_core(basis: &HallBasis, rank: Rank, asg: &Assignment) -> UtMatrix {
    match basis.get(rank).node {
        CommNode::Gen(i) => asg.mats[i as usize].clone(),
        CommNode::Pair(u, v) => {
            eval_core(basis, u, asg).commutator(&eval_core(basis, v, asg))
        }
    }
}

/// Evaluate a positive word exactly; the class of the target group is
/// size - 1, so the result is faithful modulo that class.
pub fn evaluate_word(ctx: &GroupContext, word: &GroupWord, asg: &Assignment) -> Result<UtMatrix> {
    let mut acc = UtMatrix::identity(asg.size());
    for &(g, e) in &word.factors {
        let core = eval_core(&ctx.basis, g.core, asg);
        let decorated = core.pow_big(&BigUint::from(ctx.p()).pow(g.exp_log));
        acc = acc.mul(&decorated.pow_big(&BigUint::from(e)));
    }
    Ok(acc)
}

/// Evaluate an ordered normal form: each entry is a commutator tree over
/// decorated atoms raised to its multiplicity.
pub fn evaluate_normal_form(
    ctx: &GroupContext,
    nf: &NormalForm,
    asg: &Assignment,
) -> Result<UtMatrix> {
    let ah = &nf.atom_hall;
    let mut atom_mats: Vec<Option<UtMatrix>> = vec![None; ah.atoms.len()];
    for (i, atom) in ah.atoms.iter().enumerate() {
        let core = eval_core(&ctx.basis, atom.core, asg);
        atom_mats[i] = Some(core.pow_big(&BigUint::from(ctx.p()).pow(atom.exp_log)));
    }
    fn eval_tree(
        ah: &super::AtomHall,
        atom_mats: &[Option<UtMatrix>],
        rank: u32,
    ) -> UtMatrix {
        match ah.elems[rank as usize].node {
            AtomNode::Atom(i) => atom_mats[i].clone().unwrap(),
            AtomNode::Pair(u, v) => eval_tree(ah, atom_mats, u)
                .commutator(&eval_tree(ah, atom_mats, v)),
        }
    }
    let mut acc = UtMatrix::identity(asg.size());
    for entry in &nf.entries {
        let t = eval_tree(ah, &atom_mats, entry.ah_rank);
        acc = acc.mul(&t.pow_int(&entry.mult));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn ctx(p: u64, d: u32, w: u32) -> GroupContext {
        let basis = Arc::new(HallBasis::enumerate(d, w, 100_000).unwrap());
        GroupContext::new(p, basis).unwrap()
    }

    fn elem(rows: &[&[i64]]) -> UtMatrix {
        UtMatrix::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn inverse_is_exact() {
        let m = elem(&[&[1, 2, -3], &[0, 1, 5], &[0, 0, 1]]);
        let id = UtMatrix::identity(3);
        assert_eq!(m.mul(&m.inv()), id);
        assert_eq!(m.inv().mul(&m), id);
    }

    #[test]
    fn power_and_negative_power() {
        let m = elem(&[&[1, 1], &[0, 1]]);
        let m5 = m.pow_big(&BigUint::from(5u32));
        assert_eq!(m5.a[0][1], BigInt::from(5));
        let back = m5.pow_int(&BigInt::from(-5));
        assert_eq!(back.mul(&m5.pow_int(&BigInt::from(5))).a[0][1], BigInt::zero());
    }

    #[test]
    fn identity_word_evaluates_to_identity() {
        use rand::SeedableRng;
        let c = ctx(3, 2, 2);
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let asg = random_assignment(&mut rng, 2, 3, 3);
        let w = GroupWord::identity();
        assert_eq!(evaluate_word(&c, &w, &asg).unwrap(), UtMatrix::identity(3));
    }

    #[test]
    fn collection_is_an_identity_in_class_2() {
        use rand::SeedableRng;
        let c = ctx(3, 2, 2);
        let w = GroupWord::parse(&c, "x2 x1").unwrap();
        let nf = crate::collect::collect(&c, &w, 2).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for _ in 0..5 {
            let asg = random_assignment(&mut rng, 2, 3, 3);
            let a = evaluate_word(&c, &w, &asg).unwrap();
            let b = evaluate_normal_form(&c, &nf, &asg).unwrap();
            assert_eq!(a, b);
        }
    }
}
