//! The leading-term map from the free group into the mixed Lie algebra,
//! and the sampling check that images of words over a generating set stay
//! inside the mixed closure of the generating set's image.

use num_traits::Signed;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::echelon::Echelon;
use crate::error::{Error, Result};
use crate::fplie::LieElement;
use crate::mixedlie::{
    mixed_closure, GeneralizedBasicCommutator, MixedElement, MixedLieAlgebra,
};

use super::{collect, AtomNode, GenBasicGroupCommutator, GroupContext, GroupWord, NormalForm};

#[derive(Debug, Clone, PartialEq)]
pub enum PhiOutcome {
    /// The identity word; mapped to zero by convention.
    Zero,
    Image { degree: u32, element: MixedElement },
}

/// The Lie expansion of an entry's core tree, with atoms replaced by their
/// core basic commutators. Basic cores expand to themselves.
fn lie_expand(mx: &MixedLieAlgebra, nf: &NormalForm, rank: u32) -> LieElement {
    let ah = &nf.atom_hall;
    match ah.elems[rank as usize].node {
        AtomNode::Atom(i) => LieElement::basis(ah.atoms[i].core),
        AtomNode::Pair(u, v) => {
            let a = lie_expand(mx, nf, u);
            let b = lie_expand(mx, nf, v);
            mx.alg.bracket(&a, &b)
        }
    }
}

/// Collect the word at class cutoff `w` and read off the leading term: with
/// n the minimum of e(s) + deco(s) + wt(core s) over the entries, the image
/// is sum over minimising entries of j_s pi^{e(s)+deco(s)} (core s as a Lie
/// element), an element of degree n.
///
/// Inconclusive when the certified minimum reaches the cutoff or when the
/// leading sum cancels (the element then lies deeper than the normal form
/// resolves).
pub fn phi(mx: &MixedLieAlgebra, word: &GroupWord, w: u32) -> Result<PhiOutcome> {
    if word.is_identity() {
        return Ok(PhiOutcome::Zero);
    }
    let ctx = GroupContext::new(mx.alg.field.p, mx.alg.basis.clone())?;
    let nf = collect(&ctx, word, w)?;
    if nf.entries.is_empty() {
        return Err(Error::inconclusive(
            "the word is trivial modulo the cutoff; its leading term lies deeper",
        ));
    }
    let p = ctx.p();
    let degree_of = |entry: &super::NfEntry| -> u64 {
        let (e, _) = entry.e_and_j(p);
        e + nf.deco(entry) + nf.core_weight(entry) as u64
    };
    let n = nf.entries.iter().map(degree_of).min().unwrap();
    if n >= w as u64 {
        return Err(Error::inconclusive(format!(
            "leading degree {n} is not certified below the cutoff {w}"
        )));
    }
    let n = n as u32;
    let field = mx.alg.field;
    let mut element = MixedElement::zero();
    for entry in &nf.entries {
        if degree_of(entry) != n as u64 {
            continue;
        }
        let (e, j) = entry.e_and_j(p);
        let pi = e + nf.deco(entry);
        let coeff = {
            let m = (&j % num_bigint::BigInt::from(p)).abs();
            let m: u64 = m.try_into().unwrap();
            if j.is_negative() {
                field.neg(m)
            } else {
                m
            }
        };
        let expansion = lie_expand(mx, &nf, entry.ah_rank);
        for (&r, &c) in &expansion.terms {
            element.add_term(
                field,
                GeneralizedBasicCommutator::new(pi as u32, r),
                field.mul(coeff, c),
            );
        }
    }
    if element.is_zero() {
        return Err(Error::inconclusive(format!(
            "leading terms cancel at degree {n}; the element lies deeper than the \
             collected approximation"
        )));
    }
    debug_assert_eq!(mx.homogeneous_degree(&element), Some(n));
    Ok(PhiOutcome::Image { degree: n, element })
}

#[derive(Debug, Clone)]
pub struct PhiReport {
    pub samples: usize,
    pub conclusive_pass: usize,
    pub conclusive_fail: usize,
    pub inconclusive: usize,
    /// (degree, dim of span of observed images, dim of the closure)
    pub per_degree: Vec<(u32, usize, usize)>,
}

impl PhiReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "samples": self.samples,
            "conclusive_pass": self.conclusive_pass,
            "conclusive_fail": self.conclusive_fail,
            "inconclusive": self.inconclusive,
            "per_degree": self.per_degree.iter().map(|&(n, obs, h)| {
                serde_json::json!({"degree": n, "observed_dim": obs, "closure_dim": h})
            }).collect::<Vec<_>>(),
        })
    }
}

/// Sample random positive words over the generating set and check that every
/// conclusive image lies in the mixed closure of the generators' images.
pub fn verify_phi_correspondence(
    mx: &MixedLieAlgebra,
    generators: &[GenBasicGroupCommutator],
    w: u32,
    samples: usize,
    seed: u64,
) -> Result<PhiReport> {
    if generators.is_empty() {
        return Ok(PhiReport {
            samples,
            conclusive_pass: 0,
            conclusive_fail: 0,
            inconclusive: 0,
            per_degree: Vec::new(),
        });
    }
    let mut cores: Vec<_> = generators.iter().map(|g| g.core).collect();
    cores.sort();
    cores.dedup();
    if cores.len() != generators.len() {
        return Err(Error::precondition(
            "generators must have pairwise distinct cores",
        ));
    }
    for g in generators {
        if mx.alg.basis.weight(g.core) < 2 {
            return Err(Error::precondition(
                "generator cores must have weight at least 2",
            ));
        }
    }
    let image: Vec<GeneralizedBasicCommutator> = generators
        .iter()
        .map(|g| GeneralizedBasicCommutator::new(g.exp_log, g.core))
        .collect();
    let h = mixed_closure(mx, &image, w)?;
    let mut observed: Vec<Echelon> = (1..=w)
        .map(|n| Echelon::new(mx.alg.field, mx.coord_count(n)))
        .collect();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut pass = 0usize;
    let mut fail = 0usize;
    let mut inconclusive = 0usize;
    for _ in 0..samples {
        let len = rng.random_range(1..=4);
        let factors: Vec<(GenBasicGroupCommutator, u64)> = (0..len)
            .map(|_| {
                let g = generators[rng.random_range(0..generators.len())];
                let e = rng.random_range(1..=2u64);
                (g, e)
            })
            .collect();
        let word = GroupWord::new(factors)?;
        match phi(mx, &word, w) {
            Ok(PhiOutcome::Zero) => unreachable!("sampled words are nonempty"),
            Ok(PhiOutcome::Image { degree, element }) => {
                let row = mx.row_at_degree(degree, &element);
                if h.contains_at(degree, &row) {
                    pass += 1;
                } else {
                    fail += 1;
                }
                observed[degree as usize - 1].insert(row);
            }
            Err(Error::Inconclusive(_)) => inconclusive += 1,
            Err(e) => return Err(e),
        }
    }
    let per_degree = (1..=w)
        .map(|n| (n, observed[n as usize - 1].rank(), h.dim_at(n)))
        .collect();
    Ok(PhiReport {
        samples,
        conclusive_pass: pass,
        conclusive_fail: fail,
        inconclusive,
        per_degree,
    })
}
