//! The collection process: repeatedly move the leftmost occurrence of the
//! smallest uncollected factor left through uv = vu[u,v], discarding created
//! commutators beyond the weight cutoff, until the word is ordered.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};

use super::magnus::{extract_normal_form, MagnusRing};
use super::{word_atoms, AtomHall, GroupContext, GroupWord, NfEntry, NormalForm};

const MAX_STEPS: usize = 2_000_000;
const MAX_ATOM_BASIS: usize = 2_000_000;

/// Collect a positive word modulo the class-(r+1) lower central term.
///
/// Factors whose core weight exceeds `r` are already trivial modulo the
/// cutoff and are dropped up front. The surface process keeps every factor a
/// basic commutator over the atoms; a factor list whose collection would
/// create a non-basic bracket is normalised through the exact series model
/// instead, which produces the same canonical ordered form whenever both
/// routes apply.
pub fn collect(ctx: &GroupContext, word: &GroupWord, r: u32) -> Result<NormalForm> {
    if r < 1 {
        return Err(Error::precondition("class cutoff must be at least 1"));
    }
    if r > ctx.basis.max_weight {
        return Err(Error::precondition(format!(
            "class cutoff {r} exceeds the core basis bound {}",
            ctx.basis.max_weight
        )));
    }
    let (atoms, seq) = word_atoms(ctx, word, r)?;
    let ah = Arc::new(AtomHall::build(ctx, atoms, r, MAX_ATOM_BASIS)?);
    let start: Vec<u32> = seq.iter().map(|&i| ah.atom_rank(i)).collect();
    collect_factors(ctx, ah, start, r)
}

/// Collect an explicit factor list (entries are atom-Hall ranks, so trees
/// are allowed as factors). This is the entry point for re-collecting a
/// rewritten spelling of a word.
pub fn collect_factors(
    ctx: &GroupContext,
    ah: Arc<AtomHall>,
    factors: Vec<u32>,
    r: u32,
) -> Result<NormalForm> {
    let entries = match run_process(&ah, factors.clone(), r) {
        Ok(ordered) => merge(ordered),
        Err(ProcessStop::NonBasicCreation) => {
            let ring = MagnusRing::new(&ah, ctx, r);
            extract_normal_form(&ring, &ah, &factors)?
        }
        Err(ProcessStop::StepCap) => {
            return Err(Error::resource(format!(
                "collection exceeded {MAX_STEPS} rewriting steps"
            )));
        }
    };
    Ok(NormalForm { p: ctx.p(), r, atom_hall: ah, entries })
}

/// Apply `moves` random instances of the identity uv = vu[u,v] at positions
/// where the rewrite stays inside the basic range, changing the spelling of
/// the word but not its class modulo the cutoff.
pub fn random_rewrite(
    ah: &AtomHall,
    mut factors: Vec<u32>,
    r: u32,
    rng: &mut impl rand::Rng,
    moves: usize,
) -> Vec<u32> {
    for _ in 0..moves {
        if factors.len() < 2 {
            break;
        }
        let candidates: Vec<usize> = (0..factors.len() - 1)
            .filter(|&i| {
                let (u, v) = (factors[i], factors[i + 1]);
                u > v
                    && (ah.weight(u) + ah.weight(v) > r || ah.is_basic_pair(u, v))
            })
            .collect();
        if candidates.is_empty() {
            break;
        }
        let i = candidates[rng.random_range(0..candidates.len())];
        let (u, v) = (factors[i], factors[i + 1]);
        factors.swap(i, i + 1);
        if ah.weight(u) + ah.weight(v) <= r {
            let created = ah.pair_rank(u, v).expect("checked basic");
            factors.insert(i + 2, created);
        }
    }
    factors
}

enum ProcessStop {
    NonBasicCreation,
    StepCap,
}

fn run_process(ah: &AtomHall, mut w: Vec<u32>, r: u32) -> std::result::Result<Vec<u32>, ProcessStop> {
    let mut steps = 0usize;
    loop {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(ProcessStop::StepCap);
        }
        let len = w.len();
        if len <= 1 {
            return Ok(w);
        }
        // suffix minima
        let mut suffmin = vec![0u32; len + 1];
        suffmin[len] = u32::MAX;
        for i in (0..len).rev() {
            suffmin[i] = w[i].min(suffmin[i + 1]);
        }
        // longest nondecreasing prefix
        let mut asc = 1usize;
        while asc < len && w[asc - 1] <= w[asc] {
            asc += 1;
        }
        // collected part: longest prefix whose last entry bounds the suffix
        let mut k = asc;
        while k > 0 && w[k - 1] > suffmin[k] {
            k -= 1;
        }
        if k == len {
            return Ok(w);
        }
        // leftmost occurrence of the smallest uncollected factor
        let s = suffmin[k];
        let l = (k..len).find(|&i| w[i] == s).unwrap();
        debug_assert!(l > k, "smallest uncollected sits next to the collected part");
        let u = w[l - 1];
        let v = w[l];
        debug_assert!(u > v);
        w.swap(l - 1, l);
        let weight = ah.weight(u) + ah.weight(v);
        if weight <= r {
            if !ah.is_basic_pair(u, v) {
                return Err(ProcessStop::NonBasicCreation);
            }
            let created = ah.pair_rank(u, v).expect("basic pair within cutoff");
            w.insert(l + 1, created);
        }
    }
}

fn merge(factors: Vec<u32>) -> Vec<NfEntry> {
    let mut out: Vec<NfEntry> = Vec::new();
    for f in factors {
        match out.last_mut() {
            Some(last) if last.ah_rank == f => last.mult += 1,
            _ => out.push(NfEntry { ah_rank: f, mult: BigInt::from(1) }),
        }
    }
    out
}
