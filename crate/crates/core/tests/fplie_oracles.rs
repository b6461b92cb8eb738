//! Independent oracles for the free-Lie-algebra module.
//!
//! Two cross-checks that share nothing with the production code paths:
//! an exhaustive bracket-tree enumeration filtered by the inductive basic
//! commutator conditions, and the embedding of Lie elements into the free
//! associative algebra where the bracket is literally ab - ba.

use std::collections::BTreeMap;

use hspectra_core::fp::FpCtx;
use hspectra_core::fplie::{
    density_sequence, subalgebra_closure, witt_dimension, FreeLieAlgebra, HallBasis, LieElement,
    Rank,
};
use num_bigint::BigUint;
use num_rational::BigRational;

// ---------------------------------------------------------------------------
// Oracle 1: exhaustive tree enumeration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Tree {
    Gen(u32),
    Br(Box<Tree>, Box<Tree>),
}

/// Basic commutators by brute force: all bracket trees of each weight,
/// filtered by the inductive conditions against the oracle's own ordered
/// list. The order rule within a weight is the same creation rule (sorted by
/// the top bracket's component positions) but the enumeration strategy is
/// tree-set based rather than index-scan based.
struct OracleBasis {
    ordered: Vec<Tree>,
    pos: BTreeMap<Tree, usize>,
    by_weight: Vec<Vec<Tree>>, // [w] -> trees of weight w
}

impl OracleBasis {
    fn build(d: u32, max_weight: u32) -> Self {
        let mut ordered: Vec<Tree> = (0..d).map(Tree::Gen).collect();
        let mut pos: BTreeMap<Tree, usize> =
            ordered.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        let mut by_weight: Vec<Vec<Tree>> = vec![Vec::new(), ordered.clone()];
        for n in 2..=max_weight {
            let mut fresh: Vec<(usize, usize, Tree)> = Vec::new();
            for wu in 1..n {
                let wv = n - wu;
                for u in &by_weight[wu as usize] {
                    for v in &by_weight[wv as usize] {
                        let pu = pos[u];
                        let pv = pos[v];
                        if pu <= pv {
                            continue;
                        }
                        if let Tree::Br(_, z) = u {
                            if pos[z.as_ref()] > pv {
                                continue;
                            }
                        }
                        fresh.push((pu, pv, Tree::Br(Box::new(u.clone()), Box::new(v.clone()))));
                    }
                }
            }
            fresh.sort();
            let mut level = Vec::new();
            for (_, _, t) in fresh {
                pos.insert(t.clone(), ordered.len());
                ordered.push(t.clone());
                level.push(t);
            }
            by_weight.push(level);
        }
        OracleBasis { ordered, pos, by_weight }
    }
}

fn tree_of_rank(b: &HallBasis, r: Rank) -> Tree {
    match b.get(r).node {
        hspectra_core::fplie::CommNode::Gen(i) => Tree::Gen(i),
        hspectra_core::fplie::CommNode::Pair(u, v) => {
            Tree::Br(Box::new(tree_of_rank(b, u)), Box::new(tree_of_rank(b, v)))
        }
    }
}

#[test]
fn oracle_basis_matches_production_and_witt() {
    for (d, w) in [(2u32, 10u32), (3, 8)] {
        let oracle = OracleBasis::build(d, w);
        let prod = HallBasis::enumerate(d, w, 5_000_000).unwrap();
        assert_eq!(oracle.ordered.len(), prod.len(), "d={d} w={w}");
        for (i, t) in oracle.ordered.iter().enumerate() {
            assert_eq!(*t, tree_of_rank(&prod, Rank(i as u32)), "rank {i} (d={d})");
        }
        for n in 1..=w {
            assert_eq!(
                BigUint::from(oracle.by_weight[n as usize].len()),
                witt_dimension(d, n),
                "count at weight {n} (d={d})"
            );
        }
        let _ = oracle.pos;
    }
}

// ---------------------------------------------------------------------------
// Oracle 2: the free associative algebra
// ---------------------------------------------------------------------------

/// Noncommutative polynomial over F_p: word-over-generators -> coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
struct Poly {
    terms: BTreeMap<Vec<u32>, u64>,
}

impl Poly {
    fn gen(i: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![i], 1);
        Poly { terms }
    }

    fn add_term(&mut self, f: FpCtx, w: Vec<u32>, c: u64) {
        if c == 0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Occupied(mut e) => {
                let v = f.add(*e.get(), c);
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    fn add(&self, f: FpCtx, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (w, &c) in &other.terms {
            out.add_term(f, w.clone(), c);
        }
        out
    }

    fn mul(&self, f: FpCtx, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (wa, &ca) in &self.terms {
            for (wb, &cb) in &other.terms {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                out.add_term(f, w, f.mul(ca, cb));
            }
        }
        out
    }

    fn commutator(&self, f: FpCtx, other: &Poly) -> Poly {
        let mut out = self.mul(f, other);
        let ba = other.mul(f, self);
        for (w, &c) in &ba.terms {
            out.add_term(f, w.clone(), f.neg(c));
        }
        out
    }

    fn scale(&self, f: FpCtx, c: u64) -> Poly {
        let mut out = Poly::default();
        for (w, &cw) in &self.terms {
            out.add_term(f, w.clone(), f.mul(cw, c));
        }
        out
    }
}

fn expand_rank(alg: &FreeLieAlgebra, r: Rank) -> Poly {
    match alg.basis.get(r).node {
        hspectra_core::fplie::CommNode::Gen(i) => Poly::gen(i),
        hspectra_core::fplie::CommNode::Pair(u, v) => {
            expand_rank(alg, u).commutator(alg.field, &expand_rank(alg, v))
        }
    }
}

fn expand_element(alg: &FreeLieAlgebra, e: &LieElement) -> Poly {
    let mut out = Poly::default();
    for (&r, &c) in &e.terms {
        out = out.add(alg.field, &expand_rank(alg, r).scale(alg.field, c));
    }
    out
}

#[test]
fn bracket_matches_associative_commutator() {
    // every pair of basis elements with weight sum <= cutoff
    let alg = FreeLieAlgebra::new(5, 2, 6, 100_000).unwrap();
    let n = alg.basis.len() as u32;
    for i in 0..n {
        for j in 0..n {
            let (ri, rj) = (Rank(i), Rank(j));
            if alg.basis.weight(ri) + alg.basis.weight(rj) > 6 {
                continue;
            }
            let got = alg.bracket(&LieElement::basis(ri), &LieElement::basis(rj));
            let want = expand_rank(&alg, ri).commutator(alg.field, &expand_rank(&alg, rj));
            assert_eq!(expand_element(&alg, &got), want, "pair ({i},{j})");
        }
    }
}

/// Brute-force graded closure entirely inside the associative algebra:
/// degree-n component = span of commutators of lower components, with linear
/// algebra over word coordinates.
fn oracle_closure_dims(p: u64, gens: &[Poly], gen_weights: &[u32], w: u32) -> Vec<usize> {
    let f = FpCtx::new(p).unwrap();
    let mut comp: Vec<Vec<Poly>> = vec![Vec::new(); w as usize + 1];
    for (g, &gw) in gens.iter().zip(gen_weights) {
        comp[gw as usize].push(g.clone());
    }
    let mut dims = Vec::new();
    for n in 1..=w {
        let mut cand: Vec<Poly> = comp[n as usize].clone();
        for a in 1..n {
            let b = n - a;
            if a > b {
                break;
            }
            for (i, u) in comp[a as usize].iter().enumerate() {
                let start = if a == b { i + 1 } else { 0 };
                for v in comp[b as usize][start..].iter() {
                    cand.push(u.commutator(f, v));
                }
            }
        }
        // row-reduce over word coordinates
        let mut words: Vec<Vec<u32>> = cand
            .iter()
            .flat_map(|p| p.terms.keys().cloned())
            .collect();
        words.sort();
        words.dedup();
        let cols = words.len();
        let mut ech = hspectra_core::echelon::Echelon::new(f, cols);
        let mut basis_polys = Vec::new();
        for c in cand {
            let mut row = vec![0u64; cols];
            for (wd, &co) in &c.terms {
                row[words.binary_search(wd).unwrap()] = co;
            }
            if ech.insert(row) {
                basis_polys.push(c);
            }
        }
        dims.push(basis_polys.len());
        comp[n as usize] = basis_polys;
    }
    dims
}

#[test]
fn closure_of_x1_and_c21_matches_associative_oracle() {
    // generators x1 (weight 1) and [x2,x1] (weight 2)
    let p = 3;
    let f = FpCtx::new(p).unwrap();
    let x1 = Poly::gen(0);
    let c21 = Poly::gen(1).commutator(f, &Poly::gen(0));
    let oracle = oracle_closure_dims(p, &[x1, c21], &[1, 2], 6);
    assert_eq!(oracle, vec![1, 1, 1, 1, 2, 2]);

    let alg = FreeLieAlgebra::new(p, 2, 6, 100_000).unwrap();
    let gens = [
        LieElement::basis(Rank(0)),
        LieElement::basis(alg.basis.parse("[x2,x1]").unwrap()),
    ];
    let m = subalgebra_closure(&alg, &gens).unwrap();
    assert_eq!(m.dims(), oracle);

    // density at n = 6 from the oracle dims and Witt sums:
    // (1+1+1+1+2+2)/(2+1+2+3+6+9) = 8/23
    let deltas = density_sequence(&m, 6);
    assert_eq!(
        deltas[5],
        BigRational::new(8.into(), 23.into()),
        "delta_6 from brute-force closure dims and Witt sums"
    );
}

#[test]
fn density_decay_for_proper_subalgebra() {
    // delta_n strictly decreasing on 6 <= n <= 10 for M = <x1, [x2,x1]>
    let alg = FreeLieAlgebra::new(3, 2, 10, 1_000_000).unwrap();
    let gens = [
        LieElement::basis(Rank(0)),
        LieElement::basis(alg.basis.parse("[x2,x1]").unwrap()),
    ];
    let m = subalgebra_closure(&alg, &gens).unwrap();
    let deltas = density_sequence(&m, 10);
    for n in 6..10 {
        assert!(
            deltas[n] < deltas[n - 1],
            "delta not strictly decreasing at n = {}",
            n + 1
        );
    }
}
