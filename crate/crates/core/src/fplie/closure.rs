//! Graded subalgebra closure and density sequences.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;

use crate::echelon::Echelon;
use crate::error::{Error, Result};

use super::{witt_dimension, FreeLieAlgebra, LieElement};

/// Degree-wise reduced echelon bases of a graded subspace of L, up to a
/// weight cutoff. Coordinates at degree n are the weight-n Hall basis slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSubspace {
    pub d: u32,
    pub max_weight: u32,
    /// degrees[n-1] is the echelon basis at weight n
    pub degrees: Vec<Echelon>,
}

impl GradedSubspace {
    pub fn dim_at(&self, n: u32) -> usize {
        self.degrees[n as usize - 1].rank()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.degrees.iter().map(|e| e.rank()).collect()
    }

    /// JSON export: {degree -> list of coefficient rows}.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = BTreeMap::new();
        for (i, ech) in self.degrees.iter().enumerate() {
            map.insert(
                (i + 1).to_string(),
                ech.rows().iter().cloned().collect::<Vec<_>>(),
            );
        }
        serde_json::json!(map)
    }
}

/// Degree-wise span of all iterated brackets of the generators, truncated at
/// the algebra's weight cutoff. Generators must be homogeneous.
///
/// A generated subalgebra is spanned by left-normed brackets, so degree n is
/// complete once every [M_{n-w(y)}, y] and the degree-n generators are in.
pub fn subalgebra_closure(
    alg: &FreeLieAlgebra,
    generators: &[LieElement],
) -> Result<GradedSubspace> {
    let w_max = alg.max_weight();
    for (i, g) in generators.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        if g.homogeneous_weight(&alg.basis).is_none() {
            return Err(Error::precondition(format!(
                "generator #{i} is not homogeneous (weights {:?}); graded closure needs \
                 homogeneous generators",
                g.weights(&alg.basis)
            )));
        }
    }
    let mut by_weight: Vec<Vec<&LieElement>> = vec![Vec::new(); w_max as usize + 1];
    for g in generators {
        if let Some(w) = g.homogeneous_weight(&alg.basis) {
            by_weight[w as usize].push(g);
        }
    }
    let mut degrees: Vec<Echelon> = (1..=w_max)
        .map(|n| Echelon::new(alg.field, alg.basis.weight_range(n).len()))
        .collect();
    for n in 1..=w_max {
        let slot = n as usize - 1;
        let mut ech = std::mem::replace(
            &mut degrees[slot],
            Echelon::new(alg.field, 0),
        );
        for g in &by_weight[n as usize] {
            ech.insert(alg.row_from_element(n, g));
        }
        // left-normed step: bracket every lower-degree basis row with a generator
        for gw in 1..n {
            for g in &by_weight[gw as usize] {
                let lower = n - gw;
                let rows: Vec<LieElement> = degrees[lower as usize - 1]
                    .rows()
                    .iter()
                    .map(|r| alg.element_from_row(lower, r))
                    .collect();
                for v in rows {
                    if ech.is_full() {
                        break;
                    }
                    let b = alg.bracket(&v, g);
                    if !b.is_zero() {
                        ech.insert(alg.row_from_element(n, &b));
                    }
                }
            }
        }
        degrees[slot] = ech;
    }
    Ok(GradedSubspace { d: alg.basis.d, max_weight: w_max, degrees })
}

/// delta_n = (sum_{m<=n} dim M_m) / (sum_{m<=n} dim L_m), exact rationals.
pub fn density_sequence(m: &GradedSubspace, w: u32) -> Vec<BigRational> {
    assert!(w <= m.max_weight);
    let mut out = Vec::with_capacity(w as usize);
    let mut num = BigUint::zero();
    let mut den = BigUint::zero();
    for n in 1..=w {
        num += BigUint::from(m.dim_at(n));
        den += witt_dimension(m.d, n);
        out.push(BigRational::new(num.clone().into(), den.clone().into()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fplie::Rank;
    use num_traits::One;

    fn alg(p: u64, d: u32, w: u32) -> FreeLieAlgebra {
        FreeLieAlgebra::new(p, d, w, 1_000_000).unwrap()
    }

    #[test]
    fn closure_of_generators_is_everything() {
        let l = alg(3, 2, 3);
        let m =
            subalgebra_closure(&l, &[LieElement::basis(Rank(0)), LieElement::basis(Rank(1))])
                .unwrap();
        assert_eq!(m.dims(), vec![2, 1, 2]);
    }

    #[test]
    fn closure_of_single_weight2_element() {
        let l = alg(3, 2, 6);
        let c = LieElement::basis(l.basis.parse("[x2,x1]").unwrap());
        let m = subalgebra_closure(&l, &[c]).unwrap();
        assert_eq!(m.dims(), vec![0, 1, 0, 0, 0, 0]);
    }

    #[test]
    fn rejects_inhomogeneous_generator() {
        let l = alg(3, 2, 4);
        let g = l.parse_element("x1 + [x2,x1]").unwrap();
        assert!(matches!(
            subalgebra_closure(&l, &[g]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn closure_is_idempotent_and_monotone() {
        let l = alg(5, 2, 6);
        let gens = [
            LieElement::basis(Rank(0)),
            LieElement::basis(l.basis.parse("[x2,x1]").unwrap()),
        ];
        let m = subalgebra_closure(&l, &gens).unwrap();
        // idempotent: close the closure's own rows
        let rows: Vec<LieElement> = (1..=6)
            .flat_map(|n| {
                m.degrees[n as usize - 1]
                    .rows()
                    .iter()
                    .map(|r| l.element_from_row(n, r))
                    .collect::<Vec<_>>()
            })
            .collect();
        let again = subalgebra_closure(&l, &rows).unwrap();
        assert_eq!(m, again);
        // monotone in the generator set
        let bigger = subalgebra_closure(
            &l,
            &[gens[0].clone(), gens[1].clone(), LieElement::basis(Rank(1))],
        )
        .unwrap();
        for n in 1..=6u32 {
            assert!(bigger.dim_at(n) >= m.dim_at(n));
            for row in m.degrees[n as usize - 1].rows() {
                assert!(bigger.degrees[n as usize - 1].contains(row));
            }
        }
    }

    #[test]
    fn density_trivial_cases() {
        let l = alg(3, 2, 5);
        let full =
            subalgebra_closure(&l, &[LieElement::basis(Rank(0)), LieElement::basis(Rank(1))])
                .unwrap();
        for r in density_sequence(&full, 5) {
            assert!(r.is_one());
        }
        let zero = subalgebra_closure(&l, &[]).unwrap();
        for r in density_sequence(&zero, 5) {
            assert!(r.is_zero());
        }
    }
}
