//! Degree-wise closure of a set of generalized basic commutators under the
//! bracket and multiplication by pi.

use std::collections::BTreeMap;

use crate::echelon::Echelon;
use crate::error::{Error, Result};
use crate::fplie::LieElement;

use super::{GeneralizedBasicCommutator, MixedLieAlgebra};

/// Per-degree reduced echelon bases of a graded subspace of Lambda, with
/// coordinates indexed by core rank (the pi power is implied by the degree).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedGradedSubspace {
    pub d: u32,
    pub max_weight: u32,
    pub degrees: Vec<Echelon>,
}

impl MixedGradedSubspace {
    pub fn dim_at(&self, n: u32) -> usize {
        self.degrees[n as usize - 1].rank()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.degrees.iter().map(|e| e.rank()).collect()
    }

    pub fn contains_at(&self, n: u32, row: &[u64]) -> bool {
        self.degrees[n as usize - 1].contains(row)
    }

    /// True when the pi-shift of every degree-n basis row lies in degree n+1
    /// for all represented degrees.
    pub fn is_pi_stable(&self) -> bool {
        for n in 1..self.degrees.len() {
            let (lo, hi) = (&self.degrees[n - 1], &self.degrees[n]);
            for row in lo.rows() {
                let mut v = row.clone();
                v.resize(hi.cols(), 0);
                if !hi.contains(&v) {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = BTreeMap::new();
        for (i, ech) in self.degrees.iter().enumerate() {
            map.insert((i + 1).to_string(), ech.rows().to_vec());
        }
        serde_json::json!(map)
    }
}

/// Smallest degree-wise subspace containing the generators, closed under the
/// bracket and under pi, truncated at the algebra cutoff.
///
/// An F_p[pi]-subalgebra generated by a set is spanned by pi-shifts of
/// left-normed brackets in the generators, so each degree needs only the
/// pi-shift of the previous degree plus brackets of lower components against
/// single generators.
pub fn mixed_closure(
    mx: &MixedLieAlgebra,
    generators: &[GeneralizedBasicCommutator],
    w: u32,
) -> Result<MixedGradedSubspace> {
    if w > mx.max_weight() {
        return Err(Error::precondition(format!(
            "cutoff {w} exceeds the algebra's weight bound {}",
            mx.max_weight()
        )));
    }
    for &g in generators {
        if mx.degree(g) > w {
            return Err(Error::precondition(format!(
                "generator {} has degree {} > cutoff {w}",
                mx.gbc_string(g),
                mx.degree(g)
            )));
        }
    }
    let mut degrees: Vec<Echelon> = (1..=w)
        .map(|n| Echelon::new(mx.alg.field, mx.coord_count(n)))
        .collect();
    for n in 1..=w {
        let slot = n as usize - 1;
        let mut ech = std::mem::replace(&mut degrees[slot], Echelon::new(mx.alg.field, 0));
        // generators of this degree are unit coordinate vectors
        for &g in generators {
            if mx.degree(g) == n {
                let mut row = vec![0u64; ech.cols()];
                row[mx.coord_of(n, g)] = 1;
                ech.insert(row);
            }
        }
        // pi-shift of the previous degree: same coordinates, wider row
        if n >= 2 {
            for row in degrees[n as usize - 2].rows() {
                if ech.is_full() {
                    break;
                }
                let mut v = row.clone();
                v.resize(ech.cols(), 0);
                ech.insert(v);
            }
        }
        // left-normed brackets against single generators
        for &g in generators {
            let gw = mx.degree(g);
            if gw == 0 || gw >= n {
                continue;
            }
            let lower = n - gw;
            let rows: Vec<Vec<u64>> = degrees[lower as usize - 1].rows().to_vec();
            for row in rows {
                if ech.is_full() {
                    break;
                }
                let v = bracket_row_with_gbc(mx, lower, &row, g);
                if v.iter().any(|&c| c != 0) {
                    ech.insert(v);
                }
            }
        }
        degrees[slot] = ech;
    }
    Ok(MixedGradedSubspace { d: mx.d(), max_weight: w, degrees })
}

/// Coordinate row of [element-of-degree-a, pi^k c] at degree a + k + wt(c).
fn bracket_row_with_gbc(
    mx: &MixedLieAlgebra,
    a: u32,
    row: &[u64],
    g: GeneralizedBasicCommutator,
) -> Vec<u64> {
    let n = a + mx.degree(g);
    let mut out = vec![0u64; mx.coord_count(n)];
    let field = mx.alg.field;
    for (coord, &c) in row.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let src = mx.gbc_of_coord(a, coord);
        let expansion = mx.alg.bracket(
            &LieElement::basis(src.core),
            &LieElement::basis(g.core),
        );
        for (&r, &cr) in &expansion.terms {
            // resulting pi power: src.pi + g.pi; degree works out to n
            let w = mx.alg.basis.weight(r);
            if src.pi_power + g.pi_power + w <= mx.max_weight() {
                out[r.idx()] = field.add(out[r.idx()], field.mul(c, cr));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fplie::Rank;
    use crate::mixedlie::MixedLieAlgebra;

    #[test]
    fn closure_of_generators_is_full_lambda() {
        let mx = MixedLieAlgebra::new(3, 2, 3, 10_000).unwrap();
        let gens = [
            GeneralizedBasicCommutator::new(0, Rank(0)),
            GeneralizedBasicCommutator::new(0, Rank(1)),
        ];
        let h = mixed_closure(&mx, &gens, 3).unwrap();
        assert_eq!(h.dims(), vec![2, 3, 5]);
        assert!(h.is_pi_stable());
    }

    #[test]
    fn closure_of_empty_set_is_zero() {
        let mx = MixedLieAlgebra::new(3, 2, 4, 10_000).unwrap();
        let h = mixed_closure(&mx, &[], 4).unwrap();
        assert_eq!(h.dims(), vec![0, 0, 0, 0]);
    }

    #[test]
    fn closure_of_pi_c21() {
        let mx = MixedLieAlgebra::new(3, 2, 5, 10_000).unwrap();
        let c = mx.alg.basis.parse("[x2,x1]").unwrap();
        let h = mixed_closure(&mx, &[GeneralizedBasicCommutator::new(1, c)], 5).unwrap();
        assert_eq!(h.dims(), vec![0, 0, 1, 1, 1]);
        assert!(h.is_pi_stable());
    }

    #[test]
    fn closure_is_bracket_closed_and_idempotent() {
        let mx = MixedLieAlgebra::new(5, 2, 6, 100_000).unwrap();
        let c = mx.alg.basis.parse("[x2,x1]").unwrap();
        let gens = [
            GeneralizedBasicCommutator::new(0, Rank(0)),
            GeneralizedBasicCommutator::new(1, c),
        ];
        let h = mixed_closure(&mx, &gens, 6).unwrap();
        // bracket-closed: [H_a, H_b] inside H_{a+b}
        for a in 1..=5u32 {
            for b in a..=5u32 {
                let n = a + b;
                if n > 6 {
                    continue;
                }
                for ra in h.degrees[a as usize - 1].rows() {
                    for rb in h.degrees[b as usize - 1].rows() {
                        let ea = mx.element_from_row(a, ra);
                        let eb = mx.element_from_row(b, rb);
                        let br = mx.bracket(&ea, &eb);
                        if !br.is_zero() {
                            assert!(h.contains_at(n, &mx.row_at_degree(n, &br)));
                        }
                    }
                }
            }
        }
        // idempotent: regenerate from every basis vector's generalized basic
        // commutator support is not available in general (rows are mixes),
        // so check canonical equality after closing H's own rows as elements
        // is covered by pi-stability + bracket closure above.
        assert!(h.is_pi_stable());
    }
}
