//! The free F_p[pi]-Lie algebra on d generators (p odd): graded components
//! Lambda_n = sum of pi^{n-m} L_m, principal ideals, mixed densities, and
//! the construction of subalgebras with a prescribed density.

mod closure;
mod density;

pub use closure::{mixed_closure, MixedGradedSubspace};
pub use density::{
    construct_density_subalgebra, mixed_density_sequence, DensityConstruction, TraceRow,
};

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fplie::{witt_dimension, FreeLieAlgebra, Rank};

/// pi^k c with c a basic commutator; the element has degree k + wt(c).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneralizedBasicCommutator {
    pub pi_power: u32,
    pub core: Rank,
}

impl GeneralizedBasicCommutator {
    pub fn new(pi_power: u32, core: Rank) -> Self {
        GeneralizedBasicCommutator { pi_power, core }
    }
}

/// dim Lambda_n = sum_{m<=n} dim L_m, exact.
pub fn lambda_dim(d: u32, n: u32) -> BigUint {
    assert!(d >= 1 && n >= 1);
    let mut acc = BigUint::zero();
    for m in 1..=n {
        acc += witt_dimension(d, m);
    }
    acc
}

/// Finite F_p-combination of generalized basic commutators; supports mixed
/// degrees; all coefficients nonzero and reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedElement {
    pub terms: BTreeMap<GeneralizedBasicCommutator, u64>,
}

impl MixedElement {
    pub fn zero() -> Self {
        MixedElement { terms: BTreeMap::new() }
    }

    pub fn basis(g: GeneralizedBasicCommutator) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(g, 1);
        MixedElement { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(
        &mut self,
        field: crate::fp::FpCtx,
        g: GeneralizedBasicCommutator,
        coeff: u64,
    ) {
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(g).or_insert(0);
        *entry = field.add(*entry, coeff);
        if *entry == 0 {
            self.terms.remove(&g);
        }
    }
}

/// The ambient mixed algebra: wraps the free F_p-Lie algebra on the cores.
/// The weight cutoff of the underlying Hall basis bounds every degree here.
pub struct MixedLieAlgebra {
    pub alg: Arc<FreeLieAlgebra>,
}

impl MixedLieAlgebra {
    /// p must be odd: at p = 2 the degree-1 power operator twists the
    /// structure and only the commutator subalgebra keeps this model.
    pub fn new(p: u64, d: u32, max_weight: u32, max_basis: usize) -> Result<Self> {
        if p == 2 {
            return Err(Error::precondition(
                "the free F_p[pi] model requires p odd; at p = 2 only the commutator \
                 subalgebra carries this structure",
            ));
        }
        let alg = Arc::new(FreeLieAlgebra::new(p, d, max_weight, max_basis)?);
        Ok(MixedLieAlgebra { alg })
    }

    pub fn d(&self) -> u32 {
        self.alg.basis.d
    }

    pub fn max_weight(&self) -> u32 {
        self.alg.max_weight()
    }

    /// Degree of a generalized basic commutator.
    pub fn degree(&self, g: GeneralizedBasicCommutator) -> u32 {
        g.pi_power + self.alg.basis.weight(g.core)
    }

    /// Single degree of a homogeneous mixed element, if homogeneous.
    pub fn homogeneous_degree(&self, e: &MixedElement) -> Option<u32> {
        let mut it = e.terms.keys().map(|&g| self.degree(g));
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    /// Multiply by pi^k: every pi_power grows by k; injective, degree +k.
    pub fn pi_apply(&self, e: &MixedElement, k: u32) -> MixedElement {
        let terms = e
            .terms
            .iter()
            .map(|(&g, &c)| (GeneralizedBasicCommutator::new(g.pi_power + k, g.core), c))
            .collect();
        MixedElement { terms }
    }

    /// Number of coordinates of Lambda_n: generalized basic commutators of
    /// degree n correspond to cores of weight <= n.
    pub fn coord_count(&self, n: u32) -> usize {
        self.alg.basis.count_weight_le(n.min(self.max_weight()))
    }

    /// Coordinate of a degree-n generalized basic commutator: its core rank.
    pub fn coord_of(&self, n: u32, g: GeneralizedBasicCommutator) -> usize {
        debug_assert_eq!(self.degree(g), n);
        g.core.idx()
    }

    pub fn gbc_of_coord(&self, n: u32, coord: usize) -> GeneralizedBasicCommutator {
        let core = Rank(coord as u32);
        let w = self.alg.basis.weight(core);
        debug_assert!(w <= n);
        GeneralizedBasicCommutator::new(n - w, core)
    }

    /// Coordinate row of the degree-n component of an element.
    pub fn row_at_degree(&self, n: u32, e: &MixedElement) -> Vec<u64> {
        let mut row = vec![0u64; self.coord_count(n)];
        for (&g, &c) in &e.terms {
            if self.degree(g) == n {
                row[self.coord_of(n, g)] = c;
            }
        }
        row
    }

    pub fn element_from_row(&self, n: u32, row: &[u64]) -> MixedElement {
        let mut out = MixedElement::zero();
        for (coord, &c) in row.iter().enumerate() {
            if c != 0 {
                out.add_term(self.alg.field, self.gbc_of_coord(n, coord), c);
            }
        }
        out
    }

    /// Mixed bracket: [pi^a u, pi^b v] = pi^{a+b} [u, v], with the core
    /// bracket expanded in the Hall basis and truncated at the cutoff.
    pub fn bracket(&self, a: &MixedElement, b: &MixedElement) -> MixedElement {
        let mut out = MixedElement::zero();
        for (&ga, &ca) in &a.terms {
            for (&gb, &cb) in &b.terms {
                let pi = ga.pi_power + gb.pi_power;
                let core = self.alg.bracket(
                    &crate::fplie::LieElement::basis(ga.core),
                    &crate::fplie::LieElement::basis(gb.core),
                );
                let c = self.alg.field.mul(ca, cb);
                for (&r, &cr) in &core.terms {
                    if pi + self.alg.basis.weight(r) <= self.max_weight() {
                        out.add_term(
                            self.alg.field,
                            GeneralizedBasicCommutator::new(pi, r),
                            self.alg.field.mul(c, cr),
                        );
                    }
                }
            }
        }
        out
    }

    pub fn gbc_string(&self, g: GeneralizedBasicCommutator) -> String {
        match g.pi_power {
            0 => self.alg.basis.to_string(g.core),
            1 => format!("pi*{}", self.alg.basis.to_string(g.core)),
            k => format!("pi^{}*{}", k, self.alg.basis.to_string(g.core)),
        }
    }
}
