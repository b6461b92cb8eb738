//! Reduced row echelon bases over F_p.
//!
//! Every graded subspace in this crate is stored degree by degree as a
//! reduced echelon basis. Reduced echelon form is canonical for a subspace,
//! so subspace equality is plain matrix equality and closure idempotence is
//! observable bit for bit.

use crate::fp::FpCtx;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    field: FpCtx,
    cols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(field: FpCtx, cols: usize) -> Self {
        Echelon { field, cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn field(&self) -> FpCtx {
        self.field
    }

    /// Reduce `v` against the basis in place.
    pub fn reduce(&self, v: &mut [u64]) {
        debug_assert_eq!(v.len(), self.cols);
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv];
            if c != 0 {
                self.field.axpy(v, row, self.field.neg(c));
            }
        }
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Insert a vector; returns true when the rank grew.
    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        debug_assert_eq!(v.len(), self.cols);
        self.reduce(&mut v);
        let piv = match v.iter().position(|&x| x != 0) {
            Some(i) => i,
            None => return false,
        };
        let inv = self.field.inv(v[piv]);
        self.field.scale(&mut v, inv);
        // back-substitute into existing rows to keep the form reduced
        for row in self.rows.iter_mut() {
            let c = row[piv];
            if c != 0 {
                self.field.axpy(row, &v, self.field.neg(c));
            }
        }
        let at = self.pivots.partition_point(|&q| q < piv);
        self.pivots.insert(at, piv);
        self.rows.insert(at, v);
        true
    }

    /// Grow the column count (new coordinates are zero). Used for the
    /// degree-shift that multiplies by the polynomial variable.
    pub fn padded(&self, cols: usize) -> Echelon {
        assert!(cols >= self.cols);
        let mut out = Echelon::new(self.field, cols);
        out.pivots = self.pivots.clone();
        out.rows = self
            .rows
            .iter()
            .map(|r| {
                let mut v = r.clone();
                v.resize(cols, 0);
                v
            })
            .collect();
        out
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.cols
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ech(p: u64, cols: usize) -> Echelon {
        Echelon::new(FpCtx::new(p).unwrap(), cols)
    }

    #[test]
    fn insert_and_rank() {
        let mut e = ech(5, 3);
        assert!(e.insert(vec![2, 1, 0]));
        assert!(e.insert(vec![0, 0, 3]));
        assert!(!e.insert(vec![4, 2, 3])); // 2*(row0) + row1
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&[2, 1, 0]));
        assert!(!e.contains(&[0, 1, 0]));
    }

    #[test]
    fn canonical_independent_of_order() {
        let vecs: Vec<Vec<u64>> = vec![
            vec![1, 2, 3, 4],
            vec![0, 1, 1, 1],
            vec![2, 0, 1, 0],
        ];
        let mut a = ech(7, 4);
        for v in &vecs {
            a.insert(v.clone());
        }
        let mut b = ech(7, 4);
        for v in vecs.iter().rev() {
            b.insert(v.clone());
        }
        assert_eq!(a, b);
    }
}
