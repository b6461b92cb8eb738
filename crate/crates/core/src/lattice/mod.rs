//! Z_p-lattices at exact rational precision: canonical bases over the
//! localisation of the integers at p, group actions, lower p-series of
//! modules, indices, rigidity bounds and c-equivalence of filtrations.

mod ops;

pub use ops::{
    check_c_equivalence, elementary_divisor_valuations, ell_u, hdim_sublattice, lambda_series,
    lambda_step, log_index,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{is_p_integral, is_prime, valuation_rat};
use crate::error::{Error, Result};

/// Full-rank sublattice of Q_p^d spanned over the p-local integers by the
/// rows of a rational matrix. Construction canonicalises the basis to the
/// p-local row Hermite form: upper triangular, diagonal entries pure powers
/// of p, entries above a pivot reduced to integer representatives modulo the
/// pivot. Equal lattices have equal bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicLattice {
    pub p: u64,
    pub rank: usize,
    pub basis: Vec<Vec<BigRational>>,
}

impl PadicLattice {
    pub fn new(p: u64, rows: Vec<Vec<BigRational>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::precondition(format!("{p} is not prime")));
        }
        let rank = rows.len();
        if rank == 0 {
            return Err(Error::precondition("lattice needs at least one basis row"));
        }
        if rows.iter().any(|r| r.len() != rank) {
            return Err(Error::precondition("basis matrix must be square"));
        }
        for row in &rows {
            for x in row {
                if !is_p_integral(x, p) {
                    return Err(Error::precondition(format!(
                        "entry {} has a denominator divisible by {p}",
                        crate::arith::rational_string(x)
                    )));
                }
            }
        }
        let basis = hermite_p_local(p, rows, rank)?;
        Ok(PadicLattice { p, rank, basis })
    }

    /// The standard lattice Z_p^d.
    pub fn standard(p: u64, rank: usize) -> Self {
        let mut basis = vec![vec![BigRational::zero(); rank]; rank];
        for (i, row) in basis.iter_mut().enumerate() {
            row[i] = BigRational::one();
        }
        PadicLattice { p, rank, basis }
    }

    /// p^k L.
    pub fn scaled(&self, k: u32) -> PadicLattice {
        let f = BigRational::from(BigInt::from(self.p).pow(k));
        let basis = self
            .basis
            .iter()
            .map(|r| r.iter().map(|x| x * &f).collect())
            .collect();
        PadicLattice { p: self.p, rank: self.rank, basis }
    }

    /// Does this lattice contain `other`?
    pub fn contains(&self, other: &PadicLattice) -> bool {
        if self.p != other.p || self.rank != other.rank {
            return false;
        }
        match change_of_basis(other, self) {
            Ok(x) => matrix_is_p_integral(&x, self.p),
            Err(_) => false,
        }
    }

    /// Image of the lattice under a rational matrix acting on the right.
    pub fn apply(&self, m: &[Vec<BigRational>]) -> Result<PadicLattice> {
        let rows = self
            .basis
            .iter()
            .map(|r| mat_vec_right(r, m))
            .collect::<Vec<_>>();
        PadicLattice::new(self.p, rows)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<String>> = self
            .basis
            .iter()
            .map(|r| r.iter().map(crate::arith::rational_string).collect())
            .collect();
        serde_json::json!({"p": self.p, "basis": rows})
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let p = v["p"]
            .as_u64()
            .ok_or_else(|| Error::parse("lattice JSON needs a prime field p"))?;
        let rows = parse_matrix(&v["basis"])?;
        PadicLattice::new(p, rows)
    }
}

pub(crate) fn parse_matrix(v: &serde_json::Value) -> Result<Vec<Vec<BigRational>>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::parse("expected a matrix as an array of rows"))?;
    arr.iter()
        .map(|row| {
            let row = row
                .as_array()
                .ok_or_else(|| Error::parse("expected a row as an array"))?;
            row.iter()
                .map(|x| match x {
                    serde_json::Value::String(s) => crate::arith::parse_rational(s),
                    serde_json::Value::Number(n) => {
                        crate::arith::parse_rational(&n.to_string())
                    }
                    _ => Err(Error::parse("matrix entries must be strings or integers")),
                })
                .collect()
        })
        .collect()
}

pub(crate) fn mat_vec_right(row: &[BigRational], m: &[Vec<BigRational>]) -> Vec<BigRational> {
    let d = row.len();
    (0..d)
        .map(|j| {
            let mut acc = BigRational::zero();
            for (k, x) in row.iter().enumerate() {
                if !x.is_zero() && !m[k][j].is_zero() {
                    acc += x * &m[k][j];
                }
            }
            acc
        })
        .collect()
}

fn matrix_is_p_integral(m: &[Vec<BigRational>], p: u64) -> bool {
    m.iter().flatten().all(|x| is_p_integral(x, p))
}

/// Rows of `from` expressed in the basis of `to`: X = B_from * B_to^{-1}.
pub(crate) fn change_of_basis(
    from: &PadicLattice,
    to: &PadicLattice,
) -> Result<Vec<Vec<BigRational>>> {
    let inv = invert(&to.basis)?;
    Ok(from.basis.iter().map(|r| mat_vec_right(r, &inv)).collect())
}

/// Exact inverse of a square rational matrix.
pub(crate) fn invert(m: &[Vec<BigRational>]) -> Result<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&i| !a[i][col].is_zero())
            .ok_or_else(|| Error::precondition("matrix is singular"))?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= inv.clone();
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..2 * n {
                    let sub = &f * &a[col][j];
                    a[i][j] -= sub;
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Integer representative in [0, p^e) of a p-integral rational's class
/// modulo p^e.
fn residue_mod_p_power(x: &BigRational, modulus: &BigInt) -> BigInt {
    let num = x.numer().mod_floor(modulus);
    let den = x.denom().mod_floor(modulus);
    let inv = mod_inverse(&den, modulus);
    (num * inv).mod_floor(modulus)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    // extended Euclid; a is coprime to m here
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    debug_assert!(r0.is_one(), "inverse of a non-unit");
    t0.mod_floor(m)
}

use num_integer::Integer as _;

/// Canonical p-local row Hermite form of a full-rank row span.
pub(crate) fn hermite_p_local(
    p: u64,
    mut rows: Vec<Vec<BigRational>>,
    rank: usize,
) -> Result<Vec<Vec<BigRational>>> {
    let d = rank;
    let mut pivot_row = 0usize;
    for col in 0..d {
        // minimal valuation entry in this column at or below pivot_row
        let mut best: Option<(usize, i64)> = None;
        for (i, row) in rows.iter().enumerate().skip(pivot_row) {
            if let Some(v) = valuation_rat(&row[col], p) {
                if best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((i, v));
                }
            }
        }
        let Some((bi, bv)) = best else {
            return Err(Error::precondition("basis rows are not of full rank"));
        };
        debug_assert!(bv >= 0);
        rows.swap(pivot_row, bi);
        // scale by a p-unit so the pivot becomes exactly p^bv
        let target = BigRational::from(BigInt::from(p).pow(bv as u32));
        let unit = &target / &rows[pivot_row][col];
        for x in rows[pivot_row].iter_mut() {
            *x *= unit.clone();
        }
        // eliminate the column below the pivot
        let pivot = rows[pivot_row].clone();
        for row in rows.iter_mut().skip(pivot_row + 1) {
            if !row[col].is_zero() {
                let q = &row[col] / &pivot[col];
                debug_assert!(is_p_integral(&q, p));
                for (x, pv) in row.iter_mut().zip(&pivot) {
                    let sub = &q * pv;
                    *x -= sub;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == d {
            break;
        }
    }
    if pivot_row < d {
        return Err(Error::precondition("basis rows are not of full rank"));
    }
    rows.truncate(d);
    // reduce entries above each pivot modulo the pivot's p-power
    for col in (0..d).rev() {
        let e = valuation_rat(&rows[col][col], p).unwrap();
        let modulus = BigInt::from(p).pow(e as u32);
        for i in 0..col {
            let x = rows[i][col].clone();
            if x.is_zero() {
                continue;
            }
            let rep = residue_mod_p_power(&x, &modulus);
            let q = (&x - BigRational::from(rep)) / BigRational::from(modulus.clone());
            debug_assert!(is_p_integral(&q, p));
            if !q.is_zero() {
                let pivot = rows[col].clone();
                for (y, pv) in rows[i].iter_mut().zip(&pivot) {
                    let sub = &q * pv;
                    *y -= sub;
                }
            }
        }
    }
    Ok(rows)
}

/// A finite set of generator matrices acting on row vectors from the right.
/// Each generator must be invertible over the p-local integers and act
/// unipotently modulo p.
#[derive(Debug, Clone)]
pub struct GroupAction {
    pub p: u64,
    pub generators: Vec<Vec<Vec<BigRational>>>,
}

impl GroupAction {
    pub fn new(p: u64, generators: Vec<Vec<Vec<BigRational>>>, rank: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::precondition(format!("{p} is not prime")));
        }
        for (gi, g) in generators.iter().enumerate() {
            if g.len() != rank || g.iter().any(|r| r.len() != rank) {
                return Err(Error::precondition(format!(
                    "generator {gi} is not {rank}x{rank}"
                )));
            }
            for x in g.iter().flatten() {
                if !is_p_integral(x, p) {
                    return Err(Error::precondition(format!(
                        "generator {gi} has a denominator divisible by {p}"
                    )));
                }
            }
            let det = determinant(g);
            if valuation_rat(&det, p) != Some(0) {
                return Err(Error::precondition(format!(
                    "generator {gi} is not invertible over the p-local integers"
                )));
            }
            if !unipotent_mod_p(g, p) {
                return Err(Error::precondition(format!(
                    "generator {gi} does not act unipotently modulo p; the action \
                     cannot be pro-p"
                )));
            }
        }
        Ok(GroupAction { p, generators })
    }

    pub fn rank(&self) -> usize {
        self.generators.first().map_or(0, |g| g.len())
    }

    pub fn from_json(v: &serde_json::Value, rank: usize) -> Result<Self> {
        let p = v["p"]
            .as_u64()
            .ok_or_else(|| Error::parse("action JSON needs a prime p"))?;
        let arr = v["generators"]
            .as_array()
            .ok_or_else(|| Error::parse("action JSON needs a generators array"))?;
        let generators = arr.iter().map(parse_matrix).collect::<Result<Vec<_>>>()?;
        GroupAction::new(p, generators, rank)
    }
}

pub(crate) fn determinant(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&i| !a[i][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        det *= a[col][col].clone();
        let inv = a[col][col].recip();
        for i in (col + 1)..n {
            if !a[i][col].is_zero() {
                let f = &a[i][col] * &inv;
                for j in col..n {
                    let sub = &f * &a[col][j];
                    a[i][j] -= sub;
                }
            }
        }
    }
    det
}

fn unipotent_mod_p(g: &[Vec<BigRational>], p: u64) -> bool {
    let n = g.len();
    let f = crate::fp::FpCtx { p };
    let modulus = BigInt::from(p);
    // N = (g - 1) mod p over F_p
    let mut a = vec![vec![0u64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut x = g[i][j].clone();
            if i == j {
                x -= BigRational::one();
            }
            let r = residue_mod_p_power(&x, &modulus);
            a[i][j] = u64::try_from(r).unwrap();
        }
    }
    // nilpotency: N^n = 0 over F_p
    let mut acc = a.clone();
    for _ in 1..n {
        let mut next = vec![vec![0u64; n]; n];
        for i in 0..n {
            for k in 0..n {
                if acc[i][k] == 0 {
                    continue;
                }
                for j in 0..n {
                    next[i][j] = f.add(next[i][j], f.mul(acc[i][k], a[k][j]));
                }
            }
        }
        acc = next;
    }
    acc.iter().flatten().all(|&x| x == 0)
}

/// Descending chain L_0 >= L_1 >= ... of full-rank sublattices.
#[derive(Debug, Clone)]
pub struct FiltrationSeriesLattice {
    pub terms: Vec<PadicLattice>,
}

impl FiltrationSeriesLattice {
    pub fn new(terms: Vec<PadicLattice>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::precondition("filtration needs at least one term"));
        }
        for w in terms.windows(2) {
            if !w[0].contains(&w[1]) {
                return Err(Error::precondition("filtration terms must descend"));
            }
        }
        Ok(FiltrationSeriesLattice { terms })
    }

    pub fn ambient(&self) -> &PadicLattice {
        &self.terms[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn lat(p: u64, rows: &[&[i64]]) -> PadicLattice {
        PadicLattice::new(
            p,
            rows.iter()
                .map(|r| r.iter().map(|&x| BigRational::from(BigInt::from(x))).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn canonical_form_is_independent_of_presentation() {
        // two generating sets of the same lattice
        let a = lat(3, &[&[3, 0], &[1, 1]]);
        let b = lat(3, &[&[1, 1], &[4, 1]]);
        assert_eq!(a, b);
        // diagonal entries are pure powers of p
        for (i, row) in a.basis.iter().enumerate() {
            let v = valuation_rat(&row[i], 3).unwrap();
            assert_eq!(row[i], BigRational::from(BigInt::from(3).pow(v as u32)));
        }
    }

    #[test]
    fn unit_denominators_are_allowed() {
        // 1/2 is a 3-adic unit
        let l = PadicLattice::new(3, vec![vec![rat(1, 2), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]])
            .unwrap();
        assert_eq!(l, PadicLattice::standard(3, 2));
        assert!(PadicLattice::new(3, vec![vec![rat(1, 3), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]])
            .is_err());
    }

    #[test]
    fn containment_checks() {
        let l = PadicLattice::standard(3, 2);
        let m = lat(3, &[&[3, 0], &[0, 9]]);
        assert!(l.contains(&m));
        assert!(!m.contains(&l));
        assert!(l.contains(&l.scaled(4)));
    }

    #[test]
    fn action_validation() {
        // x -> x, y -> x + y is unipotent
        let good = GroupAction::new(
            3,
            vec![vec![vec![rat(1, 1), rat(0, 1)], vec![rat(1, 1), rat(1, 1)]]],
            2,
        );
        assert!(good.is_ok());
        // multiplication by 2 is invertible but not unipotent mod 3
        let bad = GroupAction::new(
            3,
            vec![vec![vec![rat(2, 1), rat(0, 1)], vec![rat(0, 1), rat(2, 1)]]],
            2,
        );
        assert!(bad.is_err());
        // p-multiple is not invertible p-locally
        let singular = GroupAction::new(
            3,
            vec![vec![vec![rat(3, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]]],
            2,
        );
        assert!(singular.is_err());
    }

    #[test]
    fn filtration_must_descend() {
        let l = PadicLattice::standard(3, 2);
        let good = FiltrationSeriesLattice::new(vec![l.clone(), l.scaled(1), l.scaled(2)]);
        assert!(good.is_ok());
        let bad = FiltrationSeriesLattice::new(vec![l.scaled(1), l]);
        assert!(bad.is_err());
    }
}
