//! Operations on lattices under a group action: the lower p-series of a
//! module, exact log-indices, the ell/u rigidity pair, c-equivalence and
//! dimension sequences of sublattices along a filtration.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::valuation_rat;
use crate::error::{Error, Result};
use crate::hdim::{LogIndexEntry, LogIndexSequence};

use super::{
    change_of_basis, determinant, hermite_p_local, invert, FiltrationSeriesLattice, GroupAction,
    PadicLattice,
};

/// One step of the lower p-series: p M + sum over generators of M (g - 1).
/// M must be invariant under the action.
pub fn lambda_step(m: &PadicLattice, action: &GroupAction) -> Result<PadicLattice> {
    if action.p != m.p {
        return Err(Error::precondition("action and lattice use different primes"));
    }
    if action.rank() != m.rank {
        return Err(Error::precondition("action and lattice rank mismatch"));
    }
    for (gi, g) in action.generators.iter().enumerate() {
        let image = m.apply(g)?;
        if &image != m {
            return Err(Error::precondition(format!(
                "lattice is not invariant under generator {gi}"
            )));
        }
    }
    let mut rows = m.scaled(1).basis;
    for g in &action.generators {
        for row in &m.basis {
            // row * (g - 1)
            let mut v: Vec<BigRational> = (0..m.rank)
                .map(|j| {
                    let mut acc = BigRational::zero();
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() {
                            acc += x * &g[k][j];
                        }
                    }
                    acc
                })
                .collect();
            for (x, r) in v.iter_mut().zip(row) {
                *x -= r;
            }
            if v.iter().any(|x| !x.is_zero()) {
                rows.push(v);
            }
        }
    }
    let basis = hermite_p_local(m.p, rows, m.rank)?;
    Ok(PadicLattice { p: m.p, rank: m.rank, basis })
}

/// lambda_0 = L, lambda_{i+1} = lambda_step(lambda_i), up to `steps`.
pub fn lambda_series(
    l: &PadicLattice,
    action: &GroupAction,
    steps: u32,
) -> Result<FiltrationSeriesLattice> {
    let mut terms = vec![l.clone()];
    for _ in 0..steps {
        let next = lambda_step(terms.last().unwrap(), action)?;
        terms.push(next);
    }
    FiltrationSeriesLattice::new(terms)
}

/// log_p |L : M| for M inside L: the p-valuation of det of the change of
/// basis, equal to the sum of elementary divisor valuations.
pub fn log_index(l: &PadicLattice, m: &PadicLattice) -> Result<u64> {
    let x = change_of_basis(m, l)?;
    if !x
        .iter()
        .flatten()
        .all(|e| crate::arith::is_p_integral(e, l.p))
    {
        return Err(Error::precondition("the second lattice is not inside the first"));
    }
    let det = determinant(&x);
    let v = valuation_rat(&det, l.p)
        .ok_or_else(|| Error::precondition("degenerate change of basis"))?;
    debug_assert!(v >= 0);
    Ok(v as u64)
}

/// Elementary divisor valuations of M inside L, ascending: the p-local
/// Smith form of the change-of-basis matrix.
pub fn elementary_divisor_valuations(l: &PadicLattice, m: &PadicLattice) -> Result<Vec<u64>> {
    let mut x = change_of_basis(m, l)?;
    if !x
        .iter()
        .flatten()
        .all(|e| crate::arith::is_p_integral(e, l.p))
    {
        return Err(Error::precondition("the second lattice is not inside the first"));
    }
    let p = l.p;
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    for top in 0..n {
        // minimal-valuation entry in the remaining block
        let mut best: Option<(usize, usize, i64)> = None;
        for i in top..n {
            for j in top..n {
                if let Some(v) = valuation_rat(&x[i][j], p) {
                    if best.map_or(true, |(_, _, bv)| v < bv) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let Some((bi, bj, bv)) = best else {
            return Err(Error::precondition("rank-deficient change of basis"));
        };
        x.swap(top, bi);
        for row in x.iter_mut() {
            row.swap(top, bj);
        }
        let pivot = x[top][top].clone();
        // clear the column and the row; quotients are p-integral because the
        // pivot has minimal valuation
        for i in (top + 1)..n {
            if !x[i][top].is_zero() {
                let q = &x[i][top] / &pivot;
                let pr = x[top].clone();
                for (y, pv) in x[i].iter_mut().zip(&pr) {
                    let sub = &q * pv;
                    *y -= sub;
                }
            }
        }
        for j in (top + 1)..n {
            if !x[top][j].is_zero() {
                let q = &x[top][j] / &pivot;
                for i in top..n {
                    let sub = &q * &x[i][top];
                    x[i][j] -= sub;
                }
            }
        }
        out.push(bv as u64);
    }
    out.sort_unstable();
    Ok(out)
}

/// ell = min k with p^k L inside M, u = max k with M inside p^k L.
pub fn ell_u(l: &PadicLattice, m: &PadicLattice) -> Result<(u64, u64)> {
    let x = change_of_basis(m, l)?;
    let mut min_v: Option<i64> = None;
    for e in x.iter().flatten() {
        if let Some(v) = valuation_rat(e, l.p) {
            min_v = Some(min_v.map_or(v, |b| b.min(v)));
        }
    }
    let u = min_v.ok_or_else(|| Error::precondition("rank-deficient input"))?;
    if u < 0 {
        return Err(Error::precondition("the second lattice is not inside the first"));
    }
    let xinv = invert(&x)?;
    let mut min_w: Option<i64> = None;
    for e in xinv.iter().flatten() {
        if let Some(v) = valuation_rat(e, l.p) {
            min_w = Some(min_w.map_or(v, |b| b.min(v)));
        }
    }
    let ell = (-min_w.unwrap()).max(0);
    Ok((ell as u64, u as u64))
}

/// Both containments p^c L_i <= L*_i and p^c L*_i <= L_i, per index.
pub fn check_c_equivalence(
    s: &FiltrationSeriesLattice,
    s_star: &FiltrationSeriesLattice,
    c: u32,
) -> Result<Vec<bool>> {
    if s.terms.len() != s_star.terms.len() {
        return Err(Error::precondition("filtration windows differ in length"));
    }
    if s.ambient() != s_star.ambient() {
        return Err(Error::precondition("filtrations have different ambient lattices"));
    }
    Ok(s
        .terms
        .iter()
        .zip(&s_star.terms)
        .map(|(a, b)| b.contains(&a.scaled(c)) && a.contains(&b.scaled(c)))
        .collect())
}

/// Dimension sequence of a (possibly lower-rank) sublattice H along a
/// filtration: numerator log_p |H + L_i : L_i|, denominator log_p |L : L_i|.
pub fn hdim_sublattice(
    h_generators: &[Vec<BigRational>],
    series: &FiltrationSeriesLattice,
    window: usize,
) -> Result<LogIndexSequence> {
    let ambient = series.ambient();
    if window + 1 > series.terms.len() {
        return Err(Error::precondition("window exceeds the filtration"));
    }
    for g in h_generators {
        if g.len() != ambient.rank {
            return Err(Error::precondition("generator dimension mismatch"));
        }
        // membership in the ambient lattice
        let x = super::invert(&ambient.basis)?;
        let coords = super::mat_vec_right(g, &x);
        if !coords.iter().all(|c| crate::arith::is_p_integral(c, ambient.p)) {
            return Err(Error::precondition("generator lies outside the ambient lattice"));
        }
    }
    let mut entries = Vec::new();
    for (i, li) in series.terms.iter().enumerate().skip(1).take(window) {
        let den = log_index(ambient, li)?;
        let mut rows = li.basis.clone();
        rows.extend(h_generators.iter().cloned());
        let sum = PadicLattice {
            p: ambient.p,
            rank: ambient.rank,
            basis: hermite_p_local(ambient.p, rows, ambient.rank)?,
        };
        let num = den - log_index(ambient, &sum)?;
        entries.push(LogIndexEntry {
            index: i as u64,
            num: num.into(),
            den: den.into(),
        });
    }
    LogIndexSequence::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn rows(entries: &[&[i64]]) -> Vec<Vec<BigRational>> {
        entries
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from(BigInt::from(x))).collect())
            .collect()
    }

    fn shear_action(p: u64) -> GroupAction {
        // x -> x, y -> x + y
        GroupAction::new(p, vec![rows(&[&[1, 0], &[1, 1]])], 2).unwrap()
    }

    #[test]
    fn trivial_action_gives_p_scaling() {
        let p = 3;
        let action = GroupAction::new(p, vec![rows(&[&[1, 0], &[0, 1]])], 2).unwrap();
        let l = PadicLattice::standard(p, 2);
        let l1 = lambda_step(&l, &action).unwrap();
        assert_eq!(l1, l.scaled(1));
    }

    #[test]
    fn shear_action_lambda_one_and_two() {
        // lambda_1 = Z_p x + p Z_p y, lambda_2 = p Z_p x + p^2 Z_p y
        let p = 3;
        let l = PadicLattice::standard(p, 2);
        let action = shear_action(p);
        let l1 = lambda_step(&l, &action).unwrap();
        let expect1 = PadicLattice::new(p, rows(&[&[1, 0], &[0, 3]])).unwrap();
        assert_eq!(l1, expect1);
        let l2 = lambda_step(&l1, &action).unwrap();
        let expect2 = PadicLattice::new(p, rows(&[&[3, 0], &[0, 9]])).unwrap();
        assert_eq!(l2, expect2);
    }

    #[test]
    fn log_index_examples() {
        let p = 3;
        let l = PadicLattice::standard(p, 2);
        assert_eq!(log_index(&l, &l.scaled(1)).unwrap(), 2);
        let m = PadicLattice::new(p, rows(&[&[1, 0], &[0, 27]])).unwrap();
        assert_eq!(log_index(&l, &m).unwrap(), 3);
        // spanned by (p, 1-p) and (0, p^2): index p^3
        let m2 = PadicLattice::new(p, rows(&[&[3, -2], &[0, 9]])).unwrap();
        assert_eq!(log_index(&l, &m2).unwrap(), 3);
        assert_eq!(
            elementary_divisor_valuations(&l, &m2).unwrap().iter().sum::<u64>(),
            3
        );
        assert!(log_index(&m, &l).is_err());
    }

    #[test]
    fn log_index_additive_in_towers() {
        let p = 3;
        let l = PadicLattice::standard(p, 2);
        let m = PadicLattice::new(p, rows(&[&[3, 1], &[0, 9]])).unwrap();
        let n = m.scaled(2);
        assert!(l.contains(&m) && m.contains(&n));
        assert_eq!(
            log_index(&l, &n).unwrap(),
            log_index(&l, &m).unwrap() + log_index(&m, &n).unwrap()
        );
    }

    #[test]
    fn ell_u_examples() {
        let p = 3;
        let l = PadicLattice::standard(p, 2);
        assert_eq!(ell_u(&l, &l.scaled(4)).unwrap(), (4, 4));
        let m = PadicLattice::new(p, rows(&[&[1, 0], &[0, 27]])).unwrap();
        assert_eq!(ell_u(&l, &m).unwrap(), (3, 0));
        // lambda_2 of the shear example
        let action = shear_action(p);
        let l2 = lambda_series(&l, &action, 2).unwrap().terms[2].clone();
        assert_eq!(ell_u(&l, &l2).unwrap(), (2, 1));
        // shift law: ell_u(L, p^k M) = ell_u(L, M) + (k, k)
        let (e0, u0) = ell_u(&l, &m).unwrap();
        let (e2, u2) = ell_u(&l, &m.scaled(2)).unwrap();
        assert_eq!((e2, u2), (e0 + 2, u0 + 2));
    }

    #[test]
    fn c_equivalence_examples() {
        let p = 3;
        let l = PadicLattice::standard(p, 2);
        let action = shear_action(p);
        let lam = lambda_series(&l, &action, 6).unwrap();
        let pow = FiltrationSeriesLattice::new(
            (0..=6).map(|i| l.scaled(i)).collect(),
        )
        .unwrap();
        // identical series are 0-equivalent
        assert!(check_c_equivalence(&lam, &lam, 0).unwrap().iter().all(|&b| b));
        // class-1 unipotent action: lambda and p-power series are 1-equivalent
        assert!(check_c_equivalence(&lam, &pow, 1).unwrap().iter().all(|&b| b));
        // a shifted series fails at c = 0
        let results = check_c_equivalence(&lam, &pow, 0).unwrap();
        assert!(results.iter().any(|&b| !b));
    }

    #[test]
    fn hdim_sublattice_examples() {
        let p = 3;
        let l = PadicLattice::standard(p, 2);
        let pow = FiltrationSeriesLattice::new((0..=8).map(|i| l.scaled(i)).collect()).unwrap();
        // H = whole lattice: ratios 1
        let full = hdim_sublattice(&rows(&[&[1, 0], &[0, 1]]), &pow, 8).unwrap();
        for r in full.ratios() {
            assert_eq!(r, rat(1, 1));
        }
        // H = 0: ratios 0
        let zero = hdim_sublattice(&[], &pow, 8).unwrap();
        for r in zero.ratios() {
            assert!(r.is_zero());
        }
        // H = Z_p x inside Z_p^2 along p-powers: ratios 1/2
        let line = hdim_sublattice(&rows(&[&[1, 0]]), &pow, 8).unwrap();
        for r in line.ratios() {
            assert_eq!(r, rat(1, 2));
        }
    }

    #[test]
    fn lambda_series_sandwich_for_unipotent_class_one() {
        // p^i L <= lambda_i <= p^{i-1} L for the class-1 shear, p in {2, 3}
        for p in [2u64, 3] {
            let l = PadicLattice::standard(p, 2);
            let action = shear_action(p);
            let lam = lambda_series(&l, &action, 10).unwrap();
            for (i, li) in lam.terms.iter().enumerate().skip(1) {
                assert!(li.contains(&l.scaled(i as u32)), "p^i L <= lambda_i at {i}");
                assert!(
                    l.scaled(i as u32 - 1).contains(li),
                    "lambda_i <= p^(i-1) L at {i}"
                );
                // every term stays invariant
                for g in &action.generators {
                    assert_eq!(&li.apply(g).unwrap(), li);
                }
            }
        }
    }
}
