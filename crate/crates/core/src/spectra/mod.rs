//! Filtration series of Z_p + Z_p realising a prescribed finite dimension
//! spectrum: construction, exact closed-form index ratios, an elementary
//! divisor oracle, and the scanner that classifies sample subgroups.

mod scan;

pub use scan::{line_logindex_oracle, spectrum_scan, ScanReport, SampleVerdict, Verdict};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{is_p_integral, is_prime, valuation_rat};
use crate::error::{Error, Result};

/// Prescribed spectrum: a finite ascending set of rationals from 0 to 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumTarget {
    pub p: u64,
    pub xs: Vec<BigRational>,
}

impl SpectrumTarget {
    pub fn new(p: u64, xs: Vec<BigRational>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::precondition(format!("{p} is not prime")));
        }
        if xs.len() < 2 {
            return Err(Error::precondition("the spectrum needs at least {0, 1}"));
        }
        if !xs[0].is_zero() || !xs[xs.len() - 1].is_one() {
            return Err(Error::precondition("the spectrum must contain 0 and 1 as endpoints"));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::precondition("spectrum values must be strictly ascending"));
        }
        Ok(SpectrumTarget { p, xs })
    }

    pub fn n(&self) -> usize {
        self.xs.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapMode {
    /// e(i) = 2^(2^i), the doubly exponential default
    Tower,
    /// e(i) = base^i, materialisable for the elementary-divisor oracle
    Geometric(u64),
}

/// Strictly increasing gap exponents with non-increasing consecutive ratios
/// e(i-1)/e(i) on the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapSequence {
    pub mode: GapMode,
    pub values: Vec<BigUint>,
}

impl GapSequence {
    pub fn build(mode: GapMode, i_max: u32) -> Result<Self> {
        let values: Vec<BigUint> = match mode {
            GapMode::Tower => {
                if i_max > 24 {
                    return Err(Error::resource(
                        "tower exponents beyond i = 24 are too large to handle",
                    ));
                }
                (0..=i_max)
                    .map(|i| BigUint::from(2u32).pow(2u32.pow(i)))
                    .collect()
            }
            GapMode::Geometric(base) => {
                if base < 2 {
                    return Err(Error::precondition("geometric gap base must be at least 2"));
                }
                (0..=i_max).map(|i| BigUint::from(base).pow(i)).collect()
            }
        };
        GapSequence::from_values(mode, values)
    }

    pub fn from_values(mode: GapMode, values: Vec<BigUint>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::precondition("gap sequence needs at least e(0), e(1)"));
        }
        for w in values.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::precondition("gap exponents must strictly increase"));
            }
        }
        // e(i-1)/e(i) non-increasing: e(i-1) e(i+1) >= e(i)^2
        for w in values.windows(3) {
            if &w[0] * &w[2] < &w[1] * &w[1] {
                return Err(Error::precondition(
                    "consecutive gap ratios must be non-increasing",
                ));
            }
        }
        Ok(GapSequence { mode, values })
    }

    pub fn e(&self, i: u32) -> &BigUint {
        &self.values[i as usize]
    }

    pub fn i_max(&self) -> u32 {
        self.values.len() as u32 - 1
    }
}

/// Data of the term L_i = p^{e(i-1)} Z_p (x + c y) + p^{e(i)} Z_p y with
/// c = (1 - p^{k + t}) / (1 - p^k).
#[derive(Debug, Clone)]
pub struct IndexData {
    pub i: u32,
    /// residue class of i modulo n, in 1..=n
    pub k: u32,
    pub j: u32,
    /// the maximal multiple of k below (e(i) - e(i-1)) (1 - xi_k); zero
    /// exactly when xi_k = 1
    pub t: BigUint,
}

#[derive(Debug, Clone)]
pub struct Zp2Filtration {
    pub target: SpectrumTarget,
    pub gaps: GapSequence,
    pub rows: Vec<IndexData>,
}

impl Zp2Filtration {
    pub fn i_max(&self) -> u32 {
        self.rows.len() as u32
    }

    pub fn row(&self, i: u32) -> &IndexData {
        &self.rows[i as usize - 1]
    }

    /// log_p |L : L_i| = e(i-1) + e(i).
    pub fn log_index(&self, i: u32) -> BigUint {
        self.gaps.e(i - 1) + self.gaps.e(i)
    }

    /// The isolated line z_k = x + (1 - p^k)^{-1} y.
    pub fn z_line(&self, k: u32) -> RationalSubgroupSpec {
        let p = BigInt::from(self.target.p);
        let b = BigRational::new(BigInt::one(), BigInt::one() - p.pow(k));
        RationalSubgroupSpec::Line { m: 0, b }
    }
}

/// Rank-one (or trivial, or full) subgroup specification. Lines are
/// normalised as Z_p (p^m x + b y) with b p-integral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RationalSubgroupSpec {
    Full,
    Zero,
    Line { m: u32, b: BigRational },
}

impl RationalSubgroupSpec {
    pub fn line(p: u64, m: u32, b: BigRational) -> Result<Self> {
        if !is_p_integral(&b, p) {
            return Err(Error::precondition(
                "line coefficient must have a denominator coprime to p",
            ));
        }
        Ok(RationalSubgroupSpec::Line { m, b })
    }

    pub fn describe(&self) -> String {
        match self {
            RationalSubgroupSpec::Full => "full".into(),
            RationalSubgroupSpec::Zero => "zero".into(),
            RationalSubgroupSpec::Line { m, b } => {
                format!("line(m={m}, b={})", crate::arith::rational_string(b))
            }
        }
    }
}

/// Construct the filtration realising the target spectrum on indices
/// 1..=i_max. Derived quantities are exact; the inclusion
/// p^{e(i)} L <= L_i <= p^{e(i-1)} L and the index law hold by the shape of
/// the terms once t_{k,j} exists, which is checked here.
pub fn build_filtration(
    target: &SpectrumTarget,
    gaps: &GapSequence,
    i_max: u32,
) -> Result<Zp2Filtration> {
    if i_max < 1 {
        return Err(Error::precondition("need at least one filtration index"));
    }
    if gaps.i_max() < i_max {
        return Err(Error::precondition(format!(
            "gap window covers i <= {}, requested {i_max}",
            gaps.i_max()
        )));
    }
    let n = target.n() as u32;
    let mut rows = Vec::with_capacity(i_max as usize);
    for i in 1..=i_max {
        let k = ((i - 1) % n) + 1;
        let j = (i - k) / n;
        let xi = &target.xs[k as usize - 1];
        let gap = gaps.e(i) - gaps.e(i - 1);
        let t = if xi.is_one() {
            BigUint::zero()
        } else {
            // floor(gap * (1 - xi) / k) * k, demanded >= k
            let one_minus = BigRational::one() - xi;
            let bound = BigRational::from(BigInt::from(gap)) * &one_minus
                / BigRational::from(BigInt::from(k));
            let fl = bound.floor().to_integer();
            if fl < BigInt::one() {
                return Err(Error::precondition(format!(
                    "no positive multiple of k = {k} fits below the gap at i = {i}; \
                     enlarge the gaps or shrink the spectrum"
                )));
            }
            fl.to_biguint().unwrap() * BigUint::from(k)
        };
        rows.push(IndexData { i, k, j, t });
    }
    Ok(Zp2Filtration { target: target.clone(), gaps: gaps.clone(), rows })
}

enum YValuation {
    Finite(BigUint),
    Infinite,
}

/// Exponent cap for materialising p^(m+k+t) in the rare tie case.
const MATERIALIZE_CAP: u64 = 1 << 20;

/// Closed-form numerator and denominator of
/// log_p |H + L_i : L_i| / log_p |L : L_i|.
///
/// Writing H = Z_p (p^m x + b y) in the basis (x~, y) of L_i, the numerator
/// is max(e(i-1) - m, e(i) - v, 0) with v the valuation of the y-coordinate
/// b - p^m (1 - p^{k+t}) / (1 - p^k). The value of v splits into the branch
/// v = m + k + t on the isolated line (where the small part cancels) and
/// v = v_p(b (1 - p^k) - p^m) off it.
pub fn line_logindex_closedform(
    f: &Zp2Filtration,
    h: &RationalSubgroupSpec,
    i: u32,
) -> Result<(BigUint, BigUint)> {
    if i < 1 || i > f.i_max() {
        return Err(Error::precondition(format!("index {i} outside the window")));
    }
    let den = f.log_index(i);
    let num = match h {
        RationalSubgroupSpec::Full => den.clone(),
        RationalSubgroupSpec::Zero => BigUint::zero(),
        RationalSubgroupSpec::Line { m, b } => {
            let row = f.row(i);
            let p = BigInt::from(f.target.p);
            let e_prev = f.gaps.e(i - 1);
            let e_cur = f.gaps.e(i);
            // c0 = b (1 - p^k) - p^m, the part that survives off the z_k line
            let c0 = b * BigRational::from(BigInt::one() - p.pow(row.k))
                - BigRational::from(p.pow(*m));
            let mkt = BigUint::from(*m) + BigUint::from(row.k) + &row.t;
            let v = if c0.is_zero() {
                YValuation::Finite(mkt)
            } else {
                let v0 = valuation_rat(&c0, f.target.p).unwrap();
                debug_assert!(v0 >= 0, "p-integral inputs");
                let v0 = BigUint::from(v0 as u64);
                if v0 < mkt {
                    YValuation::Finite(v0)
                } else {
                    // ties require the exact sum c0 + p^(m+k+t)
                    if mkt > BigUint::from(MATERIALIZE_CAP) {
                        return Err(Error::resource(
                            "valuation tie beyond the materialisation cap",
                        ));
                    }
                    let pw = BigInt::from(crate::arith::big_pow(f.target.p, &mkt));
                    let full = c0 + BigRational::from(pw);
                    match valuation_rat(&full, f.target.p) {
                        Some(v) => YValuation::Finite(BigUint::from(v as u64)),
                        None => YValuation::Infinite,
                    }
                }
            };
            let num_x = saturating_sub(e_prev, &BigUint::from(*m));
            let num_y = match v {
                YValuation::Finite(v) => saturating_sub(e_cur, &v),
                YValuation::Infinite => BigUint::zero(),
            };
            num_x.max(num_y)
        }
    };
    Ok((num, den))
}

fn saturating_sub(a: &BigUint, b: &BigUint) -> BigUint {
    if a >= b {
        a - b
    } else {
        BigUint::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn target_halves(p: u64) -> SpectrumTarget {
        SpectrumTarget::new(p, vec![rat(0, 1), rat(1, 2), rat(1, 1)]).unwrap()
    }

    #[test]
    fn target_validation() {
        assert!(SpectrumTarget::new(3, vec![rat(0, 1), rat(1, 1)]).is_ok());
        assert!(SpectrumTarget::new(3, vec![rat(0, 1), rat(1, 2)]).is_err());
        assert!(SpectrumTarget::new(3, vec![rat(1, 2), rat(1, 1)]).is_err());
        assert!(SpectrumTarget::new(4, vec![rat(0, 1), rat(1, 1)]).is_err());
    }

    #[test]
    fn gap_sequences() {
        let tower = GapSequence::build(GapMode::Tower, 4).unwrap();
        assert_eq!(tower.e(0), &BigUint::from(2u32));
        assert_eq!(tower.e(2), &BigUint::from(16u32));
        let geo = GapSequence::build(GapMode::Geometric(4), 4).unwrap();
        assert_eq!(geo.e(3), &BigUint::from(64u32));
        // decreasing-ratio validation rejects a slowing sequence
        let bad = GapSequence::from_values(
            GapMode::Geometric(2),
            vec![1u32.into(), 4u32.into(), 8u32.into(), 9u32.into()],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn tower_log_index_at_two() {
        let t = target_halves(3);
        let gaps = GapSequence::build(GapMode::Tower, 6).unwrap();
        let f = build_filtration(&t, &gaps, 6).unwrap();
        assert_eq!(f.log_index(2), BigUint::from(20u32));
    }

    #[test]
    fn t_formula_example() {
        // X = {0, 1/2, 1}, k = 2, j = 0 (i = 2), tower gaps:
        // t = floor((16 - 4) * (1/2) / 2) * 2 = 6
        let t = target_halves(3);
        let gaps = GapSequence::build(GapMode::Tower, 4).unwrap();
        let f = build_filtration(&t, &gaps, 4).unwrap();
        let row = f.row(2);
        assert_eq!(row.k, 2);
        assert_eq!(row.j, 0);
        assert_eq!(row.t, BigUint::from(6u32));
        // xi = 1 at k = n: t degenerates to zero and the full-ratio branch
        let row3 = f.row(3);
        assert_eq!(row3.k, 3);
        assert!(row3.t.is_zero());
    }

    #[test]
    fn closed_form_branches() {
        let t = target_halves(3);
        let gaps = GapSequence::build(GapMode::Tower, 6).unwrap();
        let f = build_filtration(&t, &gaps, 6).unwrap();
        // z_2 along i = 2: numerator 4 + (16 - 4 - 2 - 6) = 8 over 20
        let z2 = f.z_line(2);
        let (num, den) = line_logindex_closedform(&f, &z2, 2).unwrap();
        assert_eq!((num, den), (8u32.into(), 20u32.into()));
        // a unit line (m = 0, l = 0) at i = 2: numerator e(2) = 16
        let unit = RationalSubgroupSpec::line(3, 0, rat(1, 1)).unwrap();
        let (num, den) = line_logindex_closedform(&f, &unit, 2).unwrap();
        assert_eq!((num, den), (16u32.into(), 20u32.into()));
        // full lattice: ratio 1 everywhere
        for i in 1..=6 {
            let (num, den) = line_logindex_closedform(&f, &RationalSubgroupSpec::Full, i).unwrap();
            assert_eq!(num, den);
        }
        // zero subgroup: numerator 0
        let (num, _) = line_logindex_closedform(&f, &RationalSubgroupSpec::Zero, 3).unwrap();
        assert!(num.is_zero());
    }

    #[test]
    fn z_lines_are_pairwise_transversal() {
        // v_p of the coordinate difference of z_k and z_l is min(k, l)
        let p = 3u64;
        for k in 1u32..=4 {
            for l in (k + 1)..=4 {
                let bk = BigRational::new(BigInt::one(), BigInt::one() - BigInt::from(p).pow(k));
                let bl = BigRational::new(BigInt::one(), BigInt::one() - BigInt::from(p).pow(l));
                let diff = &bk - &bl;
                assert_eq!(
                    valuation_rat(&diff, p),
                    Some(k.min(l) as i64),
                    "k={k} l={l}"
                );
            }
        }
    }

    #[test]
    fn z_line_converges_with_explicit_bound() {
        // |ratio_at(i) - xi_k| <= 2 e(i-1)/e(i) + (k + n)/e(i) along I_k
        let t = target_halves(3);
        let gaps = GapSequence::build(GapMode::Tower, 8).unwrap();
        let f = build_filtration(&t, &gaps, 8).unwrap();
        let n = t.n() as u32;
        for k in 1..=n {
            let z = f.z_line(k);
            let xi = &t.xs[k as usize - 1];
            let mut i = k;
            while i <= 8 {
                let (num, den) = line_logindex_closedform(&f, &z, i).unwrap();
                let ratio = BigRational::new(num.into(), den.clone().into());
                let diff = (ratio - xi).abs();
                let e_prev = BigRational::from(BigInt::from(f.gaps.e(i - 1).clone()));
                let e_cur = BigRational::from(BigInt::from(f.gaps.e(i).clone()));
                let bound = rat(2, 1) * &e_prev / &e_cur
                    + BigRational::from(BigInt::from(k + n)) / &e_cur;
                assert!(diff <= bound, "k={k} i={i}");
                i += n;
            }
        }
    }
}
