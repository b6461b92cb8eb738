//! Small number-theoretic helpers: Möbius function, divisors, primality,
//! and exact p-adic valuations of big integers and rationals.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Trial-division factorisation, adequate for the small arguments
/// (weights, filtration indices) that show up here.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Möbius function.
pub fn moebius(n: u64) -> i64 {
    assert!(n >= 1);
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// All divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1);
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let snapshot = out.clone();
        let mut pe = 1u64;
        for _ in 0..e {
            pe *= p;
            out.extend(snapshot.iter().map(|d| d * pe));
        }
    }
    out.sort_unstable();
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

/// Exact p-adic valuation of a nonzero integer.
pub fn valuation_int(x: &BigInt, p: u64) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v = 0u64;
    let mut cur = x.abs();
    loop {
        let (q, r) = num_integer::Integer::div_rem(&cur, &p);
        if !r.is_zero() {
            return Some(v);
        }
        v += 1;
        cur = q;
    }
}

/// Exact p-adic valuation of a nonzero rational (may be negative).
pub fn valuation_rat(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let vn = valuation_int(x.numer(), p).unwrap() as i64;
    let vd = valuation_int(x.denom(), p).unwrap() as i64;
    Some(vn - vd)
}

/// True when the rational is p-integral (denominator coprime to p).
pub fn is_p_integral(x: &BigRational, p: u64) -> bool {
    x.is_zero() || valuation_int(x.denom(), p) == Some(0)
}

pub fn big_pow(base: u64, exp: &BigUint) -> BigUint {
    // exponents here always fit in usize by the time we materialise a power
    let e = u64::try_from(exp).expect("exponent too large to materialise");
    BigUint::from(base).pow(u32::try_from(e).expect("exponent too large to materialise"))
}

/// Parse "a/b" or "a" into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::parse(format!("bad rational numerator: {s:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::parse(format!("bad rational denominator: {s:?}")))?;
    if d.is_zero() {
        return Err(Error::parse(format!("zero denominator: {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

/// Render a rational as "a/b" (or "a" when integral).
pub fn rational_string(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moebius_small() {
        let expected = [1i64, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0];
        for (i, &m) in expected.iter().enumerate() {
            assert_eq!(moebius(i as u64 + 1), m, "mu({})", i + 1);
        }
    }

    #[test]
    fn divisors_of_12() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn valuations() {
        let x = BigInt::from(72); // 2^3 * 3^2
        assert_eq!(valuation_int(&x, 2), Some(3));
        assert_eq!(valuation_int(&x, 3), Some(2));
        assert_eq!(valuation_int(&BigInt::zero(), 5), None);
        let q = BigRational::new(BigInt::from(9), BigInt::from(4));
        assert_eq!(valuation_rat(&q, 3), Some(2));
        assert_eq!(valuation_rat(&q, 2), Some(-2));
    }

    #[test]
    fn rational_round_trip() {
        let q = parse_rational("-3/7").unwrap();
        assert_eq!(rational_string(&q), "-3/7");
        assert!(parse_rational("1/0").is_err());
    }
}
