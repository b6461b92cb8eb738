//! Arithmetic in the prime field F_p with p a runtime parameter.
//!
//! Row operations are the inner loop of every closure computation, so the
//! axpy kernel is monomorphised for the small primes that dominate actual
//! use; other primes fall back to 128-bit arithmetic.

use crate::error::{Error, Result};

pub const MAX_PRIME: u64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpCtx {
    pub p: u64,
}

impl FpCtx {
    pub fn new(p: u64) -> Result<Self> {
        if !crate::arith::is_prime(p) {
            return Err(Error::precondition(format!("{p} is not prime")));
        }
        if p >= MAX_PRIME {
            return Err(Error::resource(format!("prime {p} exceeds cap {MAX_PRIME}")));
        }
        Ok(FpCtx { p })
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    #[inline]
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.p != 0);
        self.pow(a, self.p - 2)
    }

    /// Canonical representative of a signed integer.
    pub fn from_i64(&self, x: i64) -> u64 {
        let m = x.rem_euclid(self.p as i64);
        m as u64
    }

    /// dst += c * src (entrywise, mod p). Slices must have equal length.
    pub fn axpy(&self, dst: &mut [u64], src: &[u64], c: u64) {
        debug_assert_eq!(dst.len(), src.len());
        if c == 0 {
            return;
        }
        match self.p {
            2 => axpy_const::<2>(dst, src, c),
            3 => axpy_const::<3>(dst, src, c),
            5 => axpy_const::<5>(dst, src, c),
            7 => axpy_const::<7>(dst, src, c),
            11 => axpy_const::<11>(dst, src, c),
            13 => axpy_const::<13>(dst, src, c),
            _ => {
                for (d, s) in dst.iter_mut().zip(src) {
                    *d = self.add(*d, self.mul(c, *s));
                }
            }
        }
    }

    /// dst *= c (entrywise).
    pub fn scale(&self, dst: &mut [u64], c: u64) {
        for d in dst.iter_mut() {
            *d = self.mul(*d, c);
        }
    }
}

#[inline]
fn axpy_const<const P: u64>(dst: &mut [u64], src: &[u64], c: u64) {
    // entries and c are reduced, so dst + c*src < P + P^2 fits comfortably
    for (d, s) in dst.iter_mut().zip(src) {
        *d = (*d + c * *s) % P;
    }
}
