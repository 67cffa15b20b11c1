//! Arithmetic modulo the Mersenne prime 2^61 - 1 and a polynomial k-wise
//! independent hash family over it.

use crate::rng::{derive, splitmix64};

pub const P: u64 = (1 << 61) - 1;

#[inline]
pub fn reduce(x: u128) -> u64 {
    let lo = (x as u64) & P;
    let hi = (x >> 61) as u64;
    let s = lo + (hi & P) + ((x >> 122) as u64);
    let s = (s & P) + (s >> 61);
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
pub fn mul(a: u64, b: u64) -> u64 {
    reduce(a as u128 * b as u128)
}

#[inline]
pub fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

pub fn pow(mut base: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        e >>= 1;
    }
    acc
}

/// Signed integer as a field element.
#[inline]
pub fn from_i64(x: i64) -> u64 {
    let m = x.rem_euclid(P as i64) as u64;
    m % P
}

/// Degree-(k-1) polynomial with random coefficients: a k-wise independent
/// map from [0, P) to [0, P).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyHash {
    coeffs: Vec<u64>,
}

impl PolyHash {
    pub fn new(seed: u64, k: usize) -> Self {
        let coeffs = (0..k.max(2))
            .map(|i| splitmix64(derive(seed, "poly", i as u64)) % P)
            .collect();
        PolyHash { coeffs }
    }

    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        let x = x % P;
        self.coeffs.iter().rev().fold(0, |acc, &c| add(mul(acc, x), c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        assert_eq!(mul(P - 1, P - 1), 1);
        assert_eq!(add(P - 1, 5), 4);
        assert_eq!(sub(3, 5), P - 2);
        assert_eq!(pow(3, P - 1), 1);
        assert_eq!(from_i64(-1), P - 1);
        assert_eq!(reduce(u128::MAX % ((P as u128) * (P as u128))), (u128::MAX % ((P as u128) * (P as u128)) % P as u128) as u64);
    }

    #[test]
    fn hash_spreads() {
        let h = PolyHash::new(1, 4);
        let mut low = 0;
        for x in 0..10_000u64 {
            if h.eval(x) < P / 2 {
                low += 1;
            }
        }
        assert!((4_500..5_500).contains(&low));
    }
}
