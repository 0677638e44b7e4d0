//! Prime moduli and modular arithmetic on residues stored as `u64`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted modulus. Keeping `p < 2^63` means `a + b` never
/// overflows for reduced residues and products fit in `u128`.
pub const MODULUS_CAP: u64 = 1 << 63;

/// A validated odd prime `p`, the order of the ambient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PrimeModulus(u64);

impl<'de> Deserialize<'de> for PrimeModulus {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = u64::deserialize(d)?;
        validate_prime(p).map_err(serde::de::Error::custom)
    }
}

/// Deterministic Miller-Rabin witnesses that are sufficient for all `n < 2^64`.
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Returns the modulus if `n` is an odd prime below [`MODULUS_CAP`].
pub fn validate_prime(n: u64) -> Result<PrimeModulus> {
    if n == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if n >= MODULUS_CAP {
        return Err(Error::ModulusTooLarge(n));
    }
    if !is_prime(n) {
        return Err(Error::NotPrime(n));
    }
    Ok(PrimeModulus(n))
}

/// Multiplicative inverse of `x` modulo `m`.
pub fn mod_inv(x: u64, m: PrimeModulus) -> Result<u64> {
    let x = x % m.0;
    if x == 0 {
        return Err(Error::ZeroInverse);
    }
    Ok(pow_mod(x, m.0 - 2, m.0))
}

impl PrimeModulus {
    pub fn new(n: u64) -> Result<Self> {
        validate_prime(n)
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn reduce(self, x: u64) -> u64 {
        x % self.0
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.0)
    }

    pub fn pow(self, base: u64, exp: u64) -> u64 {
        pow_mod(base, exp, self.0)
    }

    pub fn inv(self, x: u64) -> Result<u64> {
        mod_inv(x, self)
    }

    /// Number of affine lines in the plane over this field, `p^2 + p`.
    pub fn line_count(self) -> u128 {
        let p = self.0 as u128;
        p * p + p
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
