//! Exact cyclic convolution of nonnegative integer vectors through a
//! number-theoretic transform.
//!
//! The transform prime is chosen so that every coefficient of the linear
//! convolution is strictly smaller than it; reduction modulo the prime is then
//! the identity on the result and the output is exact.

use crate::error::{Error, Result};
use crate::field::{mul_mod, pow_mod};

/// `119·2^23 + 1`, primitive root 3.
const SMALL_PRIME: u64 = 998_244_353;
/// `29·2^57 + 1`.
const LARGE_PRIME: u64 = 4_179_340_454_199_820_289;

fn two_adicity(m: u64) -> u32 {
    (m - 1).trailing_zeros()
}

fn primitive_root(m: u64) -> u64 {
    let mut factors = Vec::new();
    let mut rest = m - 1;
    let mut d = 2;
    while d * d <= rest {
        if rest % d == 0 {
            factors.push(d);
            while rest % d == 0 {
                rest /= d;
            }
        }
        d += 1;
    }
    if rest > 1 {
        factors.push(rest);
    }
    (2..)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, (m - 1) / f, m) != 1))
        .expect("a prime has a primitive root")
}

#[derive(Debug, Clone)]
struct Ntt {
    modulus: u64,
    size: usize,
    /// Twiddles for each butterfly stage, forward and inverse.
    roots: Vec<u64>,
    inv_roots: Vec<u64>,
    size_inv: u64,
}

impl Ntt {
    fn new(modulus: u64, size: usize) -> Self {
        debug_assert!(size.is_power_of_two());
        let g = primitive_root(modulus);
        let w = pow_mod(g, (modulus - 1) / size as u64, modulus);
        let w_inv = pow_mod(w, modulus - 2, modulus);
        let powers = |base: u64| {
            let mut v = Vec::with_capacity(size / 2);
            let mut x = 1;
            for _ in 0..size / 2 {
                v.push(x);
                x = mul_mod(x, base, modulus);
            }
            v
        };
        Ntt {
            modulus,
            size,
            roots: powers(w),
            inv_roots: powers(w_inv),
            size_inv: pow_mod(size as u64, modulus - 2, modulus),
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        if self.modulus < 1 << 32 {
            a * b % self.modulus
        } else {
            mul_mod(a, b, self.modulus)
        }
    }

    fn transform(&self, a: &mut [u64], inverse: bool) {
        let n = self.size;
        let m = self.modulus;
        if n == 1 {
            return;
        }
        let shift = usize::BITS - n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> shift;
            if i < j {
                a.swap(i, j);
            }
        }
        let table = if inverse { &self.inv_roots } else { &self.roots };
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for chunk in a.chunks_exact_mut(len) {
                let (lo, hi) = chunk.split_at_mut(half);
                for k in 0..half {
                    let u = lo[k];
                    let v = self.mul(hi[k], table[k * stride]);
                    let s = u + v;
                    lo[k] = if s >= m { s - m } else { s };
                    hi[k] = if u >= v { u - v } else { u + m - v };
                }
            }
            len <<= 1;
        }
        if inverse {
            for x in a.iter_mut() {
                *x = self.mul(*x, self.size_inv);
            }
        }
    }
}

/// Cyclic convolution over `Z/cycle` for inputs whose convolution values are
/// bounded by a known constant.
#[derive(Debug, Clone)]
pub struct CyclicConvolver {
    cycle: usize,
    ntt: Ntt,
}

impl CyclicConvolver {
    /// `max_coefficient` bounds every entry of the linear convolution.
    pub fn new(cycle: usize, max_coefficient: u64) -> Result<Self> {
        if cycle == 0 {
            return Err(Error::InvalidParameter("convolution length must be positive".into()));
        }
        let size = (2 * cycle - 1).next_power_of_two();
        let log = size.trailing_zeros();
        let modulus = [SMALL_PRIME, LARGE_PRIME]
            .into_iter()
            .find(|&m| max_coefficient < m && log <= two_adicity(m))
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "no exact transform prime for length {cycle} with coefficients up to {max_coefficient}"
                ))
            })?;
        Ok(CyclicConvolver {
            cycle,
            ntt: Ntt::new(modulus, size),
        })
    }

    pub fn cycle(&self) -> usize {
        self.cycle
    }

    pub fn modulus(&self) -> u64 {
        self.ntt.modulus
    }

    /// Forward transform of a length-`cycle` vector, zero padded.
    pub fn transform(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cycle);
        let mut buf = vec![0u64; self.ntt.size];
        for (dst, &x) in buf.iter_mut().zip(v) {
            *dst = x % self.ntt.modulus;
        }
        self.ntt.transform(&mut buf, false);
        buf
    }

    /// Multiplies two forward transforms and folds the linear convolution
    /// back onto `Z/cycle`.
    pub fn convolve_transformed(&self, fa: &[u64], fb: &[u64]) -> Vec<u64> {
        let mut prod: Vec<u64> = fa.iter().zip(fb).map(|(&x, &y)| self.ntt.mul(x, y)).collect();
        self.ntt.transform(&mut prod, true);
        let mut out = prod[..self.cycle].to_vec();
        for (i, &x) in prod[self.cycle..].iter().enumerate().take(self.cycle - 1) {
            out[i] += x;
        }
        out
    }

    pub fn convolve(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.convolve_transformed(&self.transform(a), &self.transform(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn schoolbook(a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = a.len();
        let mut out = vec![0u64; n];
        for i in 0..n {
            for j in 0..n {
                out[(i + j) % n] += a[i] * b[j];
            }
        }
        out
    }

    #[test]
    fn transform_primes() {
        assert_eq!(two_adicity(SMALL_PRIME), 23);
        assert_eq!(two_adicity(LARGE_PRIME), 57);
        assert!(crate::field::validate_prime(SMALL_PRIME).is_ok());
        assert!(crate::field::validate_prime(LARGE_PRIME).is_ok());
        assert_eq!(primitive_root(SMALL_PRIME), 3);
    }

    #[test]
    fn small_cycle() {
        let c = CyclicConvolver::new(5, 10).unwrap();
        assert_eq!(c.convolve(&[1, 1, 0, 0, 0], &[1, 0, 0, 0, 1]), vec![2, 1, 0, 0, 1]);
        let one = CyclicConvolver::new(1, 10).unwrap();
        assert_eq!(one.convolve(&[3], &[2]), vec![6]);
    }

    #[test]
    fn modulus_selection() {
        assert_eq!(CyclicConvolver::new(1009, 1009).unwrap().modulus(), SMALL_PRIME);
        assert_eq!(CyclicConvolver::new(7, 1 << 40).unwrap().modulus(), LARGE_PRIME);
        assert!(CyclicConvolver::new(7, u64::MAX).is_err());
    }

    #[test]
    fn large_modulus_is_exact() {
        let a = vec![1u64 << 20, 3, 0, 7, 1 << 19, 2, 9];
        let b = vec![5u64, 1 << 21, 1, 0, 4, 1 << 18, 6];
        let c = CyclicConvolver::new(7, 1 << 45).unwrap();
        assert_eq!(c.modulus(), LARGE_PRIME);
        assert_eq!(c.convolve(&a, &b), schoolbook(&a, &b));
    }

    proptest! {
        #[test]
        fn matches_schoolbook(a in prop::collection::vec(0u64..50, 1..80), seed in 0u64..1000) {
            let b: Vec<u64> = a.iter().enumerate().map(|(i, &x)| (x * 7 + i as u64 + seed) % 13).collect();
            let c = CyclicConvolver::new(a.len(), 50 * 13 * a.len() as u64).unwrap();
            prop_assert_eq!(c.convolve(&a, &b), schoolbook(&a, &b));
        }
    }
}
