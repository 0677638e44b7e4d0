//! Brute-force counts of collinear triples and quadruples by tuple
//! enumeration, independent of the line-based engine.
//!
//! A tuple of points that are not all equal and lie on a common line lies on
//! exactly one common line. The all-equal tuple `(u, …, u)` lies on every
//! one of the `p + 1` lines through `u`, so the moment sums
//! `Σ i(ℓ)^3` and `Σ i(ℓ)^4` count it `p + 1` times; the oracles add that
//! term explicitly.

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{incidence_histogram, Strategy};
use crate::error::{Error, Result};
use crate::exact::big;
use crate::field::PrimeModulus;
use crate::sets::FieldSubset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: u64,
    pub y: u64,
}

impl Point {
    pub fn new(x: u64, y: u64) -> Self {
        Point { x, y }
    }
}

/// Size limits for the enumerating oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCaps {
    pub triples: usize,
    pub quadruples: usize,
    pub algebraic: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            triples: 8,
            quadruples: 6,
            algebraic: 20,
        }
    }
}

fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded { what, n, cap });
    }
    Ok(())
}

/// Zero determinant test; any tuple with a repeated point is collinear.
pub fn collinear(p: PrimeModulus, u: Point, v: Point, w: Point) -> bool {
    let (ax, ay) = (p.sub(v.x, u.x), p.sub(v.y, u.y));
    let (bx, by) = (p.sub(w.x, u.x), p.sub(w.y, u.y));
    p.mul(ax, by) == p.mul(ay, bx)
}

fn grid(a: &FieldSubset) -> Vec<Point> {
    let xs = a.elements();
    xs.iter()
        .flat_map(|&x| xs.iter().map(move |&y| Point::new(x, y)))
        .collect()
}

fn degenerate_term(a: &FieldSubset) -> BigUint {
    let n = a.len() as u64;
    big(a.modulus().get() + 1) * big(n * n)
}

/// `T(A)` from ordered triples: `N₃ + (p+1)·n²`.
pub fn t_brute(a: &FieldSubset, caps: &OracleCaps) -> Result<BigUint> {
    check_cap("t_brute", a.len(), caps.triples)?;
    let p = a.modulus();
    let pts = grid(a);
    let n3: u64 = pts
        .par_iter()
        .map(|&u| {
            let mut c = 0u64;
            for &v in &pts {
                for &w in &pts {
                    if !(u == v && v == w) && collinear(p, u, v, w) {
                        c += 1;
                    }
                }
            }
            c
        })
        .sum();
    Ok(big(n3) + degenerate_term(a))
}

/// Whether every point of `tuple` lies on one line. Tuples with a single
/// distinct point report `None`.
fn on_common_line(p: PrimeModulus, tuple: &[Point]) -> Option<bool> {
    let u = tuple[0];
    let v = *tuple.iter().find(|&&t| t != u)?;
    Some(tuple.iter().all(|&t| collinear(p, u, v, t)))
}

/// `Q(A)` from ordered quadruples: `N₄ + (p+1)·n²`.
pub fn q_brute(a: &FieldSubset, caps: &OracleCaps) -> Result<BigUint> {
    check_cap("q_brute", a.len(), caps.quadruples)?;
    let p = a.modulus();
    let pts = grid(a);
    let n4: u64 = pts
        .par_iter()
        .map(|&u| {
            let mut c = 0u64;
            for &v in &pts {
                for &w in &pts {
                    for &z in &pts {
                        if on_common_line(p, &[u, v, w, z]) == Some(true) {
                            c += 1;
                        }
                    }
                }
            }
            c
        })
        .sum();
    Ok(big(n4) + degenerate_term(a))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlgebraicTripleCount {
    /// Solutions `(a₁,…,a₆) ∈ A⁶` of
    /// `(a₁−a₂)/(a₃−a₄) = (a₁−a₅)/(a₃−a₆) ≠ 0` with `a₃ ≠ a₄, a₃ ≠ a₆`.
    #[serde(with = "crate::exact::as_string")]
    pub count: BigUint,
    #[serde(with = "crate::exact::as_string")]
    pub t: BigUint,
    /// `T(A) − 2n⁴ − count`.
    #[serde(with = "crate::exact::as_string")]
    pub delta: BigInt,
}

/// Counts ratio-equation solutions in `Θ(n⁴ log n)` by grouping the pairs
/// `(a₂, a₄)` on the value of `(a₁−a₂)/(a₃−a₄)` for each `(a₁, a₃)`.
pub fn algebraic_triple_count(a: &FieldSubset, caps: &OracleCaps) -> Result<AlgebraicTripleCount> {
    check_cap("algebraic_triple_count", a.len(), caps.algebraic)?;
    let p = a.modulus();
    let xs = a.elements();
    let count: u64 = xs
        .par_iter()
        .map(|&a1| {
            let mut total = 0u64;
            let mut ratios = Vec::with_capacity(xs.len() * xs.len());
            for &a3 in xs {
                ratios.clear();
                for &a2 in xs.iter().filter(|&&v| v != a1) {
                    for &a4 in xs.iter().filter(|&&v| v != a3) {
                        let inv = p.inv(p.sub(a3, a4)).expect("a3 != a4");
                        ratios.push(p.mul(p.sub(a1, a2), inv));
                    }
                }
                ratios.sort_unstable();
                total += ratios
                    .chunk_by(|x, y| x == y)
                    .map(|run| (run.len() as u64).pow(2))
                    .sum::<u64>();
            }
            total
        })
        .sum();
    let t = incidence_histogram(a, Strategy::SlopeDirect)?.moments().s3;
    let n = a.len() as u64;
    let delta = BigInt::from(t.clone()) - BigInt::from(2 * n.pow(4)) - BigInt::from(count);
    Ok(AlgebraicTripleCount {
        count: big(count),
        t,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Strategy;
    use crate::sets::{from_list, gen_uniform};
    use proptest::prelude::*;

    fn p(n: u64) -> PrimeModulus {
        PrimeModulus::new(n).unwrap()
    }

    /// Direct `Θ(n⁶)` enumeration of the ratio equation.
    fn algebraic_naive(a: &FieldSubset) -> u64 {
        let q = a.modulus();
        let xs = a.elements();
        let mut c = 0;
        for &a1 in xs {
            for &a2 in xs {
                for &a3 in xs {
                    for &a4 in xs {
                        if a3 == a4 {
                            continue;
                        }
                        let lhs = q.mul(q.sub(a1, a2), q.inv(q.sub(a3, a4)).unwrap());
                        if lhs == 0 {
                            continue;
                        }
                        for &a5 in xs {
                            for &a6 in xs {
                                if a3 == a6 {
                                    continue;
                                }
                                let rhs = q.mul(q.sub(a1, a5), q.inv(q.sub(a3, a6)).unwrap());
                                if lhs == rhs {
                                    c += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        c
    }

    #[test]
    fn collinear_examples() {
        let q = p(5);
        let pt = Point::new;
        assert!(collinear(q, pt(0, 0), pt(1, 1), pt(2, 2)));
        assert!(!collinear(q, pt(0, 0), pt(1, 0), pt(1, 1)));
        assert!(collinear(q, pt(0, 0), pt(0, 0), pt(3, 4)));
        // wraps: (0,0), (1,2), (3,1) lie on y = 2x mod 5
        assert!(collinear(q, pt(0, 0), pt(1, 2), pt(3, 1)));
    }

    #[test]
    fn brute_hand_values() {
        let caps = OracleCaps::default();
        let sq = from_list(p(5), &[0, 1]).unwrap();
        assert_eq!(t_brute(&sq, &caps).unwrap(), big(60));
        assert_eq!(q_brute(&sq, &caps).unwrap(), big(108));
        let single = from_list(p(5), &[0]).unwrap();
        assert_eq!(t_brute(&single, &caps).unwrap(), big(6));
        assert_eq!(q_brute(&single, &caps).unwrap(), big(6));
        let empty = from_list(p(5), &[]).unwrap();
        assert_eq!(t_brute(&empty, &caps).unwrap(), big(0));
    }

    #[test]
    fn brute_matches_engine() {
        let caps = OracleCaps::default();
        let a = from_list(p(5), &[0, 1, 2]).unwrap();
        let m = incidence_histogram(&a, Strategy::Naive).unwrap().moments();
        assert_eq!(t_brute(&a, &caps).unwrap(), m.s3);
        let b = from_list(p(7), &[0, 1, 2]).unwrap();
        let m = incidence_histogram(&b, Strategy::Naive).unwrap().moments();
        assert_eq!(q_brute(&b, &caps).unwrap(), m.s4);
    }

    #[test]
    fn caps_are_enforced() {
        let caps = OracleCaps::default();
        let a = gen_uniform(p(31), 9, 1).unwrap();
        assert_eq!(
            t_brute(&a, &caps),
            Err(Error::CapExceeded { what: "t_brute", n: 9, cap: 8 })
        );
        let b = gen_uniform(p(31), 7, 1).unwrap();
        assert!(q_brute(&b, &caps).is_err());
        let c = gen_uniform(p(31), 21, 1).unwrap();
        assert!(algebraic_triple_count(&c, &caps).is_err());
        let loose = OracleCaps { triples: 9, ..caps };
        assert!(t_brute(&a, &loose).is_ok());
    }

    #[test]
    fn algebraic_small_cases() {
        let caps = OracleCaps::default();
        let single = from_list(p(5), &[0]).unwrap();
        assert_eq!(algebraic_triple_count(&single, &caps).unwrap().count, big(0));
        // All 2^6 tuples over {0,1}: a3 != a4, a3 != a6 forces a4 = a6 = 1 - a3,
        // nonzero ratio forces a2 = a5 = 1 - a1; 4 tuples, all solutions.
        let sq = from_list(p(5), &[0, 1]).unwrap();
        assert_eq!(algebraic_naive(&sq), 4);
        let r = algebraic_triple_count(&sq, &caps).unwrap();
        assert_eq!(r.count, big(4));
        assert_eq!(r.delta, BigInt::from(60 - 32 - 4));
    }

    #[test]
    fn algebraic_matches_naive() {
        let caps = OracleCaps::default();
        for (q, n, seed) in [(7, 4, 1), (11, 5, 2), (13, 6, 3), (31, 6, 4), (5, 5, 5)] {
            let a = gen_uniform(p(q), n, seed).unwrap();
            assert_eq!(algebraic_triple_count(&a, &caps).unwrap().count, big(algebraic_naive(&a)));
        }
    }

    #[test]
    fn reconciliation_closed_form() {
        // Solutions are ordered pairs of further points on a common line
        // through (a1, a3) that is neither horizontal nor vertical, so
        // count = Σ' i(i−1)² over those lines and T − 2n⁴ − count = Σ'(2i² − i).
        // The first and second moment identities then give
        // delta = 2n⁴ − 4n³ + (p+1)n².
        let caps = OracleCaps::default();
        for (q, n, seed) in [(5, 2, 0), (7, 3, 1), (17, 7, 2), (31, 8, 3), (31, 1, 4), (101, 12, 5)] {
            let a = gen_uniform(p(q), n, seed).unwrap();
            let r = algebraic_triple_count(&a, &caps).unwrap();
            let n = n as i64;
            let want = 2 * n.pow(4) - 4 * n.pow(3) + (q as i64 + 1) * n.pow(2);
            assert_eq!(r.delta, BigInt::from(want), "p = {q}, n = {n}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn collinear_is_symmetric(
            pts in prop::collection::vec((0u64..13, 0u64..13), 3)
        ) {
            let q = p(13);
            let [u, v, w] = [0, 1, 2].map(|i| Point::new(pts[i].0, pts[i].1));
            let base = collinear(q, u, v, w);
            for (a, b, c) in [(u, w, v), (v, u, w), (v, w, u), (w, u, v), (w, v, u)] {
                prop_assert_eq!(collinear(q, a, b, c), base);
            }
        }

        #[test]
        fn algebraic_count_is_dilation_invariant(seed in 0u64..1000, c in 1u64..13) {
            let caps = OracleCaps::default();
            let a = gen_uniform(p(13), 5, seed).unwrap();
            let scaled = a.map_affine(c, 0).unwrap();
            prop_assert_eq!(
                algebraic_triple_count(&a, &caps).unwrap().count,
                algebraic_triple_count(&scaled, &caps).unwrap().count
            );
        }
    }
}
