//! Incidences between `A×A` and every affine line of the plane.
//!
//! A sloped line `y = m·x + b` meets `A×A` in `#{x ∈ A : m·x + b ∈ A}`
//! points. For a fixed slope `m` all `p` intercepts are handled at once by
//! the slope profile `r_m(b) = #{(x, y) ∈ A×A : y − m·x = b}`; the `p`
//! vertical lines `x = c` hold `n` points when `c ∈ A` and none otherwise.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeModulus;
use crate::histogram::IncidenceHistogram;
use crate::ntt::CyclicConvolver;
use crate::sets::FieldSubset;

/// Largest modulus for which every line count fits in a `u64`.
pub const ENUMERATION_CAP: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Line {
    /// `x = c`
    Vertical { c: u64 },
    /// `y = m·x + b`
    Sloped { m: u64, b: u64 },
}

impl Line {
    fn check(&self, p: PrimeModulus) -> Result<()> {
        let bad = match *self {
            Line::Vertical { c } => [c].into_iter().find(|&v| v >= p.get()),
            Line::Sloped { m, b } => [m, b].into_iter().find(|&v| v >= p.get()),
        };
        match bad {
            Some(value) => Err(Error::ElementOutOfRange { value, p: p.get() }),
            None => Ok(()),
        }
    }

    pub fn contains(&self, p: PrimeModulus, x: u64, y: u64) -> bool {
        match *self {
            Line::Vertical { c } => x == c,
            Line::Sloped { m, b } => p.add(p.mul(m, x), b) == y,
        }
    }
}

/// All `p^2 + p` lines: sloped lines ordered by `(m, b)`, then verticals.
pub fn all_lines(p: PrimeModulus) -> impl Iterator<Item = Line> {
    let q = p.get();
    (0..q)
        .flat_map(move |m| (0..q).map(move |b| Line::Sloped { m, b }))
        .chain((0..q).map(|c| Line::Vertical { c }))
}

/// `i(ℓ)`, the number of points of `A×A` on `line`.
pub fn incidence_count(a: &FieldSubset, line: &Line) -> Result<u64> {
    let p = a.modulus();
    line.check(p)?;
    Ok(match *line {
        Line::Vertical { c } => {
            if a.contains(c) {
                a.len() as u64
            } else {
                0
            }
        }
        Line::Sloped { m, b } => a
            .elements()
            .iter()
            .filter(|&&x| a.contains(p.add(p.mul(m, x), b)))
            .count() as u64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileStrategy {
    /// Bucket every pair of `A×A`; `Θ(n²)` per slope.
    Direct,
    /// Exact cyclic convolution; `Θ(p log p)` per slope.
    FastConvolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// `incidence_count` on every line; reference implementation.
    Naive,
    SlopeDirect,
    SlopeFast,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Naive, Strategy::SlopeDirect, Strategy::SlopeFast];

    /// `SlopeDirect` when `n² ≤ p·log2(p)`, `SlopeFast` otherwise.
    pub fn default_for(p: PrimeModulus, n: usize) -> Strategy {
        let pf = p.get() as f64;
        let choice = if (n as f64).powi(2) <= pf * pf.log2() {
            Strategy::SlopeDirect
        } else {
            Strategy::SlopeFast
        };
        log::info!("strategy {choice} selected for p = {p}, n = {n}");
        choice
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Naive => "naive",
            Strategy::SlopeDirect => "slope-direct",
            Strategy::SlopeFast => "slope-fast",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Strategy::Naive),
            "slope-direct" | "slope_direct" => Ok(Strategy::SlopeDirect),
            "slope-fast" | "slope_fast" => Ok(Strategy::SlopeFast),
            other => Err(Error::InvalidParameter(format!("unknown strategy {other:?}"))),
        }
    }
}

fn check_enumerable(p: PrimeModulus) -> Result<()> {
    if p.get() >= ENUMERATION_CAP {
        return Err(Error::FieldTooLarge(p.get()));
    }
    Ok(())
}

/// Precomputed state for profiling many slopes of one set.
enum Profiler<'a> {
    Direct {
        a: &'a FieldSubset,
    },
    Fast {
        a: &'a FieldSubset,
        conv: CyclicConvolver,
        a_hat: Vec<u64>,
    },
}

impl<'a> Profiler<'a> {
    fn new(a: &'a FieldSubset, strategy: ProfileStrategy) -> Result<Self> {
        Ok(match strategy {
            ProfileStrategy::Direct => Profiler::Direct { a },
            ProfileStrategy::FastConvolution => {
                let p = a.modulus().get() as usize;
                // Each output counts pairs (x, y) of A×A with x fixed by the
                // slot, so no coefficient exceeds n.
                let conv = CyclicConvolver::new(p, a.len() as u64)?;
                let ind: Vec<u64> = a.indicator().into_iter().map(u64::from).collect();
                let a_hat = conv.transform(&ind);
                Profiler::Fast { a, conv, a_hat }
            }
        })
    }

    fn profile_into(&self, m: u64, out: &mut [u64]) {
        match self {
            Profiler::Direct { a } => {
                let p = a.modulus();
                out.fill(0);
                for &x in a.elements() {
                    let mx = p.mul(m, x);
                    for &y in a.elements() {
                        out[p.sub(y, mx) as usize] += 1;
                    }
                }
            }
            Profiler::Fast { a, conv, a_hat } => {
                let p = a.modulus();
                // multiset {−m·x : x ∈ A}; collapses onto 0 when m = 0
                let mut shifts = vec![0u64; p.get() as usize];
                for &x in a.elements() {
                    shifts[p.neg(p.mul(m, x)) as usize] += 1;
                }
                let r = conv.convolve_transformed(a_hat, &conv.transform(&shifts));
                out.copy_from_slice(&r);
            }
        }
    }
}

/// `i(y = m·x + b)` for every intercept `b`.
pub fn slope_profile(a: &FieldSubset, m: u64, strategy: ProfileStrategy) -> Result<Vec<u64>> {
    let p = a.modulus();
    if m >= p.get() {
        return Err(Error::ElementOutOfRange { value: m, p: p.get() });
    }
    let profiler = Profiler::new(a, strategy)?;
    let mut out = vec![0u64; p.get() as usize];
    profiler.profile_into(m, &mut out);
    Ok(out)
}

/// Dense tally of one slope family, indexed by incidence value.
fn tally_slope(profiler: &Profiler<'_>, m: u64, scratch: &mut [u64], dense: &mut [u64]) {
    profiler.profile_into(m, scratch);
    for &k in scratch.iter() {
        dense[k as usize] += 1;
    }
}

fn tally_naive_slope(a: &FieldSubset, member: &[bool], m: u64, dense: &mut [u64]) {
    let p = a.modulus();
    for b in 0..p.get() {
        let k = a
            .elements()
            .iter()
            .filter(|&&x| member[p.add(p.mul(m, x), b) as usize])
            .count();
        dense[k] += 1;
    }
}

fn add_verticals(a: &FieldSubset, dense: &mut [u64]) {
    let n = a.len();
    dense[n] += n as u64;
    dense[0] += a.modulus().get() - n as u64;
}

fn add_dense(mut x: Vec<u64>, y: Vec<u64>) -> Vec<u64> {
    for (a, b) in x.iter_mut().zip(y) {
        *a += b;
    }
    x
}

/// Histogram of `i(ℓ)` over all `p^2 + p` lines, computed on the calling
/// thread.
pub fn incidence_histogram(a: &FieldSubset, strategy: Strategy) -> Result<IncidenceHistogram> {
    let p = a.modulus();
    check_enumerable(p)?;
    let n = a.len();
    let mut dense = vec![0u64; n + 1];
    match strategy {
        Strategy::Naive => {
            let member = a.indicator();
            for m in 0..p.get() {
                tally_naive_slope(a, &member, m, &mut dense);
            }
        }
        Strategy::SlopeDirect | Strategy::SlopeFast => {
            let profiler = Profiler::new(a, profile_kind(strategy))?;
            let mut scratch = vec![0u64; p.get() as usize];
            for m in 0..p.get() {
                tally_slope(&profiler, m, &mut scratch, &mut dense);
            }
        }
    }
    add_verticals(a, &mut dense);
    Ok(IncidenceHistogram::from_dense(p, n as u64, &dense))
}

/// As [`incidence_histogram`], with slopes distributed over the current
/// rayon pool. The merge is a bin-wise sum, so the result does not depend
/// on scheduling.
pub fn incidence_histogram_par(a: &FieldSubset, strategy: Strategy) -> Result<IncidenceHistogram> {
    let p = a.modulus();
    check_enumerable(p)?;
    let n = a.len();
    let mut dense = match strategy {
        Strategy::Naive => {
            let member = a.indicator();
            (0..p.get())
                .into_par_iter()
                .fold(
                    || vec![0u64; n + 1],
                    |mut d, m| {
                        tally_naive_slope(a, &member, m, &mut d);
                        d
                    },
                )
                .reduce(|| vec![0u64; n + 1], add_dense)
        }
        Strategy::SlopeDirect | Strategy::SlopeFast => {
            let profiler = Profiler::new(a, profile_kind(strategy))?;
            (0..p.get())
                .into_par_iter()
                .fold(
                    || (vec![0u64; p.get() as usize], vec![0u64; n + 1]),
                    |(mut scratch, mut d), m| {
                        tally_slope(&profiler, m, &mut scratch, &mut d);
                        (scratch, d)
                    },
                )
                .map(|(_, d)| d)
                .reduce(|| vec![0u64; n + 1], add_dense)
        }
    };
    add_verticals(a, &mut dense);
    Ok(IncidenceHistogram::from_dense(p, n as u64, &dense))
}

fn profile_kind(strategy: Strategy) -> ProfileStrategy {
    match strategy {
        Strategy::SlopeFast => ProfileStrategy::FastConvolution,
        _ => ProfileStrategy::Direct,
    }
}
