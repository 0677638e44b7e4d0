//! Product representation counts `f_{a₁,a₃}(x) = #{(a₂, a₄) ∈ A² :
//! (a₁−a₂)(a₃−a₄) = x}` and the size of their supports.

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{as_string, big, rat, rational_to_f64, Exact};
use crate::rng::rng_from_seed;
use crate::sets::FieldSubset;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductRepTable {
    pub a1: u64,
    pub a3: u64,
    table: BTreeMap<u64, u64>,
}

impl ProductRepTable {
    pub fn table(&self) -> &BTreeMap<u64, u64> {
        &self.table
    }

    pub fn support_size(&self) -> usize {
        self.table.len()
    }

    pub fn total(&self) -> u64 {
        self.table.values().sum()
    }
}

pub fn product_rep_table(a: &FieldSubset, a1: u64, a3: u64) -> ProductRepTable {
    let p = a.modulus();
    let (a1, a3) = (p.reduce(a1), p.reduce(a3));
    let mut table = BTreeMap::new();
    for &a2 in a.elements() {
        let left = p.sub(a1, a2);
        for &a4 in a.elements() {
            *table.entry(p.mul(left, p.sub(a3, a4))).or_insert(0) += 1;
        }
    }
    ProductRepTable { a1, a3, table }
}

/// `Σ_x f(x)²`.
pub fn second_moment(t: &ProductRepTable) -> BigUint {
    t.table.values().map(|&f| big(f) * big(f)).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairSupport {
    pub a1: u64,
    pub a3: u64,
    pub support_size: usize,
    #[serde(with = "as_string")]
    pub second_moment: BigUint,
}

#[derive(Debug, Clone, Serialize)]
pub struct SupportSummary {
    pub n: usize,
    /// Number of `(a₁, a₃)` pairs examined; `n²` for a full census.
    pub pairs_examined: usize,
    pub seed: Option<u64>,
    pub min_support: usize,
    pub max_support: usize,
    pub mean_support: Exact,
    /// `Σ n⁴ / |supp f_{a₁,a₃}|`, scaled by `n² / pairs_examined` when sampled.
    pub cs_lower_bound: Exact,
    /// `γ̂` solving `mean_support = n² / ln(n)^γ̂`; a fitted diagnostic,
    /// defined for `n ≥ 3`.
    pub fitted_gamma: Option<f64>,
    #[serde(skip)]
    pub pairs: Vec<PairSupport>,
}

impl SupportSummary {
    /// `a1,a3,support_size,second_moment` rows.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in &self.pairs {
            out.serialize(row)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Support sizes for every `(a₁, a₃) ∈ A²`, or for `sample` pairs drawn
/// uniformly without replacement using `seed`.
pub fn support_census(a: &FieldSubset, sample: Option<usize>, seed: u64) -> Result<SupportSummary> {
    let xs = a.elements();
    let n = xs.len();
    let all = n * n;
    let indices: Vec<usize> = match sample {
        None => (0..all).collect(),
        Some(k) if k > all => {
            return Err(Error::InvalidParameter(format!(
                "sample of {k} pairs exceeds the {all} available"
            )))
        }
        Some(k) => {
            let mut rng = rng_from_seed(seed);
            let mut v = rand::seq::index::sample(&mut rng, all, k).into_vec();
            v.sort_unstable();
            v
        }
    };
    let pairs: Vec<PairSupport> = indices
        .par_iter()
        .map(|&i| {
            let t = product_rep_table(a, xs[i / n], xs[i % n]);
            PairSupport {
                a1: t.a1,
                a3: t.a3,
                support_size: t.support_size(),
                second_moment: second_moment(&t),
            }
        })
        .collect();

    let k = pairs.len();
    let n4 = big(n as u64).pow(4);
    let mut cs = BigRational::zero();
    let mut support_total = 0u64;
    for pair in &pairs {
        cs += rat(n4.clone(), pair.support_size as u64);
        support_total += pair.support_size as u64;
    }
    let (mean, cs) = if k == 0 {
        (BigRational::zero(), BigRational::zero())
    } else {
        (rat(support_total, k as u64), cs * rat(all as u64, k as u64))
    };
    let fitted_gamma = (n >= 3 && k > 0).then(|| {
        let nf = n as f64;
        ((nf * nf) / rational_to_f64(&mean)).ln() / nf.ln().ln()
    });
    Ok(SupportSummary {
        n,
        pairs_examined: k,
        seed: sample.map(|_| seed),
        min_support: pairs.iter().map(|s| s.support_size).min().unwrap_or(0),
        max_support: pairs.iter().map(|s| s.support_size).max().unwrap_or(0),
        mean_support: Exact(mean),
        cs_lower_bound: Exact(cs),
        fitted_gamma,
        pairs,
    })
}
