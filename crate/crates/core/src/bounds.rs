//! Exact identity and inequality checks on an incidence histogram, plus
//! ratio diagnostics for bounds whose constants are not explicit.
//!
//! Everything with an explicit constant is decided in exact rational
//! arithmetic: the first and second moment identities, the deviation bound
//! `Σ (i − n²/p)² ≤ p·n²`, `|T − (n⁶/p + 2n⁴)| ≤ p·n³`, and
//! `|L_M| ≤ 4p·n²/M²` for `M ≥ 2n²/p`. Quantities that involve an irrational
//! factor (`p^{1/2}`, `n^{3/2}`, `ln n`) are reported as [`Diagnostic`]s and
//! never gate a pass/fail decision.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::exact::{as_string, big, exact_sqrt, rat, rat_from_uint, rational_string, Diagnostic, Exact};
use crate::field::PrimeModulus;
use crate::histogram::{IncidenceHistogram, MomentSet};

fn n_pow(n: u64, e: u32) -> BigUint {
    big(n).pow(e)
}

/// Expected `T` for a random set of size `n`: `n⁶/p + 2n⁴`.
pub fn expected_t(p: PrimeModulus, n: u64) -> BigRational {
    rat(n_pow(n, 6), p.get()) + rat(n_pow(n, 4) * 2u32, 1)
}

/// Expected `Q` for a random set of size `n`: `n⁸/p² + 2n⁵`.
pub fn expected_q(p: PrimeModulus, n: u64) -> BigRational {
    rat(n_pow(n, 8), big(p.get()).pow(2)) + rat(n_pow(n, 5) * 2u32, 1)
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub observed: String,
    pub expected: String,
    pub pass: bool,
}

/// Moment identities and structural facts every histogram must satisfy.
pub fn identity_checks(h: &IncidenceHistogram) -> Vec<IdentityCheck> {
    let p = h.modulus().get();
    let n = h.set_size();
    let m = h.moments();
    let n2 = n_pow(n, 2);

    let s1_expected = big(p + 1) * &n2;
    let s2_expected = n_pow(n, 4) + big(p) * &n2;

    // Σ over all p²+p lines of (i − n²/p)², zero lines included.
    let mean = rat(n2.clone(), p);
    let lines = rat(BigUint::from(h.modulus().line_count()), 1);
    let deviation = rat_from_uint(&m.s2) - mean.clone() * rat_from_uint(&m.s1) * BigRational::from_integer(2.into())
        + lines * mean.clone() * mean;
    let deviation_bound = rat(big(p) * &n2, 1);

    let axis_ok = n == 0 || h.lines_with(n) >= 2 * n;

    vec![
        IdentityCheck {
            name: "first_moment",
            observed: m.s1.to_string(),
            expected: s1_expected.to_string(),
            pass: m.s1 == s1_expected,
        },
        IdentityCheck {
            name: "second_moment",
            observed: m.s2.to_string(),
            expected: s2_expected.to_string(),
            pass: m.s2 == s2_expected,
        },
        IdentityCheck {
            name: "second_moment_deviation",
            observed: rational_string(&deviation),
            expected: format!("<= {}", rational_string(&deviation_bound)),
            pass: deviation <= deviation_bound,
        },
        IdentityCheck {
            name: "max_incidence",
            observed: h.max_incidence().to_string(),
            expected: format!("<= {n}"),
            pass: h.max_incidence() <= n,
        },
        IdentityCheck {
            name: "axis_lines",
            observed: h.lines_with(n).to_string(),
            expected: format!(">= {}", 2 * n),
            pass: axis_ok,
        },
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct PropositionCheck {
    #[serde(with = "as_string")]
    pub t: BigUint,
    pub expected_t: Exact,
    /// `|T − (n⁶/p + 2n⁴)|`
    pub slack: Exact,
    /// `p·n³`
    #[serde(with = "as_string")]
    pub bound: BigUint,
    pub pass: bool,
}

pub fn proposition_check(h: &IncidenceHistogram) -> PropositionCheck {
    let n = h.set_size();
    let t = h.power_sum(3);
    let expected = expected_t(h.modulus(), n);
    let slack = (rat_from_uint(&t) - &expected).abs();
    let bound = big(h.modulus().get()) * n_pow(n, 3);
    PropositionCheck {
        pass: slack <= rat_from_uint(&bound),
        t,
        expected_t: Exact(expected),
        slack: Exact(slack),
        bound,
    }
}

/// `|L_M| = #{ℓ : M < i(ℓ) ≤ 2M}` for a positive rational `M`.
pub fn lm_count(h: &IncidenceHistogram, m: &BigRational) -> u64 {
    in_class(h, m).map(|(_, c)| c).sum()
}

/// `Σ_{ℓ ∈ L_M} i(ℓ)`.
pub fn lm_incidences(h: &IncidenceHistogram, m: &BigRational) -> BigUint {
    in_class(h, m).map(|(k, c)| big(k) * big(c)).sum()
}

fn in_class<'a>(h: &'a IncidenceHistogram, m: &'a BigRational) -> impl Iterator<Item = (u64, u64)> + 'a {
    let two_m = m * BigRational::from_integer(2.into());
    h.counts()
        .iter()
        .map(|(&k, &c)| (k, c))
        .filter(move |&(k, _)| {
            let k = BigRational::from_integer(k.into());
            &k > m && k <= two_m
        })
}

fn dyadic_levels(n: u64) -> impl Iterator<Item = (u32, u64)> {
    (0u32..)
        .map(|j| (j, 1u64 << j))
        .take_while(move |&(_, m)| m < n)
}

#[derive(Debug, Clone, Serialize)]
pub struct BktLevel {
    pub j: u32,
    pub m: u64,
    pub lm_count: u64,
    /// `4p·n²/M²`
    pub bound: Exact,
    /// `|L_M|·M² / (4p·n²)`
    pub ratio: Exact,
}

#[derive(Debug, Clone, Serialize)]
pub struct BktInCheck {
    /// `2n²/p`; only dyadic `M` at or above it are checked.
    pub threshold: Exact,
    pub levels: Vec<BktLevel>,
    pub max_ratio: Option<Exact>,
    pub pass: bool,
}

pub fn bkt_in_check(h: &IncidenceHistogram) -> BktInCheck {
    let p = h.modulus().get();
    let n = h.set_size();
    let n2 = n_pow(n, 2);
    let threshold = rat(n2.clone() * 2u32, p);
    let four_p_n2 = big(4 * p) * &n2;
    let levels: Vec<BktLevel> = dyadic_levels(n)
        .filter(|&(_, m)| rat(m, 1) >= threshold)
        .map(|(j, m)| {
            let count = lm_count(h, &rat(m, 1));
            BktLevel {
                j,
                m,
                lm_count: count,
                bound: Exact(rat(four_p_n2.clone(), big(m).pow(2))),
                ratio: Exact(rat(big(count) * big(m).pow(2), four_p_n2.clone())),
            }
        })
        .collect();
    let max_ratio = levels.iter().map(|l| l.ratio.clone()).max();
    let one = rat(1, 1);
    BktInCheck {
        pass: levels.iter().all(|l| l.ratio.0 <= one),
        threshold: Exact(threshold),
        levels,
        max_ratio,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub exponent: u32,
    /// `2n²/p`
    pub cut1: Exact,
    /// `2n^{3/2}/p^{1/2}`; the partition compares `k²·p` with `4n³` exactly.
    pub cut2: Diagnostic,
    /// Lines with `i ≤ cut1`.
    #[serde(with = "as_string")]
    pub low_sum: BigUint,
    /// Lines with `cut1 < i ≤ cut2`.
    #[serde(with = "as_string")]
    pub mid_sum: BigUint,
    /// Lines with `i > cut2`.
    #[serde(with = "as_string")]
    pub high_sum: BigUint,
    #[serde(with = "as_string")]
    pub total: BigUint,
    /// `low + mid + high == s_r`
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Regime {
    Low,
    Mid,
    High,
}

fn regime_of(k: u64, p: u64, n: u64) -> Regime {
    let (k, p, n) = (k as u128, p as u128, n as u128);
    if k * p <= 2 * n * n {
        Regime::Low
    } else if k * k * p <= 4 * n * n * n {
        Regime::Mid
    } else {
        Regime::High
    }
}

/// `sqrt(num/den)` for nonnegative integers, exact when both the reduced
/// numerator and denominator are perfect squares.
fn sqrt_rational(num: BigUint, den: BigUint) -> Diagnostic {
    let q = rat(num, den);
    let (a, b) = (q.numer().magnitude().clone(), q.denom().magnitude().clone());
    match (exact_sqrt(&a), exact_sqrt(&b)) {
        (Some(ra), Some(rb)) => Diagnostic::exact(rat(ra, rb)),
        _ => Diagnostic::approx(crate::exact::rational_to_f64(&q).sqrt()),
    }
}

pub fn regime_decomposition(h: &IncidenceHistogram, r: u32) -> RegimeReport {
    let p = h.modulus().get();
    let n = h.set_size();
    let sum = |which: Regime| h.power_sum_where(r, |k| regime_of(k, p, n) == which);
    let (low, mid, high) = (sum(Regime::Low), sum(Regime::Mid), sum(Regime::High));
    let total = h.power_sum(r);
    RegimeReport {
        exponent: r,
        cut1: Exact(rat(n_pow(n, 2) * 2u32, p)),
        cut2: sqrt_rational(n_pow(n, 3) * 4u32, big(p)),
        pass: &low + &mid + &high == total,
        low_sum: low,
        mid_sum: mid,
        high_sum: high,
        total,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DyadicLevel {
    pub j: u32,
    pub m: u64,
    pub lm_count: u64,
    #[serde(with = "as_string")]
    pub incidences: BigUint,
    /// `M ≥ 2n²/p`
    pub bkt_applicable: bool,
    pub bkt_bound: Exact,
    /// `|L_M|·M⁴/n⁵`
    pub lm_bound_ratio: Exact,
    /// `n·|L_M| ≤ p²`
    pub sdz_applicable: bool,
    /// `I(A×A, L_M) / (|L_M|^{3/4}·n^{5/4})`, when applicable and `L_M ≠ ∅`.
    pub sdz_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DyadicReport {
    pub levels: Vec<DyadicLevel>,
    /// `Σ_j |L_{2^j}|`, equal to the number of lines with `i ≥ 2`.
    pub lines_in_classes: u64,
    pub lines_at_least_two: u64,
}

pub fn dyadic_report(h: &IncidenceHistogram) -> DyadicReport {
    let p = h.modulus().get();
    let n = h.set_size();
    let n2 = n_pow(n, 2);
    let threshold = rat(n2.clone() * 2u32, p);
    let p_sq = big(p).pow(2);
    let levels: Vec<DyadicLevel> = dyadic_levels(n)
        .map(|(j, m)| {
            let mq = rat(m, 1);
            let count = lm_count(h, &mq);
            let incidences = lm_incidences(h, &mq);
            let sdz_applicable = big(n) * big(count) <= p_sq;
            let sdz_ratio = (sdz_applicable && count > 0).then(|| {
                incidences.to_f64().unwrap_or(f64::INFINITY)
                    / ((count as f64).powf(0.75) * (n as f64).powf(1.25))
            });
            DyadicLevel {
                j,
                m,
                lm_count: count,
                incidences,
                bkt_applicable: mq >= threshold,
                bkt_bound: Exact(rat(big(4 * p) * &n2, big(m).pow(2))),
                lm_bound_ratio: Exact(rat(big(count) * big(m).pow(4), n_pow(n, 5))),
                sdz_applicable,
                sdz_ratio,
            }
        })
        .collect();
    DyadicReport {
        lines_in_classes: levels.iter().map(|l| l.lm_count).sum(),
        lines_at_least_two: h.counts().range(2..).map(|(_, &c)| c).sum(),
        levels,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Ratios {
    /// `T / (n⁶/p + p^{1/2}·n^{7/2})`
    pub t_ratio: Diagnostic,
    /// `Q / (n⁸/p² + max(ln n, 1)·n⁵)`
    pub q_ratio: Diagnostic,
    /// `T / n^{9/2}`
    pub aymrs_ratio: Diagnostic,
}

/// Ratios of the moments to the asymptotic bounds; `None` for the empty set.
pub fn ratios(h: &IncidenceHistogram) -> Option<Ratios> {
    let p = h.modulus().get();
    let n = h.set_size();
    if n == 0 {
        return None;
    }
    let m = h.moments();
    let t_ratio = Diagnostic::over_surd(&m.s3, &rat(n_pow(n, 6), p), &(big(p) * n_pow(n, 7)));
    let q_main = rat(n_pow(n, 8), big(p).pow(2));
    let log_factor = (n as f64).ln();
    let q_ratio = if log_factor <= 1.0 {
        Diagnostic::exact(rat_from_uint(&m.s4) / (q_main + rat(n_pow(n, 5), 1)))
    } else {
        let den = crate::exact::rational_to_f64(&q_main) + log_factor * n_pow(n, 5).to_f64().unwrap_or(f64::INFINITY);
        Diagnostic::approx(m.s4.to_f64().unwrap_or(f64::INFINITY) / den)
    };
    let aymrs_ratio = Diagnostic::over_surd(&m.s3, &BigRational::zero(), &n_pow(n, 9));
    Some(Ratios {
        t_ratio,
        q_ratio,
        aymrs_ratio,
    })
}

/// Everything derived from one histogram.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub moments: MomentSet,
    pub expected_t: Exact,
    pub expected_q: Exact,
    pub identities: Vec<IdentityCheck>,
    pub proposition: PropositionCheck,
    pub bkt_in: BktInCheck,
    pub regimes: Vec<RegimeReport>,
    pub dyadic: DyadicReport,
    pub ratios: Option<Ratios>,
}

impl BoundsReport {
    /// True when every check with an explicit constant holds.
    pub fn exact_checks_pass(&self) -> bool {
        self.identities.iter().all(|c| c.pass)
            && self.proposition.pass
            && self.bkt_in.pass
            && self.regimes.iter().all(|r| r.pass)
            && self.dyadic.lines_in_classes == self.dyadic.lines_at_least_two
    }

    /// `T / (n⁶/p + 2n⁴)`; `None` for the empty set.
    pub fn t_over_expected(&self) -> Option<BigRational> {
        (!self.expected_t.0.is_zero()).then(|| rat_from_uint(&self.moments.s3) / &self.expected_t.0)
    }
}

pub fn verify_histogram(h: &IncidenceHistogram) -> BoundsReport {
    let n = h.set_size();
    BoundsReport {
        moments: h.moments(),
        expected_t: Exact(expected_t(h.modulus(), n)),
        expected_q: Exact(expected_q(h.modulus(), n)),
        identities: identity_checks(h),
        proposition: proposition_check(h),
        bkt_in: bkt_in_check(h),
        regimes: vec![regime_decomposition(h, 3), regime_decomposition(h, 4)],
        dyadic: dyadic_report(h),
        ratios: ratios(h),
    }
}

/// Signed `T − 2n⁴` helper used by reconciliation reports.
pub fn t_minus_axis(m: &MomentSet, n: u64) -> BigInt {
    BigInt::from(m.s3.clone()) - BigInt::from(n_pow(n, 4) * 2u32)
}
