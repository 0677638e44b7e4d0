//! Experiment driver: single runs, verification runs with oracle
//! cross-checks, and multi-prime Monte Carlo sweeps.
//!
//! Output is a pure function of the configuration. Sweep trials draw their
//! sets with [`trial_seed`], rows are sorted by `(prime, trial)` before
//! writing, and wall-clock timings are only emitted when requested.

use std::io::Write;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{verify_histogram, BoundsReport};
use crate::divisor::{support_census, SupportSummary};
use crate::engine::{incidence_histogram, incidence_histogram_par, Strategy};
use crate::error::{Error, Result};
use crate::exact::{decimal, rat, rational_to_f64, Diagnostic};
use crate::field::PrimeModulus;
use crate::histogram::IncidenceHistogram;
use crate::oracle::{algebraic_triple_count, q_brute, t_brute, AlgebraicTripleCount, OracleCaps};
use crate::rng::trial_seed;
use crate::sets::{FieldSubset, Provenance, SetDescriptor};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest `p²·n` for which `verify` also runs the naive strategy.
pub const NAIVE_EQUIVALENCE_BUDGET: u128 = 200_000_000;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub primes: Vec<PrimeModulus>,
    pub set: SetDescriptor,
    /// `None` picks [`Strategy::default_for`].
    pub strategy: Option<Strategy>,
    pub trials: usize,
    pub seed: u64,
    pub caps: OracleCaps,
    pub timings: bool,
    /// Corrupts one histogram bin before verification.
    pub inject_fault: bool,
}

impl ExperimentConfig {
    pub fn new(primes: Vec<PrimeModulus>, set: SetDescriptor) -> Self {
        ExperimentConfig {
            primes,
            set,
            strategy: None,
            trials: 1,
            seed: 0,
            caps: OracleCaps::default(),
            timings: false,
            inject_fault: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.primes.is_empty() {
            return Err(Error::Config("at least one prime is required".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        Ok(())
    }

    fn single_prime(&self) -> Result<PrimeModulus> {
        self.validate()?;
        match self.primes.as_slice() {
            [p] => Ok(*p),
            _ => Err(Error::Config(format!(
                "this command takes exactly one prime, got {}",
                self.primes.len()
            ))),
        }
    }

    fn strategy_for(&self, a: &FieldSubset) -> Strategy {
        self.strategy
            .unwrap_or_else(|| Strategy::default_for(a.modulus(), a.len()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub p: u64,
    pub set: String,
    pub seed: u64,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Serialize)]
pub struct SetInfo {
    pub n: usize,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceCheck {
    pub compared: Vec<Strategy>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleCheck {
    /// `t_brute` result, absent when `n` exceeds the triple cap.
    pub t_brute: Option<String>,
    pub t_pass: Option<bool>,
    pub q_brute: Option<String>,
    pub q_pass: Option<bool>,
    pub algebraic: Option<AlgebraicTripleCount>,
    /// `|delta| / n⁴`
    pub algebraic_constant: Option<crate::exact::Exact>,
}

impl OracleCheck {
    fn pass(&self) -> bool {
        self.t_pass != Some(false) && self.q_pass != Some(false)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub histogram_ms: u128,
    pub total_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub set: SetInfo,
    pub histogram: IncidenceHistogram,
    #[serde(flatten)]
    pub bounds: BoundsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy_equivalence: Option<EquivalenceCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleCheck>,
    pub all_exact_checks_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl VerificationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

fn build_report(cfg: &ExperimentConfig, verify: bool) -> Result<VerificationReport> {
    let started = Instant::now();
    let p = cfg.single_prime()?;
    let a = cfg.set.realize(p, cfg.seed)?;
    let strategy = cfg.strategy_for(&a);
    let mut histogram = incidence_histogram_par(&a, strategy)?;
    let histogram_ms = started.elapsed().as_millis();
    if cfg.inject_fault {
        histogram.inject_fault();
    }
    let bounds = verify_histogram(&histogram);

    let (strategy_equivalence, oracle) = if verify {
        (
            Some(strategy_equivalence(&a, &histogram)?),
            Some(oracle_check(&a, &histogram, &cfg.caps)?),
        )
    } else {
        (None, None)
    };
    let all_exact_checks_pass = bounds.exact_checks_pass()
        && strategy_equivalence.as_ref().is_none_or(|e| e.pass)
        && oracle.as_ref().is_none_or(OracleCheck::pass);

    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        config: ConfigEcho {
            p: p.get(),
            set: cfg.set.to_string(),
            seed: cfg.seed,
            strategy,
        },
        set: SetInfo {
            n: a.len(),
            provenance: a.provenance().clone(),
        },
        histogram,
        bounds,
        strategy_equivalence,
        oracle,
        all_exact_checks_pass,
        timings: cfg.timings.then(|| Timings {
            histogram_ms,
            total_ms: started.elapsed().as_millis(),
        }),
    })
}

fn strategy_equivalence(a: &FieldSubset, reference: &IncidenceHistogram) -> Result<EquivalenceCheck> {
    let p = a.modulus().get() as u128;
    let compared: Vec<Strategy> = Strategy::ALL
        .into_iter()
        .filter(|&s| s != Strategy::Naive || p * p * a.len() as u128 <= NAIVE_EQUIVALENCE_BUDGET)
        .collect();
    let mut pass = true;
    for &s in &compared {
        pass &= incidence_histogram_par(a, s)? == *reference;
    }
    Ok(EquivalenceCheck { compared, pass })
}

fn oracle_check(a: &FieldSubset, h: &IncidenceHistogram, caps: &OracleCaps) -> Result<OracleCheck> {
    let n = a.len();
    let m = h.moments();
    let t = (n <= caps.triples).then(|| t_brute(a, caps)).transpose()?;
    let q = (n <= caps.quadruples).then(|| q_brute(a, caps)).transpose()?;
    let algebraic = (n <= caps.algebraic).then(|| algebraic_triple_count(a, caps)).transpose()?;
    let algebraic_constant = algebraic.as_ref().filter(|_| n > 0).map(|alg| {
        let n4 = BigInt::from(n as u64).pow(4);
        crate::exact::Exact(BigRational::new(alg.delta.magnitude().clone().into(), n4))
    });
    Ok(OracleCheck {
        t_pass: t.as_ref().map(|t| *t == m.s3),
        t_brute: t.map(|t| t.to_string()),
        q_pass: q.as_ref().map(|q| *q == m.s4),
        q_brute: q.map(|q| q.to_string()),
        algebraic,
        algebraic_constant,
    })
}

/// Histogram, moments and every bound check for one `(p, A)`.
pub fn run_moments(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    build_report(cfg, false)
}

/// [`run_moments`] plus strategy equivalence and, within the oracle caps,
/// brute-force cross-checks.
pub fn run_verify(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    build_report(cfg, true)
}

/// Product-representation support census for the configured set.
pub fn run_support(cfg: &ExperimentConfig, sample: Option<usize>) -> Result<SupportSummary> {
    let p = cfg.single_prime()?;
    let a = cfg.set.realize(p, cfg.seed)?;
    support_census(&a, sample, cfg.seed)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub prime: u64,
    pub trial: u64,
    pub seed: u64,
    pub n: u64,
    pub s1: String,
    pub s2: String,
    pub t: String,
    pub q: String,
    pub expected_t: f64,
    pub expected_q: f64,
    pub t_over_expected: Option<f64>,
    pub t_ratio: Option<f64>,
    pub q_ratio: Option<f64>,
    pub proposition_pass: bool,
    pub bkt_in_pass: bool,
    pub exact_checks_pass: bool,
    /// Present only when timings were requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
    #[serde(skip)]
    t_over_expected_exact: Option<BigRational>,
}

impl SweepRow {
    pub fn t_over_expected_exact(&self) -> Option<&BigRational> {
        self.t_over_expected_exact.as_ref()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub rows: usize,
    pub mean_t_over_expected: f64,
    /// Sample standard deviation; `NaN` with fewer than two rows.
    pub sd_t_over_expected: f64,
    pub all_exact_checks_pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
    #[serde(skip)]
    timings: bool,
}

const SWEEP_HEADER: [&str; 16] = [
    "prime",
    "trial",
    "seed",
    "n",
    "s1",
    "s2",
    "t",
    "q",
    "expected_t",
    "expected_q",
    "t_over_expected",
    "t_ratio",
    "q_ratio",
    "proposition_pass",
    "bkt_in_pass",
    "exact_checks_pass",
];

fn opt_decimal(x: Option<f64>) -> String {
    x.map(decimal).unwrap_or_else(|| "nan".into())
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

impl SweepResult {
    /// Comma-separated rows with a header; a `wall_time_ms` column only when
    /// timings were requested; a final `#`-prefixed summary line.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<&str> = SWEEP_HEADER.to_vec();
        if self.timings {
            header.push("wall_time_ms");
        }
        out.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![
                r.prime.to_string(),
                r.trial.to_string(),
                r.seed.to_string(),
                r.n.to_string(),
                r.s1.clone(),
                r.s2.clone(),
                r.t.clone(),
                r.q.clone(),
                decimal(r.expected_t),
                decimal(r.expected_q),
                opt_decimal(r.t_over_expected),
                opt_decimal(r.t_ratio),
                opt_decimal(r.q_ratio),
                flag(r.proposition_pass).into(),
                flag(r.bkt_in_pass).into(),
                flag(r.exact_checks_pass).into(),
            ];
            if self.timings {
                rec.push(r.wall_time_ms.unwrap_or_default().to_string());
            }
            out.write_record(&rec)?;
        }
        let mut inner = out.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        writeln!(
            inner,
            "# summary rows={} mean_t_over_expected={} sd_t_over_expected={} all_exact_checks_pass={}",
            self.summary.rows,
            decimal(self.summary.mean_t_over_expected),
            decimal(self.summary.sd_t_over_expected),
            flag(self.summary.all_exact_checks_pass),
        )?;
        inner.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }
}

fn run_trial(cfg: &ExperimentConfig, p: PrimeModulus, trial: u64) -> Result<SweepRow> {
    let started = Instant::now();
    let seed = trial_seed(cfg.seed, p.get(), trial);
    let a = cfg.set.with_seed(seed).realize(p, seed)?;
    let strategy = cfg.strategy_for(&a);
    let mut h = incidence_histogram(&a, strategy)?;
    if cfg.inject_fault {
        h.inject_fault();
    }
    let b = verify_histogram(&h);
    let ratio = |d: &Option<crate::bounds::Ratios>, f: fn(&crate::bounds::Ratios) -> &Diagnostic| {
        d.as_ref().map(|r| f(r).approx)
    };
    let toe = b.t_over_expected();
    Ok(SweepRow {
        prime: p.get(),
        trial,
        seed,
        n: a.len() as u64,
        s1: b.moments.s1.to_string(),
        s2: b.moments.s2.to_string(),
        t: b.moments.s3.to_string(),
        q: b.moments.s4.to_string(),
        expected_t: b.expected_t.to_f64(),
        expected_q: b.expected_q.to_f64(),
        t_over_expected: toe.as_ref().map(rational_to_f64),
        t_ratio: ratio(&b.ratios, |r| &r.t_ratio),
        q_ratio: ratio(&b.ratios, |r| &r.q_ratio),
        proposition_pass: b.proposition.pass,
        bkt_in_pass: b.bkt_in.pass,
        exact_checks_pass: b.exact_checks_pass(),
        wall_time_ms: cfg.timings.then(|| started.elapsed().as_millis()),
        t_over_expected_exact: toe,
    })
}

/// Runs `trials` independent trials at every prime on the current rayon
/// pool. Each trial computes its histogram on a single thread.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let tasks: Vec<(PrimeModulus, u64)> = cfg
        .primes
        .iter()
        .flat_map(|&p| (0..cfg.trials as u64).map(move |t| (p, t)))
        .collect();
    let mut rows = tasks
        .par_iter()
        .map(|&(p, t)| {
            run_trial(cfg, p, t).map_err(|e| Error::TrialFailed {
                prime: p.get(),
                trial: t,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.prime, r.trial));

    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.t_over_expected).collect();
    let k = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / k;
    let sd = if ratios.len() >= 2 {
        (ratios.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        f64::NAN
    };
    let summary = SweepSummary {
        rows: rows.len(),
        mean_t_over_expected: mean,
        sd_t_over_expected: sd,
        all_exact_checks_pass: rows.iter().all(|r| r.exact_checks_pass),
    };
    Ok(SweepResult {
        rows,
        summary,
        timings: cfg.timings,
    })
}

/// Exact mean of `T / E[T]` over the rows of a sweep.
pub fn exact_mean_t_over_expected(result: &SweepResult) -> Option<BigRational> {
    let vals: Vec<&BigRational> = result.rows.iter().filter_map(|r| r.t_over_expected_exact()).collect();
    if vals.is_empty() {
        return None;
    }
    let sum = vals.into_iter().fold(rat(0, 1), |acc, v| acc + v);
    Some(sum / rat(result.rows.len() as u64, 1))
}
