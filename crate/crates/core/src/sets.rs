//! Subsets of a prime field and the generators used by experiments.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeModulus;
use crate::rng::rng_from_seed;

/// How a [`FieldSubset`] was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Provenance {
    Explicit,
    Bernoulli { q: f64, seed: u64 },
    Uniform { n: u64, seed: u64 },
    Interval { start: u64, len: u64 },
    Ap { start: u64, step: u64, len: u64 },
    Gp { start: u64, ratio: u64, len: u64 },
    PaperInterval,
}

/// A set `A` of residues modulo a prime, stored sorted and without repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSubset")]
pub struct FieldSubset {
    #[serde(rename = "p")]
    modulus: PrimeModulus,
    elements: Vec<u64>,
    provenance: Provenance,
}

#[derive(Deserialize)]
struct RawSubset {
    p: PrimeModulus,
    elements: Vec<u64>,
    provenance: Provenance,
}

impl TryFrom<RawSubset> for FieldSubset {
    type Error = Error;

    fn try_from(raw: RawSubset) -> Result<Self> {
        let mut set = from_list(raw.p, &raw.elements)?;
        set.provenance = raw.provenance;
        Ok(set)
    }
}

impl FieldSubset {
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Dense membership table indexed by residue.
    pub fn indicator(&self) -> Vec<bool> {
        let mut ind = vec![false; self.modulus.get() as usize];
        for &a in &self.elements {
            ind[a as usize] = true;
        }
        ind
    }

    /// The image `{c·a + d}` under an invertible affine map.
    pub fn map_affine(&self, c: u64, d: u64) -> Result<FieldSubset> {
        let m = self.modulus;
        let (c, d) = (m.reduce(c), m.reduce(d));
        if c == 0 {
            return Err(Error::InvalidParameter("affine scale must be nonzero".into()));
        }
        let image: Vec<u64> = self
            .elements
            .iter()
            .map(|&a| m.add(m.mul(c, a), d))
            .collect();
        from_list(m, &image)
    }
}

fn canonical(modulus: PrimeModulus, mut elements: Vec<u64>, provenance: Provenance) -> Result<FieldSubset> {
    let p = modulus.get();
    if let Some(&bad) = elements.iter().find(|&&x| x >= p) {
        return Err(Error::ElementOutOfRange { value: bad, p });
    }
    elements.sort_unstable();
    if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateElement(w[0]));
    }
    Ok(FieldSubset {
        modulus,
        elements,
        provenance,
    })
}

fn check_len(m: PrimeModulus, len: u64) -> Result<()> {
    if len > m.get() {
        return Err(Error::LengthExceedsField { len, p: m.get() });
    }
    Ok(())
}

fn check_residue(m: PrimeModulus, x: u64) -> Result<()> {
    if x >= m.get() {
        return Err(Error::ElementOutOfRange { value: x, p: m.get() });
    }
    Ok(())
}

pub fn from_list(m: PrimeModulus, elements: &[u64]) -> Result<FieldSubset> {
    canonical(m, elements.to_vec(), Provenance::Explicit)
}

/// Includes each residue independently with probability `q`.
pub fn gen_bernoulli(m: PrimeModulus, q: f64, seed: u64) -> Result<FieldSubset> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidDensity(q));
    }
    let mut rng = rng_from_seed(seed);
    let elements = (0..m.get()).filter(|_| rng.random_bool(q)).collect();
    canonical(m, elements, Provenance::Bernoulli { q, seed })
}

/// A uniformly random `n`-subset.
pub fn gen_uniform(m: PrimeModulus, n: u64, seed: u64) -> Result<FieldSubset> {
    check_len(m, n)?;
    let mut rng = rng_from_seed(seed);
    let elements = rand::seq::index::sample(&mut rng, m.get() as usize, n as usize)
        .into_iter()
        .map(|i| i as u64)
        .collect();
    canonical(m, elements, Provenance::Uniform { n, seed })
}

/// `{start, start+1, ..., start+len-1}` reduced modulo `p`.
pub fn gen_interval(m: PrimeModulus, start: u64, len: u64) -> Result<FieldSubset> {
    gen_ap(m, start, 1, len).map(|mut s| {
        s.provenance = Provenance::Interval { start, len };
        s
    })
}

pub fn gen_ap(m: PrimeModulus, start: u64, step: u64, len: u64) -> Result<FieldSubset> {
    check_len(m, len)?;
    check_residue(m, start)?;
    let step_r = m.reduce(step);
    if step_r == 0 && len > 1 {
        return Err(Error::InvalidParameter("progression step must be nonzero modulo p".into()));
    }
    let elements = std::iter::successors(Some(start), |&x| Some(m.add(x, step_r)))
        .take(len as usize)
        .collect();
    canonical(m, elements, Provenance::Ap { start, step, len })
}

pub fn gen_gp(m: PrimeModulus, start: u64, ratio: u64, len: u64) -> Result<FieldSubset> {
    check_len(m, len)?;
    check_residue(m, start)?;
    let r = m.reduce(ratio);
    if r == 0 || r == 1 {
        return Err(Error::InvalidParameter(format!(
            "geometric ratio must not be 0 or 1 modulo p (got {ratio})"
        )));
    }
    if start == 0 && len > 1 {
        return Err(Error::InvalidParameter("geometric progression cannot start at 0".into()));
    }
    let elements = std::iter::successors(Some(start), |&x| Some(m.mul(x, r)))
        .take(len as usize)
        .collect();
    canonical(m, elements, Provenance::Gp { start, ratio, len }).map_err(|e| match e {
        Error::DuplicateElement(_) => Error::InvalidParameter(format!(
            "length {len} exceeds the multiplicative order of {ratio} modulo {m}"
        )),
        other => other,
    })
}

/// `{1, ..., floor(sqrt(p)/2)}`, the extremal interval example.
pub fn gen_paper_interval(m: PrimeModulus) -> Result<FieldSubset> {
    // floor(sqrt(p)/2) == floor(floor(sqrt(p))/2)
    let k = m.get().isqrt() / 2;
    if k < 1 {
        return Err(Error::DegenerateSet(format!(
            "floor(sqrt({m})/2) = 0, the interval is empty"
        )));
    }
    canonical(m, (1..=k).collect(), Provenance::PaperInterval)
}

/// Parsed form of the textual set grammar.
///
/// ```text
/// list:<int>,<int>,...          explicit elements (may be empty: "list:")
/// bernoulli:<q>[:<seed>]        q a decimal or a/b fraction in (0, 1]
/// uniform:<n>[:<seed>]
/// interval:<start>:<len>
/// ap:<start>:<step>:<len>
/// gp:<start>:<ratio>:<len>
/// paper-interval
/// ```
///
/// Randomized families without an explicit seed take the seed supplied at
/// realization time.
#[derive(Debug, Clone, PartialEq)]
pub enum SetDescriptor {
    List(Vec<u64>),
    Bernoulli { q: f64, seed: Option<u64> },
    Uniform { n: u64, seed: Option<u64> },
    Interval { start: u64, len: u64 },
    Ap { start: u64, step: u64, len: u64 },
    Gp { start: u64, ratio: u64, len: u64 },
    PaperInterval,
}

impl SetDescriptor {
    pub fn is_random(&self) -> bool {
        matches!(self, SetDescriptor::Bernoulli { .. } | SetDescriptor::Uniform { .. })
    }

    /// The same descriptor with any seed replaced by `seed`.
    pub fn with_seed(&self, seed: u64) -> SetDescriptor {
        match *self {
            SetDescriptor::Bernoulli { q, .. } => SetDescriptor::Bernoulli { q, seed: Some(seed) },
            SetDescriptor::Uniform { n, .. } => SetDescriptor::Uniform { n, seed: Some(seed) },
            _ => self.clone(),
        }
    }

    pub fn realize(&self, m: PrimeModulus, default_seed: u64) -> Result<FieldSubset> {
        match self {
            SetDescriptor::List(xs) => from_list(m, xs),
            SetDescriptor::Bernoulli { q, seed } => gen_bernoulli(m, *q, seed.unwrap_or(default_seed)),
            SetDescriptor::Uniform { n, seed } => gen_uniform(m, *n, seed.unwrap_or(default_seed)),
            SetDescriptor::Interval { start, len } => gen_interval(m, *start, *len),
            SetDescriptor::Ap { start, step, len } => gen_ap(m, *start, *step, *len),
            SetDescriptor::Gp { start, ratio, len } => gen_gp(m, *start, *ratio, *len),
            SetDescriptor::PaperInterval => gen_paper_interval(m),
        }
    }
}

fn parse_err(descriptor: &str, token: &str, reason: impl Into<String>) -> Error {
    Error::Descriptor {
        descriptor: descriptor.to_string(),
        token: token.to_string(),
        reason: reason.into(),
    }
}

fn parse_density(descriptor: &str, token: &str) -> Result<f64> {
    let q = match token.split_once('/') {
        Some((num, den)) => {
            let num: u64 = num.parse().map_err(|_| parse_err(descriptor, token, "expected a/b"))?;
            let den: u64 = den.parse().map_err(|_| parse_err(descriptor, token, "expected a/b"))?;
            if den == 0 {
                return Err(parse_err(descriptor, token, "zero denominator"));
            }
            num as f64 / den as f64
        }
        None => token
            .parse::<f64>()
            .map_err(|_| parse_err(descriptor, token, "expected a density in (0, 1]"))?,
    };
    if !(q > 0.0 && q <= 1.0) {
        return Err(parse_err(descriptor, token, "density must lie in (0, 1]"));
    }
    Ok(q)
}

impl FromStr for SetDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "paper-interval" {
            return Ok(SetDescriptor::PaperInterval);
        }
        let (family, rest) = s
            .split_once(':')
            .ok_or_else(|| parse_err(s, s, "unknown set family"))?;
        if family == "list" {
            let xs = rest
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u64>().map_err(|_| parse_err(s, t, "expected a nonnegative integer")))
                .collect::<Result<Vec<_>>>()?;
            return Ok(SetDescriptor::List(xs));
        }
        let fields: Vec<&str> = rest.split(':').collect();
        let int = |t: &str| -> Result<u64> {
            t.parse::<u64>()
                .map_err(|_| parse_err(s, t, "expected a nonnegative integer"))
        };
        let arity = |min: usize, max: usize| -> Result<()> {
            if fields.len() < min || fields.len() > max {
                let reason = if min == max {
                    format!("{family} takes {min} fields, got {}", fields.len())
                } else {
                    format!("{family} takes {min} or {max} fields, got {}", fields.len())
                };
                return Err(parse_err(s, rest, reason));
            }
            Ok(())
        };
        match family {
            "bernoulli" => {
                arity(1, 2)?;
                Ok(SetDescriptor::Bernoulli {
                    q: parse_density(s, fields[0])?,
                    seed: fields.get(1).map(|t| int(t)).transpose()?,
                })
            }
            "uniform" => {
                arity(1, 2)?;
                Ok(SetDescriptor::Uniform {
                    n: int(fields[0])?,
                    seed: fields.get(1).map(|t| int(t)).transpose()?,
                })
            }
            "interval" => {
                arity(2, 2)?;
                Ok(SetDescriptor::Interval {
                    start: int(fields[0])?,
                    len: int(fields[1])?,
                })
            }
            "ap" => {
                arity(3, 3)?;
                Ok(SetDescriptor::Ap {
                    start: int(fields[0])?,
                    step: int(fields[1])?,
                    len: int(fields[2])?,
                })
            }
            "gp" => {
                arity(3, 3)?;
                Ok(SetDescriptor::Gp {
                    start: int(fields[0])?,
                    ratio: int(fields[1])?,
                    len: int(fields[2])?,
                })
            }
            _ => Err(parse_err(s, family, "unknown set family")),
        }
    }
}

impl fmt::Display for SetDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let seed = |s: &Option<u64>| s.map(|s| format!(":{s}")).unwrap_or_default();
        match self {
            SetDescriptor::List(xs) => {
                let body: Vec<String> = xs.iter().map(u64::to_string).collect();
                write!(f, "list:{}", body.join(","))
            }
            SetDescriptor::Bernoulli { q, seed: s } => write!(f, "bernoulli:{q}{}", seed(s)),
            SetDescriptor::Uniform { n, seed: s } => write!(f, "uniform:{n}{}", seed(s)),
            SetDescriptor::Interval { start, len } => write!(f, "interval:{start}:{len}"),
            SetDescriptor::Ap { start, step, len } => write!(f, "ap:{start}:{step}:{len}"),
            SetDescriptor::Gp { start, ratio, len } => write!(f, "gp:{start}:{ratio}:{len}"),
            SetDescriptor::PaperInterval => f.write_str("paper-interval"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> PrimeModulus {
        PrimeModulus::new(n).unwrap()
    }

    #[test]
    fn hand_examples() {
        assert_eq!(gen_ap(p(7), 1, 2, 3).unwrap().elements(), &[1, 3, 5]);
        assert_eq!(gen_interval(p(5), 0, 2).unwrap().elements(), &[0, 1]);
        assert_eq!(from_list(p(5), &[1, 1, 2]), Err(Error::DuplicateElement(1)));
        assert_eq!(
            gen_interval(p(7), 0, 9),
            Err(Error::LengthExceedsField { len: 9, p: 7 })
        );
        assert_eq!(
            from_list(p(5), &[1, 5]),
            Err(Error::ElementOutOfRange { value: 5, p: 5 })
        );
    }

    #[test]
    fn paper_interval_sizes() {
        assert_eq!(gen_paper_interval(p(101)).unwrap().elements(), &[1, 2, 3, 4, 5]);
        assert_eq!(gen_paper_interval(p(10007)).unwrap().len(), 50);
        assert_eq!(gen_paper_interval(p(5)).unwrap().elements(), &[1]);
        assert_eq!(gen_paper_interval(p(40009)).unwrap().len(), 100);
        assert!(matches!(gen_paper_interval(p(3)), Err(Error::DegenerateSet(_))));
        for q in [11u64, 97, 1009, 1_000_003] {
            let k = gen_paper_interval(p(q)).unwrap().len() as f64;
            assert_eq!(k, ((q as f64).sqrt() / 2.0).floor());
        }
    }

    #[test]
    fn bernoulli_full_density_is_whole_field() {
        let a = gen_bernoulli(p(5), 1.0, 999).unwrap();
        assert_eq!(a.elements(), &[0, 1, 2, 3, 4]);
        assert_eq!(gen_bernoulli(p(5), 0.0, 1), Err(Error::InvalidDensity(0.0)));
        assert!(gen_bernoulli(p(5), 1.5, 1).is_err());
        assert!(gen_bernoulli(p(5), f64::NAN, 1).is_err());
    }

    #[test]
    fn bernoulli_is_deterministic() {
        let a = gen_bernoulli(p(1009), 0.3, 42).unwrap();
        let b = gen_bernoulli(p(1009), 0.3, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gen_bernoulli(p(1009), 0.3, 43).unwrap());
    }

    #[test]
    fn bernoulli_concentration_over_seeds() {
        // |A| ~ Binomial(1009, 0.3): mean 302.7, sd sqrt(1009*0.3*0.7) = 14.56.
        let sd = (1009.0f64 * 0.3 * 0.7).sqrt();
        for seed in 0..1000 {
            let n = gen_bernoulli(p(1009), 0.3, seed).unwrap().len() as f64;
            assert!((n - 302.7).abs() <= 5.0 * sd, "seed {seed}: n = {n}");
        }
    }

    #[test]
    fn uniform_has_exact_size() {
        let a = gen_uniform(p(31), 8, 7).unwrap();
        assert_eq!(a.len(), 8);
        assert_eq!(a, gen_uniform(p(31), 8, 7).unwrap());
        assert_eq!(gen_uniform(p(5), 5, 0).unwrap().elements(), &[0, 1, 2, 3, 4]);
        assert!(gen_uniform(p(5), 6, 0).is_err());
    }

    #[test]
    fn progressions() {
        assert_eq!(gen_interval(p(7), 5, 4).unwrap().elements(), &[0, 1, 5, 6]);
        assert!(gen_ap(p(7), 1, 7, 2).is_err());
        assert_eq!(gen_ap(p(7), 1, 7, 1).unwrap().elements(), &[1]);
        assert_eq!(gen_gp(p(7), 1, 3, 6).unwrap().elements(), &[1, 2, 3, 4, 5, 6]);
        // 2 has order 3 modulo 7
        assert!(matches!(gen_gp(p(7), 1, 2, 4), Err(Error::InvalidParameter(_))));
        assert!(gen_gp(p(7), 1, 1, 2).is_err());
        assert!(gen_gp(p(7), 1, 8, 2).is_err());
    }

    #[test]
    fn descriptor_grammar() {
        let cases = [
            ("list:1,2,3", SetDescriptor::List(vec![1, 2, 3])),
            ("list:", SetDescriptor::List(vec![])),
            ("bernoulli:0.3:42", SetDescriptor::Bernoulli { q: 0.3, seed: Some(42) }),
            ("bernoulli:0.3", SetDescriptor::Bernoulli { q: 0.3, seed: None }),
            ("bernoulli:1/4:9", SetDescriptor::Bernoulli { q: 0.25, seed: Some(9) }),
            ("uniform:300:42", SetDescriptor::Uniform { n: 300, seed: Some(42) }),
            ("interval:1:100", SetDescriptor::Interval { start: 1, len: 100 }),
            ("ap:1:2:50", SetDescriptor::Ap { start: 1, step: 2, len: 50 }),
            ("gp:2:3:20", SetDescriptor::Gp { start: 2, ratio: 3, len: 20 }),
            ("paper-interval", SetDescriptor::PaperInterval),
        ];
        for (text, want) in cases {
            let got: SetDescriptor = text.parse().unwrap();
            assert_eq!(got, want, "{text}");
            assert_eq!(got.to_string().parse::<SetDescriptor>().unwrap(), want);
        }
    }

    #[test]
    fn descriptor_errors_name_the_token() {
        let token = |s: &str| match s.parse::<SetDescriptor>() {
            Err(Error::Descriptor { token, .. }) => token,
            other => panic!("{s}: {other:?}"),
        };
        assert_eq!(token("list:1,x,3"), "x");
        assert_eq!(token("bernoulli:1.5"), "1.5");
        assert_eq!(token("ap:1:two:3"), "two");
        assert_eq!(token("circle:3"), "circle");
        assert_eq!(token("interval:1"), "1");
        assert_eq!(token("nonsense"), "nonsense");
    }

    #[test]
    fn serde_validates() {
        let a = gen_ap(p(11), 2, 3, 4).unwrap();
        let json = serde_json::to_string(&a).unwrap();
        let back: FieldSubset = serde_json::from_str(&json).unwrap();
        assert_eq!(a, back);
        let bad = r#"{"p":11,"elements":[3,3],"provenance":{"family":"explicit"}}"#;
        assert!(serde_json::from_str::<FieldSubset>(bad).is_err());
        let composite = r#"{"p":9,"elements":[],"provenance":{"family":"explicit"}}"#;
        assert!(serde_json::from_str::<FieldSubset>(composite).is_err());
    }

    #[test]
    fn affine_image() {
        let a = from_list(p(7), &[0, 1, 3]).unwrap();
        assert_eq!(a.map_affine(2, 1).unwrap().elements(), &[0, 1, 3]);
        assert!(a.map_affine(7, 1).is_err());
    }
}
