use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{as_string, big};
use crate::field::PrimeModulus;

/// Number of lines with each nonzero incidence value, over all `p^2 + p`
/// affine lines. Lines missing `A×A` entirely are implied by
/// [`IncidenceHistogram::zero_lines`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawHistogram")]
pub struct IncidenceHistogram {
    p: PrimeModulus,
    n: u64,
    counts: BTreeMap<u64, u64>,
}

#[derive(Deserialize)]
struct RawHistogram {
    p: PrimeModulus,
    n: u64,
    counts: BTreeMap<u64, u64>,
}

impl TryFrom<RawHistogram> for IncidenceHistogram {
    type Error = Error;

    fn try_from(raw: RawHistogram) -> Result<Self> {
        IncidenceHistogram::from_counts(raw.p, raw.n, raw.counts)
    }
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    k: u64,
    lines: u64,
}

impl IncidenceHistogram {
    /// Builds a histogram, checking that every incidence value lies in
    /// `1..=n` and that no more than `p^2 + p` lines are accounted for.
    pub fn from_counts(p: PrimeModulus, n: u64, mut counts: BTreeMap<u64, u64>) -> Result<Self> {
        counts.retain(|_, v| *v > 0);
        if n > p.get() {
            return Err(Error::InvalidHistogram(format!("n = {n} exceeds p = {p}")));
        }
        if let Some((&k, _)) = counts.iter().find(|(&k, _)| k == 0 || k > n) {
            return Err(Error::InvalidHistogram(format!(
                "incidence value {k} outside 1..={n}"
            )));
        }
        let total: u128 = counts.values().map(|&v| v as u128).sum();
        if total > p.line_count() {
            return Err(Error::InvalidHistogram(format!(
                "{total} lines exceed the {} lines of the plane",
                p.line_count()
            )));
        }
        Ok(IncidenceHistogram { p, n, counts })
    }

    /// Builds from a dense table indexed by incidence value (`dense[0]` is
    /// ignored).
    pub(crate) fn from_dense(p: PrimeModulus, n: u64, dense: &[u64]) -> Self {
        let counts = dense
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| (k as u64, c))
            .collect();
        IncidenceHistogram { p, n, counts }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn set_size(&self) -> u64 {
        self.n
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn lines_with(&self, k: u64) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn nonzero_lines(&self) -> u128 {
        self.counts.values().map(|&v| v as u128).sum()
    }

    pub fn zero_lines(&self) -> u128 {
        self.p.line_count() - self.nonzero_lines()
    }

    pub fn max_incidence(&self) -> u64 {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    /// `Σ_ℓ i(ℓ)^r`.
    pub fn power_sum(&self, r: u32) -> BigUint {
        self.power_sum_where(r, |_| true)
    }

    /// `Σ i(ℓ)^r` over lines whose incidence value satisfies `keep`.
    pub fn power_sum_where(&self, r: u32, keep: impl Fn(u64) -> bool) -> BigUint {
        self.counts
            .iter()
            .filter(|(&k, _)| keep(k))
            .fold(BigUint::zero(), |acc, (&k, &c)| acc + big(k).pow(r) * big(c))
    }

    pub fn moments(&self) -> MomentSet {
        MomentSet {
            s1: self.power_sum(1),
            s2: self.power_sum(2),
            s3: self.power_sum(3),
            s4: self.power_sum(4),
        }
    }

    /// Adds `other` into `self`; both must describe the same `(p, n)`.
    pub fn merge(&mut self, other: &IncidenceHistogram) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch {
                left: self.p.get(),
                right: other.p.get(),
            });
        }
        if self.n != other.n {
            return Err(Error::InvalidHistogram(format!(
                "cannot merge histograms for |A| = {} and |A| = {}",
                self.n, other.n
            )));
        }
        for (&k, &c) in &other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
        Ok(())
    }

    /// Moves one line from the largest occupied bin down one incidence
    /// value. Used only to exercise failure paths of the verifier.
    pub fn inject_fault(&mut self) -> bool {
        let Some((&k, _)) = self.counts.iter().next_back() else {
            return false;
        };
        let c = self.counts.get_mut(&k).expect("bin exists");
        *c -= 1;
        if *c == 0 {
            self.counts.remove(&k);
        }
        if k > 1 {
            *self.counts.entry(k - 1).or_insert(0) += 1;
        }
        true
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Writes `k,lines` rows for every nonzero incidence value.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for (&k, &lines) in &self.counts {
            out.serialize(CsvRow { k, lines })?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn from_csv<R: std::io::Read>(p: PrimeModulus, n: u64, r: R) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for row in csv::Reader::from_reader(r).deserialize() {
            let row: CsvRow = row?;
            if counts.insert(row.k, row.lines).is_some() {
                return Err(Error::InvalidHistogram(format!("repeated row for k = {}", row.k)));
            }
        }
        Self::from_counts(p, n, counts)
    }
}

/// `s_r = Σ_ℓ i(ℓ)^r` for `r = 1..=4`; `s3 = T(A)`, `s4 = Q(A)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MomentSet {
    #[serde(with = "as_string")]
    pub s1: BigUint,
    #[serde(with = "as_string")]
    pub s2: BigUint,
    #[serde(with = "as_string")]
    pub s3: BigUint,
    #[serde(with = "as_string")]
    pub s4: BigUint,
}

impl MomentSet {
    pub fn t(&self) -> &BigUint {
        &self.s3
    }

    pub fn q(&self) -> &BigUint {
        &self.s4
    }

    pub fn get(&self, r: u32) -> &BigUint {
        match r {
            1 => &self.s1,
            2 => &self.s2,
            3 => &self.s3,
            4 => &self.s4,
            _ => panic!("moment order {r} not tracked"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> IncidenceHistogram {
        let p = PrimeModulus::new(5).unwrap();
        IncidenceHistogram::from_counts(p, 2, BTreeMap::from([(2, 6), (1, 12)])).unwrap()
    }

    #[test]
    fn unit_square_moments() {
        let h = unit_square();
        let m = h.moments();
        assert_eq!(m.s1, big(24));
        assert_eq!(m.s2, big(36));
        assert_eq!(m.s3, big(60));
        assert_eq!(m.s4, big(108));
        assert_eq!(h.zero_lines(), 12);
    }

    #[test]
    fn validation() {
        let p = PrimeModulus::new(5).unwrap();
        assert!(IncidenceHistogram::from_counts(p, 2, BTreeMap::from([(3, 1)])).is_err());
        assert!(IncidenceHistogram::from_counts(p, 2, BTreeMap::from([(0, 1)])).is_err());
        assert!(IncidenceHistogram::from_counts(p, 2, BTreeMap::from([(1, 31)])).is_err());
        assert!(IncidenceHistogram::from_counts(p, 6, BTreeMap::new()).is_err());
        let h = IncidenceHistogram::from_counts(p, 2, BTreeMap::from([(1, 3), (2, 0)])).unwrap();
        assert_eq!(h.counts().len(), 1);
    }

    #[test]
    fn json_shape() {
        let h = unit_square();
        let json = h.to_json().unwrap();
        assert_eq!(json, r#"{"p":5,"n":2,"counts":{"1":12,"2":6}}"#);
        assert_eq!(IncidenceHistogram::from_json(&json).unwrap(), h);
        assert!(IncidenceHistogram::from_json(r#"{"p":5,"n":1,"counts":{"2":1}}"#).is_err());
    }

    #[test]
    fn csv_shape() {
        let h = unit_square();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "k,lines\n1,12\n2,6\n");
        let back = IncidenceHistogram::from_csv(h.modulus(), 2, &buf[..]).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn merge_adds_bins() {
        let mut a = unit_square();
        a.merge(&unit_square()).unwrap();
        assert_eq!(a.lines_with(2), 12);
        let other = IncidenceHistogram::from_counts(a.modulus(), 1, BTreeMap::new()).unwrap();
        assert!(a.merge(&other).is_err());
    }

    #[test]
    fn fault_changes_first_moment() {
        let mut h = unit_square();
        assert!(h.inject_fault());
        assert_eq!(h.moments().s1, big(23));
        let p = PrimeModulus::new(5).unwrap();
        let mut empty = IncidenceHistogram::from_counts(p, 0, BTreeMap::new()).unwrap();
        assert!(!empty.inject_fault());
    }
}
