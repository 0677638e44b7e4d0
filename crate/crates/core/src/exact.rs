//! Exact-number helpers shared by the engine and the verifier: big integer
//! and rational serialization, decimal rendering, and quantities involving a
//! single square root.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// Significant digits used whenever an exact value is rendered as a decimal.
pub const DECIMAL_DIGITS: usize = 12;

pub fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

pub fn rat(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

pub fn rat_from_uint(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}

/// Renders `x` with [`DECIMAL_DIGITS`] significant digits, trailing zeros
/// trimmed; scientific notation outside `1e-5 ..= 1e15`.
pub fn decimal(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let places = (DECIMAL_DIGITS as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.places$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.prec$e}", prec = DECIMAL_DIGITS - 1)
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact square root if `x` is a perfect square.
pub fn exact_sqrt(x: &BigUint) -> Option<BigUint> {
    let s = x.sqrt();
    (&s * &s == *x).then_some(s)
}

/// An exact rational serialized as `{"exact": "a/b", "decimal": "..."}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Exact(pub BigRational);

impl Exact {
    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Exact", 2)?;
        st.serialize_field("exact", &rational_string(&self.0))?;
        st.serialize_field("decimal", &decimal(self.to_f64()))?;
        st.end()
    }
}

/// A ratio that is exact when its defining expression happens to be
/// rational and otherwise only approximate.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub exact: Option<BigRational>,
    pub approx: f64,
}

impl Diagnostic {
    pub fn exact(r: BigRational) -> Self {
        Diagnostic {
            approx: rational_to_f64(&r),
            exact: Some(r),
        }
    }

    pub fn approx(x: f64) -> Self {
        Diagnostic { exact: None, approx: x }
    }

    /// `numer / (a + sqrt(b))` with `a` rational and `b` a nonnegative
    /// integer; exact whenever `b` is a perfect square.
    pub fn over_surd(numer: &BigUint, a: &BigRational, b: &BigUint) -> Self {
        let numer_q = rat_from_uint(numer);
        match exact_sqrt(b) {
            Some(root) => {
                let den = a + rat_from_uint(&root);
                if den.is_zero() {
                    Diagnostic::approx(f64::NAN)
                } else {
                    Diagnostic::exact(numer_q / den)
                }
            }
            None => {
                let den = rational_to_f64(a) + b.to_f64().unwrap_or(f64::INFINITY).sqrt();
                Diagnostic::approx(numer.to_f64().unwrap_or(f64::INFINITY) / den)
            }
        }
    }
}

impl Serialize for Diagnostic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Diagnostic", 2)?;
        st.serialize_field("exact", &self.exact.as_ref().map(rational_string))?;
        st.serialize_field("decimal", &decimal(self.approx))?;
        st.end()
    }
}

pub mod as_string {
    use serde::Serializer;
    use std::fmt::Display;

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal(15.2), "15.2");
        assert_eq!(decimal(1.0), "1");
        assert_eq!(decimal(1.0 / 3.0), "0.333333333333");
        assert_eq!(decimal(2.0f64.sqrt() * 1000.0), "1414.21356237");
        assert_eq!(decimal(1.5e20), "1.50000000000e20");
        assert_eq!(decimal(-0.25), "-0.25");
    }

    #[test]
    fn surds() {
        // 10 / (1 + sqrt(9)) = 5/2
        let d = Diagnostic::over_surd(&big(10), &rat(1, 1), &big(9));
        assert_eq!(d.exact, Some(rat(5, 2)));
        // 10 / (0 + sqrt(2))
        let d = Diagnostic::over_surd(&big(10), &rat(0, 1), &big(2));
        assert!(d.exact.is_none());
        assert!((d.approx - 10.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn exact_json() {
        let v = serde_json::to_string(&Exact(rat(76, 5))).unwrap();
        assert_eq!(v, r#"{"exact":"76/5","decimal":"15.2"}"#);
    }
}
