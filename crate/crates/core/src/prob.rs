//! Probabilities and log-space arithmetic.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real number in `[0, 1]`.
///
/// Serialized as a decimal string (shortest round-trip representation) so
/// documents never drift through a float parser.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);
    pub const HALF: Probability = Probability(0.5);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::InvalidProbability(value))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `p^k` with `0^0 = 1`.
    pub fn pow(self, k: usize) -> f64 {
        self.0.powi(k as i32)
    }

    /// `ln(p^k)`, with `ln(0^0) = 0`.
    pub fn ln_pow(self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            k as f64 * self.0.ln()
        }
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl FromStr for Probability {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::BadParameter(format!("not a probability: {s:?}")))?;
        Probability::new(v)
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Probability::new(v)
    }
}

impl Serialize for Probability {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Probability {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `ln(e^a + e^b)` without overflow; `-inf` is the additive identity.
pub fn ln_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

pub fn ln_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    terms.into_iter().fold(f64::NEG_INFINITY, ln_add)
}

/// `ln C(n, k)` by summing logs; exact enough for budgets up to `n = 63`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k).map(|j| ((n - j) as f64).ln() - ((j + 1) as f64).ln()).sum()
}

/// `C(n, k)` exactly, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        // acc * (n - j) is divisible by (j + 1) at every step
        acc = match acc.checked_mul((n - j) as u128) {
            Some(v) => v / (j as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// `ceil(x)` that ignores representation noise of a few ulps above an integer.
pub(crate) fn ceil_tolerant(x: f64) -> f64 {
    let r = x.round();
    if r >= 1.0 && (x - r).abs() <= 1e-9 * r {
        r
    } else {
        x.ceil()
    }
}

/// Serde for log-space values: `-inf` (an empty sum) is written as the string `"-inf"`.
pub(crate) mod log_value {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&x.to_string())
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "-inf" => Ok(f64::NEG_INFINITY),
                "inf" => Ok(f64::INFINITY),
                "NaN" => Ok(f64::NAN),
                _ => Err(serde::de::Error::custom(format!("not a number: {t:?}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_range() {
        assert!(Probability::new(-0.1).is_err());
        assert!(Probability::new(1.5).is_err());
        assert!(Probability::new(f64::NAN).is_err());
        assert_eq!(Probability::new(0.0).unwrap().pow(0), 1.0);
        assert_eq!(Probability::ZERO.ln_pow(0), 0.0);
        assert_eq!(Probability::ZERO.ln_pow(2), f64::NEG_INFINITY);
    }

    #[test]
    fn decimal_string_serde() {
        let p = Probability::new(0.1 + 0.2).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "\"0.30000000000000004\"");
        assert_eq!(serde_json::from_str::<Probability>(&json).unwrap(), p);
    }

    #[test]
    fn log_space_sums() {
        let s = ln_sum([0.5f64.ln(), 0.25f64.ln(), f64::NEG_INFINITY]);
        assert!((s.exp() - 0.75).abs() < 1e-15);
        assert_eq!(ln_sum(std::iter::empty()), f64::NEG_INFINITY);
        // far below f64 range
        let tiny = ln_add(-2000.0, -2000.0);
        assert!((tiny - (-2000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(14, 1), 14);
        assert_eq!(binomial(63, 31), 916312070471295267);
        assert_eq!(binomial(3, 5), 0);
        assert!((ln_binomial(40, 20) - (binomial(40, 20) as f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn tolerant_ceiling() {
        assert_eq!(ceil_tolerant(8.000000000000002), 8.0);
        assert_eq!(ceil_tolerant(0.8), 1.0);
        assert_eq!(ceil_tolerant(7.1), 8.0);
        assert_eq!(ceil_tolerant(0.0), 0.0);
        assert_eq!(ceil_tolerant(1e-12), 1.0);
    }
}
