//! Exact rational rates such as distance parameters and noise rates.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A rational in `[0, 1]`, written `"1/4"` or `"0.25"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Epsilon(Ratio<u64>);

impl Epsilon {
    pub fn new(num: u64, den: u64) -> Result<Self, String> {
        if den == 0 || num > den {
            return Err(format!("{num}/{den} is not in [0, 1]"));
        }
        Ok(Epsilon(Ratio::new(num, den)))
    }

    pub fn ratio(self) -> Ratio<u64> {
        self.0
    }

    pub fn numer(self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(self) -> u64 {
        *self.0.denom()
    }

    pub fn as_f64(self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    pub fn is_zero(self) -> bool {
        self.numer() == 0
    }

    /// `ceil(c / eps)`.
    pub fn ceil_scaled_inverse(self, c: u64) -> u64 {
        let (n, d) = (self.numer() as u128, self.denom() as u128);
        (c as u128 * d).div_ceil(n) as u64
    }

    /// `ceil(eps * total)`.
    pub fn ceil_fraction_of(self, total: u128) -> u128 {
        (total * self.numer() as u128).div_ceil(self.denom() as u128)
    }

    /// Whether `eps` lies strictly between 0 and 1.
    pub fn is_proper(self) -> bool {
        self.numer() > 0 && self.numer() < self.denom()
    }
}

impl FromStr for Epsilon {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || format!("cannot parse rate `{s}`");
        if let Some((a, b)) = s.split_once('/') {
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            return Epsilon::new(a, b);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 18 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        Epsilon::new(num, den)
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl Serialize for Epsilon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Epsilon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Number(x) => x.to_string().parse().map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_notations() {
        let a: Epsilon = "1/4".parse().unwrap();
        let b: Epsilon = "0.25".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "1/4");
        assert_eq!("2/6".parse::<Epsilon>().unwrap().to_string(), "1/3");
        assert!("5/4".parse::<Epsilon>().is_err());
        assert!("x".parse::<Epsilon>().is_err());
        let c: Epsilon = serde_json::from_str("0.5").unwrap();
        assert_eq!(c, Epsilon::new(1, 2).unwrap());
    }

    #[test]
    fn ceilings() {
        let third = Epsilon::new(1, 3).unwrap();
        assert_eq!(third.ceil_scaled_inverse(3), 9);
        assert_eq!(Epsilon::new(2, 7).unwrap().ceil_scaled_inverse(3), 11);
        assert_eq!(Epsilon::new(1, 4).unwrap().ceil_fraction_of(10), 3);
    }
}
