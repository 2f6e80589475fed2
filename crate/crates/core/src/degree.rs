//! The branching parameter of a homogeneous tree.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Branching parameter `q` of the `(q+1)`-homogeneous tree, with `q = ∞` allowed.
///
/// Stored through its reciprocal so that every formula in which `1/q` appears
/// specializes to the infinite-degree tree by setting `inv_q = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtendedDegree {
    inv_q: f64,
}

impl ExtendedDegree {
    /// The tree of infinite degree.
    pub const INFINITE: ExtendedDegree = ExtendedDegree { inv_q: 0.0 };

    /// A finite degree `q ≥ 2`.
    pub fn finite(q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidDegree(format!("q must be at least 2, got {q}")));
        }
        Ok(Self { inv_q: 1.0 / q as f64 })
    }

    pub fn infinite() -> Self {
        Self::INFINITE
    }

    /// Builds a degree from its reciprocal; only `0` and `1/q` for integer
    /// `q ≥ 2` are accepted.
    pub fn from_inv_q(inv_q: f64) -> Result<Self> {
        if inv_q == 0.0 {
            return Ok(Self::INFINITE);
        }
        if !(inv_q > 0.0 && inv_q <= 0.5) {
            return Err(Error::InvalidDegree(format!("1/q = {inv_q} is not in (0, 1/2]")));
        }
        let q = (1.0 / inv_q).round();
        if ((1.0 / q) - inv_q).abs() > 1e-12 * inv_q {
            return Err(Error::InvalidDegree(format!("1/q = {inv_q} is not the reciprocal of an integer")));
        }
        Ok(Self { inv_q: 1.0 / q })
    }

    #[inline]
    pub fn inv_q(self) -> f64 {
        self.inv_q
    }

    #[inline]
    pub fn is_infinite(self) -> bool {
        self.inv_q == 0.0
    }

    /// `Some(q)` for finite degrees.
    pub fn q(self) -> Option<u64> {
        if self.is_infinite() {
            None
        } else {
            Some((1.0 / self.inv_q).round() as u64)
        }
    }

    /// `1 + 1/q`.
    #[inline]
    pub fn one_plus(self) -> f64 {
        1.0 + self.inv_q
    }

    /// `1 - 1/q`.
    #[inline]
    pub fn one_minus(self) -> f64 {
        1.0 - self.inv_q
    }

    /// `q^{-k}`, with `0^0 = 1` at infinite degree.
    #[inline]
    pub fn inv_pow(self, k: usize) -> f64 {
        if k == 0 {
            1.0
        } else {
            self.inv_q.powi(k as i32)
        }
    }
}

impl fmt::Display for ExtendedDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.q() {
            Some(q) => write!(f, "{q}"),
            None => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtendedDegree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "inf" | "infinity" | "∞" => Ok(Self::INFINITE),
            _ => {
                let q: u64 = s
                    .parse()
                    .map_err(|_| Error::InvalidDegree(format!("cannot parse degree {s:?}")))?;
                Self::finite(q)
            }
        }
    }
}

impl Serialize for ExtendedDegree {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.q() {
            Some(q) => serializer.serialize_u64(q),
            None => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedDegree {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(u64),
            Str(String),
        }
        let parsed = match Repr::deserialize(deserializer)? {
            Repr::Int(q) => Self::finite(q),
            Repr::Str(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}
