use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `τ_m(ω^k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Insertion {
    pub m: u32,
    pub k: u32,
}

impl Insertion {
    pub fn new(m: u32, k: u32) -> Self {
        Insertion { m, k }
    }

    pub fn is_stationary(&self, n_target: u32) -> bool {
        self.k == n_target
    }

    pub fn is_primary(&self) -> bool {
        self.m == 0
    }
}

impl fmt::Display for Insertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.k)
    }
}

/// A bracket `⟨Π τ_{m_i}(ω^{k_i})⟩_g` for the target `P^N`, insertions kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvariantKey {
    pub n_target: u32,
    pub g: u32,
    insertions: Vec<Insertion>,
}

impl InvariantKey {
    pub fn new(n_target: u32, g: u32, mut insertions: Vec<Insertion>) -> Self {
        insertions.sort_unstable();
        InvariantKey {
            n_target,
            g,
            insertions,
        }
    }

    /// Shorthand from `(m, k)` pairs.
    pub fn from_pairs(n_target: u32, g: u32, pairs: &[(u32, u32)]) -> Self {
        Self::new(
            n_target,
            g,
            pairs.iter().map(|&(m, k)| Insertion::new(m, k)).collect(),
        )
    }

    /// Stationary insertions `τ_{m_i}(pt)`.
    pub fn stationary(n_target: u32, g: u32, ms: &[u32]) -> Self {
        Self::new(
            n_target,
            g,
            ms.iter().map(|&m| Insertion::new(m, n_target)).collect(),
        )
    }

    pub fn insertions(&self) -> &[Insertion] {
        &self.insertions
    }

    pub fn n(&self) -> usize {
        self.insertions.len()
    }

    pub fn validate(&self) -> Result<()> {
        for ins in &self.insertions {
            if ins.k > self.n_target {
                return Err(Error::InvalidExponent {
                    k: ins.k,
                    n: self.n_target,
                });
            }
        }
        Ok(())
    }

    pub fn with(&self, extra: Insertion) -> Self {
        let mut v = self.insertions.clone();
        v.push(extra);
        Self::new(self.n_target, self.g, v)
    }

    pub fn without(&self, idx: usize) -> Self {
        let mut v = self.insertions.clone();
        v.remove(idx);
        Self::new(self.n_target, self.g, v)
    }

    pub fn replaced(&self, idx: usize, ins: Insertion) -> Self {
        let mut v = self.insertions.clone();
        v[idx] = ins;
        Self::new(self.n_target, self.g, v)
    }

    pub fn position(&self, ins: Insertion) -> Option<usize> {
        self.insertions.iter().position(|&i| i == ins)
    }

    /// `2g - 2 + n`.
    pub fn euler(&self) -> i64 {
        2 * self.g as i64 - 2 + self.n() as i64
    }

    pub fn is_stable(&self) -> bool {
        self.euler() > 0
    }

    pub fn total_m(&self) -> u32 {
        self.insertions.iter().map(|i| i.m).sum()
    }
}

/// The degree forced by the dimension constraint, if it is a non-negative integer.
pub fn degree_of(key: &InvariantKey) -> Option<u32> {
    let n = key.n_target as i64;
    let total: i64 = key
        .insertions
        .iter()
        .map(|i| i.m as i64 + i.k as i64)
        .sum();
    let num = total - (n - 3) * (1 - key.g as i64) - key.n() as i64;
    if num < 0 || num % (n + 1) != 0 {
        return None;
    }
    Some((num / (n + 1)) as u32)
}

impl fmt::Display for InvariantKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gw[N={};g={};ins=", self.n_target, self.g)?;
        for (i, ins) in self.insertions.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{ins}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for InvariantKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid invariant key: {s}"));
        let body = s
            .trim()
            .strip_prefix("gw[")
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        let mut parts = body.splitn(3, ';');
        let n_target = parts
            .next()
            .and_then(|p| p.strip_prefix("N="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(bad)?;
        let g = parts
            .next()
            .and_then(|p| p.strip_prefix("g="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(bad)?;
        let ins = parts
            .next()
            .and_then(|p| p.strip_prefix("ins="))
            .ok_or_else(bad)?;
        let mut insertions = Vec::new();
        let mut rest = ins;
        while !rest.is_empty() {
            let inner = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = inner.find(')').ok_or_else(bad)?;
            let (m, k) = inner[..close].split_once(',').ok_or_else(bad)?;
            insertions.push(Insertion::new(
                m.trim().parse().map_err(|_| bad())?,
                k.trim().parse().map_err(|_| bad())?,
            ));
            rest = &inner[close + 1..];
            rest = rest.strip_prefix(',').unwrap_or(rest);
        }
        Ok(InvariantKey::new(n_target, g, insertions))
    }
}

impl Serialize for InvariantKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for InvariantKey {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_examples() {
        assert_eq!(degree_of(&InvariantKey::from_pairs(1, 0, &[(0, 1), (0, 1)])), Some(1));
        assert_eq!(degree_of(&InvariantKey::from_pairs(1, 0, &[(1, 1), (0, 1)])), None);
        assert_eq!(degree_of(&InvariantKey::from_pairs(2, 0, &[(4, 2)])), Some(2));
        assert_eq!(degree_of(&InvariantKey::from_pairs(1, 1, &[(0, 1)])), Some(0));
    }

    #[test]
    fn canonical_string_round_trip() {
        let k = InvariantKey::from_pairs(2, 1, &[(3, 2), (0, 1), (3, 0)]);
        let s = k.to_string();
        assert_eq!(s, "gw[N=2;g=1;ins=(0,1),(3,0),(3,2)]");
        assert_eq!(s.parse::<InvariantKey>().unwrap(), k);
        let empty = InvariantKey::new(3, 2, vec![]);
        assert_eq!(empty.to_string().parse::<InvariantKey>().unwrap(), empty);
        assert!("gw[N=1;g=0;ins=(0,1".parse::<InvariantKey>().is_err());
        assert!("nonsense".parse::<InvariantKey>().is_err());
    }
}
