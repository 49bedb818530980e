//! Rationals extended by formal Q-linear combinations of named atoms.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rat::{parse_rat, Rat};
use crate::error::{Error, Result};

/// `scalar + Σ coeff · atom`; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymRat {
    scalar: Rat,
    atoms: BTreeMap<String, Rat>,
}

impl SymRat {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rat(r: Rat) -> Self {
        SymRat {
            scalar: r,
            atoms: BTreeMap::new(),
        }
    }

    pub fn atom(name: impl Into<String>) -> Self {
        let mut atoms = BTreeMap::new();
        atoms.insert(name.into(), Rat::one());
        SymRat {
            scalar: Rat::zero(),
            atoms,
        }
    }

    pub fn scalar(&self) -> &Rat {
        &self.scalar
    }

    pub fn atoms(&self) -> &BTreeMap<String, Rat> {
        &self.atoms
    }

    pub fn atom_coeff(&self, name: &str) -> Rat {
        self.atoms.get(name).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero() && self.atoms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        self.is_rational().then_some(&self.scalar)
    }

    pub fn scale(&self, r: &Rat) -> SymRat {
        if r.is_zero() {
            return SymRat::zero();
        }
        SymRat {
            scalar: &self.scalar * r,
            atoms: self.atoms.iter().map(|(k, v)| (k.clone(), v * r)).collect(),
        }
    }

    /// Product, defined only when at least one side is atom-free.
    pub fn try_mul(&self, other: &SymRat) -> Result<SymRat> {
        match (self.is_rational(), other.is_rational()) {
            (true, _) => Ok(other.scale(&self.scalar)),
            (_, true) => Ok(self.scale(&other.scalar)),
            _ => Err(Error::AtomProduct),
        }
    }

    pub fn add_atom(&mut self, name: &str, coeff: &Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.atoms.entry(name.to_string()).or_insert_with(Rat::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.atoms.remove(name);
        }
    }

    pub fn resolve(&self, assignment: &HashMap<String, Rat>) -> Result<Rat> {
        let mut acc = self.scalar.clone();
        for (name, c) in &self.atoms {
            let v = assignment
                .get(name)
                .ok_or_else(|| Error::MissingAtom(name.clone()))?;
            acc += c * v;
        }
        Ok(acc)
    }

    /// Substitutes the atoms that have a value and keeps the rest symbolic.
    pub fn resolve_partial(&self, assignment: &HashMap<String, Rat>) -> SymRat {
        let mut out = SymRat::from_rat(self.scalar.clone());
        for (name, c) in &self.atoms {
            match assignment.get(name) {
                Some(v) => out.scalar += c * v,
                None => out.add_atom(name, c),
            }
        }
        out
    }
}

impl From<Rat> for SymRat {
    fn from(r: Rat) -> Self {
        SymRat::from_rat(r)
    }
}

impl AddAssign<&SymRat> for SymRat {
    fn add_assign(&mut self, rhs: &SymRat) {
        self.scalar += &rhs.scalar;
        for (k, v) in &rhs.atoms {
            self.add_atom(k, v);
        }
    }
}

impl SubAssign<&SymRat> for SymRat {
    fn sub_assign(&mut self, rhs: &SymRat) {
        self.scalar -= &rhs.scalar;
        for (k, v) in &rhs.atoms {
            self.add_atom(k, &-v);
        }
    }
}

impl Add<&SymRat> for &SymRat {
    type Output = SymRat;
    fn add(self, rhs: &SymRat) -> SymRat {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&SymRat> for &SymRat {
    type Output = SymRat;
    fn sub(self, rhs: &SymRat) -> SymRat {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for SymRat {
    type Output = SymRat;
    fn add(mut self, rhs: SymRat) -> SymRat {
        self += &rhs;
        self
    }
}

impl Sub for SymRat {
    type Output = SymRat;
    fn sub(mut self, rhs: SymRat) -> SymRat {
        self -= &rhs;
        self
    }
}

impl Neg for &SymRat {
    type Output = SymRat;
    fn neg(self) -> SymRat {
        SymRat {
            scalar: -&self.scalar,
            atoms: self.atoms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }
}

impl std::iter::Sum for SymRat {
    fn sum<I: Iterator<Item = SymRat>>(iter: I) -> SymRat {
        iter.fold(SymRat::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl fmt::Display for SymRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "{}", self.scalar);
        }
        let mut first = true;
        if !self.scalar.is_zero() {
            write!(f, "{}", self.scalar)?;
            first = false;
        }
        for (k, v) in &self.atoms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if v.is_one() {
                write!(f, "{k}")?;
            } else {
                write!(f, "({v})*{k}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct SymRatWire {
    scalar: String,
    atoms: BTreeMap<String, String>,
}

impl Serialize for SymRat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SymRatWire {
            scalar: self.scalar.to_string(),
            atoms: self
                .atoms
                .iter()
                .map(|(k, v)| (k.clone(), v.to_string()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymRat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = SymRatWire::deserialize(d)?;
        let scalar = parse_rat(&w.scalar).map_err(serde::de::Error::custom)?;
        let mut out = SymRat::from_rat(scalar);
        for (k, v) in w.atoms {
            let c = parse_rat(&v).map_err(serde::de::Error::custom)?;
            out.add_atom(&k, &c);
        }
        Ok(out)
    }
}
