use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::quasi::all_permutations;
use crate::arith::rat::{rat_string, Rat};

/// One `(branch point, pole order)` per variable.
pub type Assignment = Vec<(i8, u32)>;

/// `Σ c · Π dz_i / (z_i - α_i)^{k_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleBasisDifferential {
    pub g: u32,
    pub n: usize,
    #[serde(with = "coeff_list")]
    pub coeffs: BTreeMap<Assignment, Rat>,
}

impl PoleBasisDifferential {
    pub fn new(g: u32, n: usize) -> Self {
        PoleBasisDifferential {
            g,
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, a: Assignment, c: &Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(a.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&a);
        }
    }

    pub fn coeff(&self, a: &[(i8, u32)]) -> Rat {
        self.coeffs.get(a).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn max_order(&self) -> u32 {
        self.coeffs
            .keys()
            .flat_map(|a| a.iter().map(|&(_, k)| k))
            .max()
            .unwrap_or(0)
    }

    pub fn has_residue_part(&self) -> bool {
        self.coeffs.keys().any(|a| a.iter().any(|&(_, k)| k == 1))
    }

    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut out = Self::new(self.g, self.n);
        for (a, c) in &self.coeffs {
            let mut b = a.clone();
            for (i, &p) in perm.iter().enumerate() {
                b[p] = a[i];
            }
            out.add(b, c);
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        all_permutations(self.n)
            .iter()
            .all(|p| &self.permute(p) == self)
    }

    pub fn scale(&self, r: &Rat) -> Self {
        let mut out = Self::new(self.g, self.n);
        for (a, c) in &self.coeffs {
            out.add(a.clone(), &(c * r));
        }
        out
    }
}

impl fmt::Display for PoleBasisDifferential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "omega[{},{}] =", self.g, self.n)?;
        if self.coeffs.is_empty() {
            return write!(f, " 0");
        }
        for (a, c) in &self.coeffs {
            write!(f, " + ({c})")?;
            for (i, (al, k)) in a.iter().enumerate() {
                write!(f, " dz{}/(z{}{:+})^{}", i + 1, i + 1, -al, k)?;
            }
        }
        Ok(())
    }
}

mod coeff_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        assignment: Assignment,
        #[serde(with = "rat_string")]
        value: Rat,
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<Assignment, Rat>, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Entry> = m
            .iter()
            .map(|(a, c)| Entry {
                assignment: a.clone(),
                value: c.clone(),
            })
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Assignment, Rat>, D::Error> {
        let v: Vec<Entry> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|e| (e.assignment, e.value)).collect())
    }
}
