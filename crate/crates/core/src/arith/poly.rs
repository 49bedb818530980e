//! Sparse multivariate polynomials with `SymRat` coefficients.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::rat::{pow_i, Rat};
use super::symrat::SymRat;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiPoly {
    nvars: usize,
    #[serde(with = "terms_wire")]
    terms: BTreeMap<Vec<u32>, SymRat>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: SymRat) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], &c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, SymRat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exp: Vec<u32>, c: &SymRat) {
        debug_assert_eq!(exp.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp.clone()).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: &[u32]) -> SymRat {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn eval(&self, point: &[i64]) -> Result<SymRat> {
        if point.len() != self.nvars {
            return Err(Error::Arity {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let pts: Vec<Rat> = point.iter().map(|&v| Rat::from_integer(BigInt::from(v))).collect();
        self.eval_rat(&pts)
    }

    pub fn eval_rat(&self, point: &[Rat]) -> Result<SymRat> {
        if point.len() != self.nvars {
            return Err(Error::Arity {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut acc = SymRat::zero();
        for (exp, c) in &self.terms {
            let mut mono = Rat::from_integer(BigInt::from(1));
            for (x, &e) in point.iter().zip(exp) {
                mono *= pow_i(x, e as i64);
            }
            acc += &c.scale(&mono);
        }
        Ok(acc)
    }

    pub fn derivative(&self, var: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (exp, c) in &self.terms {
            if exp[var] == 0 {
                continue;
            }
            let mut e = exp.clone();
            e[var] -= 1;
            out.add_term(e, &c.scale(&Rat::from_integer(BigInt::from(exp[var]))));
        }
        out
    }

    /// Relabels variables: variable `i` of `self` becomes variable `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (exp, c) in &self.terms {
            let mut e = vec![0; self.nvars];
            for (i, &p) in perm.iter().enumerate() {
                e[p] = exp[i];
            }
            out.add_term(e, c);
        }
        out
    }

    /// Homogeneous part of the given total degree.
    pub fn homogeneous_part(&self, degree: u32) -> MultiPoly {
        let mut out = MultiPoly::zero(self.nvars);
        for (exp, c) in &self.terms {
            if exp.iter().sum::<u32>() == degree {
                out.add_term(exp.clone(), c);
            }
        }
        out
    }
}

mod terms_wire {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        t: &BTreeMap<Vec<u32>, SymRat>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<(&Vec<u32>, &SymRat)> = t.iter().collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<Vec<u32>, SymRat>, D::Error> {
        let v: Vec<(Vec<u32>, SymRat)> = Vec::deserialize(d)?;
        Ok(v.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::{frac, rat};

    #[test]
    fn eval_derivative_degree() {
        // 2/3 m0^2 m1 - 5 m1 + A
        let mut p = MultiPoly::zero(2);
        p.add_term(vec![2, 1], &SymRat::from_rat(frac(2, 3)));
        p.add_term(vec![0, 1], &SymRat::from_rat(rat(-5)));
        p.add_term(vec![0, 0], &SymRat::atom("A"));
        assert_eq!(p.degree(), Some(3));
        let v = p.eval(&[3, -1]).unwrap();
        assert_eq!(v.scalar(), &rat(-6 + 5));
        assert_eq!(v.atom_coeff("A"), rat(1));
        let d = p.derivative(1);
        assert_eq!(d.eval(&[3, 7]).unwrap(), SymRat::from_rat(rat(1)));
        assert!(p.eval(&[1]).is_err());
    }

    #[test]
    fn cancellation_removes_terms() {
        let mut p = MultiPoly::zero(1);
        p.add_term(vec![1], &SymRat::from_rat(rat(2)));
        p.add_term(vec![1], &SymRat::from_rat(rat(-2)));
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
    }
}
