//! Truncated Laurent series with exact coefficients.
//!
//! A series stores the coefficients of exponents `min_exp .. trunc`; every
//! exponent `>= trunc` is unknown. Arithmetic propagates `trunc`
//! pessimistically. `EXACT` marks a series with no truncation (a Laurent
//! polynomial).

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::rat::Rat;
use crate::error::{Error, Result};

pub const EXACT: i64 = i64::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    pub variable: String,
    pub center: String,
    min_exp: i64,
    coeffs: Vec<Rat>,
    trunc: i64,
}

impl LaurentSeries {
    /// Builds a series from the coefficients of `min_exp, min_exp + 1, …`.
    /// Coefficients at or beyond `trunc` are discarded.
    pub fn new(
        variable: impl Into<String>,
        center: impl Into<String>,
        min_exp: i64,
        coeffs: Vec<Rat>,
        trunc: i64,
    ) -> Self {
        let mut s = LaurentSeries {
            variable: variable.into(),
            center: center.into(),
            min_exp,
            coeffs,
            trunc,
        };
        s.normalize();
        s
    }

    pub fn zero_like(&self, trunc: i64) -> Self {
        Self::new(self.variable.clone(), self.center.clone(), trunc.min(0), vec![], trunc)
    }

    /// `c · t^e`, exact.
    pub fn monomial(variable: &str, center: &str, c: Rat, e: i64) -> Self {
        Self::new(variable, center, e, vec![c], EXACT)
    }

    fn normalize(&mut self) {
        if self.trunc != EXACT {
            let keep = (self.trunc - self.min_exp).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min_exp += lead as i64;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() && self.trunc != EXACT {
            self.min_exp = self.trunc;
        }
    }

    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.min_exp)
    }

    pub fn coeff(&self, e: i64) -> Result<Rat> {
        if e >= self.trunc {
            return Err(Error::TruncationInsufficient {
                needed: e,
                trunc: self.trunc,
            });
        }
        if e < self.min_exp {
            return Ok(Rat::zero());
        }
        Ok(self
            .coeffs
            .get((e - self.min_exp) as usize)
            .cloned()
            .unwrap_or_else(Rat::zero))
    }

    /// Known nonzero terms as `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rat)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.min_exp + i as i64, c))
    }

    pub fn residue(&self) -> Result<Rat> {
        self.coeff(-1)
    }

    pub fn with_trunc(&self, trunc: i64) -> Self {
        let mut s = self.clone();
        s.trunc = s.trunc.min(trunc);
        s.normalize();
        s
    }

    pub fn scale(&self, r: &Rat) -> Self {
        Self::new(
            self.variable.clone(),
            self.center.clone(),
            self.min_exp,
            self.coeffs.iter().map(|c| c * r).collect(),
            self.trunc,
        )
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self::new(
            self.variable.clone(),
            self.center.clone(),
            self.min_exp + k,
            self.coeffs.clone(),
            self.trunc.saturating_add(k),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    fn combine(&self, other: &Self, plus: bool) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let lo = self.min_exp.min(other.min_exp).min(trunc);
        let hi = (self.min_exp + self.coeffs.len() as i64)
            .max(other.min_exp + other.coeffs.len() as i64)
            .min(trunc);
        let mut coeffs = vec![Rat::zero(); (hi - lo).max(0) as usize];
        for (e, c) in self.terms() {
            if e < hi {
                coeffs[(e - lo) as usize] += c;
            }
        }
        for (e, c) in other.terms() {
            if e < hi {
                if plus {
                    coeffs[(e - lo) as usize] += c;
                } else {
                    coeffs[(e - lo) as usize] -= c;
                }
            }
        }
        Self::new(self.variable.clone(), self.center.clone(), lo, coeffs, trunc)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let vs = self.valuation().unwrap_or(self.trunc);
        let vo = other.valuation().unwrap_or(other.trunc);
        let trunc = vs.saturating_add(other.trunc).min(vo.saturating_add(self.trunc));
        if self.is_zero() || other.is_zero() {
            return self.zero_like(trunc);
        }
        let lo = self.min_exp + other.min_exp;
        let full = self.coeffs.len() + other.coeffs.len() - 1;
        let len = if trunc == EXACT {
            full
        } else {
            ((trunc - lo).max(0) as usize).min(full)
        };
        let mut coeffs = vec![Rat::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        Self::new(self.variable.clone(), self.center.clone(), lo, coeffs, trunc)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::monomial(&self.variable, &self.center, Rat::one(), 0);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse; an exact input needs an explicit target truncation.
    pub fn invert(&self, trunc_if_exact: i64) -> Result<Self> {
        let v = self.valuation().ok_or(Error::NotInvertible)?;
        let rel = if self.trunc == EXACT {
            trunc_if_exact + v
        } else {
            self.trunc - v
        };
        let a: Vec<Rat> = (0..rel.max(0))
            .map(|i| self.coeff(v + i).unwrap_or_else(|_| Rat::zero()))
            .collect();
        let inv0 = a[0].recip();
        let mut b = vec![Rat::zero(); a.len()];
        b[0] = inv0.clone();
        for n in 1..a.len() {
            let mut s = Rat::zero();
            for k in 1..=n {
                if !a[k].is_zero() {
                    s += &a[k] * &b[n - k];
                }
            }
            b[n] = -s * &inv0;
        }
        Ok(Self::new(
            self.variable.clone(),
            self.center.clone(),
            -v,
            b,
            rel - v,
        ))
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * Rat::from_integer(BigInt::from(self.min_exp + i as i64)))
            .collect();
        Self::new(
            self.variable.clone(),
            self.center.clone(),
            self.min_exp - 1,
            coeffs,
            self.trunc.saturating_sub(1),
        )
    }

    /// Antiderivative with zero constant term; fails on a `t^-1` term.
    pub fn integrate(&self) -> Result<Self> {
        if !self.coeff(-1)?.is_zero() {
            return Err(Error::NonzeroResidue);
        }
        let coeffs = (self.min_exp..self.min_exp + self.coeffs.len() as i64)
            .map(|e| {
                if e == -1 {
                    Rat::zero()
                } else {
                    self.coeff(e).unwrap() / Rat::from_integer(BigInt::from(e + 1))
                }
            })
            .collect();
        Ok(Self::new(
            self.variable.clone(),
            self.center.clone(),
            self.min_exp + 1,
            coeffs,
            self.trunc.saturating_add(1),
        ))
    }

    /// `self(inner(t))` for a power series `self` and `inner` of positive valuation.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if self.min_exp < 0 && !self.is_zero() {
            return Err(Error::OutOfRange("outer series has a pole".into()));
        }
        let v = match inner.valuation() {
            Some(v) if v >= 1 => v,
            Some(_) => return Err(Error::OutOfRange("inner series must vanish at 0".into())),
            None => inner.trunc,
        };
        let mut trunc = inner.trunc;
        if self.trunc != EXACT {
            trunc = trunc.min(self.trunc.saturating_mul(v));
        }
        let mut acc = Self::new(inner.variable.clone(), inner.center.clone(), 0, vec![], trunc);
        let mut power = Self::monomial(&inner.variable, &inner.center, Rat::one(), 0);
        let top = self.min_exp + self.coeffs.len() as i64;
        for k in 0..top {
            if k * v >= trunc {
                break;
            }
            if k > 0 {
                power = power.mul(inner).with_trunc(trunc);
            }
            let c = self.coeff(k)?;
            if !c.is_zero() {
                acc = acc.add(&power.scale(&c));
            }
        }
        Ok(acc.with_trunc(trunc))
    }

    /// `log(self)` for a power series with constant term 1.
    pub fn log1p_series(&self) -> Result<Self> {
        if self.coeff(0)? != Rat::one() || self.min_exp < 0 {
            return Err(Error::OutOfRange("log needs constant term 1".into()));
        }
        // log f = ∫ f'/f
        let inv = self.invert(self.trunc)?;
        self.derivative().mul(&inv).integrate()
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c}){}^{e}", self.variable)?;
        }
        if first {
            write!(f, "0")?;
        }
        if self.trunc != EXACT {
            write!(f, " + O({}^{})", self.variable, self.trunc)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::{frac, rat};
    use proptest::prelude::*;

    fn series(min: i64, cs: &[i64], trunc: i64) -> LaurentSeries {
        LaurentSeries::new("t", "0", min, cs.iter().map(|&c| rat(c)).collect(), trunc)
    }

    #[test]
    fn residue_cases() {
        assert_eq!(series(-1, &[1], EXACT).residue().unwrap(), rat(1));
        // 1/t^2 + 3 + t
        assert_eq!(series(-2, &[1, 0, 3, 1], EXACT).residue().unwrap(), rat(0));
        assert!(matches!(
            series(-3, &[1, 2], -1).residue(),
            Err(Error::TruncationInsufficient { .. })
        ));
    }

    #[test]
    fn invert_geometric() {
        // 1/(1 - t) = 1 + t + t^2 + ...
        let s = series(0, &[1, -1], EXACT);
        let inv = s.invert(6).unwrap();
        assert_eq!(inv.trunc(), 6);
        for e in 0..6 {
            assert_eq!(inv.coeff(e).unwrap(), rat(1));
        }
        // 1/(t^2 (2 + t))
        let s = series(2, &[2, 1], 6);
        let inv = s.invert(0).unwrap();
        assert_eq!(inv.min_exp(), -2);
        assert_eq!(inv.trunc(), 2);
        assert_eq!(inv.coeff(-2).unwrap(), frac(1, 2));
        assert_eq!(inv.coeff(-1).unwrap(), frac(-1, 4));
        assert!(series(0, &[], 4).invert(4).is_err());
    }

    #[test]
    fn compose_and_log() {
        // exp-free check: log(1 + t) = t - t^2/2 + t^3/3 ...
        let s = series(0, &[1, 1], 6);
        let l = s.log1p_series().unwrap();
        assert_eq!(l.coeff(1).unwrap(), rat(1));
        assert_eq!(l.coeff(2).unwrap(), frac(-1, 2));
        assert_eq!(l.coeff(5).unwrap(), frac(1, 5));
        // (1 + s)^2 at s = t + t^2
        let outer = series(0, &[1, 2, 1], EXACT);
        let inner = series(1, &[1, 1], 5);
        let c = outer.compose(&inner).unwrap();
        // 1 + 2t + 3t^2 + 2t^3 + t^4
        for (e, v) in [(0, 1), (1, 2), (2, 3), (3, 2), (4, 1)] {
            assert_eq!(c.coeff(e).unwrap(), rat(v));
        }
    }

    fn arb_series() -> impl Strategy<Value = LaurentSeries> {
        (-5i64..3, proptest::collection::vec(-4i64..5, 1..7), 2i64..9)
            .prop_map(|(min, cs, len)| series(min, &cs, min + len))
    }

    proptest! {
        #[test]
        fn mul_commutative(a in arb_series(), b in arb_series()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
        }

        #[test]
        fn mul_associative(a in arb_series(), b in arb_series(), c in arb_series()) {
            let l = a.mul(&b).mul(&c);
            let r = a.mul(&b.mul(&c));
            let t = l.trunc().min(r.trunc());
            prop_assert_eq!(l.with_trunc(t), r.with_trunc(t));
        }

        #[test]
        fn total_derivative_has_no_residue(a in arb_series()) {
            let d = a.derivative();
            if d.trunc() > -1 {
                prop_assert_eq!(d.residue().unwrap(), rat(0));
            }
        }
    }
}
