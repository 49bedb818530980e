//! The curve `x = z + 1/z`, `y = ln z` (through a polynomial truncation) and
//! its local charts at the branch points `z = ±1`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::laurent::{LaurentSeries, EXACT};
use crate::arith::rat::{frac, rat, Rat};
use crate::error::{Error, Result};

pub const BRANCH_POINTS: [i8; 2] = [1, -1];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralCurve {
    /// `y_N(z) = Σ_{k=1}^{N} (1 - z²)^k / (-2k)`.
    pub y_truncation: u32,
}

impl SpectralCurve {
    pub fn new(y_truncation: u32) -> Self {
        SpectralCurve { y_truncation }
    }

    /// Smallest truncation from which `ω^g_n` no longer changes. At
    /// `6g - 6 + 2n` itself the result still differs.
    pub fn minimal_truncation(g: u32, n: usize) -> u32 {
        (6 * g as i64 - 5 + 2 * n as i64).max(1) as u32
    }

    pub fn check_supports(&self, g: u32, n: usize) -> Result<()> {
        let need = Self::minimal_truncation(g, n);
        if self.y_truncation < need {
            return Err(Error::TruncationInsufficient {
                needed: need as i64,
                trunc: self.y_truncation as i64,
            });
        }
        Ok(())
    }

    pub fn x_at(z: &Rat) -> Rat {
        z + z.recip()
    }

    pub fn y_at(&self, z: &Rat) -> Rat {
        let q = Rat::one() - z * z;
        let mut acc = Rat::zero();
        let mut p = Rat::one();
        for k in 1..=self.y_truncation as i64 {
            p *= &q;
            acc += &p / rat(-2 * k);
        }
        acc
    }

    /// Chart at `alpha` whose inexact series are known below `t^trunc`.
    pub fn chart(&self, alpha: i8, trunc: i64) -> Chart {
        Chart {
            alpha,
            trunc,
            y_truncation: self.y_truncation,
        }
    }
}

/// Local variable `t = z - alpha`.
#[derive(Clone, Copy, Debug)]
pub struct Chart {
    pub alpha: i8,
    pub trunc: i64,
    y_truncation: u32,
}

impl Chart {
    fn center(&self) -> &'static str {
        if self.alpha > 0 {
            "1"
        } else {
            "-1"
        }
    }

    pub fn exact(&self, min_exp: i64, coeffs: Vec<Rat>) -> LaurentSeries {
        LaurentSeries::new("t", self.center(), min_exp, coeffs, EXACT)
    }

    pub fn monomial(&self, c: Rat, e: i64) -> LaurentSeries {
        LaurentSeries::monomial("t", self.center(), c, e)
    }

    pub fn one(&self) -> LaurentSeries {
        self.monomial(Rat::one(), 0)
    }

    pub fn z(&self) -> LaurentSeries {
        self.exact(0, vec![rat(self.alpha as i64), Rat::one()])
    }

    pub fn z_inv(&self) -> LaurentSeries {
        self.z().invert(self.trunc).expect("z is a unit at ±1")
    }

    /// `1/z - alpha`, of valuation one.
    pub fn u(&self) -> LaurentSeries {
        self.z_inv().sub(&self.monomial(rat(self.alpha as i64), 0))
    }

    pub fn x(&self) -> LaurentSeries {
        self.z().add(&self.z_inv())
    }

    /// `dx/dz = 1 - z^-2`.
    pub fn dx(&self) -> LaurentSeries {
        self.one().sub(&self.z_inv().pow(2).with_trunc(self.trunc))
    }

    fn y_of(&self, q: &LaurentSeries) -> LaurentSeries {
        let mut acc = self.exact(0, vec![]);
        let mut p = self.one();
        for k in 1..=self.y_truncation as i64 {
            p = p.mul(q).with_trunc(self.trunc);
            acc = acc.add(&p.scale(&frac(-1, 2 * k)));
        }
        acc.with_trunc(self.trunc)
    }

    pub fn y(&self) -> LaurentSeries {
        let q = self.one().sub(&self.z().pow(2));
        self.y_of(&q)
    }

    pub fn y_hat(&self) -> LaurentSeries {
        let q = self.one().sub(&self.z_inv().pow(2).with_trunc(self.trunc));
        self.y_of(&q)
    }

    /// `(z - beta)^-k`.
    pub fn leg_z(&self, beta: i8, k: u32) -> LaurentSeries {
        if beta == self.alpha {
            self.monomial(Rat::one(), -(k as i64))
        } else {
            let base = self.exact(0, vec![rat(2 * self.alpha as i64), Rat::one()]);
            base.invert(self.trunc).expect("unit").pow(k).with_trunc(self.trunc)
        }
    }

    /// `(1/z - beta)^-k · d(1/z)/dz = -(-beta)^k z^(k-2) (z - beta)^-k`.
    pub fn leg_zhat(&self, beta: i8, k: u32) -> LaurentSeries {
        let sign = if beta > 0 && k % 2 == 1 { rat(1) } else { rat(-1) };
        let zp = if k >= 2 {
            self.z().pow(k - 2)
        } else {
            self.z_inv().pow(2 - k).with_trunc(self.trunc)
        };
        zp.mul(&self.leg_z(beta, k)).with_trunc(self.trunc).scale(&sign)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_matches_log_locally() {
        let c = SpectralCurve::new(8).chart(1, 10);
        // ln(1 + t) = t - t²/2 + t³/3 - …
        let y = c.y();
        assert_eq!(y.coeff(1).unwrap(), rat(1));
        assert_eq!(y.coeff(2).unwrap(), frac(-1, 2));
        assert_eq!(y.coeff(5).unwrap(), frac(1, 5));
        let yy = y.add(&c.y_hat());
        for e in 0..8 {
            assert!(yy.coeff(e).unwrap().is_zero());
        }
    }

    #[test]
    fn leg_zhat_is_pullback() {
        // at alpha = 1, beta = -1, k = 2: d(1/z)/(1/z + 1)² = -dz/(z + 1)²
        let c = SpectralCurve::new(4).chart(1, 8);
        let a = c.leg_zhat(-1, 2);
        let b = c.leg_z(-1, 2).scale(&rat(-1));
        for e in 0..6 {
            assert_eq!(a.coeff(e).unwrap(), b.coeff(e).unwrap());
        }
    }

    #[test]
    fn y_numeric() {
        let c = SpectralCurve::new(3);
        // q = 1 - 4 = -3: -3/-2 + 9/-4 + -27/-6
        assert_eq!(c.y_at(&rat(2)), frac(3, 2) - frac(9, 4) + frac(9, 2));
    }
}
