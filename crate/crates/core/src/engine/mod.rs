//! Recursive evaluator for descendant invariants of `P^N`.

mod cache;
mod key;
mod trr;
mod wdvv;

use std::collections::HashMap;

use num_traits::Zero;
use once_cell::sync::Lazy;
use parking_lot::RwLock;

use crate::arith::rat::{c_factor, Rat};
use crate::arith::SymRat;
use crate::error::{Error, Result};

pub use key::{degree_of, Insertion, InvariantKey};
pub use trr::{BracketKey, Trr0Term, TrrgTerm};

/// Which reduction the dispatcher applies to a key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    DimensionZero,
    DegreeZeroGenusZero,
    SmallGenusZero,
    String,
    Divisor,
    Dilaton,
    Trr0,
    Wdvv,
    Genus1Trr,
    TrrG,
    Atom,
}

type BracketMemo = HashMap<BracketKey, Rat>;

/// Memoizing evaluator. Entries are written once and never change.
#[derive(Default)]
pub struct Engine {
    cache: RwLock<HashMap<InvariantKey, SymRat>>,
    wdvv: RwLock<HashMap<(u32, Vec<u32>), Rat>>,
    brackets: RwLock<BracketMemo>,
}

static GLOBAL: Lazy<Engine> = Lazy::new(Engine::new);

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    /// A process-wide shared engine.
    pub fn global() -> &'static Engine {
        &GLOBAL
    }

    pub fn cache_len(&self) -> usize {
        self.cache.read().len()
    }

    pub fn cached(&self, key: &InvariantKey) -> Option<SymRat> {
        self.cache.read().get(key).cloned()
    }

    pub fn invariant(&self, key: &InvariantKey) -> Result<SymRat> {
        key.validate()?;
        if let Some(v) = self.cache.read().get(key) {
            return Ok(v.clone());
        }
        let v = stacker::maybe_grow(256 * 1024, 16 << 20, || self.compute(key))?;
        self.cache
            .write()
            .entry(key.clone())
            .or_insert_with(|| v.clone());
        Ok(v)
    }

    /// Value of a key that must be atom-free (every genus-zero key is).
    pub fn rational(&self, key: &InvariantKey) -> Result<Rat> {
        let v = self.invariant(key)?;
        match v.as_rat() {
            Some(r) => Ok(r.clone()),
            None => Err(Error::OutOfRange(format!("{key} carries atoms: {v}"))),
        }
    }

    /// The dispatch decision for `key`, first match wins.
    pub fn rule_for(&self, key: &InvariantKey) -> Rule {
        let n_target = key.n_target;
        let Some(d) = degree_of(key) else {
            return Rule::DimensionZero;
        };
        if key.g == 0 && d == 0 {
            return Rule::DegreeZeroGenusZero;
        }
        if key.g == 0 && key.n() <= 2 {
            return Rule::SmallGenusZero;
        }
        // reducing one insertion must leave a meaningful bracket
        let reducible = key.euler() - 1 > 0 || (d > 0 && key.n() >= 2);
        if reducible {
            if key.position(Insertion::new(0, 0)).is_some() {
                return Rule::String;
            }
            if n_target >= 1 && key.position(Insertion::new(0, 1)).is_some() {
                return Rule::Divisor;
            }
            if key.position(Insertion::new(1, 0)).is_some() {
                return Rule::Dilaton;
            }
        }
        let max_m = key.insertions().iter().map(|i| i.m).max().unwrap_or(0);
        match key.g {
            0 if max_m >= 1 => Rule::Trr0,
            0 => Rule::Wdvv,
            1 if max_m >= 1 => Rule::Genus1Trr,
            g if g >= 2 && max_m >= 3 * g - 1 => Rule::TrrG,
            _ => Rule::Atom,
        }
    }

    fn compute(&self, key: &InvariantKey) -> Result<SymRat> {
        let rule = self.rule_for(key);
        match rule {
            Rule::DimensionZero => Ok(SymRat::zero()),
            Rule::DegreeZeroGenusZero => Ok(SymRat::from_rat(degree_zero_genus_zero(key)?)),
            Rule::SmallGenusZero => Ok(SymRat::from_rat(self.small_genus_zero(key)?)),
            Rule::String => self.string_reduce(key),
            Rule::Divisor => self.divisor_reduce(key),
            Rule::Dilaton => {
                let idx = key.position(Insertion::new(1, 0)).unwrap();
                let rest = key.without(idx);
                Ok(self.invariant(&rest)?.scale(&Rat::from_integer(rest.euler().into())))
            }
            Rule::Trr0 => {
                let terms = self.trr0_expand(key, pivot_index(key))?;
                self.sum_trr0(&terms).map(SymRat::from_rat)
            }
            Rule::Wdvv => {
                let ks: Vec<u32> = key.insertions().iter().map(|i| i.k).collect();
                Ok(SymRat::from_rat(self.wdvv_primary(key.n_target, &ks)?))
            }
            Rule::Genus1Trr => self.genus1_trr(key, pivot_index(key)),
            Rule::TrrG => {
                let terms = self.trrg_expand(key, pivot_index(key))?;
                self.sum_trrg(&terms)
            }
            Rule::Atom => Ok(SymRat::atom(key.to_string())),
        }
    }

    /// `⟨τ_0(1) Π⟩ = Σ_i ⟨… τ_{m_i - 1}(γ_i) …⟩`.
    fn string_reduce(&self, key: &InvariantKey) -> Result<SymRat> {
        let rest = key.without(key.position(Insertion::new(0, 0)).unwrap());
        let mut acc = SymRat::zero();
        for (i, ins) in rest.insertions().iter().enumerate() {
            if ins.m > 0 {
                acc += &self.invariant(&rest.replaced(i, Insertion::new(ins.m - 1, ins.k)))?;
            }
        }
        Ok(acc)
    }

    /// `⟨τ_0(ω) Π⟩ = d⟨Π⟩ + Σ_i ⟨… τ_{m_i - 1}(γ_i ∪ ω) …⟩`.
    fn divisor_reduce(&self, key: &InvariantKey) -> Result<SymRat> {
        let d = degree_of(key).unwrap();
        let rest = key.without(key.position(Insertion::new(0, 1)).unwrap());
        let mut acc = if d == 0 {
            SymRat::zero()
        } else {
            self.invariant(&rest)?.scale(&Rat::from_integer(d.into()))
        };
        acc += &self.divisor_corrections(&rest)?;
        Ok(acc)
    }

    fn divisor_corrections(&self, rest: &InvariantKey) -> Result<SymRat> {
        let mut acc = SymRat::zero();
        for (i, ins) in rest.insertions().iter().enumerate() {
            if ins.m > 0 && ins.k < rest.n_target {
                acc += &self.invariant(&rest.replaced(i, Insertion::new(ins.m - 1, ins.k + 1)))?;
            }
        }
        Ok(acc)
    }

    /// Genus zero, one or two insertions, positive degree.
    fn small_genus_zero(&self, key: &InvariantKey) -> Result<Rat> {
        let n_target = key.n_target;
        let d = degree_of(key).unwrap();
        let ins = key.insertions();
        let c = |m: u32| c_factor(n_target + 1, m);
        let dr = Rat::from_integer(d.into());
        match ins {
            [a] if a.k == n_target => Ok((c(a.m) * &dr * &dr).recip()),
            [a, b] if a.k == n_target && b.k == n_target => Ok((c(a.m) * c(b.m) * dr).recip()),
            [a, b] if (a.k == n_target && b.m == 0) || (b.k == n_target && a.m == 0) => {
                let m = if a.k == n_target && b.m == 0 { a.m } else { b.m };
                Ok(c(m + 1).recip())
            }
            _ => {
                // invert the divisor equation on the bracket with τ_0(ω) added
                let aug = key.with(Insertion::new(0, 1));
                let top = if aug.n() == 3 {
                    self.genus_zero_three_direct(&aug)?
                } else {
                    self.rational(&aug)?
                };
                let corr = self.divisor_corrections(key)?;
                let corr = corr.as_rat().cloned().unwrap_or_else(Rat::zero);
                Ok((top - corr) / dr)
            }
        }
    }

    /// A genus-zero three-point bracket evaluated without the divisor rule.
    fn genus_zero_three_direct(&self, key: &InvariantKey) -> Result<Rat> {
        if degree_of(key).is_none() {
            return Ok(Rat::zero());
        }
        if degree_of(key) == Some(0) {
            return degree_zero_genus_zero(key);
        }
        if key.insertions().iter().any(|i| i.m >= 1) {
            let terms = self.trr0_expand(key, pivot_index(key))?;
            self.sum_trr0(&terms)
        } else {
            let ks: Vec<u32> = key.insertions().iter().map(|i| i.k).collect();
            self.wdvv_primary(key.n_target, &ks)
        }
    }

    /// Non-stationary genus-zero bracket `⟨τ_m(1) τ_0(pt)²⟩ · c_2(m)` on `P^1`.
    pub fn counterexample_f(&self, m: u32) -> Result<Rat> {
        if m < 1 || m % 2 == 0 {
            return Err(Error::OutOfRange(format!(
                "f(m) needs odd m >= 1 for a non-negative integer degree, got {m}"
            )));
        }
        let key = InvariantKey::from_pairs(1, 0, &[(m, 0), (0, 1), (0, 1)]);
        Ok(self.rational(&key)? * c_factor(2, m))
    }
}

/// Degree-zero genus-zero brackets: `∫ Π ψ^{m_i}` times `∫ ω^{Σk}`.
fn degree_zero_genus_zero(key: &InvariantKey) -> Result<Rat> {
    let ks: u32 = key.insertions().iter().map(|i| i.k).sum();
    if key.n() < 3 || ks != key.n_target {
        return Ok(Rat::zero());
    }
    let ms: Vec<u32> = key.insertions().iter().map(|i| i.m).collect();
    crate::psi::psi_intersection(0, &ms)
}

/// Maximal `m`, then minimal `k`, then first in canonical order.
pub fn pivot_index(key: &InvariantKey) -> usize {
    let ins = key.insertions();
    let max_m = ins.iter().map(|i| i.m).max().unwrap_or(0);
    ins.iter().position(|i| i.m == max_m).unwrap_or(0)
}



#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::{frac, rat};

    fn val(e: &Engine, n: u32, g: u32, pairs: &[(u32, u32)]) -> SymRat {
        e.invariant(&InvariantKey::from_pairs(n, g, pairs)).unwrap()
    }

    #[test]
    fn spec_examples() {
        let e = Engine::new();
        assert_eq!(val(&e, 1, 0, &[(0, 1)]), rat(1).into());
        assert_eq!(val(&e, 1, 0, &[(2, 1)]), frac(1, 4).into());
        assert_eq!(val(&e, 1, 0, &[(1, 1), (1, 1)]), frac(1, 2).into());
        assert_eq!(val(&e, 1, 0, &[(0, 1), (0, 1), (0, 1)]), rat(1).into());
        assert_eq!(
            val(&e, 1, 1, &[(0, 1)]),
            SymRat::atom("gw[N=1;g=1;ins=(0,1)]")
        );
        assert!(matches!(
            e.invariant(&InvariantKey::from_pairs(1, 0, &[(0, 2)])),
            Err(Error::InvalidExponent { .. })
        ));
    }

    #[test]
    fn euler_characteristic_over_24() {
        let e = Engine::new();
        for n in 1..=4u32 {
            assert_eq!(val(&e, n, 1, &[(1, 0)]), frac(n as i64 + 1, 24).into());
        }
    }

    #[test]
    fn plane_conics_and_cubics() {
        let e = Engine::new();
        assert_eq!(val(&e, 2, 0, &[(0, 2); 5]), rat(1).into());
        assert_eq!(val(&e, 2, 0, &[(0, 2); 8]), rat(12).into());
        assert_eq!(val(&e, 3, 0, &[(0, 3), (0, 2), (0, 2)]), rat(1).into());
    }

    #[test]
    fn counterexample_values() {
        let e = Engine::new();
        assert_eq!(e.counterexample_f(1).unwrap(), rat(0));
        // J-function of P^1: ⟨τ_{2e-1}(1)⟩_{0,e} = -2 H_e / e!^2, so f = -2 D H_{D-1}
        let mut h = rat(0);
        for dd in 2..=8i64 {
            h += frac(1, dd - 1);
            let m = (2 * dd - 1) as u32;
            assert_eq!(e.counterexample_f(m).unwrap(), -rat(2 * dd) * &h);
        }
        assert!(e.counterexample_f(4).is_err());
    }
}
