use num_traits::{One, Zero};

use super::trr::splits;
use super::{degree_of, Engine, InvariantKey};
use crate::arith::rat::Rat;
use crate::error::{Error, Result};

fn primary_degree(n_target: u32, ks: &[u32]) -> Option<u32> {
    degree_of(&InvariantKey::from_pairs(
        n_target,
        0,
        &ks.iter().map(|&k| (0, k)).collect::<Vec<_>>(),
    ))
}

impl Engine {
    /// Genus-zero primary invariant `⟨Π τ_0(ω^{k_i})⟩_0` from associativity,
    /// independent of the descendant recursions.
    pub fn wdvv_primary(&self, n_target: u32, ks: &[u32]) -> Result<Rat> {
        if let Some(&k) = ks.iter().find(|&&k| k > n_target) {
            return Err(Error::InvalidExponent { k, n: n_target });
        }
        let mut ks = ks.to_vec();
        ks.sort_unstable();
        self.wdvv_sorted(n_target, ks)
    }

    fn wdvv_sorted(&self, n_target: u32, ks: Vec<u32>) -> Result<Rat> {
        let Some(d) = primary_degree(n_target, &ks) else {
            return Ok(Rat::zero());
        };
        let n = ks.len();
        if d == 0 {
            let s: u32 = ks.iter().sum();
            return Ok(if n == 3 && s == n_target { Rat::one() } else { Rat::zero() });
        }
        if n <= 2 {
            // ⟨pt pt⟩ in degree one, or ⟨pt⟩ on the line
            let all_pt = ks.iter().all(|&k| k == n_target);
            return Ok(if all_pt && d == 1 { Rat::one() } else { Rat::zero() });
        }
        let memo_key = (n_target, ks.clone());
        if let Some(v) = self.wdvv.read().get(&memo_key) {
            return Ok(v.clone());
        }
        let v = if ks[0] == 0 {
            Rat::zero()
        } else if ks[0] == 1 {
            Rat::from_integer(d.into()) * self.wdvv_sorted(n_target, ks[1..].to_vec())?
        } else {
            self.wdvv_associativity(n_target, &ks)?
        };
        self.wdvv.write().insert(memo_key, v.clone());
        Ok(v)
    }

    fn wdvv_at(&self, n_target: u32, parts: &[&[u32]]) -> Result<Rat> {
        let mut ks = parts.concat();
        ks.sort_unstable();
        self.wdvv_sorted(n_target, ks)
    }

    /// Solves `⟨ω^p γ_2 γ_3 S⟩` from the relation with `a = ω`, `b = ω^{p-1}`.
    fn wdvv_associativity(&self, n_target: u32, ks: &[u32]) -> Result<Rat> {
        let p = ks[0];
        let c = ks[ks.len() - 1];
        let e = ks[1];
        let rest = &ks[2..ks.len() - 1];
        let mut lhs = Rat::zero();
        let mut rhs = Rat::zero();
        for (s1, s2) in splits(rest) {
            for j in 0..=n_target {
                let dual = n_target - j;
                if !(s1.is_empty() && j == n_target - p) {
                    let a = self.wdvv_at(n_target, &[&[1, p - 1, j], &s1])?;
                    if !a.is_zero() {
                        lhs += a * self.wdvv_at(n_target, &[&[dual, c, e], &s2])?;
                    }
                }
                let a = self.wdvv_at(n_target, &[&[1, c, j], &s1])?;
                if !a.is_zero() {
                    rhs += a * self.wdvv_at(n_target, &[&[dual, p - 1, e], &s2])?;
                }
            }
        }
        Ok(rhs - lhs)
    }
}
