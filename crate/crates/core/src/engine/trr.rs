use num_traits::Zero;

use super::{degree_of, Engine, Insertion, InvariantKey};
use crate::arith::rat::{frac, Rat};
use crate::arith::SymRat;
use crate::error::{Error, Result};

/// `coeff · ⟨left⟩_0 · ⟨right⟩_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trr0Term {
    pub coeff: Rat,
    pub left: InvariantKey,
    pub right: InvariantKey,
}

/// `coeff · bracket · ⟨higher⟩_g`, `bracket` being a genus-zero chain value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrrgTerm {
    pub coeff: Rat,
    pub bracket: SymRat,
    pub higher: InvariantKey,
}

/// Memo key of a chain bracket: `(N, j, pivot, sorted extras, β)`.
pub type BracketKey = (u32, u32, Insertion, Vec<Insertion>, u32);

/// All labelled splittings of `items` into two parts.
pub(crate) fn splits<T: Clone>(items: &[T]) -> Vec<(Vec<T>, Vec<T>)> {
    let n = items.len();
    (0u64..(1u64 << n))
        .map(|mask| {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for (i, x) in items.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    a.push(x.clone());
                } else {
                    b.push(x.clone());
                }
            }
            (a, b)
        })
        .collect()
}

fn key_of(n_target: u32, g: u32, parts: &[&[Insertion]]) -> InvariantKey {
    InvariantKey::new(n_target, g, parts.concat())
}

impl Engine {
    /// Genus-zero recursion on the pivot `τ_m(γ_1)`, co-pivots the first two
    /// remaining insertions.
    pub fn trr0_expand(&self, key: &InvariantKey, pivot: usize) -> Result<Vec<Trr0Term>> {
        let n_target = key.n_target;
        let ins = key.insertions();
        if key.g != 0 || ins.len() < 3 {
            return Err(Error::OutOfRange(format!("trr0 needs genus 0, n >= 3: {key}")));
        }
        let p = ins[pivot];
        if p.m == 0 {
            return Err(Error::PivotZeroLevel);
        }
        let others: Vec<Insertion> = ins
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != pivot)
            .map(|(_, &x)| x)
            .collect();
        let (co, rest) = others.split_at(2);
        let lowered = Insertion::new(p.m - 1, p.k);
        let mut out = Vec::new();
        for (u, v) in splits(rest) {
            let mut found: Vec<u32> = Vec::new();
            for j in 0..=n_target {
                let left = key_of(n_target, 0, &[&[lowered, Insertion::new(0, j)], &u]);
                let right = key_of(n_target, 0, &[&[Insertion::new(0, n_target - j)], co, &v]);
                if degree_of(&left).is_some() && degree_of(&right).is_some() {
                    found.push(j);
                    out.push(Trr0Term {
                        coeff: Rat::from_integer(1.into()),
                        left,
                        right,
                    });
                }
            }
            if found.len() > 1 {
                return Err(Error::SplittingNotUnique(found));
            }
        }
        Ok(out)
    }

    pub(crate) fn sum_trr0(&self, terms: &[Trr0Term]) -> Result<Rat> {
        let mut acc = Rat::zero();
        for t in terms {
            let a = self.rational(&t.left)?;
            if a.is_zero() {
                continue;
            }
            acc += &t.coeff * a * self.rational(&t.right)?;
        }
        Ok(acc)
    }

    /// `⟨⟨τ_{m+1}(γ)⟩⟩_1 = ⟨⟨τ_m(γ) T_j⟩⟩_0 ⟨⟨T^j⟩⟩_1 + (1/24) ⟨⟨T_j T^j τ_m(γ)⟩⟩_0`.
    pub(crate) fn genus1_trr(&self, key: &InvariantKey, pivot: usize) -> Result<SymRat> {
        let n_target = key.n_target;
        let ins = key.insertions();
        let p = ins[pivot];
        if p.m == 0 {
            return Err(Error::PivotZeroLevel);
        }
        let lowered = Insertion::new(p.m - 1, p.k);
        let rest: Vec<Insertion> = ins
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != pivot)
            .map(|(_, &x)| x)
            .collect();
        let mut acc = SymRat::zero();
        for (u, v) in splits(&rest) {
            for j in 0..=n_target {
                let low = key_of(n_target, 0, &[&[lowered, Insertion::new(0, j)], &u]);
                let high = key_of(n_target, 1, &[&[Insertion::new(0, n_target - j)], &v]);
                if degree_of(&low).is_none() || degree_of(&high).is_none() {
                    continue;
                }
                let a = self.rational(&low)?;
                if !a.is_zero() {
                    acc += &self.invariant(&high)?.scale(&a);
                }
            }
        }
        let mut loop_term = Rat::zero();
        for j in 0..=n_target {
            let k = key_of(
                n_target,
                0,
                &[&[Insertion::new(0, j), Insertion::new(0, n_target - j), lowered], &rest],
            );
            loop_term += self.rational(&k)?;
        }
        acc += &SymRat::from_rat(loop_term * frac(1, 24));
        Ok(acc)
    }

    /// The genus-zero chain `⟨⟨T^j τ_m(γ)⟩⟩_(β)` with `extras` spread over
    /// its factors, computed by the alternating sum and by the recursion;
    /// the two must agree.
    pub fn beta_bracket(
        &self,
        n_target: u32,
        j: u32,
        pivot: Insertion,
        extras: &[Insertion],
        beta: i64,
    ) -> Result<Rat> {
        if beta < 0 {
            return Err(Error::OutOfRange(format!("negative beta {beta}")));
        }
        let mut sorted = extras.to_vec();
        sorted.sort_unstable();
        let memo_key = (n_target, j, pivot, sorted, beta as u32);
        if let Some(v) = self.brackets.read().get(&memo_key) {
            return Ok(v.clone());
        }
        let a = self.bracket_by_chains(n_target, j, pivot, extras, beta as u32)?;
        let b = self.bracket_by_recursion(n_target, j, pivot, extras, beta as u32)?;
        if a != b {
            return Err(Error::RouteMismatch(format!(
                "beta bracket N={n_target} j={j} pivot={pivot} extras={extras:?} beta={beta}: {a} vs {b}"
            )));
        }
        self.brackets.write().insert(memo_key, a.clone());
        Ok(a)
    }

    pub fn bracket_by_chains(
        &self,
        n_target: u32,
        j: u32,
        pivot: Insertion,
        extras: &[Insertion],
        beta: u32,
    ) -> Result<Rat> {
        self.chain_step(n_target, n_target - j, pivot, extras, beta as i64 + 1)
    }

    /// Sum over chain continuations whose first factor carries `ω^{head}`,
    /// with `budget = Σ (1 + m_i)` still to be spent.
    fn chain_step(
        &self,
        n_target: u32,
        head: u32,
        pivot: Insertion,
        extras: &[Insertion],
        budget: i64,
    ) -> Result<Rat> {
        // last factor takes everything remaining
        let last = key_of(
            n_target,
            0,
            &[&[Insertion::new(0, head), Insertion::new(pivot.m + budget as u32 - 1, pivot.k)], extras],
        );
        let mut acc = self.rational(&last)?;
        for mi in 0..=(budget - 2).max(-1) {
            for a in 0..=n_target {
                for (here, later) in splits(extras) {
                    let f = key_of(
                        n_target,
                        0,
                        &[&[Insertion::new(0, head), Insertion::new(mi as u32, a)], &here],
                    );
                    if degree_of(&f).is_none() {
                        continue;
                    }
                    let v = self.rational(&f)?;
                    if v.is_zero() {
                        continue;
                    }
                    let tail = self.chain_step(n_target, n_target - a, pivot, &later, budget - 1 - mi)?;
                    acc -= v * tail;
                }
            }
        }
        Ok(acc)
    }

    pub fn bracket_by_recursion(
        &self,
        n_target: u32,
        j: u32,
        pivot: Insertion,
        extras: &[Insertion],
        beta: u32,
    ) -> Result<Rat> {
        if beta == 0 {
            let k = key_of(n_target, 0, &[&[Insertion::new(0, n_target - j), pivot], extras]);
            return self.rational(&k);
        }
        let raised = Insertion::new(pivot.m + 1, pivot.k);
        let mut acc = self.bracket_by_recursion(n_target, j, raised, extras, beta - 1)?;
        for (s1, s2) in splits(extras) {
            for i in 0..=n_target {
                let g0 = key_of(n_target, 0, &[&[Insertion::new(0, n_target - i), pivot], &s1]);
                if degree_of(&g0).is_none() {
                    continue;
                }
                let v = self.rational(&g0)?;
                if v.is_zero() {
                    continue;
                }
                acc -= v * self.bracket_by_recursion(n_target, j, Insertion::new(0, i), &s2, beta - 1)?;
            }
        }
        Ok(acc)
    }

    /// `⟨⟨τ_{m+3g-1}(γ)⟩⟩_g = Σ_{α+β=3g-2} ⟨⟨τ_α(T_k)⟩⟩_g ⟨⟨T^k τ_m(γ)⟩⟩_(β)`.
    pub fn trrg_expand(&self, key: &InvariantKey, pivot: usize) -> Result<Vec<TrrgTerm>> {
        let n_target = key.n_target;
        let g = key.g;
        if g == 0 {
            return Err(Error::OutOfRange("trrg needs positive genus".into()));
        }
        let ins = key.insertions();
        let p = ins[pivot];
        let threshold = 3 * g - 1;
        if p.m < threshold {
            return Err(Error::PivotBelowThreshold { m: p.m, threshold });
        }
        let lowered = Insertion::new(p.m - threshold, p.k);
        let rest: Vec<Insertion> = ins
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != pivot)
            .map(|(_, &x)| x)
            .collect();
        let mut out = Vec::new();
        for (u, v) in splits(&rest) {
            for alpha in 0..=(3 * g - 2) {
                let beta = 3 * g - 2 - alpha;
                for k in 0..=n_target {
                    let higher = key_of(n_target, g, &[&[Insertion::new(alpha, k)], &u]);
                    if degree_of(&higher).is_none() {
                        continue;
                    }
                    let b = self.beta_bracket(n_target, k, lowered, &v, beta as i64)?;
                    if b.is_zero() {
                        continue;
                    }
                    out.push(TrrgTerm {
                        coeff: Rat::from_integer(1.into()),
                        bracket: SymRat::from_rat(b),
                        higher,
                    });
                }
            }
        }
        Ok(out)
    }

    pub(crate) fn sum_trrg(&self, terms: &[TrrgTerm]) -> Result<SymRat> {
        let mut acc = SymRat::zero();
        for t in terms {
            let v = self.invariant(&t.higher)?;
            acc += &v.try_mul(&t.bracket)?.scale(&t.coeff);
        }
        Ok(acc)
    }
}
