//! Intersection numbers of psi classes on moduli of stable curves, the
//! degree-d point invariants and the polynomials they generate.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use parking_lot::RwLock;

use crate::arith::{MultiPoly, QuasiPoly, Rat, SymRat};
use crate::arith::rat::{binomial, factorial};
use crate::error::{Error, Result};

static MEMO: Lazy<RwLock<HashMap<(u32, Vec<u32>), Rat>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

fn stable(g: u32, n: usize) -> bool {
    2 * g as i64 - 2 + n as i64 > 0
}

fn double_factorial_odd(k: i64) -> BigInt {
    // (k)!! for odd k >= -1
    let mut acc = BigInt::one();
    let mut j = k;
    while j > 1 {
        acc *= j;
        j -= 2;
    }
    acc
}

/// `∫ ψ_1^{β_1} ⋯ ψ_n^{β_n}` over the moduli space of genus `g` curves.
pub fn psi_intersection(g: u32, beta: &[u32]) -> Result<Rat> {
    if !stable(g, beta.len()) {
        return Err(Error::Unstable { g, n: beta.len() });
    }
    let mut b = beta.to_vec();
    b.sort_unstable();
    Ok(psi_sorted(g, b))
}

fn psi_or_zero(g: u32, beta: Vec<u32>) -> Rat {
    if stable(g, beta.len()) {
        let mut b = beta;
        b.sort_unstable();
        psi_sorted(g, b)
    } else {
        Rat::zero()
    }
}

fn psi_sorted(g: u32, beta: Vec<u32>) -> Rat {
    let n = beta.len() as i64;
    let total: i64 = beta.iter().map(|&b| b as i64).sum();
    if total != 3 * g as i64 - 3 + n {
        return Rat::zero();
    }
    if g == 0 && n == 3 {
        return Rat::one();
    }
    if g == 1 && n == 1 {
        return Rat::new(1.into(), 24.into());
    }
    let key = (g, beta);
    if let Some(v) = MEMO.read().get(&key) {
        return v.clone();
    }
    let (g, beta) = key;
    let v = if beta[0] == 0 {
        // string equation
        let rest = &beta[1..];
        let mut acc = Rat::zero();
        for i in 0..rest.len() {
            if rest[i] > 0 {
                let mut r = rest.to_vec();
                r[i] -= 1;
                acc += psi_or_zero(g, r);
            }
        }
        acc
    } else {
        stacker::maybe_grow(64 * 1024, 1 << 20, || dvv(g, &beta))
    };
    MEMO.write().insert((g, beta), v.clone());
    v
}

/// Virasoro recursion on the largest exponent.
fn dvv(g: u32, beta: &[u32]) -> Rat {
    let (&top, others) = beta.split_last().unwrap();
    let k = top as i64 - 1;
    let mut acc = Rat::zero();
    for j in 0..others.len() {
        let dj = others[j] as i64;
        let c = Rat::new(
            double_factorial_odd(2 * k + 2 * dj + 1),
            double_factorial_odd(2 * dj - 1),
        );
        let mut r = others.to_vec();
        r[j] += k as u32;
        acc += c * psi_or_zero(g, r);
    }
    let half = Rat::new(1.into(), 2.into());
    for r in 0..k {
        let s = k - 1 - r;
        let c = Rat::from_integer(double_factorial_odd(2 * r + 1) * double_factorial_odd(2 * s + 1));
        if g >= 1 {
            let mut v = others.to_vec();
            v.push(r as u32);
            v.push(s as u32);
            acc += &half * &c * psi_or_zero(g - 1, v);
        }
        let n = others.len();
        for mask in 0u64..(1u64 << n) {
            let (mut i1, mut i2) = (vec![r as u32], vec![s as u32]);
            for (t, &d) in others.iter().enumerate() {
                if mask >> t & 1 == 1 {
                    i1.push(d);
                } else {
                    i2.push(d);
                }
            }
            for g1 in 0..=g {
                let a = psi_or_zero(g1, i1.clone());
                if a.is_zero() {
                    continue;
                }
                let b = psi_or_zero(g - g1, i2.clone());
                acc += &half * &c * a * b;
            }
        }
    }
    acc / Rat::from_integer(double_factorial_odd(2 * k + 3))
}

/// `(1/d!)·⟨τ_{m_1} ⋯ τ_{m_n} τ_0^d⟩_g`.
pub fn point_invariant(g: u32, m: &[u32], d: u32) -> Result<Rat> {
    let n = m.len();
    if !stable(g, n + d as usize) {
        return Err(Error::Unstable { g, n: n + d as usize });
    }
    if !stable(g, n) {
        // The n marked points alone are unstable: use the definition directly.
        let mut beta = m.to_vec();
        beta.extend(std::iter::repeat_n(0, d as usize));
        return Ok(psi_intersection(g, &beta)? / Rat::from_integer(factorial(d as u64)));
    }
    let a = point_by_formula(g, m, d)?;
    let b = point_by_string(g, m, d)?;
    if a != b {
        return Err(Error::RouteMismatch(format!(
            "point invariant g={g} m={m:?} d={d}: {a} vs {b}"
        )));
    }
    Ok(a)
}

fn dimension_matches(g: u32, m: &[u32], d: u32) -> bool {
    let total: i64 = m.iter().map(|&x| x as i64).sum();
    3 * g as i64 - 3 + m.len() as i64 + d as i64 == total
}

/// Closed form: the polynomial value divided by `Π m_i!`.
pub fn point_by_formula(g: u32, m: &[u32], d: u32) -> Result<Rat> {
    if !dimension_matches(g, m, d) {
        return Ok(Rat::zero());
    }
    let mut acc = Rat::zero();
    let dim = 3 * g + m.len() as u32 - 3;
    for beta in compositions(dim, m.len()) {
        let mut w = BigInt::one();
        for (&mi, &bi) in m.iter().zip(&beta) {
            w *= binomial(mi as i64, bi as i64) * factorial(bi as u64);
        }
        if w.is_zero() {
            continue;
        }
        acc += Rat::from_integer(w) * psi_intersection(g, &beta)?;
    }
    let denom: BigInt = m.iter().map(|&x| factorial(x as u64)).product();
    Ok(acc / Rat::from_integer(denom))
}

/// Downward recursion on `d` through the string equation.
pub fn point_by_string(g: u32, m: &[u32], d: u32) -> Result<Rat> {
    if !dimension_matches(g, m, d) {
        return Ok(Rat::zero());
    }
    if d == 0 {
        return psi_intersection(g, m);
    }
    let mut acc = Rat::zero();
    for i in 0..m.len() {
        if m[i] > 0 {
            let mut r = m.to_vec();
            r[i] -= 1;
            acc += point_by_string(g, &r, d - 1)?;
        }
    }
    Ok(acc / Rat::from(BigInt::from(d)))
}

/// All `β ∈ ℕⁿ` with `|β| = total`.
pub fn compositions(total: u32, n: usize) -> Vec<Vec<u32>> {
    if n == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, n - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Coefficients of the falling factorial `m (m-1) ⋯ (m-b+1)`.
fn falling_factorial(b: u32) -> Vec<BigInt> {
    let mut c = vec![BigInt::one()];
    for j in 0..b {
        let mut next = vec![BigInt::zero(); c.len() + 1];
        for (i, a) in c.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * BigInt::from(j);
        }
        c = next;
    }
    c
}

/// The polynomial `p_g(m_1,…,m_n) = Π m_i! ⟨Π τ_{m_i} · exp τ_0⟩_g`.
pub fn n0_polynomial(g: u32, n: usize) -> Result<QuasiPoly> {
    if !stable(g, n) {
        return Err(Error::Unstable { g, n });
    }
    let dim = 3 * g + n as u32 - 3;
    let mut terms: HashMap<Vec<u32>, Rat> = HashMap::new();
    for beta in compositions(dim, n) {
        let v = psi_intersection(g, &beta)?;
        if v.is_zero() {
            continue;
        }
        let mut partial: Vec<(Vec<u32>, BigInt)> = vec![(vec![], BigInt::one())];
        for &b in &beta {
            let ff = falling_factorial(b);
            let mut next = Vec::new();
            for (e, c) in &partial {
                for (i, a) in ff.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let mut e2 = e.clone();
                    e2.push(i as u32);
                    next.push((e2, c * a));
                }
            }
            partial = next;
        }
        for (e, c) in partial {
            *terms.entry(e).or_insert_with(Rat::zero) += Rat::from_integer(c) * &v;
        }
    }
    let mut poly = MultiPoly::zero(n);
    for (e, c) in terms {
        poly.add_term(e, &SymRat::from_rat(c));
    }
    let mut q = QuasiPoly::new(0, n, dim);
    q.insert_branch(vec![0; n], poly);
    Ok(q)
}
