//! Expansions at `x = ∞` on the branch `z ~ x`, in `w = 1/x`.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::differential::PoleBasisDifferential;
use crate::arith::laurent::{LaurentSeries, EXACT};
use crate::arith::rat::{factorial, rat, rat_string, Rat};
use crate::engine::{Engine, InvariantKey};
use crate::error::{Error, Result};
use crate::psi::compositions;
use crate::report::VerificationReport;

/// Coefficient of `Π x_i^{-m_i-2} dx_i` for every `m` with `Σ m_i <= depth`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfinitySeries {
    pub n: usize,
    pub depth: u32,
    #[serde(with = "slot_list")]
    pub coeffs: BTreeMap<Vec<u32>, Rat>,
}

impl InfinitySeries {
    pub fn new(n: usize, depth: u32) -> Self {
        InfinitySeries {
            n,
            depth,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn coeff(&self, m: &[u32]) -> Rat {
        self.coeffs.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    fn add(&mut self, m: Vec<u32>, c: &Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(m.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&m);
        }
    }
}

fn wseries(min_exp: i64, coeffs: Vec<Rat>, trunc: i64) -> LaurentSeries {
    LaurentSeries::new("w", "inf", min_exp, coeffs, trunc)
}

/// `1/z = Σ C_k w^{2k+1}` (Catalan numbers), known below `w^trunc`.
pub fn z_inverse_at_infinity(trunc: i64) -> LaurentSeries {
    let mut coeffs = vec![Rat::zero(); trunc.max(0) as usize];
    let mut catalan = rat(1);
    let mut k = 0i64;
    while 2 * k + 1 < trunc {
        coeffs[(2 * k + 1) as usize] = catalan.clone();
        catalan = catalan * rat(2 * (2 * k + 1)) / rat(k + 2);
        k += 1;
    }
    wseries(0, coeffs, trunc)
}

/// `z = 1/w - Σ C_k w^{2k+1}`.
pub fn z_at_infinity(trunc: i64) -> LaurentSeries {
    wseries(-1, vec![rat(1)], EXACT).sub(&z_inverse_at_infinity(trunc))
}

/// `dz/(z - α)^k` divided by `dx`, as a series in `w`.
pub fn basis_at_infinity(alpha: i8, k: u32, trunc: i64) -> Result<LaurentSeries> {
    let s = z_inverse_at_infinity(trunc);
    let one = wseries(0, vec![rat(1)], EXACT);
    // (z - α)^-k = s^k (1 - α s)^-k and dz/dx = (1 - s²)^-1
    let a = one.sub(&s.scale(&rat(alpha as i64))).invert(trunc)?.pow(k).with_trunc(trunc);
    let b = one.sub(&s.pow(2).with_trunc(trunc)).invert(trunc)?;
    Ok(s.pow(k).with_trunc(trunc).mul(&a).mul(&b))
}

/// Per-slot coefficients `[w^{m+2}]` of a series, `m = 0..=depth`.
fn slots(s: &LaurentSeries, depth: u32) -> Result<Vec<Rat>> {
    (0..=depth as i64).map(|m| s.coeff(m + 2)).collect()
}

/// Adds `c · Π_i f_i` to `out`, where `f_i` are per-variable slot vectors.
fn add_products(out: &mut InfinitySeries, factors: &[&Vec<Rat>], c: &Rat) {
    let depth = out.depth;
    for total in 0..=depth {
        for m in compositions(total, factors.len()) {
            let mut p = c.clone();
            for (f, &mi) in factors.iter().zip(&m) {
                p *= &f[mi as usize];
                if p.is_zero() {
                    break;
                }
            }
            out.add(m, &p);
        }
    }
}

pub fn expand_at_infinity(d: &PoleBasisDifferential, depth: u32) -> Result<InfinitySeries> {
    if depth == 0 {
        return Err(Error::OutOfRange("depth must be at least 1".into()));
    }
    let trunc = depth as i64 + 3;
    let mut cache: HashMap<(i8, u32), Vec<Rat>> = HashMap::new();
    for a in d.coeffs.keys() {
        for &(al, k) in a {
            if let std::collections::hash_map::Entry::Vacant(e) = cache.entry((al, k)) {
                e.insert(slots(&basis_at_infinity(al, k, trunc)?, depth)?);
            }
        }
    }
    let mut out = InfinitySeries::new(d.n, depth);
    for (a, c) in &d.coeffs {
        let f: Vec<&Vec<Rat>> = a.iter().map(|x| &cache[x]).collect();
        add_products(&mut out, &f, c);
    }
    Ok(out)
}

/// `ω^0_1 + ln x dx = ln(1 + 1/z²) dx`.
pub fn exceptional_01(depth: u32) -> Result<InfinitySeries> {
    let trunc = depth as i64 + 3;
    let s = z_inverse_at_infinity(trunc);
    let one = wseries(0, vec![rat(1)], EXACT);
    let l = one.add(&s.pow(2).with_trunc(trunc)).log1p_series()?;
    let mut out = InfinitySeries::new(1, depth);
    for (m, c) in slots(&l, depth)?.into_iter().enumerate() {
        out.add(vec![m as u32], &c);
    }
    Ok(out)
}

/// `ω^0_2 - dx_1 dx_2/(x_1 - x_2)² = d_1 d_2 Σ_k (s_1 s_2)^k / k`, `s = 1/z`.
pub fn exceptional_02(depth: u32) -> Result<InfinitySeries> {
    let trunc = depth as i64 + 3;
    let s = z_inverse_at_infinity(trunc);
    let mut out = InfinitySeries::new(2, depth);
    let mut p = wseries(0, vec![rat(1)], EXACT);
    for k in 1..=(depth as i64 + 2) {
        p = p.mul(&s).with_trunc(trunc);
        // d/dx = -w² d/dw
        let dp = p.derivative().mul(&wseries(2, vec![rat(-1)], EXACT));
        let f = slots(&dp, depth)?;
        add_products(&mut out, &[&f, &f], &(Rat::one() / rat(k)));
    }
    Ok(out)
}

/// Slots of `Ω^g_n`: `⟨Π τ_{m_i}(pt)⟩_g^{P¹} Π (m_i+1)!`. Atom-bearing slots
/// that `assignment` does not resolve are returned separately.
pub fn gw_generating(
    engine: &Engine,
    g: u32,
    n: usize,
    depth: u32,
    assignment: &HashMap<String, Rat>,
) -> Result<(InfinitySeries, Vec<Vec<u32>>)> {
    let mut out = InfinitySeries::new(n, depth);
    let mut marked = Vec::new();
    for total in 0..=depth {
        for m in compositions(total, n) {
            let key = InvariantKey::stationary(1, g, &m);
            let v = engine.invariant(&key)?;
            let f: Rat = m.iter().map(|&x| Rat::from_integer(factorial(x as u64 + 1))).product();
            match v.resolve(assignment) {
                Ok(r) => out.add(m, &(r * f)),
                Err(Error::MissingAtom(_)) => marked.push(m),
                Err(e) => return Err(e),
            }
        }
    }
    Ok((out, marked))
}

/// Slot-by-slot comparison; `(0,1)` and `(0,2)` use the corrected forms.
pub fn compare_eo_gw(
    solver: &super::EoSolver,
    engine: &Engine,
    g: u32,
    n: usize,
    depth: u32,
    assignment: &HashMap<String, Rat>,
) -> Result<VerificationReport> {
    let claim = format!("eo vs gw (g,n)=({g},{n}) depth {depth}");
    let eo = match (g, n) {
        (0, 1) => exceptional_01(depth)?,
        (0, 2) => exceptional_02(depth)?,
        _ => expand_at_infinity(&*solver.omega(g, n)?, depth)?,
    };
    let (gw, marked) = gw_generating(engine, g, n, depth, assignment)?;
    let mut checked = 0;
    for total in 0..=depth {
        for m in compositions(total, n) {
            if marked.contains(&m) {
                continue;
            }
            checked += 1;
            let (a, b) = (eo.coeff(&m), gw.coeff(&m));
            if a != b {
                return Ok(VerificationReport::fail(
                    claim,
                    checked,
                    json!({"slot": m, "eo": a.to_string(), "gw": b.to_string()}),
                ));
            }
        }
    }
    let r = VerificationReport::pass(claim, checked);
    Ok(if marked.is_empty() {
        r
    } else {
        r.with_witness(json!({"excluded_atom_slots": marked}))
    })
}

mod slot_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        m: Vec<u32>,
        #[serde(with = "rat_string")]
        value: Rat,
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<Vec<u32>, Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Entry> = m
            .iter()
            .map(|(k, c)| Entry {
                m: k.clone(),
                value: c.clone(),
            })
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<Vec<u32>, Rat>, D::Error> {
        let v: Vec<Entry> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|e| (e.m, e.value)).collect())
    }
}
