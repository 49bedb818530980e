//! The residue recursion, evaluated exactly in the local charts at `±1`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::Zero;
use parking_lot::RwLock;
use rayon::prelude::*;

use super::curve::{Chart, SpectralCurve, BRANCH_POINTS};
use super::differential::{Assignment, PoleBasisDifferential};
use crate::arith::laurent::LaurentSeries;
use crate::arith::rat::rat;
use crate::error::{Error, Result};

/// Per-variable assignments of one recursion factor, with its `t`-series.
type Legs = Vec<(Vec<(usize, (i8, u32))>, LaurentSeries)>;

/// Memoized `ω^g_n` on one curve.
pub struct EoSolver {
    curve: SpectralCurve,
    memo: RwLock<HashMap<(u32, usize), Arc<PoleBasisDifferential>>>,
    checked: bool,
}

impl EoSolver {
    pub fn new(curve: SpectralCurve) -> Self {
        EoSolver {
            curve,
            memo: RwLock::new(HashMap::new()),
            checked: true,
        }
    }

    /// Allows truncations below the stable range, for comparisons.
    pub fn skip_truncation_check(&mut self) {
        self.checked = false;
    }

    pub fn curve(&self) -> &SpectralCurve {
        &self.curve
    }

    pub fn omega(&self, g: u32, n: usize) -> Result<Arc<PoleBasisDifferential>> {
        if 2 * g as i64 - 2 + n as i64 <= 0 || n == 0 {
            return Err(Error::Unstable { g, n });
        }
        if self.checked {
            self.curve.check_supports(g, n)?;
        }
        if let Some(w) = self.memo.read().get(&(g, n)) {
            return Ok(w.clone());
        }
        let w = Arc::new(self.compute(g, n)?);
        self.memo.write().insert((g, n), w.clone());
        Ok(w)
    }

    fn compute(&self, g: u32, n: usize) -> Result<PoleBasisDifferential> {
        let order = 6 * g as i64 - 4 + 2 * n as i64;
        let trunc = 2 * (6 * g as i64 + 2 * n as i64) + 10;
        // one spare order past the bound, which must come out zero
        let expand = (order - 1) as u32;
        // lower levels first, outside the parallel section
        for (gg, nn) in self.dependencies(g, n) {
            self.omega(gg, nn)?;
        }
        let parts: Vec<PoleBasisDifferential> = BRANCH_POINTS
            .par_iter()
            .map(|&alpha| {
                let ch = self.curve.chart(alpha, trunc);
                self.at_branch_point(g, n, &ch, expand)
            })
            .collect::<Result<_>>()?;
        let mut out = PoleBasisDifferential::new(g, n);
        for p in parts {
            for (a, c) in p.coeffs {
                out.add(a, &c);
            }
        }
        if out.has_residue_part() {
            return Err(Error::NonzeroResidue);
        }
        Ok(out)
    }

    fn dependencies(&self, g: u32, n: usize) -> Vec<(u32, usize)> {
        let s = n - 1;
        let mut deps = Vec::new();
        if g >= 1 && !(g == 1 && s == 0) {
            deps.push((g - 1, s + 2));
        }
        for g1 in 0..=g {
            for k in 0..=s {
                let stable = 2 * g1 as i64 - 1 + k as i64 > 0;
                if stable && !(g1 == g && k == s) {
                    deps.push((g1, k + 1));
                }
            }
        }
        deps
    }

    fn at_branch_point(&self, g: u32, n: usize, ch: &Chart, expand: u32) -> Result<PoleBasisDifferential> {
        let s = n - 1;
        let mut integrand: BTreeMap<Assignment, LaurentSeries> = BTreeMap::new();
        let mut push = |key: Assignment, series: LaurentSeries| {
            match integrand.get_mut(&key) {
                Some(e) => *e = e.add(&series),
                None => {
                    integrand.insert(key, series);
                }
            }
        };
        if g >= 1 {
            if g == 1 && s == 0 {
                let diff = ch.z().sub(&ch.z_inv());
                let w02 = diff.pow(2).invert(ch.trunc)?;
                let dzhat = ch.z_inv().pow(2).with_trunc(ch.trunc).scale(&rat(-1));
                push(vec![], w02.mul(&dzhat));
            } else {
                let w = self.omega(g - 1, s + 2)?;
                for (a, c) in &w.coeffs {
                    let series = ch
                        .leg_z(a[0].0, a[0].1)
                        .mul(&ch.leg_zhat(a[1].0, a[1].1))
                        .scale(c);
                    push(a[2..].to_vec(), series);
                }
            }
        }
        let vars: Vec<usize> = (0..s).collect();
        for g1 in 0..=g {
            for mask in 0u32..(1 << s) {
                let ia: Vec<usize> = vars.iter().copied().filter(|&v| mask >> v & 1 == 1).collect();
                let ja: Vec<usize> = vars.iter().copied().filter(|&v| mask >> v & 1 == 0).collect();
                let g2 = g - g1;
                if (g1 == 0 && ia.is_empty()) || (g2 == 0 && ja.is_empty()) {
                    continue;
                }
                let left = self.legs(g1, &ia, false, ch, expand)?;
                let right = self.legs(g2, &ja, true, ch, expand)?;
                for (la, ls) in &left {
                    for (ra, rs) in &right {
                        let mut key: Assignment = vec![(0, 0); s];
                        for &(v, x) in la.iter().chain(ra) {
                            key[v] = x;
                        }
                        push(key, ls.mul(rs));
                    }
                }
            }
        }
        // K = Σ_j dz0/(z0 - α)^{j+1} · κ_j with κ_j = -(t^j - u^j) / (2 Δy x')
        let den = ch.y().sub(&ch.y_hat()).mul(&ch.dx()).scale(&rat(-2));
        let inv = den.invert(ch.trunc)?;
        let u = ch.u();
        let mut out = PoleBasisDifferential::new(g, n);
        let mut kappa: Vec<LaurentSeries> = vec![];
        for (key, b) in integrand {
            let Some(v) = b.valuation() else { continue };
            let jmax = 1 - v;
            while (kappa.len() as i64) < jmax {
                let j = kappa.len() as u32 + 1;
                let num = ch.monomial(rat(1), j as i64).sub(&u.pow(j).with_trunc(ch.trunc));
                kappa.push(num.mul(&inv));
            }
            for j in 1..=jmax {
                let r = kappa[(j - 1) as usize].mul(&b).residue()?;
                if !r.is_zero() {
                    let mut a = vec![(ch.alpha, j as u32 + 1)];
                    a.extend(&key);
                    out.add(a, &r);
                }
            }
        }
        Ok(out)
    }

    /// `ω^g_{|vars|+1}` with its first slot at `z` (or at `1/z` when `hat`).
    fn legs(&self, g: u32, vars: &[usize], hat: bool, ch: &Chart, expand: u32) -> Result<Legs> {
        let mut out = Legs::new();
        if g == 0 && vars.len() == 1 {
            // dζ/(ζ - w)² around ζ = α: Σ_j (j+1) (ζ-α)^j dw/(w-α)^{j+2}
            let base = if hat { ch.u() } else { ch.monomial(rat(1), 1) };
            let jac = if hat {
                ch.z_inv().pow(2).with_trunc(ch.trunc).scale(&rat(-1))
            } else {
                ch.one()
            };
            let mut p = jac;
            for j in 0..=expand {
                out.push((
                    vec![(vars[0], (ch.alpha, j + 2))],
                    p.scale(&rat(j as i64 + 1)),
                ));
                p = p.mul(&base).with_trunc(ch.trunc);
            }
            return Ok(out);
        }
        let w = self.omega(g, vars.len() + 1)?;
        let mut cache: HashMap<(i8, u32), LaurentSeries> = HashMap::new();
        for (a, c) in &w.coeffs {
            let leg = cache
                .entry(a[0])
                .or_insert_with(|| {
                    if hat {
                        ch.leg_zhat(a[0].0, a[0].1)
                    } else {
                        ch.leg_z(a[0].0, a[0].1)
                    }
                })
                .scale(c);
            let assign = vars.iter().copied().zip(a[1..].iter().copied()).collect();
            out.push((assign, leg));
        }
        Ok(out)
    }
}

/// `ω^g_n` on `curve`.
pub fn eo_invariant(g: u32, n: usize, curve: &SpectralCurve) -> Result<PoleBasisDifferential> {
    EoSolver::new(curve.clone()).omega(g, n).map(|w| (*w).clone())
}

