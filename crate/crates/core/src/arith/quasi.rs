//! Quasi-polynomials on the cosets of `(N+1)Z^n` and their exact interpolation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::poly::MultiPoly;
use super::rat::{binomial, factorial, Rat};
use super::symrat::SymRat;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiPoly {
    /// Target dimension; the lattice modulus is `N + 1`.
    pub n_target: u32,
    pub nvars: usize,
    pub degree_bound: u32,
    #[serde(with = "branches_wire")]
    branches: BTreeMap<Vec<u32>, MultiPoly>,
}

impl QuasiPoly {
    pub fn new(n_target: u32, nvars: usize, degree_bound: u32) -> Self {
        QuasiPoly {
            n_target,
            nvars,
            degree_bound,
            branches: BTreeMap::new(),
        }
    }

    pub fn modulus(&self) -> i64 {
        self.n_target as i64 + 1
    }

    pub fn branches(&self) -> &BTreeMap<Vec<u32>, MultiPoly> {
        &self.branches
    }

    pub fn branch(&self, residues: &[u32]) -> Option<&MultiPoly> {
        self.branches.get(residues)
    }

    pub fn residues_of(&self, m: &[i64]) -> Vec<u32> {
        m.iter().map(|&v| v.rem_euclid(self.modulus()) as u32).collect()
    }

    /// Stores a branch; zero polynomials are dropped.
    pub fn insert_branch(&mut self, residues: Vec<u32>, p: MultiPoly) {
        assert_eq!(residues.len(), self.nvars);
        assert!(p.degree().unwrap_or(0) <= self.degree_bound, "branch exceeds degree bound");
        if p.is_zero() {
            self.branches.remove(&residues);
        } else {
            self.branches.insert(residues, p);
        }
    }

    pub fn eval(&self, m: &[i64]) -> Result<SymRat> {
        if m.len() != self.nvars {
            return Err(Error::Arity {
                expected: self.nvars,
                got: m.len(),
            });
        }
        match self.branches.get(&self.residues_of(m)) {
            Some(p) => p.eval(m),
            None => Ok(SymRat::zero()),
        }
    }

    /// Variable `i` becomes variable `perm[i]`, residues move along.
    pub fn permute(&self, perm: &[usize]) -> QuasiPoly {
        let mut out = QuasiPoly::new(self.n_target, self.nvars, self.degree_bound);
        for (r, p) in &self.branches {
            let mut r2 = vec![0; self.nvars];
            for (i, &pi) in perm.iter().enumerate() {
                r2[pi] = r[i];
            }
            out.branches.insert(r2, p.permute(perm));
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        all_permutations(self.nvars)
            .iter()
            .all(|perm| &self.permute(perm) == self)
    }
}

/// Evaluates `q` at `m`; the wire-level counterpart of [`QuasiPoly::eval`].
pub fn quasi_eval(q: &QuasiPoly, m: &[i64]) -> Result<SymRat> {
    q.eval(m)
}

pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Exponent vectors of total degree at most `d` in `n` variables.
pub fn exponents_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let used: u32 = cur.iter().sum();
        for e in 0..=(d - used) {
            cur.push(e);
            rec(n, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

/// Fits one polynomial per residue class through the samples.
///
/// Each branch is solved independently and exactly; the scalar part and every
/// atom coefficient are separate Q-linear systems sharing one matrix. Samples
/// beyond those needed to pin the interpolant are checked against it.
pub fn quasi_fit(
    samples: &[(Vec<i64>, SymRat)],
    n_target: u32,
    nvars: usize,
    degree_bound: u32,
) -> Result<QuasiPoly> {
    let mut q = QuasiPoly::new(n_target, nvars, degree_bound);
    let mut groups: BTreeMap<Vec<u32>, Vec<(Vec<i64>, SymRat)>> = BTreeMap::new();
    for (m, v) in samples {
        if m.len() != nvars {
            return Err(Error::Arity {
                expected: nvars,
                got: m.len(),
            });
        }
        groups
            .entry(q.residues_of(m))
            .or_default()
            .push((m.clone(), v.clone()));
    }
    for (res, pts) in groups {
        let poly = fit_branch(&res, &pts, q.modulus(), nvars, degree_bound)?;
        for (m, v) in &pts {
            let got = poly.eval(m)?;
            if &got != v {
                return Err(Error::InconsistentSamples {
                    point: m.clone(),
                    expected: got.to_string(),
                    got: v.to_string(),
                });
            }
        }
        q.insert_branch(res, poly);
    }
    Ok(q)
}

fn fit_branch(
    res: &[u32],
    pts: &[(Vec<i64>, SymRat)],
    step: i64,
    nvars: usize,
    d: u32,
) -> Result<MultiPoly> {
    let lookup: HashMap<&[i64], &SymRat> = pts.iter().map(|(m, v)| (m.as_slice(), v)).collect();
    let offset: Vec<i64> = (0..nvars)
        .map(|i| pts.iter().map(|(m, _)| m[i]).min().unwrap())
        .collect();
    let lattice = exponents_up_to(nvars, d);
    let mut values = HashMap::with_capacity(lattice.len());
    for e in &lattice {
        let m: Vec<i64> = offset
            .iter()
            .zip(e)
            .map(|(&o, &k)| o + step * k as i64)
            .collect();
        match lookup.get(m.as_slice()) {
            Some(v) => {
                values.insert(e.clone(), (*v).clone());
            }
            None => return gauss_branch(res, pts, nvars, d),
        }
    }
    Ok(newton_lattice(values, &offset, step, nvars, d))
}

/// Interpolation on the principal lattice `offset + step·{|e| <= d}` by
/// iterated forward differences, expanded back to the monomial basis in `m`.
pub fn newton_lattice(
    mut values: HashMap<Vec<u32>, SymRat>,
    offset: &[i64],
    step: i64,
    nvars: usize,
    d: u32,
) -> MultiPoly {
    for dim in 0..nvars {
        // every line parallel to axis `dim` starting on the face e[dim] = 0
        let starts: Vec<Vec<u32>> = values.keys().filter(|e| e[dim] == 0).cloned().collect();
        for start in starts {
            let len = d - start.iter().sum::<u32>();
            let mut line: Vec<SymRat> = (0..=len)
                .map(|k| {
                    let mut e = start.clone();
                    e[dim] = k;
                    values[&e].clone()
                })
                .collect();
            for k in 1..=len as usize {
                for j in (k..=len as usize).rev() {
                    let prev = line[j - 1].clone();
                    line[j] -= &prev;
                }
            }
            for (k, v) in line.into_iter().enumerate() {
                let mut e = start.clone();
                e[dim] = k as u32;
                values.insert(e, v);
            }
        }
    }
    // binomial basis C((m - off)/step, j) per variable, as coefficients in m
    let basis: Vec<Vec<Vec<Rat>>> = (0..nvars)
        .map(|i| (0..=d).map(|j| binomial_basis(offset[i], step, j)).collect())
        .collect();
    let mut out = MultiPoly::zero(nvars);
    for (a, coeff) in values {
        if coeff.is_zero() {
            continue;
        }
        let mut partial: Vec<(Vec<u32>, Rat)> = vec![(Vec::new(), Rat::one())];
        for (i, &ai) in a.iter().enumerate() {
            let b = &basis[i][ai as usize];
            let mut next = Vec::with_capacity(partial.len() * b.len());
            for (e, c) in &partial {
                for (p, bc) in b.iter().enumerate() {
                    if bc.is_zero() {
                        continue;
                    }
                    let mut e2 = e.clone();
                    e2.push(p as u32);
                    next.push((e2, c * bc));
                }
            }
            partial = next;
        }
        for (e, c) in partial {
            out.add_term(e, &coeff.scale(&c));
        }
    }
    out
}

fn binomial_basis(off: i64, step: i64, j: u32) -> Vec<Rat> {
    // prod_{t<j} (m - off - t step) / (step^j j!)
    let mut coeffs = vec![Rat::one()];
    for t in 0..j as i64 {
        let root = Rat::from_integer(BigInt::from(off + t * step));
        let mut next = vec![Rat::zero(); coeffs.len() + 1];
        for (p, c) in coeffs.iter().enumerate() {
            next[p + 1] += c;
            next[p] -= c * &root;
        }
        coeffs = next;
    }
    let denom = Rat::from_integer(BigInt::from(step).pow(j) * factorial(j as u64));
    coeffs.into_iter().map(|c| c / &denom).collect()
}

/// General exact solve for samples that do not form a principal lattice.
fn gauss_branch(
    res: &[u32],
    pts: &[(Vec<i64>, SymRat)],
    nvars: usize,
    d: u32,
) -> Result<MultiPoly> {
    let monos = exponents_up_to(nvars, d);
    let unknowns = monos.len();
    let names: Vec<String> = pts
        .iter()
        .flat_map(|(_, v)| v.atoms().keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let ncols = unknowns + 1 + names.len();
    let mut rows: Vec<Vec<Rat>> = pts
        .iter()
        .map(|(m, v)| {
            let mut row = Vec::with_capacity(ncols);
            for e in &monos {
                let mut x = BigInt::one();
                for (&mi, &ei) in m.iter().zip(e) {
                    x *= BigInt::from(mi).pow(ei);
                }
                row.push(Rat::from_integer(x));
            }
            row.push(v.scalar().clone());
            for n in &names {
                row.push(v.atom_coeff(n));
            }
            row
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivot_cols = Vec::new();
    for col in 0..unknowns {
        let Some(r) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, r);
        let inv = rows[pivot_row][col].recip();
        for x in rows[pivot_row].iter_mut() {
            *x *= &inv;
        }
        let prow = rows[pivot_row].clone();
        for (ri, row) in rows.iter_mut().enumerate() {
            if ri != pivot_row && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x -= &f * p;
                }
            }
        }
        pivot_cols.push(col);
        pivot_row += 1;
    }
    if pivot_cols.len() < unknowns {
        return Err(Error::Underdetermined {
            branch: res.to_vec(),
            rank: pivot_cols.len(),
            unknowns,
        });
    }
    let mut out = MultiPoly::zero(nvars);
    for (r, &col) in pivot_cols.iter().enumerate() {
        let mut c = SymRat::from_rat(rows[r][unknowns].clone());
        for (j, n) in names.iter().enumerate() {
            c.add_atom(n, &rows[r][unknowns + 1 + j]);
        }
        out.add_term(monos[col].clone(), &c);
    }
    Ok(out)
}

mod branches_wire {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        b: &BTreeMap<Vec<u32>, MultiPoly>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        b.iter().collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<Vec<u32>, MultiPoly>, D::Error> {
        let v: Vec<(Vec<u32>, MultiPoly)> = Vec::deserialize(d)?;
        Ok(v.into_iter().collect())
    }
}

/// Number of monomials of degree at most `d` in `n` variables.
pub fn monomial_count(n: usize, d: u32) -> usize {
    let c = binomial(d as i64 + n as i64, n as i64);
    c.try_into().unwrap_or(usize::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::{frac, rat};
    use proptest::prelude::*;

    fn two_point_closed(m: &[i64]) -> SymRat {
        SymRat::from_rat(frac(2, m[0] + m[1] + 2))
    }

    #[test]
    fn eval_selects_branch_and_parity_vanishes() {
        // p for (g,n) = (0,3), N = 1 is the constant 1 on even-sum cosets
        let mut q = QuasiPoly::new(1, 3, 0);
        for r in [[0, 0, 0], [1, 1, 0], [1, 0, 1], [0, 1, 1]] {
            q.insert_branch(r.to_vec(), MultiPoly::constant(3, SymRat::from_rat(rat(1))));
        }
        assert_eq!(q.eval(&[2, 3, 1]).unwrap(), SymRat::from_rat(rat(1)));
        assert_eq!(q.eval(&[1, 0, 0]).unwrap(), SymRat::zero());
        assert!(q.eval(&[1, 1]).is_err());
        assert_eq!(two_point_closed(&[0, 0]), SymRat::from_rat(rat(1)));
        assert_eq!(two_point_closed(&[1, 1]), SymRat::from_rat(frac(1, 2)));
    }

    #[test]
    fn fit_constant_three_point() {
        let mut samples = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    if (a + b + c) % 2 == 0 {
                        samples.push((vec![a, b, c], SymRat::from_rat(rat(1))));
                    }
                }
            }
        }
        let q = quasi_fit(&samples, 1, 3, 0).unwrap();
        assert_eq!(q.branches().len(), 4);
        for p in q.branches().values() {
            assert_eq!(p, &MultiPoly::constant(3, SymRat::from_rat(rat(1))));
        }
    }

    #[test]
    fn fit_genus_one_point_polynomial() {
        // N = 0: m/24 + A
        let samples: Vec<_> = (0..5)
            .map(|m| {
                let v = &SymRat::from_rat(frac(m, 24)) + &SymRat::atom("A");
                (vec![m], v)
            })
            .collect();
        let q = quasi_fit(&samples, 0, 1, 1).unwrap();
        let p = q.branch(&[0]).unwrap();
        assert_eq!(p.coeff(&[1]), SymRat::from_rat(frac(1, 24)));
        assert_eq!(p.coeff(&[0]), SymRat::atom("A"));
    }

    #[test]
    fn fit_errors() {
        let samples = vec![(vec![0], SymRat::from_rat(rat(1)))];
        assert!(matches!(
            quasi_fit(&samples, 0, 1, 1),
            Err(Error::Underdetermined { .. })
        ));
        let samples: Vec<_> = [0i64, 1, 2]
            .iter()
            .map(|&m| (vec![m], SymRat::from_rat(rat(m * m))))
            .collect();
        assert!(matches!(
            quasi_fit(&samples, 0, 1, 1),
            Err(Error::InconsistentSamples { .. })
        ));
    }

    fn arb_quasi() -> impl Strategy<Value = QuasiPoly> {
        (1u32..3, 1usize..4, 0u32..5).prop_flat_map(|(n_target, nvars, deg)| {
            let h = n_target + 1;
            let nres = (h as usize).pow(nvars as u32);
            let nmono = monomial_count(nvars, deg);
            proptest::collection::vec(
                proptest::collection::vec((-6i64..6, 1i64..4), nmono),
                nres,
            )
            .prop_map(move |coeffs| {
                let monos = exponents_up_to(nvars, deg);
                let mut q = QuasiPoly::new(n_target, nvars, deg);
                for (idx, cs) in coeffs.into_iter().enumerate() {
                    let mut res = Vec::new();
                    let mut k = idx;
                    for _ in 0..nvars {
                        res.push((k % h as usize) as u32);
                        k /= h as usize;
                    }
                    let mut p = MultiPoly::zero(nvars);
                    for (e, (a, b)) in monos.iter().zip(cs) {
                        p.add_term(e.clone(), &SymRat::from_rat(frac(a, b)));
                    }
                    q.insert_branch(res, p);
                }
                q
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn fit_inverts_eval(q in arb_quasi()) {
            let h = q.modulus();
            let d = q.degree_bound;
            let mut samples = Vec::new();
            for res in q.branches().keys() {
                for e in exponents_up_to(q.nvars, d + 1) {
                    let m: Vec<i64> = res.iter().zip(&e).map(|(&r, &k)| r as i64 + h * k as i64 - h).collect();
                    samples.push((m.clone(), q.eval(&m).unwrap()));
                }
            }
            let fitted = quasi_fit(&samples, q.n_target, q.nvars, d).unwrap();
            prop_assert_eq!(fitted, q);
        }

        #[test]
        fn gauss_and_lattice_paths_agree(q in arb_quasi()) {
            let h = q.modulus();
            let d = q.degree_bound;
            let Some((res, _)) = q.branches().iter().next() else { return Ok(()); };
            // a lattice sample set and a scrambled one (every point shifted along axis 0 by its index parity)
            let lattice: Vec<_> = exponents_up_to(q.nvars, d).into_iter().map(|e| {
                let m: Vec<i64> = res.iter().zip(&e).map(|(&r, &k)| r as i64 + h * k as i64).collect();
                (m.clone(), q.eval(&m).unwrap())
            }).collect();
            let scrambled: Vec<_> = exponents_up_to(q.nvars, d).into_iter().map(|mut e| {
                e[0] += 1 + e.iter().skip(1).sum::<u32>();
                let m: Vec<i64> = res.iter().zip(&e).map(|(&r, &k)| r as i64 + h * k as i64).collect();
                (m.clone(), q.eval(&m).unwrap())
            }).collect();
            let a = quasi_fit(&lattice, q.n_target, q.nvars, d).unwrap();
            let b = quasi_fit(&scrambled, q.n_target, q.nvars, d);
            if let Ok(b) = b {
                prop_assert_eq!(a.branch(res), b.branch(res));
            } else {
                let under = matches!(b, Err(Error::Underdetermined { .. }));
                prop_assert!(under);
            }
        }
    }
}
