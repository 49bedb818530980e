//! Structural identities of the recursion output.

use num_traits::Zero;
use serde_json::json;

use super::curve::BRANCH_POINTS;
use super::differential::{Assignment, PoleBasisDifferential};
use super::recursion::EoSolver;
use super::SpectralCurve;
use crate::arith::rat::{factorial, pow_i, rat, Rat};
use crate::error::{Error, Result};
use crate::psi::{compositions, psi_intersection};
use crate::report::{Status, VerificationReport};

fn chart_trunc(g: u32, n: usize) -> i64 {
    2 * (6 * g as i64 + 2 * n as i64) + 10
}

fn diff_witness(a: &PoleBasisDifferential, b: &PoleBasisDifferential) -> serde_json::Value {
    let mut keys: Vec<&Assignment> = a.coeffs.keys().chain(b.coeffs.keys()).collect();
    keys.sort();
    for k in keys {
        if a.coeff(k) != b.coeff(k) {
            return json!({"assignment": k, "lhs": a.coeff(k).to_string(), "rhs": b.coeff(k).to_string()});
        }
    }
    json!({})
}

/// `Σ_α Res y x^m ω^g_{n+1}(z_S, z) = -Σ_i d_i (x(z_i)^m ω^g_n(z_S) / dx(z_i))`.
pub fn eo_string_check(solver: &EoSolver, g: u32, n: usize, m: u32) -> Result<VerificationReport> {
    if m > 1 {
        return Err(Error::OutOfRange("string identity holds for m = 0, 1".into()));
    }
    let claim = format!("eo string m={m} (g,n)=({g},{n})");
    let big = solver.omega(g, n + 1)?;
    let small = solver.omega(g, n)?;
    let trunc = chart_trunc(g, n + 1);
    let curve = solver.curve();

    let mut lhs = PoleBasisDifferential::new(g, n);
    for &alpha in &BRANCH_POINTS {
        let ch = curve.chart(alpha, trunc);
        let f = ch.y().mul(&ch.x().pow(m).with_trunc(trunc));
        for (a, c) in &big.coeffs {
            let (beta, k) = a[n];
            if beta == alpha {
                lhs.add(a[..n].to_vec(), &(c * f.coeff(k as i64 - 1)?));
            }
        }
    }

    // F = x^m (z - β)^-k / x' has poles only at ±1 and vanishes at ∞, so
    // it is the sum of its principal parts there
    let mut rhs = PoleBasisDifferential::new(g, n);
    for (a, c) in &small.coeffs {
        for i in 0..n {
            let (beta, k) = a[i];
            for &gamma in &BRANCH_POINTS {
                let ch = curve.chart(gamma, trunc);
                let f = ch
                    .x()
                    .pow(m)
                    .with_trunc(trunc)
                    .mul(&ch.dx().invert(trunc)?)
                    .mul(&ch.leg_z(beta, k));
                for (e, coef) in f.terms() {
                    if e < 0 {
                        let j = -e;
                        // -d (z-γ)^-j = j (z-γ)^{-j-1} dz
                        let mut b = a.clone();
                        b[i] = (gamma, j as u32 + 1);
                        rhs.add(b, &(c * coef * rat(j)));
                    }
                }
            }
        }
    }
    Ok(if lhs == rhs {
        VerificationReport::pass(claim, lhs.coeffs.len().max(1))
    } else {
        VerificationReport::fail(claim, 1, diff_witness(&lhs, &rhs))
    })
}

/// `Σ_α Res Φ ω^g_{n+1}(z_S, z) = (2g - 2 + n) ω^g_n(z_S)`, `dΦ = y dx`,
/// with `Φ` shifted by `shift` in every chart.
pub fn eo_dilaton_check_shifted(solver: &EoSolver, g: u32, n: usize, shift: &Rat) -> Result<VerificationReport> {
    let claim = format!("eo dilaton (g,n)=({g},{n})");
    let big = solver.omega(g, n + 1)?;
    let small = solver.omega(g, n)?;
    let trunc = chart_trunc(g, n + 1);
    let mut lhs = PoleBasisDifferential::new(g, n);
    for &alpha in &BRANCH_POINTS {
        let ch = solver.curve().chart(alpha, trunc);
        let phi = ch.y().mul(&ch.dx()).integrate()?.add(&ch.monomial(shift.clone(), 0));
        for (a, c) in &big.coeffs {
            let (beta, k) = a[n];
            if beta == alpha {
                lhs.add(a[..n].to_vec(), &(c * phi.coeff(k as i64 - 1)?));
            }
        }
    }
    let rhs = small.scale(&rat(2 * g as i64 - 2 + n as i64));
    Ok(if lhs == rhs {
        VerificationReport::pass(claim, lhs.coeffs.len().max(1))
    } else {
        VerificationReport::fail(claim, 1, diff_witness(&lhs, &rhs))
    })
}

pub fn eo_dilaton_check(solver: &EoSolver, g: u32, n: usize) -> Result<VerificationReport> {
    eo_dilaton_check_shifted(solver, g, n, &Rat::zero())
}

/// String at `m` together with dilaton.
pub fn eo_string_dilaton_check(solver: &EoSolver, g: u32, n: usize, m: u32) -> Result<VerificationReport> {
    let parts = vec![eo_string_check(solver, g, n, m)?, eo_dilaton_check(solver, g, n)?];
    Ok(VerificationReport::combine(
        format!("eo string m={m} and dilaton (g,n)=({g},{n})"),
        parts,
    ))
}

/// `2^{5-5g-2n} Π (2β_i+1)!/β_i! ⟨τ_β⟩_g`.
pub fn leading_pole_coefficient(g: u32, beta: &[u32]) -> Result<Rat> {
    let mut c = pow_i(&rat(2), 5 - 5 * g as i64 - 2 * beta.len() as i64);
    for &b in beta {
        c *= Rat::from_integer(factorial(2 * b as u64 + 1)) / Rat::from_integer(factorial(b as u64));
    }
    Ok(c * psi_intersection(g, beta)?)
}

/// Pole order and the same-sign leading coefficients; mixed-sign leading
/// coefficients are listed in the witness without judgment.
pub fn pole_asymptotics_check(solver: &EoSolver, g: u32, n: usize) -> Result<VerificationReport> {
    if g > 2 {
        return Err(Error::OutOfRange("pole asymptotics are checked for g <= 2".into()));
    }
    let claim = format!("pole asymptotics (g,n)=({g},{n})");
    let w = solver.omega(g, n)?;
    let order = (6 * g as i64 - 4 + 2 * n as i64) as u32;
    let mut checked = 1;
    if w.max_order() != order {
        return Ok(VerificationReport::fail(claim, checked, json!({"max_order": w.max_order(), "expected": order})));
    }
    let mut mixed = Vec::new();
    for beta in compositions(3 * g + n as u32 - 3, n) {
        let expected = leading_pole_coefficient(g, &beta)?;
        for &alpha in &BRANCH_POINTS {
            let a: Assignment = beta.iter().map(|&b| (alpha, 2 * b + 2)).collect();
            checked += 1;
            if w.coeff(&a) != expected {
                return Ok(VerificationReport::fail(
                    claim,
                    checked,
                    json!({"assignment": a, "got": w.coeff(&a).to_string(), "expected": expected.to_string()}),
                ));
            }
        }
        if n > 1 {
            for signs in 1..(1u32 << n) - 1 {
                let a: Assignment = beta
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| (if signs >> i & 1 == 1 { -1 } else { 1 }, 2 * b + 2))
                    .collect();
                let c = w.coeff(&a);
                if !c.is_zero() {
                    mixed.push(json!({"assignment": a, "value": c.to_string()}));
                }
            }
        }
    }
    let r = VerificationReport::pass(claim, checked);
    let r = if mixed.is_empty() { r } else { r.with_witness(json!({"mixed_sign": mixed})) };
    Ok(if g == 2 { r.with_status(Status::Exploratory) } else { r })
}

/// Symmetry, zero residues and the pole bound.
pub fn structure_check(solver: &EoSolver, g: u32, n: usize) -> Result<VerificationReport> {
    let claim = format!("eo structure (g,n)=({g},{n})");
    let w = solver.omega(g, n)?;
    let bound = (6 * g as i64 - 4 + 2 * n as i64) as u32;
    let ok = w.is_symmetric() && !w.has_residue_part() && w.max_order() <= bound;
    Ok(if ok {
        VerificationReport::pass(claim, w.coeffs.len())
    } else {
        VerificationReport::fail(
            claim,
            w.coeffs.len(),
            json!({"symmetric": w.is_symmetric(), "residue_part": w.has_residue_part(), "max_order": w.max_order()}),
        )
    })
}

/// `ω^g_n` is the same for every truncation in `minimal ..= minimal + extra`;
/// the witness records whether one step lower already differs.
pub fn stabilization_check(g: u32, n: usize, extra: u32) -> Result<VerificationReport> {
    let claim = format!("y truncation stabilization (g,n)=({g},{n})");
    let base = SpectralCurve::minimal_truncation(g, n);
    let reference = EoSolver::new(SpectralCurve::new(base)).omega(g, n)?;
    for t in base + 1..=base + extra {
        let w = EoSolver::new(SpectralCurve::new(t)).omega(g, n)?;
        if w != reference {
            return Ok(VerificationReport::fail(claim, (t - base) as usize, json!({"truncation": t})));
        }
    }
    let below = match base.checked_sub(1).filter(|&t| t >= 1) {
        Some(t) => {
            let mut s = EoSolver::new(SpectralCurve::new(t));
            s.skip_truncation_check();
            Some(*s.omega(g, n)? != *reference)
        }
        None => None,
    };
    Ok(VerificationReport::pass(claim, extra as usize).with_witness(json!({
        "stable_from": base,
        "differs_one_below": below,
    })))
}
