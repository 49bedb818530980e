use gwquasi::arith::rat::{factorial, frac, rat, Rat};
use gwquasi::arith::SymRat;
use gwquasi::psi::{compositions, n0_polynomial, point_by_formula, point_by_string, point_invariant, psi_intersection};

fn multisets(n: usize, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in multisets(n - 1, max) {
        let lo = rest.last().copied().unwrap_or(0);
        for b in lo..=max {
            let mut v = rest.clone();
            v.push(b);
            out.push(v);
        }
    }
    out
}

fn stable(g: u32, n: usize) -> bool {
    2 * g as i64 - 2 + n as i64 > 0
}

#[test]
fn string_and_dilaton() {
    for g in 0..=2u32 {
        for n in 0..=4usize {
            if !stable(g, n) {
                continue;
            }
            for beta in multisets(n, 3 * g + n as u32) {
                let base = psi_intersection(g, &beta).unwrap();
                let mut with0 = beta.clone();
                with0.push(0);
                let mut sum = rat(0);
                for i in 0..n {
                    if beta[i] > 0 {
                        let mut b = beta.clone();
                        b[i] -= 1;
                        sum += psi_intersection(g, &b).unwrap();
                    }
                }
                assert_eq!(psi_intersection(g, &with0).unwrap(), sum, "string g={g} {beta:?}");
                let mut with1 = beta.clone();
                with1.push(1);
                let chi = Rat::from_integer((2 * g as i64 - 2 + n as i64).into());
                assert_eq!(psi_intersection(g, &with1).unwrap(), chi * base, "dilaton g={g} {beta:?}");
            }
        }
    }
}

#[test]
fn golden() {
    assert_eq!(psi_intersection(0, &[0, 0, 0]).unwrap(), rat(1));
    assert_eq!(psi_intersection(1, &[1]).unwrap(), frac(1, 24));
    assert_eq!(psi_intersection(2, &[4]).unwrap(), frac(1, 1152));
    assert_eq!(psi_intersection(2, &[1, 2, 3]).unwrap(), frac(29, 1440));
}

#[test]
fn point_routes_agree() {
    for g in 0..=2u32 {
        for n in 0..=3usize {
            for d in 0..=6u32 {
                if !stable(g, n + d as usize) {
                    continue;
                }
                let total = 3 * g as i64 - 3 + n as i64 + d as i64;
                if total < 0 {
                    continue;
                }
                for m in compositions(total as u32, n) {
                    let v = point_invariant(g, &m, d).unwrap();
                    if stable(g, n) {
                        assert_eq!(point_by_formula(g, &m, d).unwrap(), point_by_string(g, &m, d).unwrap());
                    }
                    let mut beta = m.clone();
                    beta.extend(std::iter::repeat_n(0, d as usize));
                    let direct = psi_intersection(g, &beta).unwrap() / Rat::from_integer(factorial(d as u64));
                    assert_eq!(v, direct, "g={g} m={m:?} d={d}");
                }
            }
        }
    }
}

#[test]
fn n0_top_coefficients_are_psi_numbers() {
    for (g, n) in [(0u32, 3usize), (0, 4), (0, 5), (1, 1), (1, 2), (1, 3), (2, 1), (2, 2)] {
        let q = n0_polynomial(g, n).unwrap();
        let p = q.branch(&vec![0; n]).unwrap();
        let dim = 3 * g + n as u32 - 3;
        assert_eq!(p.degree(), Some(dim));
        for beta in compositions(dim, n) {
            assert_eq!(p.coeff(&beta), SymRat::from(psi_intersection(g, &beta).unwrap()));
        }
        // d = 0 evaluation reproduces Π m_i! ⟨Π τ_{m_i}⟩
        for m in compositions(dim, n) {
            let scale: Rat = m.iter().map(|&x| Rat::from_integer(factorial(x as u64))).product();
            let mi: Vec<i64> = m.iter().map(|&x| x as i64).collect();
            assert_eq!(q.eval(&mi).unwrap(), SymRat::from(scale * psi_intersection(g, &m).unwrap()));
        }
    }
}
