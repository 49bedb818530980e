use std::collections::HashMap;

use gwquasi::arith::rat::{frac, rat};
use gwquasi::engine::Engine;
use gwquasi::fit::*;
use gwquasi::report::Status;

#[test]
fn table_rows_genus_zero() {
    let e = Engine::global();
    for n_target in 1..=3 {
        for n in 2..=4 {
            let r = verify_table_row(e, n_target, 0, n).unwrap();
            assert!(r.passed(), "{r}");
        }
    }
}

#[test]
fn table_rows_genus_one() {
    let e = Engine::global();
    for n_target in 1..=2 {
        for n in 1..=2 {
            let r = verify_table_row(e, n_target, 1, n).unwrap();
            assert!(r.passed(), "{r}");
        }
    }
}

#[test]
fn top_coefficients_match_psi() {
    for (n_target, g, n) in [(1, 0, 3), (1, 0, 4), (2, 0, 4), (2, 0, 5), (1, 1, 1), (1, 1, 2), (2, 1, 2)] {
        let q = fit_cached(&FitSpec::stationary(n_target, g, n)).unwrap();
        let r = verify_top_coefficients(&q, g, n, n_target);
        assert!(r.passed(), "{r}");
    }
}

// Degree-zero values from the lambda_g formula and int psi^3 lambda_1 = 1/480,
// the degree-one value from [z^4] sinh(z/2)/(z/2).
fn p1_genus_two_atoms() -> HashMap<String, gwquasi::arith::Rat> {
    HashMap::from([
        ("gw[N=1;g=2;ins=(2,1)]".to_string(), frac(7, 5760)),
        ("gw[N=1;g=2;ins=(3,0)]".to_string(), frac(-1, 240)),
        ("gw[N=1;g=2;ins=(4,1)]".to_string(), frac(1, 1920)),
    ])
}

#[test]
fn genus_two_top_coefficient_is_atom_linear() {
    let q = fit_cached(&FitSpec::stationary(1, 2, 1)).unwrap();
    assert!(!verify_top_coefficients(&q, 2, 1, 1).passed());
    let r = verify_top_coefficients_with(&q, 2, 1, 1, &p1_genus_two_atoms());
    assert!(r.passed(), "{r}");
}

#[test]
fn negative_evaluation_small_grid() {
    let e = Engine::global();
    let r = verify_negative_grid(e, 1, 0, 2, 2, 6).unwrap();
    assert!(r.passed(), "{r}");
    let r = verify_negative_grid(e, 1, 1, 1, 1, 6).unwrap();
    assert!(r.passed(), "{r}");
}

#[test]
fn stationary_string_and_divisor() {
    let e = Engine::global();
    for (n_target, g, n) in [(1, 0, 2), (2, 0, 2), (1, 1, 1)] {
        let r = verify_p_string_divisor(e, n_target, g, n, 7).unwrap();
        assert!(r.passed(), "{r}");
    }
}

#[test]
fn dilaton_from_derivative() {
    let e = Engine::global();
    for (g, n) in [(0, 1), (0, 2), (1, 1)] {
        let r = verify_dilaton_derivative(e, g, n, 7).unwrap();
        assert!(r.passed(), "{r}");
    }
}

#[test]
fn closed_families() {
    let p1 = PFamily::new(1, 0, 1).unwrap();
    assert_eq!(p1.eval(&[2]).unwrap().as_rat().unwrap(), &frac(4, 16));
    assert_eq!(p1.eval(&[1]).unwrap().as_rat().unwrap(), &rat(0));
    let p2 = PFamily::new(2, 0, 2).unwrap();
    assert_eq!(p2.eval(&[1, 2]).unwrap().as_rat().unwrap(), &frac(3, 6));
    assert!(PFamily::new(1, 0, 0).is_err());
}

#[test]
fn asymptotics_ray_one() {
    let e = Engine::global();
    let ray = [1, 1, 1];
    let r = asymptotics_report(e, 1, 0, &ray, 200, &HashMap::new(), &frac(1, 100)).unwrap();
    assert!(r.passed(), "{r}");
    let r = asymptotics_report(e, 2, 1, &[1], 40, &HashMap::new(), &frac(1, 100)).unwrap();
    assert!(matches!(r.status, Status::InconclusiveAtoms | Status::Pass | Status::Fail), "{r}");
}

#[test]
fn genus_two_below_threshold_needs_flag() {
    let spec = FitSpec::stationary(1, 2, 1).with_min_m(0);
    assert!(fit_stationary(Engine::global(), &spec).is_err());
}
