//! Properties of the endpoint convergence scans.

use opq_core::asymptotics::{
    default_grid, derivative_ratio_scan, endpoint_limit_scan, gamma_ratio_scan, kernel_limit_scan, norm_limit_scan,
    norm_ratio_scan, ConvergenceTable,
};
use opq_core::jacobi::{jacobi_system, JacobiParams};
use opq_core::opsys::Family;
use opq_core::sobolev::{SobolevParams, SobolevSystem};
use opq_core::{Precision, Real};
use proptest::prelude::*;

fn jp(a: i64, b: i64, den: i64, prec: Precision) -> JacobiParams {
    JacobiParams::new(Real::ratio(a, den, prec), Real::ratio(b, den, prec)).unwrap()
}

fn masses(m: i64, n: i64, prec: Precision) -> SobolevParams {
    SobolevParams::new(Real::ratio(m, 4, prec), Real::ratio(n, 4, prec), Real::from_i64(-1, prec)).unwrap()
}

fn scans(a: i64, b: i64, m: i64, n: i64, prec: Precision, ns: &[usize]) -> Vec<ConvergenceTable> {
    let p = jp(a, b, 4, prec);
    let sp = masses(m, n, prec);
    vec![
        gamma_ratio_scan(3, 1, ns, prec).unwrap(),
        endpoint_limit_scan(&p, 2, ns).unwrap(),
        norm_limit_scan(&p, ns).unwrap(),
        kernel_limit_scan(&p, 2, 1, ns).unwrap(),
        derivative_ratio_scan(&p, &sp, 2, ns).unwrap(),
        norm_ratio_scan(&p, &sp, ns).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn kernel_scan_is_symmetric(a in -3i64..12, b in -3i64..12, k in 0usize..4, s in 0usize..4) {
        let p = jp(a, b, 4, Precision::DEFAULT);
        let ns = default_grid(256);
        prop_assert_eq!(kernel_limit_scan(&p, k, s, &ns).unwrap().rows, kernel_limit_scan(&p, s, k, &ns).unwrap().rows);
    }

    #[test]
    fn doubling_precision_leaves_values_unchanged(a in -3i64..12, b in -3i64..12, m in 1i64..40, n in 1i64..40) {
        let lo = Precision::new(128).unwrap();
        let ns = default_grid(200);
        let tol = lo.half_eps();
        for (x, y) in scans(a, b, m, n, lo, &ns).iter().zip(&scans(a, b, m, n, lo.doubled(), &ns)) {
            for (r, s) in x.rows.iter().zip(&y.rows) {
                prop_assert!((&r.value - &s.value).abs() <= &tol * s.value.abs(), "{} n={}", x.kind, r.n);
            }
        }
    }

    #[test]
    fn derivative_ratio_limit_ignores_masses(m in 1i64..80, n in 1i64..80) {
        let prec = Precision::DEFAULT;
        let p = jp(0, 4, 4, prec);
        let ns = default_grid(4096);
        let base = derivative_ratio_scan(&p, &masses(4, 4, prec), 2, &ns).unwrap();
        let other = derivative_ratio_scan(&p, &masses(m, n, prec), 2, &ns).unwrap();
        let (x, y) = (base.last().unwrap(), other.last().unwrap());
        let spread = (&x.value - &y.value).abs();
        prop_assert!(spread <= x.abs_error.clone().max(y.abs_error.clone()) * 3);
    }
}

#[test]
fn errors_decrease_from_64() {
    let ns = default_grid(4096);
    for t in scans(0, 4, 4, 4, Precision::DEFAULT, &ns) {
        assert!(t.errors_decreasing_from(64), "{}", t.kind);
    }
}

#[test]
fn zero_masses_give_unit_norm_ratio() {
    let prec = Precision::DEFAULT;
    let t = norm_ratio_scan(&jp(2, 6, 4, prec), &masses(0, 0, prec), &default_grid(1024)).unwrap();
    assert!(t.rows.iter().all(|r| r.value == 1));
    assert!(derivative_ratio_scan(&jp(2, 6, 4, prec), &masses(0, 0, prec), 2, &[4, 8]).is_err());
    assert!(norm_ratio_scan(&jp(2, 6, 4, prec), &masses(0, 4, prec), &[4, 8]).is_err());
}

/// The ratio is at least one exactly when the mass cross term is
/// non-negative; checked against the polynomial route for small n.
#[test]
fn norm_ratio_against_cross_term_sign() {
    let prec = Precision::DEFAULT;
    let p = jp(0, 4, 4, prec);
    let sp = masses(4, 4, prec);
    let ns: Vec<usize> = (1..=24).collect();
    let t = norm_ratio_scan(&p, &sp, &ns).unwrap();
    let s = SobolevSystem::new(jacobi_system(&p), sp.clone()).unwrap();
    let a = Real::from_i64(-1, prec);
    for row in &t.rows {
        let q = s.q_endpoint(row.n).unwrap();
        let pn = s.family().member(row.n);
        let cross = sp.mass() * &q.q_at_a * pn.eval(&a) + sp.deriv_mass() * &q.dq_at_a * pn.derivative(1).eval(&a);
        assert!(row.value.is_positive());
        assert_eq!(row.value >= 1, !cross.is_negative(), "n={}", row.n);
    }
}

#[test]
fn ratio_limit_examples() {
    let prec = Precision::DEFAULT;
    let sp = masses(4, 4, prec);
    let zero = derivative_ratio_scan(&jp(0, 4, 4, prec), &sp, 0, &[16]).unwrap();
    assert!(zero.limit().unwrap().is_zero());
    let three = derivative_ratio_scan(&jp(0, 0, 4, prec), &sp, 3, &[16]).unwrap();
    let expect = Real::ratio(3, 10, prec);
    assert!((three.limit().unwrap() - expect).abs() < prec.half_eps());
}
