//! Identity contracts over randomly drawn parameters at 128 bits.

use opq_core::geronimus::GGSystem;
use opq_core::jacobi::{jacobi_system, JacobiBasis, JacobiParams};
use opq_core::opsys::{gram_schmidt_oracle, OrthoSystem};
use opq_core::poly::coeff_rel_error;
use opq_core::residual::{combine, poly_residual};
use opq_core::sobolev::{SobolevParams, SobolevSystem};
use opq_core::{Poly, Precision, Real};
use proptest::prelude::*;

const N: usize = 10;

fn prec() -> Precision {
    Precision::new(128).unwrap()
}

fn tol() -> Real {
    prec().half_eps()
}

fn q(num: i64, den: i64) -> Real {
    Real::ratio(num, den, prec())
}

/// `α ∈ (-1, 3)` and `β ∈ (1, 5)` as ratios with denominator 8.
fn gg_params() -> impl Strategy<Value = JacobiParams> {
    (-7i64..24, 9i64..40).prop_map(|(a, b)| JacobiParams::new(q(a, 8), q(b, 8)).unwrap())
}

fn mass() -> impl Strategy<Value = Real> {
    (0i64..40).prop_map(|m| q(m, 4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gg_identities_hold(p in gg_params()) {
        let g = GGSystem::jacobi(&p).unwrap();
        let basis: Vec<Poly> = (0..=N + 2).map(|k| g.gg_poly(k)).collect();
        for n in 0..=N {
            prop_assert!(coeff_rel_error(&basis[n], &g.gg().monic_poly(n)) < tol());

            let t = g.three_term(n);
            let mut rhs = basis[n].shift_mul(&(g.a() + &t.sigma_nn));
            if n > 0 {
                rhs = Poly::axpy(&-t.sigma_nm1, &basis[n - 1], &rhs);
            }
            prop_assert!(poly_residual(&basis[n + 1], &rhs, 11, prec()) < tol(), "three-term n={}", n);

            let f = g.five_term(n);
            let mut coeffs = vec![Real::zero(prec()); n + 3];
            coeffs[n + 2] = Real::one(prec());
            coeffs[n + 1] = f.a_pp1.clone();
            coeffs[n] = f.a_p0.clone();
            if n >= 1 {
                coeffs[n - 1] = f.a_m1.clone();
            }
            if n >= 2 {
                coeffs[n - 2] = f.a_m2.clone();
            }
            let lhs = basis[n].shift_square(g.a());
            prop_assert!(poly_residual(&lhs, &combine(&coeffs, &basis), 11, prec()) < tol(), "five-term n={}", n);

            let c = g.base_to_gg(n);
            let mut rhs = basis[n + 2].clone();
            rhs = Poly::axpy(&c.s_pp1, &basis[n + 1], &rhs);
            rhs = Poly::axpy(&c.s_p0, &basis[n], &rhs);
            let lhs = g.base().monic_poly(n).shift_square(g.a());
            prop_assert!(poly_residual(&lhs, &rhs, 11, prec()) < tol(), "connection n={}", n);

            if n >= 2 {
                let (closed, _) = g.gg_norm_sq(n);
                let quad = g.gg_norm_sq_quadrature(n);
                prop_assert!((&closed - &quad).abs() < tol() * quad.abs());
            }
        }
    }

    #[test]
    fn sobolev_polys_are_s_orthogonal(p in gg_params(), m in mass(), dm in mass()) {
        let sp = SobolevParams::new(m, dm, q(-1, 1)).unwrap();
        let s = SobolevSystem::new(JacobiBasis::new(&p), sp).unwrap();
        let oracle = gram_schmidt_oracle(|x, y| s.inner(x, y), N, prec()).unwrap();
        for (n, o) in oracle.iter().enumerate() {
            let qn = s.q_poly(n).unwrap();
            prop_assert!(coeff_rel_error(&qn, o) < tol(), "n={}", n);
            prop_assert_eq!(qn.leading(), Some(&Real::one(prec())));
            let direct = s.inner(&qn, &qn);
            let closed = s.q_norm_sq(n).unwrap();
            prop_assert!((&direct - &closed).abs() < tol() * direct.abs());
        }
    }

    #[test]
    fn sobolev_expansion_in_gg_basis_is_complete(p in gg_params(), m in mass(), dm in mass()) {
        let g = GGSystem::jacobi(&p).unwrap();
        let sp = SobolevParams::new(m, dm, q(-1, 1)).unwrap();
        let s = SobolevSystem::new(jacobi_system(&p), sp).unwrap();
        let basis: Vec<Poly> = (0..=N + 2).map(|k| g.gg_poly(k)).collect();
        for n in 0..=N {
            let c = s.qq_connection(&g, n).unwrap();
            let mut coeffs = s.qq_tail(&g, n).unwrap();
            let lead = [c.a_m2, c.a_m1, c.a_p0, c.a_pp1, Real::one(prec())];
            let skip = 2usize.saturating_sub(n);
            coeffs.extend(lead.into_iter().skip(skip));
            prop_assert_eq!(coeffs.len(), n + 3);
            let lhs = s.q_poly(n).unwrap().shift_square(g.a());
            prop_assert!(poly_residual(&lhs, &combine(&coeffs, &basis), 11, prec()) < tol(), "n={}", n);
        }
    }
}

/// A mass point off the support: `a = -3/2` with the plain monic family.
#[test]
fn sobolev_off_the_support() {
    let p = JacobiParams::new(q(1, 2), q(-1, 2)).unwrap();
    let sp = SobolevParams::new(q(3, 1), q(1, 2), q(-3, 2)).unwrap();
    let s: SobolevSystem<OrthoSystem> = SobolevSystem::new(jacobi_system(&p), sp).unwrap();
    let oracle = gram_schmidt_oracle(|x, y| s.inner(x, y), 8, prec()).unwrap();
    for (n, o) in oracle.iter().enumerate() {
        assert!(coeff_rel_error(&s.q_poly(n).unwrap(), o) < tol(), "n={n}");
        assert!(coeff_rel_error(&s.q_poly_determinant(n).unwrap(), o) < tol(), "n={n}");
    }
}
