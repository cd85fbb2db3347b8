//! Property tests for the invariants that quantify over all inputs.

use proptest::prelude::*;

use conics::intmath::{gcd3_i64, gcd_u64};
use conics::norms::Rat;
use conics::{
    complete_to_sl3, count_n_brute, count_n_param, IsometricNorm, ParamSystem, SpecialConic,
    TernaryQuadraticForm, UnimodularMatrix,
};

fn arb_form() -> impl Strategy<Value = TernaryQuadraticForm> {
    (
        -9i64..=9,
        -9i64..=9,
        -9i64..=9,
        -9i64..=9,
        -9i64..=9,
        -9i64..=9,
    )
        .prop_filter_map("nonsingular", |(a, b, c, d, e, f)| {
            TernaryQuadraticForm::new(a, b, c, d, e, f).ok()
        })
}

fn arb_special() -> impl Strategy<Value = SpecialConic> {
    (-6i64..=6, -6i64..=6, -6i64..=6, -6i64..=6, -6i64..=6)
        .prop_filter_map("nondegenerate", |(a, b, d, e, f)| {
            SpecialConic::new(a, b, d, e, f).ok()
        })
}

/// Unimodular matrices as short products of elementary shears.
fn arb_unimodular() -> impl Strategy<Value = UnimodularMatrix> {
    proptest::collection::vec((0usize..3, 0usize..3, -3i64..=3), 1..5).prop_map(|shears| {
        let mut m = UnimodularMatrix::identity();
        for (i, j, c) in shears {
            if i == j {
                continue;
            }
            let mut e = [[0i64; 3]; 3];
            for (d, row) in e.iter_mut().enumerate() {
                row[d] = 1;
            }
            e[i][j] = c;
            m = m.mul_matrix(&UnimodularMatrix::new(e).unwrap());
        }
        m
    })
}

fn arb_norm() -> impl Strategy<Value = IsometricNorm> {
    proptest::array::uniform3(proptest::array::uniform3((-4i128..=4, 1i128..=4))).prop_filter_map(
        "invertible",
        |rows| {
            let mut g = [[Rat::from_integer(0); 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    g[i][j] = Rat::new(rows[i][j].0, rows[i][j].1);
                }
            }
            IsometricNorm::from_matrix(g).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// |Delta| and delta are invariant under unimodular substitution, and
    /// the substitution commutes with evaluation.
    #[test]
    fn transform_invariants(q in arb_form(), m in arb_unimodular(),
                            x in proptest::array::uniform3(-50i64..=50)) {
        let qt = q.transform(&m);
        prop_assert_eq!(qt.gram_determinant(), q.gram_determinant());
        prop_assert_eq!(qt.delta_gcd_minors(), q.delta_gcd_minors());
        prop_assert_eq!(qt.evaluate(&x), q.evaluate(&m.mul_vector(&x)));
        let bound = 18 * q.height() * m.sup_norm() * m.sup_norm();
        prop_assert!(qt.height() <= bound);
    }

    /// Norm axioms and the defining inequality of K0 on random samples.
    #[test]
    fn norm_axioms(norm in arb_norm(),
                   x in proptest::array::uniform3(-100.0f64..100.0),
                   y in proptest::array::uniform3(-100.0f64..100.0),
                   lambda in -10.0f64..10.0) {
        let nx = norm.value(&x);
        prop_assert!(nx >= 0.0);
        let scaled = [lambda * x[0], lambda * x[1], lambda * x[2]];
        prop_assert!((norm.value(&scaled) - lambda.abs() * nx).abs() <= 1e-7 * (1.0 + nx));
        let sum = [x[0] + y[0], x[1] + y[1], x[2] + y[2]];
        prop_assert!(norm.value(&sum) <= nx + norm.value(&y) + 1e-7);
        // ||x||_inf <= (K0 - 1) ||x||
        let k0m1 = conics::norms::rat_f64(norm.k0()) - 1.0;
        let sup = x.iter().map(|c| c.abs()).fold(0.0, f64::max);
        prop_assert!(sup <= k0m1 * nx + 1e-7);
    }

    /// Completion postconditions on arbitrary primitive vectors.
    #[test]
    fn completion_postconditions(a in proptest::array::uniform3(-1_000_000i64..=1_000_000)) {
        prop_assume!(gcd3_i64(a[0], a[1], a[2]) == 1);
        let m = complete_to_sl3(&a).unwrap();
        prop_assert_eq!(m.column(1), a);
        prop_assert!(m.sup_norm() <= 3 * a.iter().map(|c| c.abs()).max().unwrap().max(1));
    }

    /// rho* is multiplicative on coprime moduli.
    #[test]
    fn rho_star_multiplicative(s in arb_special(), m in 1u64..40, n in 1u64..40) {
        prop_assume!(gcd_u64(m, n) == 1);
        let sys = ParamSystem::new(&s);
        prop_assert_eq!(
            conics::rho_star(&sys, m * n).unwrap(),
            conics::rho_star(&sys, m).unwrap() * conics::rho_star(&sys, n).unwrap()
        );
    }

    /// The two counting routes agree on arbitrary isotropic forms: the
    /// central oracle equality, as a property over random special shapes
    /// and unimodular images.
    #[test]
    fn param_equals_brute(s in arb_special(), m in arb_unimodular(), b in 1u64..=12) {
        let q = s.as_form().transform(&m);
        prop_assume!(q.height() <= 600);
        let brute = count_n_brute(&q, &IsometricNorm::sup(), b).unwrap();
        let param = count_n_param(&q, &IsometricNorm::sup(), b).unwrap();
        prop_assert_eq!(brute, param.n);
    }

    /// Points produced from parameters always land on the conic and are
    /// primitive; the parameter round-trips when the point is not the
    /// base point.
    #[test]
    fn parametrization_round_trip(s in arb_special(), sp in -60i64..=60, t in -60i64..=60) {
        prop_assume!((sp, t) != (0, 0) && conics::intmath::gcd_i64(sp, t) == 1);
        let sys = ParamSystem::new(&s);
        let p = conics::point_from_parameter(&sys, sp, t).unwrap();
        prop_assert_eq!(s.evaluate(&p.point), 0);
        prop_assert!(conics::intmath::is_primitive(&p.point));
        if !p.exceptional {
            match conics::parameter_from_point(&sys, &p.point).unwrap() {
                conics::ParameterOfPoint::Finite { s: s2, t: t2 } => {
                    let p2 = conics::point_from_parameter(&sys, s2, t2).unwrap();
                    let neg = [-p.point[0], -p.point[1], -p.point[2]];
                    prop_assert!(p2.point == p.point || p2.point == neg);
                }
                conics::ParameterOfPoint::BasePoint => prop_assert!(false, "not exceptional"),
            }
        }
    }
}
