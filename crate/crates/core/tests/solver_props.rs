mod common;

use common::rel;
use proptest::prelude::*;
use sylvlike::gen::{gaussian, generate, random_operator, seeded_rng, InstanceKind};
use sylvlike::solvability::Tolerances;
use sylvlike::solvers::{closed_form_preserving_trace, matrix_polynomial, solve, solve_kron, ClosedFormVariant, Method, Problem};
use sylvlike::{c64, Algebra, Error, Matrix, OperatorKind};

fn kind() -> impl Strategy<Value = OperatorKind> {
    prop::sample::select(OperatorKind::ALL.to_vec())
}

fn solvable() -> impl Strategy<Value = InstanceKind> {
    prop::sample::select(vec![InstanceKind::Generic, InstanceKind::ConditionA, InstanceKind::ConditionB])
}

fn instance(seed: u64, kind: OperatorKind, inst: InstanceKind, m: usize) -> Problem {
    let mut rng = seeded_rng(seed);
    let f = random_operator(&mut rng, kind, m);
    generate(&mut rng, inst, m, &f).unwrap()
}

fn acceptable(e: &Error) -> bool {
    matches!(e, Error::MethodNotApplicable { .. } | Error::ResidualCheckFailed { .. } | Error::SingularClosedFormMatrix { .. })
}

proptest! {
    #![proptest_config(common::config(120))]

    #[test]
    fn reports_are_accurate_and_agree(seed in any::<u64>(), m in 1usize..=6, kind in kind(), inst in solvable()) {
        let p = instance(seed, kind, inst, m);
        let tol = Tolerances::default();
        let kron = solve_kron(&p).unwrap();
        prop_assert!(kron.residual <= 1e-8);
        for method in [Method::Auto, Method::Reduction, Method::ClosedForm] {
            match solve(&p, method, &tol) {
                Ok(r) => {
                    prop_assert!(r.residual <= 1e-8, "{:?}: {:e}", method, r.residual);
                    prop_assert!(rel(&r.x, &kron.x) <= 1e-7, "{:?}: {:e}", method, rel(&r.x, &kron.x));
                }
                Err(e) => prop_assert!(acceptable(&e), "{:?}: {}", method, e),
            }
        }
    }

    #[test]
    fn solution_is_linear_in_rhs(seed in any::<u64>(), m in 1usize..=5, kind in kind(), alpha in -3.0f64..3.0) {
        let p = instance(seed, kind, InstanceKind::ConditionA, m);
        let mut rng = seeded_rng(seed ^ 1);
        let c2 = gaussian(&mut rng, m, m);
        let x = |c: Matrix| solve_kron(&p.with_rhs(c).unwrap()).unwrap().x;
        let (x1, x2) = (x(p.c.clone()), x(c2.clone()));
        prop_assert!(rel(&x(&p.c + &c2), &(&x1 + &x2)) <= 1e-9);
        prop_assert!(rel(&x(p.c.scale_real(alpha)), &x1.scale_real(alpha)) <= 1e-9);
        if !p.f.is_conjugating() {
            let z = c64(alpha, 1.0);
            prop_assert!(rel(&x(p.c.scale(z)), &x1.scale(z)) <= 1e-9);
        }
    }

    #[test]
    fn telescoping_identity(
        seed in any::<u64>(),
        m in 1usize..=5,
        kind in prop::sample::select(vec![OperatorKind::Identity, OperatorKind::Conjugate, OperatorKind::PermSimilarity]),
        cha in any::<bool>(),
    ) {
        let p = instance(seed, kind, InstanceKind::ConditionB, m);
        prop_assert_eq!(p.f.algebra(), Algebra::Preserving);
        let variant = if cha { ClosedFormVariant::ChA } else { ClosedFormVariant::ChB };
        let t = closed_form_preserving_trace(&p, variant).unwrap();
        let mut lhs = Matrix::zeros(m, m);
        let mut scale = 0.0;
        for (i, &pi) in t.poly.iter().enumerate() {
            let (bi, ai) = (t.cal_b.powi(i as u32), t.cal_a.powi(i as u32));
            lhs = &lhs + &(&(&t.x * &bi) - &(&ai * &t.x)).scale(pi);
            scale += pi.norm() * t.x.norm_fro() * (bi.norm_fro() + ai.norm_fro());
        }
        let rhs = if cha {
            &t.x * &matrix_polynomial(&t.poly, &t.cal_b)
        } else {
            -&(&matrix_polynomial(&t.poly, &t.cal_a) * &t.x)
        };
        prop_assert!((&lhs - &rhs).norm_fro() <= 1e-8 * scale);
    }
}
