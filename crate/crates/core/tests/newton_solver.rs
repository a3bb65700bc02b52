use mdrk_core::linalg::Lu;
use mdrk_core::mdrk::{Coupling, Formulation, MethodSpec};
use mdrk_core::newton::{self, empirical_order_eps, NewtonConfig};
use mdrk_core::odesys::{pareschi_russo, Matrix};
use mdrk_core::tableau::builtin_tableau;
use mdrk_core::{Result, StrategyKind};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

type NoJac = fn(&DVector<f64>) -> Result<Matrix>;

fn brute_force_cond1(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let lu = a.clone().lu();
    let mut inv = DMatrix::zeros(n, n);
    for j in 0..n {
        let e = DVector::from_fn(n, |i, _| if i == j { 1.0 } else { 0.0 });
        inv.set_column(j, &lu.solve(&e).unwrap());
    }
    let norm1 = |m: &DMatrix<f64>| m.column_iter().map(|c| c.abs().sum()).fold(0.0, f64::max);
    norm1(a) * norm1(&inv)
}

#[test]
fn cond1_matches_brute_force_on_random_matrices() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..200 {
        let mut a = DMatrix::from_fn(6, 6, |_, _| rng.gen_range(-1.0..1.0));
        a += DMatrix::identity(6, 6) * 3.0;
        let lu = Lu::factor(&a, 0.0).unwrap();
        let got = lu.cond1(&a);
        let want = brute_force_cond1(&a);
        assert!((got - want).abs() < 1e-8 * want, "{got} vs {want}");
    }
}

fn stage_system(eps: f64, strategy: StrategyKind) -> (MethodSpec, mdrk_core::FluxModel) {
    let spec = MethodSpec::new(
        builtin_tableau("ImplTaylor-3").unwrap(),
        strategy,
        Formulation::Direct,
        Coupling::Dimdrk,
    )
    .unwrap();
    (spec, pareschi_russo(eps).unwrap())
}

#[test]
fn fd_jacobian_matches_analytic_chain_on_pr() {
    let (spec, model) = stage_system(1.0, StrategyKind::Approximate);
    let sys = spec.first_system(&model, model.y0(), 1.0).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for _ in 0..20 {
        let x = sys.initial_guess().unwrap().map(|v| v + rng.gen_range(-0.5..0.5));
        let analytic = sys.analytic_jacobian(&x).unwrap();
        let fd = sys.fd_jacobian(&x, f64::EPSILON.sqrt()).unwrap();
        assert!((&fd - &analytic).norm() < 1e-5 * analytic.norm());
    }
}

#[test]
fn quadratic_local_convergence_on_pr() {
    let (spec, model) = stage_system(1.0, StrategyKind::Exact);
    let sys = spec.first_system(&model, model.y0(), 1.0).unwrap();
    let (_, rep) = newton::solve(
        |x: &DVector<f64>| sys.residual(x),
        None::<NoJac>,
        &sys.initial_guess().unwrap(),
        &NewtonConfig::default(),
    )
    .unwrap();
    assert!(rep.converged);
    let r = &rep.residuals;
    let mut checked = 0;
    for i in 1..r.len() {
        if r[i - 1] < 1e-2 && r[i] > 1e-13 {
            assert!(r[i] / r[i - 1].powi(2) < 1e2, "ratio at {i}: {:?}", r);
            checked += 1;
        }
    }
    assert!(checked > 0, "no iterate in the local regime: {r:?}");
}

#[test]
fn table_one_first_row() {
    let (spec, model) = stage_system(1.0, StrategyKind::Approximate);
    let sys = spec.first_system(&model, model.y0(), 1.0).unwrap();
    let (_, rep) = newton::solve(
        |x: &DVector<f64>| sys.residual(x),
        None::<NoJac>,
        &sys.initial_guess().unwrap(),
        &NewtonConfig::conditioning(),
    )
    .unwrap();
    assert!(rep.converged);
    assert!((3..=10).contains(&rep.n_iter), "{}", rep.n_iter);
    assert!(rep.mean_cond1 > 4.45 / 2.0 && rep.mean_cond1 < 4.45 * 2.0, "{}", rep.mean_cond1);
    assert_eq!(rep.cond1.len(), rep.n_iter);
    assert_eq!(rep.residuals.len(), rep.n_iter);
}

#[test]
fn eo_eps_reproduces_table_value() {
    let eo = empirical_order_eps(&[(1e-2, 2.69e5), (1e-3, 2.71e8)]).unwrap();
    assert!((eo[0] - 3.003).abs() < 0.01);
}

proptest! {
    #[test]
    fn accepted_damped_steps_reduce_the_residual(x0 in -20.0f64..20.0, y0 in -20.0f64..20.0, c in 0.1f64..3.0) {
        let residual = |v: &DVector<f64>| -> Result<DVector<f64>> {
            Ok(DVector::from_vec(vec![v[0].atan() + 0.1 * v[1], c * v[1].atan() - 0.2 * v[0]]))
        };
        let (_, rep) = newton::solve(residual, None::<NoJac>, &DVector::from_vec(vec![x0, y0]), &NewtonConfig::default()).unwrap();
        let mut prev = rep.initial_residual;
        for (res, eta) in rep.residuals.iter().zip(&rep.step_fractions) {
            if *eta < 1.0 {
                prop_assert!(*res < prev);
            }
            prev = *res;
        }
    }

    #[test]
    fn mean_cond_is_arithmetic_mean(a in 0.5f64..4.0, b in -2.0f64..2.0) {
        let residual = move |v: &DVector<f64>| -> Result<DVector<f64>> {
            Ok(DVector::from_vec(vec![a * v[0] + v[1].powi(3) - 1.0, v[1] + b * v[0].sin()]))
        };
        let (_, rep) = newton::solve(residual, None::<NoJac>, &DVector::from_vec(vec![0.3, 0.1]), &NewtonConfig::default()).unwrap();
        if !rep.cond1.is_empty() {
            let mean = rep.cond1.iter().sum::<f64>() / rep.cond1.len() as f64;
            prop_assert!((rep.mean_cond1 - mean).abs() <= 1e-12 * mean);
        }
    }
}
