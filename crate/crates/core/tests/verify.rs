use num_traits::One;
use sato_darboux::darboux::{build_transform, spectral_algebra, DarbouxTransform, KernelSpec, TransformInput};
use sato_darboux::diffop::{dress, DiffOp};
use sato_darboux::expfun::Condition;
use sato_darboux::mpoly::MPoly;
use sato_darboux::plane::PlaneSpec;
use sato_darboux::poly::Poly;
use sato_darboux::series::{TruncOrders, TruncatedSeries};
use sato_darboux::verify::{
    algebra_identity, check_fay, dressing_identity, eigen_identity, eigen_input, fay_sides, operator_identity,
    run_suite, Verdict, SuiteConfig,
};
use sato_darboux::{Error, Field, Rational};

type Q = Rational;

fn q(n: i64) -> Q {
    Q::from_i64(n)
}

fn poly(c: &[i64]) -> Poly<Q> {
    Poly::new(c.iter().map(|&x| q(x)).collect())
}

fn orders() -> TruncOrders {
    TruncOrders::new(5, 3, 4).unwrap()
}

fn lambda_two() -> DarbouxTransform<Q> {
    let kernel = KernelSpec::from_conditions(&[Condition::eval(0, q(2))], 1, 1).unwrap();
    build_transform(TransformInput {
        plane: PlaneSpec::h_plus(1),
        kernel,
        g: None,
        h: Some(poly(&[0, -2, 1])),
        nvars: 4,
    })
    .unwrap()
}

fn cosh() -> DarbouxTransform<Q> {
    let kernel = KernelSpec { points: vec![(q(1), 1), (q(-1), 1)], matrix: vec![vec![q(1), q(1)]] };
    build_transform(TransformInput { plane: PlaneSpec::h_plus(1), kernel, g: None, h: None, nvars: 4 }).unwrap()
}

#[test]
fn full_suite_passes_on_lambda_two() {
    let reports = run_suite(&lambda_two(), None, &SuiteConfig::new(orders())).unwrap();
    assert_eq!(reports.len(), 8);
    for r in &reports {
        assert!(r.verdict.is_pass(), "{r}");
    }
}

#[test]
fn suite_selection() {
    let t = lambda_two();
    let cfg = SuiteConfig::new(orders());
    assert!(run_suite(&t, Some(&[]), &cfg).unwrap().is_empty());
    let sel = vec!["rank".to_string(), "eigen".to_string()];
    let names: Vec<String> = run_suite(&t, Some(&sel), &cfg).unwrap().into_iter().map(|r| r.name).collect();
    assert_eq!(names, vec!["eigen", "rank"]);
    let bad = vec!["nonsense".to_string()];
    assert!(matches!(run_suite(&t, Some(&bad), &cfg), Err(Error::UnknownCheck(_))));
}

#[test]
fn cosh_suite() {
    for r in run_suite(&cosh(), None, &SuiteConfig::new(orders())).unwrap() {
        assert!(!r.verdict.is_fail(), "{r}");
    }
}

#[test]
fn fay_examples() {
    assert_eq!(check_fay(&MPoly::<Q>::one(3), 1).verdict, Verdict::ExactPass);
    assert_eq!(check_fay(&MPoly::<Q>::var(3, 0, q(1)), 1).verdict, Verdict::ExactPass);
    assert_eq!(check_fay(&MPoly::<Q>::var(3, 0, q(1)), 2).verdict, Verdict::ExactPass);
    let (l, r) = fay_sides(&MPoly::<Q>::var(3, 0, q(1)), 1);
    assert!(l.identify(0, 1).is_zero());
    assert!(r.identify(0, 1).is_zero());
    // 1 + t₂ violates the Plücker relations
    let bad = MPoly::one(3) + MPoly::var(3, 1, q(1));
    assert!(check_fay(&bad, 1).verdict.is_fail());
}

#[test]
fn eigen_mutation() {
    let t = lambda_two();
    let mut inp = eigen_input(&t, &orders()).unwrap();
    assert_eq!(eigen_identity(&inp).unwrap(), None);
    inp.q = inp.q.clone() + DiffOp::scalar(q(1));
    let w = eigen_identity(&inp).unwrap().expect("witness");
    assert!(w.location.contains("D^0"), "{w:?}");
}

#[test]
fn dressing_mutation() {
    let t = cosh();
    let tail = t.wave_w.tail_series(&orders(), &t.plane.base_point).unwrap();
    let (_, mut l) = dress(&tail).unwrap();
    assert_eq!(dressing_identity(&tail, &l), None);
    l.add(-1, TruncatedSeries::constant(3, 5, q(1)));
    assert!(dressing_identity(&tail, &l).is_some());

    let alg = spectral_algebra(&t, 2).unwrap();
    let (u, op) = alg.operators[0].clone();
    assert_eq!(u, poly(&[0, 0, 1]));
    let o = TruncOrders::new(7, 1, 4).unwrap();
    let tail1 = t.wave_w.tail_series(&o, &q(0)).unwrap();
    assert_eq!(operator_identity(&op, &u, &tail1, &q(0)).unwrap(), None);
    let bad = op + DiffOp::scalar(q(1));
    assert!(operator_identity(&bad, &u, &tail1, &q(0)).unwrap().is_some());
}

#[test]
fn algebra_mutation() {
    let t = cosh();
    let kd = t.kernel.as_ref().unwrap();
    let m = kd.spec.l_matrix(1, 1).unwrap();
    let mut basis = spectral_algebra(&t, 3).unwrap().basis;
    assert_eq!(algebra_identity(&basis, &m, &kd.spec.matrix, 1, None).unwrap(), None);
    basis[2] = poly(&[0, -2, 0, 1]);
    assert!(algebra_identity(&basis, &m, &kd.spec.matrix, 1, None).unwrap().is_some());
    assert!(algebra_identity(&[Poly::one(), poly(&[0, 0, 1])], &m, &kd.spec.matrix, 1, None).unwrap().is_some());
}
