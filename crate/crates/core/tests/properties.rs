use std::collections::BTreeMap;
use num_traits::{One, Zero};
use proptest::prelude::*;
use sato_darboux::darboux::{build_transform, psi_wronskian, tau_wronskian, KernelSpec, TransformInput};
use sato_darboux::diffop::{conjugate, kernel_operator, right_divide, DiffOp};
use sato_darboux::expfun::{wronskian, Condition, ExpPoly};
use sato_darboux::fraction::ExpPolyFraction;
use sato_darboux::mpoly::{monomials_up_to, MPoly};
use sato_darboux::plane::PlaneSpec;
use sato_darboux::poly::Poly;
use sato_darboux::series::{miwa_shift_poly, TruncOrders, TruncatedSeries};
use sato_darboux::{Cyclotomic, Field, Rational};

type Q = Rational;
type Frac = ExpPolyFraction<Q>;

fn rat() -> impl Strategy<Value = Q> {
    (-5i64..=5, 1i64..=3).prop_map(|(p, q)| Q::from_ratio(p, q))
}

fn cyc() -> impl Strategy<Value = Cyclotomic> {
    prop::collection::vec(rat(), 0..=4).prop_map(|c| Cyclotomic::from_coeffs(5, c).unwrap())
}

const NV: usize = 2;
const BOUND: i32 = 4;

fn series() -> impl Strategy<Value = TruncatedSeries<Q>> {
    let monos = monomials_up_to(NV, BOUND);
    prop::collection::vec(rat(), monos.len())
        .prop_map(move |cs| TruncatedSeries::from_terms(NV, BOUND, monos.clone().into_iter().zip(cs)))
}

fn mpoly() -> impl Strategy<Value = MPoly<Q>> {
    let monos = monomials_up_to(3, 3);
    prop::collection::vec(prop_oneof![3 => Just(Q::from_i64(0)), 2 => rat()], monos.len())
        .prop_map(move |cs| MPoly::from_terms(3, monos.clone().into_iter().zip(cs)))
}

fn exppoly() -> impl Strategy<Value = ExpPoly<Q>> {
    prop::collection::vec((-2i64..=2, rat(), rat()), 1..=3).prop_map(|ts| {
        let mut e = ExpPoly::from_poly(Poly::new(Vec::new()));
        for (mu, a, b) in ts {
            e.add_term(Q::from_i64(mu), Poly::new(vec![a, b]));
        }
        e
    })
}

fn frac() -> impl Strategy<Value = Frac> {
    exppoly().prop_map(Frac::from_exppoly)
}

/// c_i e^{μ_i x} with distinct μ_i and c_i ≠ 0; linearly independent.
fn kernel_fns(max: usize) -> impl Strategy<Value = Vec<Frac>> {
    prop::sample::subsequence(vec![-2i64, -1, 1, 2, 3], 1..=max).prop_flat_map(|mus| {
        let n = mus.len();
        prop::collection::vec((1i64..=3, prop::bool::ANY), n).prop_map(move |cs| {
            mus.iter()
                .zip(cs)
                .map(|(&mu, (c, neg))| {
                    let c = Q::from_i64(if neg { -c } else { c });
                    Frac::from_exppoly(ExpPoly::exp(Q::from_i64(mu)).scale(&c))
                })
                .collect()
        })
    })
}

fn diffop(max_order: usize) -> impl Strategy<Value = DiffOp<Q>> {
    prop::collection::vec(frac(), 1..=max_order + 1).prop_map(DiffOp::new)
}

fn const_diffop() -> impl Strategy<Value = DiffOp<Q>> {
    prop::collection::vec(rat(), 1..=3).prop_map(|c| DiffOp::constant_coeffs(&Poly::new(c)))
}

fn product(a: &BTreeMap<i32, MPoly<Q>>, b: &BTreeMap<i32, MPoly<Q>>) -> BTreeMap<i32, MPoly<Q>> {
    let mut out: BTreeMap<i32, MPoly<Q>> = BTreeMap::new();
    for (i, x) in a {
        for (j, y) in b {
            let e = out.entry(i + j).or_insert_with(|| MPoly::zero(3));
            *e = e.clone() + x.clone() * y.clone();
        }
    }
    out.retain(|_, p| !p.is_zero());
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cyclotomic_field_axioms(a in cyc(), b in cyc(), c in cyc()) {
        prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
        if !a.is_zero() {
            prop_assert!((a.clone() * a.try_inv().unwrap()).is_one());
        } else {
            prop_assert!(a.try_inv().is_err());
        }
    }

    #[test]
    fn zeta_has_order_m(k in 1u32..=12) {
        let z = Cyclotomic::zeta(k);
        prop_assert!(z.pow(k).is_one());
    }

    #[test]
    fn series_ring_axioms(a in series(), b in series(), c in series()) {
        prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
        prop_assert_eq!(a.clone() - a.clone(), TruncatedSeries::zero(NV, BOUND));
    }

    #[test]
    fn series_exp_is_a_homomorphism(a in series(), b in series()) {
        let a = a.clone() - TruncatedSeries::constant(NV, BOUND, a.constant_term());
        let b = b.clone() - TruncatedSeries::constant(NV, BOUND, b.constant_term());
        let one = TruncatedSeries::one(NV, BOUND);
        prop_assert_eq!(a.exp().unwrap() * a.scale(&Q::from_i64(-1)).exp().unwrap(), one);
        prop_assert_eq!((a.clone() + b.clone()).exp().unwrap(), a.exp().unwrap() * b.exp().unwrap());
    }

    #[test]
    fn series_inverse(a in series()) {
        prop_assume!(!a.constant_term().is_zero());
        prop_assert_eq!(a.clone() * a.invert().unwrap(), TruncatedSeries::one(NV, BOUND));
    }

    /// Coefficients below a bound never depend on data above it.
    #[test]
    fn truncation_commutes_with_products(a in series(), b in series(), k in 0i32..BOUND) {
        let lhs = (a.clone() * b.clone()).truncate(k);
        let rhs = (a.truncate(k) * b.truncate(k)).truncate(k);
        prop_assert_eq!(lhs, rhs);
        prop_assert!(a.truncate(k).agrees_with(&a));
    }

    #[test]
    fn miwa_shift_is_multiplicative(a in mpoly(), b in mpoly()) {
        let lhs = miwa_shift_poly(&(a.clone() * b.clone()));
        prop_assert_eq!(lhs, product(&miwa_shift_poly(&a), &miwa_shift_poly(&b)));
    }

    #[test]
    fn miwa_shift_keeps_z_zero_part(a in mpoly()) {
        let s = miwa_shift_poly(&a);
        prop_assert_eq!(s.get(&0).cloned().unwrap_or_else(|| MPoly::zero(3)), a);
        prop_assert!(s.keys().all(|&k| k <= 0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wronskian_alternates(f in exppoly(), g in exppoly()) {
        let one = ExpPoly::constant(Q::from_i64(1));
        prop_assert!(wronskian(&[f.clone(), g.clone(), f.clone()], one.clone()).is_zero());
        prop_assert_eq!(
            wronskian(&[g.clone(), f.clone()], one.clone()),
            -wronskian(&[f.clone(), g.clone()], one.clone())
        );
    }

    #[test]
    fn wronskian_is_multilinear(f1 in exppoly(), f2 in exppoly(), g in exppoly(), a in rat()) {
        let one = ExpPoly::constant(Q::from_i64(1));
        let lhs = wronskian(&[f1.scale(&a) + f2.clone(), g.clone()], one.clone());
        let rhs = wronskian(&[f1, g.clone()], one.clone()).scale(&a) + wronskian(&[f2, g], one);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn kernel_operator_kills_its_kernel(fs in kernel_fns(3)) {
        let p = kernel_operator(&fs).unwrap();
        prop_assert_eq!(p.order(), fs.len());
        prop_assert!(p.is_monic());
        for f in &fs {
            prop_assert!(p.apply(f).is_zero());
        }
    }

    #[test]
    fn right_division_composes_back(fs in kernel_fns(2), l in diffop(3)) {
        let p = kernel_operator(&fs).unwrap();
        let (q, r) = right_divide(&l, &p).unwrap();
        prop_assert!(r.is_zero() || r.order() < p.order());
        prop_assert_eq!(q.compose(&p) + r, l);
    }

    /// Constant-coefficient L preserves a span of exponentials.
    #[test]
    fn conjugate_intertwines(fs in kernel_fns(2), l in const_diffop()) {
        let p = kernel_operator(&fs).unwrap();
        let lbar = conjugate(&p, &l).unwrap();
        prop_assert_eq!(lbar.compose(&p), p.compose(&l));
        prop_assert_eq!(lbar.order(), l.order());
    }
}

fn lambdas() -> impl Strategy<Value = Vec<i64>> {
    prop::sample::subsequence(vec![-3i64, -2, -1, 1, 2, 3], 1..=2)
}

fn transform(lams: &[i64], g: Option<Poly<Q>>, h: Option<Poly<Q>>) -> sato_darboux::Result<sato_darboux::darboux::DarbouxTransform<Q>> {
    let conds: Vec<Condition<Q>> = lams.iter().map(|&l| Condition::eval(0, Q::from_i64(l))).collect();
    let kernel = KernelSpec::from_conditions(&conds, 1, 1)?;
    build_transform(TransformInput { plane: PlaneSpec::h_plus(1), kernel, g, h, nvars: 4 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// With g = h_0 and h = h_0·(z − c), f = z − c and Q ∘ P = h(∂).
    #[test]
    fn degree_bookkeeping(lams in lambdas(), c in -3i64..=3) {
        let kernel = KernelSpec::from_conditions(
            &lams.iter().map(|&l| Condition::eval(0, Q::from_i64(l))).collect::<Vec<_>>(), 1, 1).unwrap();
        let h0 = kernel.default_h(1);
        let h = h0.clone() * Poly::linear_root(Q::from_i64(c));
        let t = transform(&lams, Some(h0), Some(h.clone())).unwrap();
        let f = t.f.clone().unwrap();
        prop_assert_eq!(&f, &Poly::linear_root(Q::from_i64(c)));
        prop_assert_eq!(f.deg() + t.g.deg(), t.h.deg());
        prop_assert_eq!(t.p.order(), lams.len());
        let q = t.q.clone().unwrap();
        prop_assert_eq!(q.compose(&t.p), DiffOp::constant_coeffs(&h));
    }

    /// The z⁻¹ coefficient of the wave tail is −∂ₓ log τ.
    #[test]
    fn first_coefficient_law(lams in lambdas()) {
        let t = transform(&lams, None, None).unwrap();
        let orders = TruncOrders::new(6, 3, 4).unwrap();
        let psi = psi_wronskian(&t, &orders).unwrap();
        let tau = tau_wronskian(&t, &orders).unwrap();
        prop_assume!(!tau.constant_term().is_zero());
        let d = tau.derivative_t1();
        let log_d = d.checked_mul(&tau.invert().unwrap().truncate(d.bound())).unwrap();
        let w1 = psi.tail.coeff(-1, log_d.bound());
        prop_assert!(w1.agrees_with(&log_d.scale(&Q::from_i64(-1))), "w1 = {:?}", w1.first_difference(&log_d));
    }
}
