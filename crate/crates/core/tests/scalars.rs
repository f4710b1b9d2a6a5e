use gradef::random::{Gen, Shape};
use gradef::scalars::*;
use gradef::Error;
use proptest::prelude::*;

fn ctx() -> Ctx {
    TruncationCtx::new(2, vec![-1, -1, -2], 4, -2, 4).unwrap()
}

#[test]
fn odd_parameter_squares_to_zero() {
    let c = ctx();
    let e1 = BaseSeries::param(&c, 0).unwrap();
    assert!(base_mul(&e1, &e1).unwrap().is_zero());
    let e3 = BaseSeries::param(&c, 2).unwrap();
    assert!(!base_mul(&e3, &e3).unwrap().is_zero());
}

#[test]
fn eps_squares() {
    let c = ctx();
    let e = BaseSeries::eps(&c, 1);
    assert_eq!(base_mul(&e, &e).unwrap(), BaseSeries::eps(&c, 2));
}

#[test]
fn odd_parameters_anticommute() {
    let c = ctx();
    let e1 = BaseSeries::param(&c, 0).unwrap();
    let e2 = BaseSeries::param(&c, 1).unwrap();
    let s = base_mul(&e1, &e2).unwrap().add(&base_mul(&e2, &e1).unwrap()).unwrap();
    assert!(s.is_zero());
}

#[test]
fn mixed_contexts_are_rejected() {
    let a = BaseSeries::eps(&ctx(), 1);
    let b = BaseSeries::eps(&TruncationCtx::classical(2, 4), 1);
    assert!(matches!(base_mul(&a, &b), Err(Error::Context(_))));
    assert!(matches!(a.add(&b), Err(Error::Context(_))));
}

#[test]
fn invalid_contexts() {
    assert!(TruncationCtx::new(0, vec![], 3, 0, 4).is_err());
    assert!(TruncationCtx::new(2, vec![1], 3, 0, 4).is_err());
    assert!(TruncationCtx::new(2, vec![], 0, 0, 4).is_err());
    assert!(TruncationCtx::new(2, vec![], 3, 1, 4).is_err());
}

#[test]
fn koszul_signs() {
    assert_eq!(koszul_sign(&[0, 1, 2], &[1, 1, 1]).unwrap(), 1);
    assert_eq!(koszul_sign(&[1, 0], &[1, 1]).unwrap(), -1);
    assert_eq!(koszul_sign(&[1, 0], &[1, 2]).unwrap(), 1);
    assert_eq!(koszul_sign(&[2, 0, 1], &[1, 1, 1]).unwrap(), 1);
    assert!(matches!(koszul_sign(&[0, 1], &[1]), Err(Error::Argument(_))));
}

#[test]
fn m_orders() {
    let c = ctx();
    assert_eq!(m_order(&BaseSeries::zero(&c)), None);
    let p = BaseSeries::eps(&c, 1).poly.mul(&Poly::x(0), &c).add(&Poly::smono(SMono::eps(2)));
    assert_eq!(m_order(&BaseSeries::new(&c, p)), Some(1));
    let s = SMono::eps(-1).mul(&SMono::param(0), &c).unwrap().1.mul(&SMono::param(1), &c).unwrap().1;
    let a = BaseSeries::new(&c, Poly::smono(s));
    assert_eq!(m_order(&a), Some(2));
    let times_eps = base_mul(&BaseSeries::eps(&c, 1), &a).unwrap();
    assert_eq!(m_order(&times_eps), Some(2));
}

#[test]
fn truncation_drops_high_order_and_low_eps() {
    let c = TruncationCtx::new(1, vec![], 2, -1, 4).unwrap();
    assert!(BaseSeries::eps(&c, 3).is_zero());
    assert!(BaseSeries::eps(&c, -2).is_zero());
    assert!(!BaseSeries::eps(&c, 2).is_zero());
    assert!(!BaseSeries::eps(&c, -1).is_zero());
}

#[test]
fn degrees() {
    let c = ctx();
    assert_eq!(BaseSeries::param(&c, 2).unwrap().degree().unwrap(), Some(-2));
    let mixed = BaseSeries::param(&c, 0).unwrap().add(&BaseSeries::one(&c)).unwrap();
    assert!(matches!(mixed.degree(), Err(Error::Degree(_))));
    assert_eq!(BaseSeries::zero(&c).degree().unwrap(), None);
}

fn homogeneous(g: &mut Gen, c: &Ctx) -> Poly {
    let scalars = [SMono::ONE, SMono::eps(1), SMono::param(0), SMono::param(1), SMono::param(2), SMono::eps(-1)];
    let s = [g.pick(&scalars)];
    g.poly(c, &s, &Shape { terms: 3, x_degree: 2, width: 1, slot_order: 1 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_axioms(seed in any::<u64>()) {
        let c = ctx();
        let mut g = Gen::new(seed);
        let (a, b, d) = (homogeneous(&mut g, &c), homogeneous(&mut g, &c), homogeneous(&mut g, &c));
        let t = |p: Poly| p.truncate(&c);
        prop_assert_eq!(t(a.mul(&b, &c).mul(&d, &c)), t(a.mul(&b.mul(&d, &c), &c)));
        prop_assert_eq!(t(a.mul(&b.add(&d), &c)), t(a.mul(&b, &c).add(&a.mul(&d, &c))));
        let (da, db) = (a.degree(&c).unwrap().unwrap_or(0), b.degree(&c).unwrap().unwrap_or(0));
        let ba = b.mul(&a, &c);
        let expect = if (da * db).rem_euclid(2) == 1 { ba.neg() } else { ba };
        prop_assert_eq!(t(a.mul(&b, &c)), t(expect));
    }

    #[test]
    fn x_derivative_is_a_derivation(seed in any::<u64>()) {
        let c = ctx();
        let mut g = Gen::new(seed);
        let (a, b) = (homogeneous(&mut g, &c), homogeneous(&mut g, &c));
        let i = g.range(0, 1);
        let lhs = a.mul(&b, &c).deriv(i).truncate(&c);
        let rhs = a.deriv(i).mul(&b, &c).add(&a.mul(&b.deriv(i), &c)).truncate(&c);
        prop_assert_eq!(lhs, rhs);
    }
}
