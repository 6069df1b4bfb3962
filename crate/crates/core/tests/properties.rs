use primel_core::dirichlet::{l_coefficients, l_coefficients_direct, SymbolPath};
use primel_core::symbol::{euler_symbol, jacobi_symbol};
use primel_core::{FieldSpec, Orientation, Poly, PrimePoly};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = FieldSpec> {
    prop::sample::select(vec![3u32, 5, 7]).prop_map(|q| FieldSpec::new(q).unwrap())
}

fn poly(f: FieldSpec, max_len: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(0..f.q(), 0..=max_len).prop_map(move |c| Poly::from_residues(f, c))
}

fn monic(f: FieldSpec, min_deg: usize, max_deg: usize) -> impl Strategy<Value = Poly> {
    (min_deg..=max_deg)
        .prop_flat_map(move |d| prop::collection::vec(0..f.q(), d))
        .prop_map(move |low| Poly::monic_from_low(f, &low))
}

/// The first irreducible polynomial at or after `low` in base-`q` order.
fn prime_from(f: FieldSpec, mut low: Vec<u32>) -> PrimePoly {
    loop {
        let p = Poly::monic_from_low(f, &low);
        if p.is_irreducible().unwrap() {
            return PrimePoly::new(p).unwrap();
        }
        for c in low.iter_mut() {
            *c += 1;
            if *c < f.q() {
                break;
            }
            *c = 0;
        }
    }
}

fn prime(f: FieldSpec, degrees: &'static [usize]) -> impl Strategy<Value = PrimePoly> {
    prop::sample::select(degrees)
        .prop_flat_map(move |d| prop::collection::vec(0..f.q(), d))
        .prop_map(move |low| prime_from(f, low))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn division_with_remainder((a, g) in field().prop_flat_map(|f| (poly(f, 9), poly(f, 5)))) {
        prop_assume!(!g.is_zero());
        let (quot, rem) = a.divmod(&g).unwrap();
        prop_assert_eq!(quot.mul(&g).unwrap().add(&rem).unwrap(), a);
        prop_assert!(rem.is_zero() || rem.deg() < g.deg());
    }

    #[test]
    fn product_is_divisible((a, b) in field().prop_flat_map(|f| (poly(f, 6), poly(f, 6)))) {
        prop_assume!(!b.is_zero());
        let (quot, rem) = a.mul(&b).unwrap().divmod(&b).unwrap();
        prop_assert!(rem.is_zero());
        prop_assert_eq!(quot, a);
    }

    #[test]
    fn gcd_divides_both((a, b) in field().prop_flat_map(|f| (poly(f, 7), poly(f, 7)))) {
        prop_assume!(!a.is_zero() || !b.is_zero());
        let d = a.gcd(&b).unwrap();
        prop_assert!(d.is_monic());
        prop_assert!(a.rem(&d).unwrap().is_zero());
        prop_assert!(b.rem(&d).unwrap().is_zero());
    }

    #[test]
    fn factorization_reassembles(f in field().prop_flat_map(|f| monic(f, 1, 8))) {
        let mut product = Poly::one(f.field());
        for (p, e) in f.factor().unwrap() {
            prop_assert!(p.is_monic());
            prop_assert!(p.is_irreducible_trial().unwrap());
            product = product.mul(&p.pow(e)).unwrap();
        }
        prop_assert_eq!(product, f);
    }

    #[test]
    fn rabin_agrees_with_trial_division(f in field().prop_flat_map(|f| monic(f, 1, 7))) {
        prop_assert_eq!(f.is_irreducible().unwrap(), f.is_irreducible_trial().unwrap());
    }

    #[test]
    fn jacobi_reciprocity((a, m) in field().prop_flat_map(|f| (monic(f, 1, 6), monic(f, 1, 6)))) {
        let am = jacobi_symbol(&a, &m).unwrap().value();
        let ma = jacobi_symbol(&m, &a).unwrap().value();
        if a.gcd(&m).unwrap().is_one() {
            let half = (a.q() as usize - 1) / 2;
            let sign = if half * a.deg().unwrap() * m.deg().unwrap() % 2 == 0 { 1 } else { -1 };
            prop_assert_eq!(am * ma, sign);
        } else {
            prop_assert_eq!((am, ma), (0, 0));
        }
    }

    #[test]
    fn jacobi_is_multiplicative((a, b, m) in field().prop_flat_map(|f| (poly(f, 6), poly(f, 6), monic(f, 1, 5)))) {
        let ab = jacobi_symbol(&a.mul(&b).unwrap(), &m).unwrap().value();
        let prod = jacobi_symbol(&a, &m).unwrap().value() * jacobi_symbol(&b, &m).unwrap().value();
        prop_assert_eq!(ab, prod);
    }

    #[test]
    fn jacobi_matches_euler_at_primes((a, p) in field().prop_flat_map(|f| (poly(f, 8), prime(f, &[1, 2, 3, 4, 5])))) {
        prop_assert_eq!(
            jacobi_symbol(&a, p.poly()).unwrap(),
            euler_symbol(&a, p.poly()).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn l_polynomial_symmetry_and_bound(p in field().prop_flat_map(|f| prime(f, &[1, 3, 5]))) {
        for o in [Orientation::Standard, Orientation::Literal] {
            let l = l_coefficients(&p, o).unwrap();
            prop_assert!(l.verify_functional_equation());
            prop_assert!(l.weil_coefficient_bound());
            prop_assert_eq!(l.coeffs()[0], 1);
        }
    }

    #[test]
    fn table_route_matches_pointwise_sums(p in field().prop_flat_map(|f| prime(f, &[1, 3]))) {
        for o in [Orientation::Standard, Orientation::Literal] {
            let fast = l_coefficients(&p, o).unwrap();
            for path in [SymbolPath::Euler, SymbolPath::Reciprocity] {
                let slow = l_coefficients_direct(&p, o, path).unwrap();
                prop_assert_eq!(fast.coeffs(), slow.coeffs());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn twists_are_symmetric_with_parity_rank(
        low in prop::sample::select(vec![1usize, 3]).prop_flat_map(|d| prop::collection::vec(0u32..5, d))
    ) {
        use primel_core::elliptic::{EllipticCurve, TwistContext};
        let curve = EllipticCurve::from_coeffs(5, &[1], &[1, 1]).unwrap();
        let ctx = TwistContext::with_defaults(curve).unwrap();
        let p = prime_from(FieldSpec::new(5).unwrap(), low);
        prop_assume!(ctx.curve().delta().gcd(p.poly()).unwrap().is_one());
        let r = ctx.twist(&p).unwrap();
        prop_assert!(r.verify_functional_equation());
        prop_assert_eq!(r.m, ctx.twisted_degree(p.degree()));
        prop_assert_eq!(r.rank % 2 == 1, r.eps == -1);
        prop_assert_eq!(ctx.revalidate(r.clone()).unwrap(), r);
    }
}
