use num_traits::{One, Zero};
use proptest::prelude::*;
use purity_core::ratcore::*;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-200i64..200, 1i64..60).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #[test]
    fn field_axioms(a in small_rat(), b in small_rat(), c in small_rat()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
        prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        prop_assert_eq!(&a + Rational::zero(), a.clone());
        prop_assert_eq!(&a * Rational::one(), a.clone());
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * a.recip(), Rational::one());
        }
        prop_assert!(a.denom() > &num_bigint::BigInt::zero());
    }

    #[test]
    fn gamma_quotient_matches_rising_factorial(x in small_rat(), k in -30i64..=30) {
        let rf = rising_factorial(&x, k);
        let gq = gamma_quotient(&[GammaArg(&x + int(k))], &[GammaArg(x.clone())]);
        let x_pole = is_nonpositive_integer(&x);
        let xk_pole = is_nonpositive_integer(&(&x + int(k)));
        if !x_pole && !xk_pole {
            prop_assert_eq!(rf.unwrap(), gq.unwrap());
        } else if x_pole && !xk_pole {
            // 1/Γ(x) vanishes at a pole of the denominator.
            prop_assert!(gq.unwrap().is_zero());
        }
    }

    #[test]
    fn substitution_order_is_irrelevant(m in 1i64..30, an in -9i64..60, ad in 1i64..7) {
        let f = parse_polyfrac(
            "(5*m^2+10*alpha*m+5*m+4*alpha^2+4*alpha+2)/((2*m+2*alpha+1)*(m^2+2*alpha*m+m+2))",
        ).unwrap();
        let a = rat(an, ad);
        let ma = polyfrac_eval(&f, &[("m", int(m)), ("alpha", a.clone())]);
        let am = polyfrac_eval(&f, &[("alpha", a), ("m", int(m))]);
        match (ma, am) {
            (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
            (Err(RatError::TruePole(_)), Err(RatError::TruePole(_))) => {}
            other => prop_assert!(false, "mismatch {:?}", other),
        }
    }
}

#[test]
fn duplication_formula_is_rejected() {
    // Γ(2α+2)/(Γ(α+1)Γ(α+3/2)) carries a 1/√π, so no rational pairing exists.
    for a in [rat(-1, 2), rat(1, 3), int(2)] {
        let num = [GammaArg(&a * int(2) + int(2))];
        let den = [GammaArg(&a + int(1)), GammaArg(&a + rat(3, 2))];
        assert!(matches!(gamma_quotient(&num, &den), Err(RatError::Unpairable(_))));
    }
}

#[test]
fn removable_point_of_the_m_equals_n_third_moment() {
    let f = parse_polyfrac(
        "5*(25*m^8+690*m^6+6015*m^4+8750*m^2+1152)/(8*m*(m^2+2)*(m^2+4)*(m^2+6)*(m^2+8)*(m^2+10))",
    )
    .unwrap();
    assert_eq!(polyfrac_eval(&f, &[("m", int(2))]).unwrap(), rat(363, 512));
}
