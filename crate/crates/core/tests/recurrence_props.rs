//! Invariants of the coefficient tables and the exact kernel integrals.

use proptest::prelude::*;
use purity_core::kernel_integrals::{g_cross, lemma_sum, pair_trace, triple_trace, LemmaIndices};
use purity_core::ratcore::{int, rat, Rational};
use purity_core::recurrence::{
    bcon_identity, coeff_b_closed, coeff_b_recursive, moment_matrix, CoeffTables, EnsembleParams, MatrixKind, RatMatrix,
};

const KINDS: [MatrixKind; 4] = [MatrixKind::Plain, MatrixKind::Hatted, MatrixKind::Mixed, MatrixKind::MixedHat];

fn alpha() -> impl Strategy<Value = Rational> {
    (-5i64..40, 1i64..7).prop_map(|(p, q)| rat(p, q)).prop_filter("alpha > -1", |a| *a > int(-1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_b_equals_recursive_b(a in alpha(), beta in 0usize..10, hat in any::<bool>()) {
        let p = EnsembleParams::with_alpha(1, a).unwrap();
        for i in 0..=beta {
            prop_assert_eq!(
                coeff_b_closed(beta as i64, i as i64, &p, hat).unwrap(),
                coeff_b_recursive(beta, i, &p, hat).unwrap()
            );
        }
    }

    #[test]
    fn bcon_sides_agree(a in alpha(), k in 0usize..9) {
        let p = EnsembleParams::with_alpha(1, a).unwrap();
        for i in 1..=k + 1 {
            let (l, r) = bcon_identity(i, k, &p).unwrap();
            prop_assert_eq!(l, r);
        }
    }

    #[test]
    fn pair_trace_is_cyclic(a in alpha(), m in 1usize..5, b1 in 0usize..4, b2 in 0usize..4,
                            k1 in 0usize..4, k2 in 0usize..4) {
        let p = EnsembleParams::with_alpha(m, a).unwrap();
        let t = CoeffTables::new(&p, m - 1, 4).unwrap();
        prop_assert_eq!(
            pair_trace(b1, b2, (KINDS[k1], KINDS[k2]), &t),
            pair_trace(b2, b1, (KINDS[k2], KINDS[k1]), &t)
        );
        let ks = (KINDS[k1], KINDS[k2], KINDS[0]);
        prop_assert_eq!(
            triple_trace((b1, b2, 1), ks, &t),
            triple_trace((1, b1, b2), (ks.2, ks.0, ks.1), &t)
        );
    }

    #[test]
    fn cross_sum_vanishes_at_zero_power(a in alpha(), m in 1usize..6, b in 0usize..5) {
        // K00 integrates against K11 to zero when one side carries no weight.
        let p = EnsembleParams::with_alpha(m, a).unwrap();
        prop_assert_eq!(g_cross(0, b, &p).unwrap(), int(0));
        prop_assert_eq!(g_cross(b, 0, &p).unwrap(), int(0));
    }
}

#[test]
fn zeroth_moment_matrix_is_identity() {
    for m in 1..=10 {
        for a in [rat(-1, 2), rat(3, 2), rat(7, 3)] {
            let p = EnsembleParams::with_alpha(m, a).unwrap();
            for kind in [MatrixKind::Plain, MatrixKind::Hatted] {
                let mm = moment_matrix(0, &p, kind).unwrap();
                assert_eq!(mm.entries, RatMatrix::identity(m), "m={m} {kind:?}");
            }
            // The mixed pair at β = 0 are the two changes of basis between p and q.
            let n = moment_matrix(0, &p, MatrixKind::Mixed).unwrap().entries;
            let nh = moment_matrix(0, &p, MatrixKind::MixedHat).unwrap().entries;
            assert_eq!(n.mul(&nh), RatMatrix::identity(m), "m={m}");
        }
    }
}

#[test]
fn lemma_ranges() {
    for a in [rat(-1, 2), rat(3, 2)] {
        for m in 1..=8 {
            for i in 0..=4 {
                for s in 0..=4 {
                    if i < m && s < m {
                        let (l, r) = lemma_sum(LemmaIndices::A { i, s, m }, &a).unwrap();
                        assert_eq!(l, r, "A i={i} s={s} m={m}");
                    }
                    for b1 in [1, 2, 4] {
                        for b2 in [1, 2, 4] {
                            let (l, r) = lemma_sum(LemmaIndices::B { i, s, beta1: b1, beta2: b2, m }, &a).unwrap();
                            assert_eq!(l, r, "B i={i} s={s} b=({b1},{b2}) m={m}");
                        }
                    }
                }
            }
        }
    }
}
