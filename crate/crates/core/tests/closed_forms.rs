//! Assembled moments against the stored closed forms.

use purity_core::closed_forms::{catalog_eval, purity_moment, MomentEngine, Route};
use purity_core::kernel_integrals::{g_cross, pair_trace};
use purity_core::ratcore::{int, rat, RatError, Rational};
use purity_core::recurrence::{EnsembleParams, MatrixKind};

fn alphas() -> Vec<Rational> {
    vec![rat(-1, 2), rat(1, 2), rat(3, 2), rat(5, 2), rat(7, 3), rat(-1, 3), int(0), int(2)]
}

fn cat(name: &str, p: &EnsembleParams) -> Option<Rational> {
    match catalog_eval(name, p) {
        Ok(v) => Some(v),
        Err(purity_core::closed_forms::ClosedFormError::Rat(RatError::TruePole(_))) => None,
        Err(e) => panic!("{name}: {e}"),
    }
}

#[test]
fn physical_moments_match_catalog() {
    for n in 1..=6 {
        for m in 1..=n {
            let p = EnsembleParams::physical(m, n).unwrap();
            for k in 1..=3 {
                let r = purity_moment(k, &p).unwrap();
                assert_eq!(r.route, Route::Catalog(["mP1", "mP2", "mP3"][k as usize - 1]));
            }
        }
    }
}

#[test]
fn square_case_forms() {
    for m in 1..=8 {
        let p = EnsembleParams::physical(m, m).unwrap();
        assert_eq!(purity_moment(2, &p).unwrap().purity, catalog_eval("mP2_mn", &p).unwrap());
        if m <= 5 {
            assert_eq!(purity_moment(3, &p).unwrap().purity, catalog_eval("mP3_mn", &p).unwrap());
        }
    }
}

#[test]
fn alpha_forms_and_induced_moments() {
    for m in 1..=5 {
        for a in alphas() {
            let p = EnsembleParams::with_alpha(m, a.clone()).unwrap();
            let e = MomentEngine::new(&p).unwrap();
            assert_eq!(Some(e.induced_t1()), cat("EhT", &p), "m={m} a={a}");
            assert_eq!(Some(e.induced_t2().unwrap()), cat("EhT2", &p), "m={m} a={a}");
            let d = p.d.clone();
            let rf = |k: i64| purity_core::ratcore::rising_factorial(&d, k).unwrap();
            assert_eq!(Some(e.induced_t1() / rf(2)), cat("mP1_alpha", &p));
            if let Some(v) = cat("Pmoment3_alpha", &p) {
                assert_eq!(e.induced_t3().unwrap() / rf(6), v, "m={m} a={a}");
            }
        }
    }
}

#[test]
fn third_moment_pieces() {
    for m in 1..=5usize {
        for a in alphas() {
            let p = EnsembleParams::with_alpha(m, a.clone()).unwrap();
            let e = MomentEngine::new(&p).unwrap();
            let mi = int(m as i64);
            if let Some(i1) = cat("I1", &p) {
                assert_eq!(e.s1(), &mi * i1, "I1 m={m} a={a}");
            }
            if m >= 2 {
                if let Some(i2) = cat("I2", &p) {
                    assert_eq!(e.s2().unwrap(), &mi * (&mi - int(1)) * i2, "I2 m={m} a={a}");
                }
            }
            if m >= 3 {
                let w = &mi * (&mi - int(1)) * (&mi - int(2));
                let blocks = e.s3_blocks().unwrap();
                for (name, v) in ["A", "B", "C", "D"].iter().zip(blocks) {
                    if let Some(c) = cat(name, &p) {
                        assert_eq!(v, &w * c, "{name} m={m} a={a}");
                    }
                }
            }
        }
    }
}

#[test]
fn two_point_displays() {
    for m in 1..=6usize {
        for a in alphas() {
            let p = EnsembleParams::with_alpha(m, a.clone()).unwrap();
            let e = MomentEngine::new(&p).unwrap();
            let g = g_cross(2, 2, &p).unwrap();
            if let Some(v) = cat("cross_22", &p) {
                assert_eq!(g, v, "cross_22 m={m} a={a}");
            }
            let pp = pair_trace(2, 2, (MatrixKind::Plain, MatrixKind::Plain), &e.tables);
            if let Some(v) = cat("pair_22", &p) {
                assert_eq!(pp, v, "corrected m={m} a={a}");
            }
            if let Some(v) = cat("pair_22_printed", &p) {
                assert_eq!(pp == v, m <= 2, "printed m={m} a={a}");
            }
        }
    }
}
