use rug::Float;

use purity_core::ratcore::{int, rat, Rational};
use purity_core::recurrence::EnsembleParams;
use purity_kernels::grid::KernelGrid;
use purity_kernels::psi::PsiFamily;
use purity_kernels::{Family, KernelContext, KernelKind, DEFAULT_PRECISION};

fn ctx(m: usize, a: Rational) -> KernelContext {
    KernelContext::new(&EnsembleParams::with_alpha(m, a).unwrap(), DEFAULT_PRECISION).unwrap()
}

fn log_grid(c: &KernelContext, count: usize) -> Vec<Float> {
    (0..count).map(|i| c.float(10f64.powf(-3.0 + 5.0 * i as f64 / (count - 1) as f64))).collect()
}

fn rel(a: &Float, b: &Float, scale: &Float) -> f64 {
    let d = Float::with_val(a.prec(), a - b).abs();
    (d / scale.clone().abs()).to_f64()
}

#[test]
fn factorization_identities() {
    for m in 1..=4 {
        for a in [rat(-1, 2), rat(3, 2), int(2)] {
            let c = ctx(m, a.clone());
            let pts = log_grid(&c, 6);
            let nodes: Vec<_> = pts.iter().map(|x| c.node_values(x).unwrap()).collect();
            let l1: Vec<_> = pts.iter().map(|x| c.eval_ell(1, x).unwrap()).collect();
            let l2: Vec<_> = pts.iter().map(|x| c.eval_ell(2, x).unwrap()).collect();
            for i in 0..pts.len() {
                for j in 0..pts.len() {
                    let (x, y) = (&nodes[i], &nodes[j]);
                    let k = |kind, u, v| c.kernel_at(kind, u, v);
                    let pairs = [
                        (k(KernelKind::K00, x, y), k(KernelKind::K00, y, x), Float::with_val(c.prec(), &l1[i] * &l1[j])),
                        (k(KernelKind::K01, x, y), -k(KernelKind::K10, y, x), Float::with_val(c.prec(), &l2[i] * &l1[j])),
                        (k(KernelKind::K11, x, y), k(KernelKind::K11, y, x), -Float::with_val(c.prec(), &l2[i] * &l2[j])),
                    ];
                    for (n, (u, v, want)) in pairs.into_iter().enumerate() {
                        let scale = Float::with_val(c.prec(), u.abs_ref()).max(&Float::with_val(c.prec(), v.abs_ref()));
                        let got = Float::with_val(c.prec(), &u + &v);
                        let err = rel(&got, &want, &scale.max(&Float::with_val(c.prec(), want.abs_ref())));
                        assert!(err < 1e-20, "identity {n}, m={m}, alpha={a}, ({i},{j}): {err:e}");
                    }
                }
            }
        }
    }
}

#[test]
fn numeric_biorthogonality() {
    for m in [2, 4, 6] {
        let c = ctx(m, rat(-1, 2));
        let g = KernelGrid::with_bits(&c, 130).unwrap();
        let n = g.len();
        let w = g.weight_matrix();
        for k in 0..m {
            for l in 0..m {
                let vals: Vec<Float> = (0..n * n)
                    .map(|ij| {
                        let (x, y) = (&g.nodes[ij / n], &g.nodes[ij % n]);
                        Float::with_val(c.prec(), &x.p[k] * &y.q[l]) * &w[ij]
                    })
                    .collect();
                let v = g.integrate_2d_values(&vals);
                let h = c.norm_h_float(k);
                let want = if k == l { h.clone() } else { Float::new(c.prec()) };
                let err = rel(&v, &want, &h);
                assert!(err < 1e-20, "m={m} k={k} l={l}: {err:e}");
            }
        }
    }
}

#[test]
fn psi_examples() {
    let prec = 160;
    let fam = PsiFamily::new(&Float::with_val(prec, -0.5), 3, prec);
    let one = Float::with_val(prec, 1);
    let a = fam.route_a(&one).unwrap();
    let b = fam.route_b(&one);
    // ψ_s at s = α + j for j = 0, 1, 2; the s = 0 case needs its own family
    for (u, v) in a.iter().zip(&b) {
        assert!(rel(u, v, u) < 1e-40);
    }
    let zero = PsiFamily::new(&Float::with_val(prec, 0), 1, prec);
    let p0 = zero.eval(&one).unwrap()[0].to_f64();
    let e_e1 = std::f64::consts::E * 0.219_383_934_395_520_3;
    assert!(p0 > 0.0 && p0 < 1.0 && (p0 - e_e1).abs() < 1e-14);

    let big = Float::with_val(prec, 1e8);
    let fam = PsiFamily::new(&Float::with_val(prec, 1.5), 3, prec);
    for (j, v) in fam.eval(&big).unwrap().iter().enumerate() {
        let s = 1.5 + j as f64;
        let limit = Float::with_val(64, s + 1.0).gamma().to_f64();
        assert!((v.to_f64() * 1e8 / limit - 1.0).abs() < 1e-6);
    }
}

#[test]
fn cauchy_transform_negative_for_q0() {
    let c = ctx(4, rat(-1, 2));
    for x in log_grid(&c, 9) {
        assert!(c.eval_cauchy(Family::Q, 0, &x).unwrap() < 0);
    }
}

#[test]
fn density_nonnegative() {
    for m in 1..=4 {
        let c = ctx(m, rat(1, 2));
        for x in log_grid(&c, 12) {
            assert!(c.eval_density(std::slice::from_ref(&x)).unwrap() >= 0, "m={m}");
        }
    }
}
