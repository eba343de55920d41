use rug::Float;

use purity_core::ratcore::{rat, Rational};
use purity_core::recurrence::EnsembleParams;
use purity_kernels::checks::{min_m, quad_check, APPENDIX_CHECKS};
use purity_kernels::export::{tabulate, to_csv};
use purity_kernels::grid::{default_spec, KernelGrid};
use purity_kernels::{KernelContext, KernelKind, DEFAULT_PRECISION};

fn ctx(m: usize, a: Rational, prec: u32) -> KernelContext {
    KernelContext::new(&EnsembleParams::with_alpha(m, a).unwrap(), prec).unwrap()
}

#[test]
fn appendix_constants_small_m() {
    for (m, a) in [(1, rat(1, 2)), (2, rat(-1, 2))] {
        let c = ctx(m, a, DEFAULT_PRECISION);
        let g = KernelGrid::with_bits(&c, 60).unwrap();
        for name in APPENDIX_CHECKS.iter().filter(|n| min_m(n) <= m && **n != "h3_norm") {
            let r = quad_check(name, &g).unwrap();
            assert!(r.passes(1e-12), "m={m} {name}: {:e}", r.error);
        }
    }
}

#[test]
fn three_point_density_normalizes() {
    let c = ctx(3, rat(3, 2), 128);
    let g = KernelGrid::with_bits(&c, 40).unwrap();
    let r = quad_check("h3_norm", &g).unwrap();
    assert!(r.passes(1e-10), "{:e}", r.error);
    assert!(quad_check("h3_norm", &KernelGrid::with_bits(&ctx(2, rat(-1, 2), 128), 20).unwrap()).is_err());
}

#[test]
fn exact_integrals_match_quadrature() {
    let c = ctx(2, rat(-1, 2), 128);
    let g = KernelGrid::with_bits(&c, 40).unwrap();
    for name in ["g_cross_22", "pair_trace_42", "C1", "C5", "D2", "C_block", "D_block"] {
        let r = quad_check(name, &g).unwrap();
        assert!(r.passes(1e-8), "{name}: {:e}", r.error);
    }
    let c = ctx(1, rat(-1, 2), 128);
    let g = KernelGrid::with_bits(&c, 60).unwrap();
    let r = quad_check("g_cross_22", &g).unwrap();
    assert!(r.passes(1e-15), "{:e}", r.error);
}

#[test]
fn doubling_the_rule_is_stable() {
    let c = ctx(2, rat(1, 2), DEFAULT_PRECISION);
    let spec = default_spec(&c, DEFAULT_PRECISION);
    let coarse = KernelGrid::new(&c, spec).unwrap();
    let fine = KernelGrid::new(&c, spec.refined()).unwrap();
    let tol = 10f64.powf(-0.25 * DEFAULT_PRECISION as f64);
    for name in ["k01_diag", "k10_diag", "h1_norm", "k01_k01"] {
        let a = quad_check(name, &coarse).unwrap().value;
        let b = quad_check(name, &fine).unwrap().value;
        let d = (Float::with_val(a.prec(), &a - &b) / b.clone().abs()).abs().to_f64();
        assert!(d < tol, "{name}: {d:e}");
    }
}

#[test]
fn thread_count_does_not_change_bits() {
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let c = ctx(2, rat(-1, 2), 128);
            let g = KernelGrid::with_bits(&c, 30).unwrap();
            ["h2_norm", "C_block"].map(|n| quad_check(n, &g).unwrap().value)
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn csv_export() {
    let c = ctx(2, rat(-1, 2), 128);
    let xs = [c.float(0.5)];
    let rows = tabulate(&c, &[KernelKind::K00, KernelKind::K11], &xs, &xs).unwrap();
    let csv = to_csv(&rows, 20);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,kernel_ab,value"));
    assert_eq!(lines.count(), 2);
}
