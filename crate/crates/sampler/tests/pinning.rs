use purity_core::closed_forms::purity_moment;
use purity_core::ratcore::{rat, to_f64};
use purity_core::recurrence::EnsembleParams;
use purity_sampler::{estimate_moments, sample_eigen_mcmc, sample_matrix_model, McmcConfig, SampleBatch, WeightMode};

fn exact(k: u32, p: &EnsembleParams) -> f64 {
    to_f64(&purity_moment(k, p).unwrap().purity)
}

fn z_scores(b: &SampleBatch, k_max: u32) -> Vec<f64> {
    estimate_moments(b, k_max).iter().map(|e| (e.mean - exact(e.k, &b.params)) / e.stderr).collect()
}

#[test]
fn square_two_qubit_first_moment() {
    let p = EnsembleParams::physical(2, 2).unwrap();
    assert_eq!(exact(1, &p), 7.0 / 8.0);
    let b = sample_matrix_model(&p, 1_000_000, 5, 16, WeightMode::Modulus).unwrap();
    assert!(z_scores(&b, 1)[0].abs() < 4.0);
    let b = sample_eigen_mcmc(&p, 1_000_000, 5, &McmcConfig::for_m(2)).unwrap();
    assert!(z_scores(&b, 1)[0].abs() < 4.0);
}

#[test]
fn unequal_dimensions_second_moment() {
    let p = EnsembleParams::physical(2, 4).unwrap();
    let b = sample_matrix_model(&p, 1_000_000, 8, 16, WeightMode::Modulus).unwrap();
    assert!(z_scores(&b, 2).iter().all(|z| z.abs() < 4.0));
}

#[test]
fn non_physical_alpha_first_moment() {
    let p = EnsembleParams::with_alpha(3, rat(7, 3)).unwrap();
    let b = sample_eigen_mcmc(&p, 200_000, 9, &McmcConfig::for_m(3)).unwrap();
    assert!(z_scores(&b, 1)[0].abs() < 4.0);
    assert!(sample_matrix_model(&p, 10, 9, 1, WeightMode::Modulus).is_err());
}

#[test]
fn methods_agree() {
    for (m, n) in [(2, 2), (2, 3), (3, 4)] {
        let p = EnsembleParams::physical(m, n).unwrap();
        let a = estimate_moments(&sample_matrix_model(&p, 100_000, 21, 8, WeightMode::Modulus).unwrap(), 3);
        let b = estimate_moments(&sample_eigen_mcmc(&p, 100_000, 21, &McmcConfig::for_m(m)).unwrap(), 3);
        for (x, y) in a.iter().zip(&b) {
            let z = (x.mean - y.mean) / x.stderr.hypot(y.stderr);
            assert!(z.abs() < 5.0, "({m},{n}) k={}: {z}", x.k);
        }
    }
}

#[test]
fn tuned_acceptance_rate() {
    for (m, a) in [(2, rat(-1, 2)), (4, rat(7, 2)), (5, rat(1, 3))] {
        let p = EnsembleParams::with_alpha(m, a).unwrap();
        let b = sample_eigen_mcmc(&p, 2_000, 1, &McmcConfig::for_m(m)).unwrap();
        let r = b.mcmc_meta.unwrap().acceptance_rate;
        assert!(r > 0.1 && r < 0.9, "m={m}: {r}");
    }
}
