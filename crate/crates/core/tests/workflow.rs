use dgumbel::estimation::{
    diagnostic_csv, fit_mle, fit_moments, fit_proportions, fit_survreg, Sample,
};
use dgumbel::gof::ks_test;
use dgumbel::moments::{moment_grid, moment_grid_csv};
use dgumbel::sampling::sample;
use dgumbel::simulation::{default_grid, run_grid, table_csv};
use dgumbel::{Error, Execution, FitConfig, Params};

#[test]
fn sample_fit_and_test() {
    let truth = Params::new(1.0, 0.5).unwrap();
    let s = Sample::new(sample(&truth, 10_000, 7).unwrap()).unwrap();
    let mle = fit_mle(&s, &FitConfig::default()).unwrap();
    assert!(mle.converged);
    assert!((mle.params.alpha() - 1.0).abs() < 0.1);
    for other in [
        fit_moments(&s, &FitConfig::default()).unwrap(),
        fit_proportions(&s).unwrap(),
        fit_survreg(&s).unwrap().0,
    ] {
        assert!(
            other.loglik <= mle.loglik + 1e-9,
            "{} beats the MLE",
            other.method
        );
        assert!((other.params.p() - 0.5).abs() < 0.05);
    }
    let gof = ks_test(&s, &mle.params);
    assert!(gof.pvalue_lower_bound > 0.05);
    assert_eq!(gof.n, 10_000);
    let csv = diagnostic_csv(&s, &mle.params);
    assert!(csv.lines().count() > 5);
}

#[test]
fn proportions_reject_one_sided_data() {
    let s = Sample::new(vec![1, 2, 2, 3, 5]).unwrap();
    let err = fit_proportions(&s).unwrap_err();
    assert!(matches!(err, Error::MethodInapplicable(_)));
    assert!(err.is_method_inapplicable());
}

#[test]
fn simulation_is_reproducible() {
    let cells = &default_grid(8, 99).unwrap()[9..11];
    let a = run_grid(cells, Execution::Parallel).unwrap();
    let b = run_grid(cells, Execution::Sequential).unwrap();
    assert_eq!(a, b);
    assert_eq!(table_csv(&a), table_csv(&b));
}

#[test]
fn contour_grid_rows_respect_brackets() {
    let rows = moment_grid(&[0.05, 1.0, 5.0], &[0.25, 0.5, 0.75], Execution::Parallel).unwrap();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        let lp = (1.0 / r.p).ln();
        let top = (r.alpha.ln() + 0.577216) / lp;
        assert!(r.mean >= top - 1.0 && r.mean <= top);
        let s2 = std::f64::consts::PI.powi(2) / (6.0 * lp * lp);
        assert!(r.variance >= s2 && r.variance <= s2 + 0.27);
    }
    assert!(moment_grid_csv(&rows).starts_with("alpha,p,mean,variance\n"));
}

#[test]
fn variance_repeats_under_unit_shift() {
    // Y + 1 ~ DGUD(α/p, p) has the same variance
    for p in [0.25, 0.5, 0.75] {
        let d = Params::new(1.3, p).unwrap();
        let s = d.shifted(1).unwrap();
        let (v0, v1) = (
            dgumbel::moments::moment_summary(&d).variance,
            dgumbel::moments::moment_summary(&s).variance,
        );
        assert!((v0 - v1).abs() < 1e-9 * v0, "p = {p}: {v0} vs {v1}");
    }
}
