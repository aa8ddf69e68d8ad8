use statrs::distribution::{ContinuousCDF, Normal};

use schroder::analytics::rayleigh_cdf;
use schroder::counting::ExactExpectations;
use schroder::experiments::{self, ks_statistic, Tolerances};
use schroder::Family;

#[test]
fn ks_trivial_cases() {
    assert_eq!(ks_statistic(&[0.0], rayleigh_cdf).unwrap(), 1.0);
    let median = (2.0 * std::f64::consts::LN_2).sqrt();
    assert!((ks_statistic(&[median, median], rayleigh_cdf).unwrap() - 0.5).abs() < 1e-15);
    assert!(ks_statistic(&[], rayleigh_cdf).is_err());
}

#[test]
fn ks_null_case() {
    // inverse-CDF samples from the reference itself
    let mut rng = schroder::rng::stream(2024, 0);
    let xs: Vec<f64> = (0..10_000)
        .map(|_| {
            let u: f64 = rand::Rng::gen(&mut rng);
            (-2.0 * (1.0 - u).ln()).sqrt()
        })
        .collect();
    assert!(ks_statistic(&xs, rayleigh_cdf).unwrap() < 0.02);
    let normal = Normal::new(0.0, 1.0).unwrap();
    assert!(ks_statistic(&xs, |x| normal.cdf(x)).unwrap() > 0.3);
}

#[test]
fn exact_height_rows() {
    let tol = Tolerances::default();
    let r = experiments::run_expected_height(&Family::P3, 8, 20_000, 3, &tol).unwrap();
    let want = ExactExpectations::new(&Family::P3.weights(), 8).sum_leaf_heights(8).unwrap();
    let want = num_traits::ToPrimitive::to_f64(&want).unwrap() / 8.0;
    assert_eq!(r.rows[0].statistic, "expected_height_exact");
    assert_eq!(r.rows[0].reference, want);
    assert!(r.pass(), "{r:?}");

    let r = experiments::run_expected_height(&Family::P4, 3, 100_000, 3, &tol).unwrap();
    assert_eq!(r.rows[0].reference, 1.5);
    assert!(r.pass(), "{r:?}");
}

#[test]
fn exact_profile_rows() {
    let tol = Tolerances::default();
    let r = experiments::run_height_profile(&Family::P3, 10, 4, 20_000, 5, &tol).unwrap();
    let row = r.rows.iter().find(|row| row.statistic == "leaf_profile_exact" && row.k == Some(2)).unwrap();
    let want = ExactExpectations::new(&Family::P3.weights(), 10).leaf_profile(10, 2).unwrap();
    assert_eq!(row.reference, num_traits::ToPrimitive::to_f64(&want).unwrap());
    assert!(r.pass(), "{r:?}");
    let root = r.rows.iter().find(|row| row.statistic == "node_profile_exact" && row.k == Some(0)).unwrap();
    assert_eq!((root.observed, root.reference), (1.0, 1.0));
}

#[test]
fn asymptotic_rows_at_moderate_size() {
    let tol = Tolerances { relative_tolerance: 0.15, ..Tolerances::default() };
    let r = experiments::run_height_profile(&Family::P4, 800, 3, 2_000, 1, &tol).unwrap();
    assert_eq!(r.rows.len(), 8);
    assert!(r.rows.iter().all(|row| !row.statistic.ends_with("_exact")));
    assert!(r.pass(), "{r:?}");
}

#[test]
fn reports_are_reproducible_and_serialize() {
    let tol = Tolerances::default();
    let a = experiments::run_rayleigh(&Family::P4, 300, 1_000, 17, &tol).unwrap();
    let b = experiments::run_rayleigh(&Family::P4, 300, 1_000, 17, &tol).unwrap();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    let c = experiments::run_rayleigh(&Family::P4, 300, 1_000, 18, &tol).unwrap();
    assert_ne!(a.rows[0].metric, c.rows[0].metric);

    let v: serde_json::Value = serde_json::from_str(&a.to_json().unwrap()).unwrap();
    assert_eq!(v["family"], "P4");
    assert_eq!(v["rows"][0]["statistic"], "rayleigh_ks");

    let csv = a.to_csv().unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("statistic,k,observed,reference,metric,pass"));
    assert!(lines.next().unwrap().starts_with("rayleigh_ks,,"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    a.write_to(&path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), csv);
    let path = dir.path().join("r.json");
    a.write_to(&path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().trim_end(), a.to_json().unwrap());
}

#[test]
fn ks_shrinks_with_size() {
    let tol = Tolerances::default();
    let ks: Vec<f64> = [200, 1000, 5000]
        .iter()
        .map(|&n| experiments::run_rayleigh(&Family::P3, n, 20_000, 9, &tol).unwrap().rows[0].metric)
        .collect();
    // allow for Monte Carlo jitter of order 1/√N
    let jitter = 1.0 / (20_000f64).sqrt();
    assert!(ks[2] <= ks[0] + jitter, "{ks:?}");
    assert!(ks[1] <= ks[0] + jitter && ks[2] <= ks[1] + jitter, "{ks:?}");
}

#[test]
fn degenerate_sizes() {
    let tol = Tolerances::default();
    let r = experiments::run_rayleigh(&Family::P4, 1, 1_000, 1, &tol).unwrap();
    assert!(r.out_of_regime && !r.pass());
    assert!(experiments::run_rayleigh(&Family::P4, 5, 0, 1, &tol).is_err());
}

#[test]
fn config_file() {
    let t = Tolerances::from_toml("ks_tolerance = 0.05\nexact_max_n = 12\n").unwrap();
    assert_eq!(t, Tolerances { ks_tolerance: 0.05, exact_max_n: 12, ..Tolerances::default() });
    assert_eq!(Tolerances::from_toml("").unwrap(), Tolerances::default());
    assert!(Tolerances::from_toml("ks_tol = 1").is_err());
    assert!(Tolerances::from_toml("se_multiplier = -1").is_err());
    assert!(Tolerances::load(std::path::Path::new("/nonexistent/tol.toml")).is_err());
}

#[test]
fn exact_agreement_rate_over_seeds() {
    // with 3 standard errors, nearly every seed must agree with the series value
    let tol = Tolerances::default();
    let passes = (0..100u64)
        .filter(|&seed| experiments::run_expected_height(&Family::P2, 7, 400, seed, &tol).unwrap().pass())
        .count();
    assert!(passes >= 97, "{passes}/100");
}
