use urn_demo::{cf_report, histogram_report, path_report, Inputs, MAX_HORIZON};

const EXAMPLE: Inputs = Inputs { a: 1, b: 3, c: 2, p: 0.25 };

#[test]
fn path_is_log_spaced_and_ends_at_horizon() {
    let r = path_report(EXAMPLE, 50_000, 42).unwrap();
    assert_eq!(r.n.first(), Some(&1));
    assert_eq!(r.n.last(), Some(&50_000));
    assert!(r.n.windows(2).all(|w| w[0] < w[1]));
    assert!(r.z.iter().all(|z| (0.0..=1.0).contains(z)));
    assert!((r.z.last().unwrap() - 0.5).abs() < 0.05);
    assert_eq!(path_report(EXAMPLE, 50_000, 42).unwrap().z, r.z);
}

#[test]
fn histogram_is_a_density() {
    let r = histogram_report(EXAMPLE, 500, 4000, 40, 1).unwrap();
    assert_eq!(r.edges.len(), 41);
    let width = r.edges[1] - r.edges[0];
    let mass: f64 = r.density.iter().sum::<f64>() * width;
    assert!(mass > 0.99 && mass <= 1.0 + 1e-12, "{mass}");
    let gauss: f64 = r.gaussian.iter().sum::<f64>() * width;
    assert!((gauss - 1.0).abs() < 1e-3, "{gauss}");
}

#[test]
fn cf_product_tracks_gaussian() {
    let r = cf_report(Inputs { a: 1, b: 10, c: 1, p: 0.5 }, 100_000, 3.0, 61).unwrap();
    assert_eq!(r.t.len(), 61);
    assert!(r.sup_gap < 1e-2, "{}", r.sup_gap);
    let mid = r.t.iter().position(|t| t.abs() < 1e-12).unwrap();
    assert_eq!(r.beta[mid], 1.0);
}

#[test]
fn rejects_bad_inputs() {
    assert!(path_report(EXAMPLE, MAX_HORIZON + 1, 0).is_err());
    assert!(path_report(Inputs { p: 1.5, ..EXAMPLE }, 10, 0).is_err());
    // Gamma = 1/4: no Gaussian limit to compare against
    let no_clt = Inputs { a: 5, b: 1, c: 2, p: 0.5 };
    assert!(histogram_report(no_clt, 10, 10, 10, 0).unwrap_err().contains("Gamma"));
    assert!(cf_report(no_clt, 10, 3.0, 11).is_err());
    assert!(histogram_report(EXAMPLE, 10, 10, 1, 0).is_err());
}
