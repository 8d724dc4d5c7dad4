use urn_core::harness::{centered_scaled_samples, coupling_l1, ldp_decay};
use urn_core::{derived_constants, UrnParams};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn example() -> UrnParams {
    UrnParams::new(1, 3, 2, 0.25, 1, 1).unwrap()
}

#[test]
fn samples_identical_across_pool_sizes() {
    let params = example();
    let one = in_pool(1, || centered_scaled_samples(&params, 300, 500, 42).unwrap());
    let many = in_pool(7, || centered_scaled_samples(&params, 300, 500, 42).unwrap());
    assert_eq!(one, many);
    assert_eq!(one.seed_rule, urn_core::SEED_RULE_ID);
}

#[test]
fn estimators_identical_across_pool_sizes() {
    let params = example();
    let k = derived_constants(&params).unwrap();
    let a = in_pool(1, || coupling_l1(&params, &k, 40, 3, &[10, 100]).unwrap());
    let b = in_pool(4, || coupling_l1(&params, &k, 40, 3, &[10, 100]).unwrap());
    assert_eq!(a, b);
    let a = in_pool(1, || ldp_decay(&params, 0.1, &[50, 100, 200], 3000, 3).unwrap());
    let b = in_pool(3, || ldp_decay(&params, 0.1, &[50, 100, 200], 3000, 3).unwrap());
    assert_eq!(a, b);
}

#[test]
fn master_seed_changes_samples() {
    let params = example();
    let a = centered_scaled_samples(&params, 50, 20, 1).unwrap();
    let b = centered_scaled_samples(&params, 50, 20, 2).unwrap();
    assert_ne!(a.values, b.values);
}
