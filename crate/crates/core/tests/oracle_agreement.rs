use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use urn_core::exact::{exact_distribution, exact_moment, EventCounts, Rational, Statistic};
use urn_core::harness::oracle_vs_monte_carlo;
use urn_core::replicate::map_replicates;
use urn_core::simulate::run_path;
use urn_core::{DrawOutcome, UrnParams};

fn example() -> UrnParams {
    UrnParams::new(1, 3, 2, 0.25, 1, 1).unwrap()
}

#[test]
fn law_of_counts_matches_simulated_frequencies() {
    let params = example();
    let n = 5;
    let exact = exact_distribution::<Rational>(&params, n).unwrap();
    let r = 200_000u64;
    let counts = map_replicates(11, r, |_, rng| {
        let mut k = EventCounts::ZERO;
        run_path(&params, rng, n, |before, next, _| {
            let o = DrawOutcome::ALL
                .into_iter()
                .find(|o| {
                    let (d1, d2) = o.additions(&params);
                    before.y1 + d1 == next.y1 && before.y2 + d2 == next.y2
                })
                .unwrap();
            k = k.after(o);
        });
        k
    });
    let mut freq: BTreeMap<EventCounts, u64> = BTreeMap::new();
    for k in counts {
        *freq.entry(k).or_default() += 1;
    }
    // every simulated state is reachable in the exact law
    assert!(freq.keys().all(|k| exact.mass.contains_key(k)));
    // Pearson statistic over cells with enough expected mass
    let mut chi2 = 0.0;
    let mut cells = 0;
    for (k, m) in &exact.mass {
        let expected = m.to_f64().unwrap() * r as f64;
        if expected >= 20.0 {
            let observed = *freq.get(k).unwrap_or(&0) as f64;
            chi2 += (observed - expected).powi(2) / expected;
            cells += 1;
        }
    }
    // mean cells - 1, sd sqrt(2 (cells - 1)); allow 5 sd
    let df = (cells - 1) as f64;
    assert!(chi2 < df + 5.0 * (2.0 * df).sqrt(), "chi2 {chi2} over {cells} cells");
}

#[test]
fn monte_carlo_moments_within_four_standard_errors() {
    for params in [example(), UrnParams::new(2, 2, 3, 0.5, 1, 1).unwrap(), UrnParams::new(1, 10, 1, 0.5, 2, 1).unwrap()] {
        let cmp = oracle_vs_monte_carlo(&params, 8, 50_000, 42).unwrap();
        for v in cmp.verdicts() {
            assert!(v.pass, "{params:?}: {v:?}");
        }
    }
}

#[test]
fn rational_and_float_moments_agree() {
    let params = example();
    for n in [1, 4, 8] {
        for stat in [Statistic::Proportion, Statistic::Total, Statistic::CenteredScaled] {
            for power in [1, 2] {
                let q = exact_moment::<Rational>(&params, n, power, stat).unwrap();
                let f = exact_moment::<f64>(&params, n, power, stat).unwrap();
                assert!((q - f).abs() <= 1e-12 * q.abs().max(1.0), "{n} {stat:?} {power}: {q} vs {f}");
            }
        }
    }
}
