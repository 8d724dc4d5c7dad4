//! Exact finite-n law of the urn by dynamic programming over event counts.
//!
//! The probability of a path depends only on the compositions it visits, and
//! the composition after `n` steps is fixed by how many steps of each
//! `(rule, drawn type)` kind occurred. The DP therefore runs over the
//! `C(n+3, 3)` count vectors instead of the `4^n` paths.
//!
//! All routines are generic over [`Scalar`]: use `BigRational` for exact
//! identities and `f64` for speed.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};

use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

use crate::dynamics::{BallType, DrawOutcome, Rule};
use crate::error::{Error, Result};
use crate::params::UrnParams;

pub const DEFAULT_CAP: u64 = 16;

/// Number field the oracle computes in.
pub trait Scalar:
    Clone + Num + Signed + FromPrimitive + ToPrimitive + PartialOrd + fmt::Debug + fmt::Display
{
}

impl<T> Scalar for T where
    T: Clone + Num + Signed + FromPrimitive + ToPrimitive + PartialOrd + fmt::Debug + fmt::Display
{
}

pub type Rational = BigRational;

fn lift<T: Scalar>(v: u64) -> T {
    T::from_u64(v).expect("count representable in scalar")
}

fn lift_p<T: Scalar>(p: f64) -> T {
    T::from_f64(p).expect("finite probability")
}

/// Steps of each `(rule, drawn type)` kind taken so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventCounts {
    /// Friedman rule, type 1 drawn.
    pub n11: u64,
    /// Friedman rule, type 2 drawn.
    pub n10: u64,
    /// Polya rule, type 1 drawn.
    pub n01: u64,
    /// Polya rule, type 2 drawn.
    pub n00: u64,
}

impl EventCounts {
    pub const ZERO: EventCounts = EventCounts { n11: 0, n10: 0, n01: 0, n00: 0 };

    pub fn steps(&self) -> u64 {
        self.n11 + self.n10 + self.n01 + self.n00
    }

    pub fn after(&self, outcome: DrawOutcome) -> EventCounts {
        let mut next = *self;
        match (outcome.rule, outcome.drawn) {
            (Rule::Friedman, BallType::Type1) => next.n11 += 1,
            (Rule::Friedman, BallType::Type2) => next.n10 += 1,
            (Rule::Polya, BallType::Type1) => next.n01 += 1,
            (Rule::Polya, BallType::Type2) => next.n00 += 1,
        }
        next
    }

    /// Type-1 count and total implied by the counts.
    pub fn composition(&self, params: &UrnParams) -> (u64, u64) {
        let y1 = params.y1_0 + params.a * self.n11 + params.b * self.n10 + params.c * self.n01;
        let t = params.t0() + (params.a + params.b) * (self.n11 + self.n10) + params.c * (self.n01 + self.n00);
        (y1, t)
    }

    /// Counts of the color-swapped path.
    pub fn swapped(&self) -> EventCounts {
        EventCounts { n11: self.n10, n10: self.n11, n01: self.n00, n00: self.n01 }
    }
}

/// Probability of each outcome from a state with proportion `z`.
fn branch_probabilities<T: Scalar>(p: &T, z: &T) -> [(DrawOutcome, T); 4] {
    let q = T::one() - p.clone();
    let zc = T::one() - z.clone();
    let [o11, o10, o01, o00] = DrawOutcome::ALL;
    [
        (o11, p.clone() * z.clone()),
        (o10, p.clone() * zc.clone()),
        (o01, q.clone() * z.clone()),
        (o00, q * zc),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution<T> {
    pub n: u64,
    pub params: UrnParams,
    pub mass: BTreeMap<EventCounts, T>,
}

impl<T: Scalar> ExactDistribution<T> {
    pub fn total_mass(&self) -> T {
        self.mass.values().fold(T::zero(), |acc, m| acc + m.clone())
    }

    /// Proportion `Z` of a count state, in the scalar field.
    pub fn proportion(&self, counts: &EventCounts) -> T {
        let (y1, t) = counts.composition(&self.params);
        lift::<T>(y1) / lift::<T>(t)
    }

    /// `E[g(counts)]` under the exact law.
    pub fn expect<F: Fn(&EventCounts) -> T>(&self, g: F) -> T {
        self.mass.iter().fold(T::zero(), |acc, (k, m)| acc + m.clone() * g(k))
    }

    /// Law of `Z_n`, merging count states with equal proportion.
    pub fn proportion_law(&self) -> Vec<(T, T)> {
        let mut law: Vec<(T, T)> = self.mass.iter().map(|(k, m)| (self.proportion(k), m.clone())).collect();
        law.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("proportions are ordered"));
        let mut merged: Vec<(T, T)> = Vec::with_capacity(law.len());
        for (z, m) in law {
            match merged.last_mut() {
                Some((lz, lm)) if *lz == z => *lm = lm.clone() + m,
                _ => merged.push((z, m)),
            }
        }
        merged
    }

    /// Writes the law as tab-separated rows `n11 n10 n01 n00 probability`.
    pub fn write_table<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n11\tn10\tn01\tn00\tprobability")?;
        for (k, m) in &self.mass {
            writeln!(out, "{}\t{}\t{}\t{}\t{}", k.n11, k.n10, k.n01, k.n00, m)?;
        }
        Ok(())
    }
}

/// Forward DP for the law after `n` steps. Fails when `n > cap`.
pub fn exact_distribution_capped<T: Scalar>(params: &UrnParams, n: u64, cap: u64) -> Result<ExactDistribution<T>> {
    if n > cap {
        return Err(Error::CapExceeded { requested: n, cap });
    }
    let p = lift_p::<T>(params.p);
    let mut mass = BTreeMap::from([(EventCounts::ZERO, T::one())]);
    for _ in 0..n {
        let mut next: BTreeMap<EventCounts, T> = BTreeMap::new();
        for (counts, m) in &mass {
            let (y1, t) = counts.composition(params);
            let z = lift::<T>(y1) / lift::<T>(t);
            for (outcome, prob) in branch_probabilities(&p, &z) {
                if prob.is_zero() {
                    continue;
                }
                let slot = next.entry(counts.after(outcome)).or_insert_with(T::zero);
                *slot = slot.clone() + m.clone() * prob;
            }
        }
        mass = next;
    }
    Ok(ExactDistribution { n, params: *params, mass })
}

pub fn exact_distribution<T: Scalar>(params: &UrnParams, n: u64) -> Result<ExactDistribution<T>> {
    exact_distribution_capped(params, n, DEFAULT_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    /// `Z_n`
    Proportion,
    /// `T_n`
    Total,
    /// `sqrt(n) (Z_n - 1/2)`
    CenteredScaled,
}

/// `E[S^power]` for a statistic `S` of the state after `n` steps, with
/// `power` 1 or 2. The expectation is computed in `T` and converted to `f64`
/// at the end.
pub fn exact_moment<T: Scalar>(params: &UrnParams, n: u64, power: u32, statistic: Statistic) -> Result<f64> {
    if !(1..=2).contains(&power) {
        return Err(Error::Domain(format!("moment power must be 1 or 2, got {power}")));
    }
    let dist = exact_distribution::<T>(params, n)?;
    let half = T::one() / lift::<T>(2);
    let value = |k: &EventCounts| -> T {
        let (y1, t) = k.composition(params);
        match statistic {
            Statistic::Proportion => lift::<T>(y1) / lift::<T>(t),
            Statistic::Total => lift::<T>(t),
            Statistic::CenteredScaled => lift::<T>(y1) / lift::<T>(t) - half.clone(),
        }
    };
    let m = dist.expect(|k| {
        let v = value(k);
        if power == 2 {
            v.clone() * v
        } else {
            v
        }
    });
    let m = m.to_f64().unwrap_or(f64::NAN);
    Ok(match statistic {
        Statistic::CenteredScaled => m * (n as f64).powf(power as f64 / 2.0),
        _ => m,
    })
}

/// Conditional moments at a count state, from the closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalChecks<T> {
    /// `E[dY1 - dT Z | state] - f(Z)`; zero when the innovation is centered.
    pub drift_residual: T,
    /// `E[dM^2 | state]` via the second-moment expansion.
    pub second_moment: T,
    /// `E[dM / T_{n+1} | state] = bp(1-p)(1-2Z)(c-a-b) / ((T+a+b)(T+c))`.
    pub drift_over_total: T,
}

fn drift_in<T: Scalar>(params: &UrnParams, z: &T) -> T {
    let bp = lift::<T>(params.b) * lift_p::<T>(params.p);
    bp * (T::one() - lift::<T>(2) * z.clone())
}

pub fn conditional_checks<T: Scalar>(params: &UrnParams, counts: &EventCounts) -> ConditionalChecks<T> {
    let (y1, t) = counts.composition(params);
    conditional_checks_at(params, y1, t)
}

/// [`conditional_checks`] for a composition given directly as `(y1, t)`.
pub fn conditional_checks_at<T: Scalar>(params: &UrnParams, y1: u64, t: u64) -> ConditionalChecks<T> {
    let z = lift::<T>(y1) / lift::<T>(t);
    let zc = T::one() - z.clone();
    let p = lift_p::<T>(params.p);
    let q = T::one() - p.clone();
    let (a, b, c) = (lift::<T>(params.a), lift::<T>(params.b), lift::<T>(params.c));
    let ab = a.clone() + b.clone();
    let f = drift_in(params, &z);

    let mean: T = branch_probabilities(&p, &z)
        .into_iter()
        .map(|(o, prob)| {
            let (add1, add2) = o.additions(params);
            prob * (lift::<T>(add1) - lift::<T>(add1 + add2) * z.clone())
        })
        .fold(T::zero(), |acc, x| acc + x);
    let drift_residual = mean - f.clone();

    let raw_second = a.clone() * a.clone() * p.clone() * z.clone()
        + b.clone() * b.clone() * p.clone() * zc.clone()
        + c.clone() * c.clone() * q.clone() * z.clone()
        + z.clone() * z.clone() * ab.clone() * ab.clone() * p.clone()
        - lift::<T>(2) * ab.clone() * p.clone() * z.clone() * (a.clone() * z.clone() + b.clone() * zc)
        - c.clone() * c.clone() * q.clone() * z.clone() * z.clone();
    let second_moment = raw_second - f.clone() * f;

    let tt = lift::<T>(t);
    let bp = b * p.clone();
    let drift_over_total = bp * q * (T::one() - lift::<T>(2) * z) * (c.clone() - ab.clone())
        / ((tt.clone() + ab) * (tt + c));

    ConditionalChecks { drift_residual, second_moment, drift_over_total }
}

/// Conditional moments at a count state by direct enumeration of the four
/// outcomes. Independent of the closed forms in [`conditional_checks`].
#[derive(Debug, Clone, PartialEq)]
pub struct BranchMoments<T> {
    pub mean_innovation: T,
    pub mean_innovation_sq: T,
    pub mean_innovation_over_total: T,
}

pub fn branch_moments<T: Scalar>(params: &UrnParams, counts: &EventCounts) -> BranchMoments<T> {
    let (y1, t) = counts.composition(params);
    let z = lift::<T>(y1) / lift::<T>(t);
    let f = drift_in(params, &z);
    let p = lift_p::<T>(params.p);
    let mut out = BranchMoments { mean_innovation: T::zero(), mean_innovation_sq: T::zero(), mean_innovation_over_total: T::zero() };
    for (o, prob) in branch_probabilities(&p, &z) {
        let (add1, add2) = o.additions(params);
        let dm = lift::<T>(add1) - lift::<T>(add1 + add2) * z.clone() - f.clone();
        let t_next = lift::<T>(t + add1 + add2);
        out.mean_innovation = out.mean_innovation + prob.clone() * dm.clone();
        out.mean_innovation_sq = out.mean_innovation_sq + prob.clone() * dm.clone() * dm.clone();
        out.mean_innovation_over_total = out.mean_innovation_over_total + prob * dm / t_next;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftBoundReport<T> {
    /// `max |E[dM/T_{n+1} | state]| * n^2` over reachable states.
    pub k_empirical: f64,
    /// `bp(1-p)|c-a-b| / min{a+b, c}^2`.
    pub analytic_cap: f64,
    /// Largest `|closed form - enumeration|` over all states.
    pub max_mismatch: T,
    pub states: usize,
}

/// Sweeps every reachable state with `n <= n_max`, comparing the closed form
/// of `E[dM/T_{n+1} | state]` to direct enumeration and recording the scaled
/// bound constant.
pub fn verify_drift_bound<T: Scalar>(params: &UrnParams, n_max: u64) -> Result<DriftBoundReport<T>> {
    verify_drift_bound_capped(params, n_max, DEFAULT_CAP)
}

pub fn verify_drift_bound_capped<T: Scalar>(params: &UrnParams, n_max: u64, cap: u64) -> Result<DriftBoundReport<T>> {
    if n_max > cap {
        return Err(Error::CapExceeded { requested: n_max, cap });
    }
    let p = lift_p::<T>(params.p);
    let mut k_empirical = 0.0f64;
    let mut max_mismatch = T::zero();
    let mut states = 0usize;
    let mut level = vec![EventCounts::ZERO];
    for n in 0..=n_max {
        for counts in &level {
            let closed = conditional_checks::<T>(params, counts).drift_over_total;
            let enumerated = branch_moments::<T>(params, counts).mean_innovation_over_total;
            let mismatch = (closed.clone() - enumerated).abs();
            if mismatch > max_mismatch {
                max_mismatch = mismatch;
            }
            let scaled = closed.abs().to_f64().unwrap_or(f64::INFINITY) * (n as f64).powi(2);
            k_empirical = k_empirical.max(scaled);
            states += 1;
        }
        if n < n_max {
            // reachable successors; zero-probability branches only occur from
            // boundary proportions
            let mut next = std::collections::BTreeSet::new();
            for counts in &level {
                let (y1, t) = counts.composition(params);
                let z = lift::<T>(y1) / lift::<T>(t);
                for (o, prob) in branch_probabilities(&p, &z) {
                    if !prob.is_zero() {
                        next.insert(counts.after(o));
                    }
                }
            }
            level = next.into_iter().collect();
        }
    }
    let (a, b, c, pf) = (params.a as f64, params.b as f64, params.c as f64, params.p);
    let min_inc = params.min_increment() as f64;
    let analytic_cap = b * pf * (1.0 - pf) * (c - a - b).abs() / (min_inc * min_inc);
    Ok(DriftBoundReport { k_empirical, analytic_cap, max_mismatch, states })
}
