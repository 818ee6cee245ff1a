//! Random-arrival contention resolution and secretary algorithms.
//!
//! Elements arrive one at a time. A policy sees each arrival (and, for contention maps,
//! whether it is active) and answers accept or reject on the spot. The driver owns the
//! accepted set: it only honors an acceptance that keeps the set independent, so every
//! accepted set is independent at every prefix no matter what the policy says.

mod blueprint;
mod fixed_order;
mod mixture;
mod phi;
mod secretary;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng as _;
use serde::Serialize;

use crate::dist::SubsetDistribution;
use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::offline::ContentionMap;
use crate::rational::{self, Rational};
use crate::rng::{self, Rng};
use crate::subset::Subset;

pub use blueprint::{blueprint_exact, blueprint_secretary, BlueprintRun};
pub use fixed_order::{fixed_order_lower_bound, FixedOrderBound, STATE_CAP};
pub use mixture::{solve_mixture, Evaluation, IterationRecord, MixtureMethod, MixtureOptions, MixtureOutcome, Separation};
pub use phi::{phi_w, weight_guarantees, MixtureCrm, PhiW, WeightGuarantees, WeightMixture};
pub use secretary::{
    best_choice_probability, dynkin, dynkin_gamma, greedy_online, secretary_ratio, Dynkin,
    GreedyOnline, Offer, SecretaryAlgorithm, SecretaryPolicy,
};

/// Cap on `n` for routines that enumerate all `n!` arrival orders.
pub const EXACT_CAP: usize = 7;

/// Per-run decision state of an online contention map.
pub trait CrmPolicy {
    /// Called for every arrival. `can_accept` is true iff the element is active and keeps the
    /// accepted set independent; a `true` answer is ignored otherwise.
    fn offer(&mut self, position: usize, element: usize, active: bool, can_accept: bool) -> bool;
}

/// An online contention map for the random-arrival model.
///
/// Internal randomness is a finite set of branches drawn once per run, which keeps exact
/// evaluation possible: the selection law is the branch-weighted average.
pub trait OnlineCrm: Sync {
    fn name(&self) -> String;

    fn branches(&self) -> Vec<Rational> {
        vec![Rational::one()]
    }

    fn start(&self, n: usize, branch: usize) -> Box<dyn CrmPolicy + '_>;
}

/// Rejects everything.
#[derive(Clone, Copy, Debug, Default)]
pub struct AcceptNothing;

impl CrmPolicy for AcceptNothing {
    fn offer(&mut self, _: usize, _: usize, _: bool, _: bool) -> bool {
        false
    }
}

impl OnlineCrm for AcceptNothing {
    fn name(&self) -> String {
        "accept-nothing".into()
    }

    fn start(&self, _: usize, _: usize) -> Box<dyn CrmPolicy + '_> {
        Box::new(AcceptNothing)
    }
}

/// How a realized active set is resolved.
#[derive(Clone, Copy)]
pub enum Resolver<'a> {
    Online(&'a dyn OnlineCrm),
    /// Sees the whole active set up front and accepts the elements of a draw from the map
    /// as they arrive. Only meaningful as a benchmark.
    Clairvoyant(&'a ContentionMap),
}

impl Resolver<'_> {
    pub fn name(&self) -> String {
        match self {
            Resolver::Online(crm) => crm.name(),
            Resolver::Clairvoyant(_) => "clairvoyant".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RevealStep {
    pub element: usize,
    pub active: bool,
    /// `None` for inactive arrivals, which admit no decision.
    pub accepted: Option<bool>,
}

/// One run: arrival order, active set, and the decision transcript.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArrivalInstance {
    pub order: Vec<usize>,
    pub active: Subset,
    pub log: Vec<RevealStep>,
    pub accepted: Subset,
}

impl ArrivalInstance {
    /// Decisions only on active elements, accepted set independent after every step.
    pub fn is_consistent(&self, m: &Matroid) -> bool {
        let mut acc = Subset::EMPTY;
        for step in &self.log {
            match step.accepted {
                None if step.active => return false,
                Some(_) if !step.active => return false,
                Some(true) => {
                    acc = acc.with(step.element);
                    if !m.is_independent(acc) {
                        return false;
                    }
                }
                _ => {}
            }
        }
        acc == self.accepted && acc.is_subset_of(self.active)
    }
}

fn check_order(order: &[usize], n: usize) -> Result<()> {
    let mut seen = Subset::EMPTY;
    for &e in order {
        if e >= n {
            return Err(Error::ElementOutOfRange { element: e, n });
        }
        seen = seen.with(e);
    }
    if order.len() != n || seen != Subset::full(n) {
        return Err(Error::InvalidDistribution(format!(
            "arrival order {order:?} is not a permutation of 0..{n}"
        )));
    }
    Ok(())
}

/// Runs one branch of an online map on a fixed order and active set.
pub fn run_online(
    m: &Matroid,
    crm: &dyn OnlineCrm,
    branch: usize,
    order: &[usize],
    active: Subset,
) -> Result<ArrivalInstance> {
    check_order(order, m.n())?;
    Ok(drive(m, crm, branch, order, active))
}

fn drive(m: &Matroid, crm: &dyn OnlineCrm, branch: usize, order: &[usize], active: Subset) -> ArrivalInstance {
    let mut policy = crm.start(m.n(), branch);
    let mut accepted = Subset::EMPTY;
    let mut log = Vec::with_capacity(order.len());
    for (position, &e) in order.iter().enumerate() {
        let is_active = active.contains(e);
        let can_accept = is_active && m.is_independent(accepted.with(e));
        let says = policy.offer(position, e, is_active, can_accept);
        let take = says && can_accept;
        if take {
            accepted = accepted.with(e);
        }
        log.push(RevealStep {
            element: e,
            active: is_active,
            accepted: is_active.then_some(take),
        });
    }
    ArrivalInstance {
        order: order.to_vec(),
        active,
        log,
        accepted,
    }
}

/// Accepted set of a clairvoyant run that intends to select `target`.
fn drive_clairvoyant(m: &Matroid, order: &[usize], active: Subset, target: Subset) -> ArrivalInstance {
    let mut accepted = Subset::EMPTY;
    let mut log = Vec::with_capacity(order.len());
    for &e in order {
        let is_active = active.contains(e);
        let take = is_active && target.contains(e) && m.is_independent(accepted.with(e));
        if take {
            accepted = accepted.with(e);
        }
        log.push(RevealStep {
            element: e,
            active: is_active,
            accepted: is_active.then_some(take),
        });
    }
    ArrivalInstance {
        order: order.to_vec(),
        active,
        log,
        accepted,
    }
}

pub(crate) fn require_exact(n: usize, operation: &'static str) -> Result<()> {
    if n > EXACT_CAP {
        return Err(Error::GroundSetTooLarge {
            n,
            cap: EXACT_CAP,
            operation,
        });
    }
    Ok(())
}

fn factorial(n: usize) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// Exact `Pr[i in phi(R)]` over all orders, active sets and internal branches.
pub fn exact_selection(m: &Matroid, d: &SubsetDistribution, resolver: &Resolver) -> Result<Vec<Rational>> {
    let n = m.n();
    if d.n() != n {
        return Err(Error::MismatchedGroundSets(n, d.n()));
    }
    match resolver {
        Resolver::Clairvoyant(map) => Ok(crate::offline::verify_crm(m, d, map)?.selection),
        Resolver::Online(crm) => {
            require_exact(n, "exact online evaluation")?;
            let orders: Vec<Vec<usize>> = (0..n).permutations(n).collect();
            let scale = Rational::from_integer(factorial(n));
            let mut y = vec![Rational::zero(); n];
            for (b, pb) in crm.branches().iter().enumerate() {
                if pb.is_zero() {
                    continue;
                }
                for (r, pr) in d.support() {
                    let mut counts = vec![0u64; n];
                    for order in &orders {
                        for i in drive(m, *crm, b, order, *r).accepted.iter() {
                            counts[i] += 1;
                        }
                    }
                    let mass = pb * pr / &scale;
                    for (yi, c) in y.iter_mut().zip(counts) {
                        if c > 0 {
                            *yi += &mass * rational::int(c as i64);
                        }
                    }
                }
            }
            Ok(y)
        }
    }
}

/// Exact `y_i(w) = Pr[i in phi_w(R)]`.
pub fn exact_y(
    m: &Matroid,
    d: &SubsetDistribution,
    alg: &dyn SecretaryAlgorithm,
    w: &[Rational],
) -> Result<Vec<Rational>> {
    let map = phi_w(alg, w.to_vec())?;
    exact_selection(m, d, &Resolver::Online(&map))
}

/// Monte Carlo estimate of `y(w)`, as exact frequencies `count / samples`.
pub fn sampled_y(
    m: &Matroid,
    d: &SubsetDistribution,
    alg: &dyn SecretaryAlgorithm,
    w: &[Rational],
    samples: u64,
    seed: u64,
) -> Result<Vec<Rational>> {
    let map = phi_w(alg, w.to_vec())?;
    let report = simulate(m, d, &Resolver::Online(&map), samples, seed, 1)?;
    Ok(report
        .selected
        .iter()
        .map(|&c| Rational::new(BigInt::from(c), BigInt::from(samples)))
        .collect())
}

/// Empirical selection frequencies with Wilson score intervals.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationReport {
    pub resolver: String,
    pub trials: u64,
    pub seed: u64,
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub marginals: Vec<Rational>,
    pub active: Vec<u64>,
    pub selected: Vec<u64>,
    /// Estimated `Pr[i in phi(R)]`.
    pub frequencies: Vec<f64>,
    /// 95% Wilson interval for each frequency.
    pub intervals: Vec<(f64, f64)>,
    /// Estimated `x_i / Pr[i in phi(R)]` (infinite when nothing was selected).
    pub ratios: Vec<f64>,
    /// Runs whose transcript broke feasibility; the driver makes this zero by construction.
    pub violations: u64,
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let t = trials as f64;
    let phat = successes as f64 / t;
    let z2 = z * z;
    let center = (phat + z2 / (2.0 * t)) / (1.0 + z2 / t);
    let half = z * (phat * (1.0 - phat) / t + z2 / (4.0 * t * t)).sqrt() / (1.0 + z2 / t);
    ((center - half).max(0.0), (center + half).min(1.0))
}

struct Tally {
    active: Vec<u64>,
    selected: Vec<u64>,
    violations: u64,
}

fn pick(weights: &[Rational], rng: &mut Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += rational::to_f64(w);
        if u < acc {
            return i;
        }
    }
    weights.iter().rposition(|w| !w.is_zero()).unwrap_or(0)
}

fn run_trial(m: &Matroid, d: &SubsetDistribution, resolver: &Resolver, rng: &mut Rng) -> ArrivalInstance {
    let support: Vec<Rational> = d.support().iter().map(|(_, p)| p.clone()).collect();
    let r = d.support()[pick(&support, rng)].0;
    let order = rng::permutation(m.n(), rng);
    match resolver {
        Resolver::Online(crm) => {
            let branch = pick(&crm.branches(), rng);
            drive(m, *crm, branch, &order, r)
        }
        Resolver::Clairvoyant(map) => {
            let target = match map.get(r) {
                Some(choices) => {
                    let probs: Vec<Rational> = choices.iter().map(|(_, p)| p.clone()).collect();
                    choices[pick(&probs, rng)].0
                }
                None => Subset::EMPTY,
            };
            drive_clairvoyant(m, &order, r, target)
        }
    }
}

/// Monte Carlo over `(R, order, branch)`; trial `t` uses its own stream of `seed`, so the
/// result does not depend on `jobs`.
pub fn simulate(
    m: &Matroid,
    d: &SubsetDistribution,
    resolver: &Resolver,
    trials: u64,
    seed: u64,
    jobs: usize,
) -> Result<SimulationReport> {
    let n = m.n();
    if d.n() != n {
        return Err(Error::MismatchedGroundSets(n, d.n()));
    }
    if trials == 0 {
        return Err(Error::InvalidDistribution("at least one trial is required".into()));
    }
    if let Resolver::Clairvoyant(map) = resolver {
        if let Some((r, _)) = d.support().iter().find(|(r, _)| map.get(*r).is_none()) {
            return Err(Error::MissingSupportSet(r.to_string()));
        }
    }
    let jobs = jobs.clamp(1, 64) as u64;
    let chunk = trials.div_ceil(jobs);
    let work = |lo: u64, hi: u64| {
        let mut tally = Tally {
            active: vec![0; n],
            selected: vec![0; n],
            violations: 0,
        };
        for t in lo..hi {
            let mut rng = rng::stream(seed, t);
            let run = run_trial(m, d, resolver, &mut rng);
            if !run.is_consistent(m) {
                tally.violations += 1;
            }
            for i in run.active.iter() {
                tally.active[i] += 1;
            }
            for i in run.accepted.iter() {
                tally.selected[i] += 1;
            }
        }
        tally
    };
    let tallies: Vec<Tally> = if jobs == 1 {
        vec![work(0, trials)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|j| {
                    let (lo, hi) = ((j * chunk).min(trials), ((j + 1) * chunk).min(trials));
                    scope.spawn(move || work(lo, hi))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("simulation worker")).collect()
        })
    };
    let mut active = vec![0; n];
    let mut selected = vec![0; n];
    let mut violations = 0;
    for t in tallies {
        for i in 0..n {
            active[i] += t.active[i];
            selected[i] += t.selected[i];
        }
        violations += t.violations;
    }
    let marginals = d.marginals();
    let frequencies: Vec<f64> = selected.iter().map(|&c| c as f64 / trials as f64).collect();
    let intervals = selected.iter().map(|&c| wilson_interval(c, trials, 1.96)).collect();
    let ratios = marginals
        .iter()
        .zip(&frequencies)
        .map(|(x, f)| {
            let x = rational::to_f64(x);
            if x == 0.0 {
                f64::NAN
            } else {
                x / f
            }
        })
        .collect();
    Ok(SimulationReport {
        resolver: resolver.name(),
        trials,
        seed,
        marginals,
        active,
        selected,
        frequencies,
        intervals,
        ratios,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn chain(n: usize) -> SubsetDistribution {
        let mut pairs: Vec<(Subset, Rational)> = (0..n)
            .map(|k| (Subset::full(k), ratio(1, 1 << (k + 1))))
            .collect();
        pairs.push((Subset::full(n), ratio(1, 1 << n)));
        SubsetDistribution::explicit(n, &pairs).unwrap()
    }

    #[test]
    fn accept_nothing_selects_nothing() {
        let m = Matroid::uniform(3, 1);
        let d = chain(3);
        let y = exact_selection(&m, &d, &Resolver::Online(&AcceptNothing)).unwrap();
        assert!(y.iter().all(|v| v.is_zero()));
        let sim = simulate(&m, &d, &Resolver::Online(&AcceptNothing), 200, 1, 1).unwrap();
        assert!(sim.frequencies.iter().all(|&f| f == 0.0));
    }

    #[test]
    fn transcripts_are_consistent() {
        let m = Matroid::uniform(4, 2);
        let greedy = phi_w(&GreedyOnline, vec![int(1); 4]).unwrap();
        let run = run_online(&m, &greedy, 0, &[3, 1, 0, 2], Subset::full(4)).unwrap();
        assert!(run.is_consistent(&m));
        assert_eq!(run.accepted, [1, 3].iter().collect());
        assert!(run_online(&m, &greedy, 0, &[0, 0, 1, 2], Subset::full(4)).is_err());
    }

    #[test]
    fn simulation_is_independent_of_jobs() {
        let m = Matroid::uniform(3, 1);
        let d = chain(3);
        let greedy = phi_w(&GreedyOnline, vec![int(1); 3]).unwrap();
        let one = simulate(&m, &d, &Resolver::Online(&greedy), 500, 9, 1).unwrap();
        let four = simulate(&m, &d, &Resolver::Online(&greedy), 500, 9, 4).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.violations, 0);
    }

    #[test]
    fn wilson_interval_contains_estimate() {
        let (lo, hi) = wilson_interval(30, 100, 1.96);
        assert!(lo < 0.3 && 0.3 < hi);
        assert_eq!(wilson_interval(0, 0, 1.96), (0.0, 1.0));
    }
}
