//! Secretary algorithm from an online contention map on improving elements.
//!
//! 1. The first `Binom(n, p)` arrivals form the sample `S`; nothing is accepted.
//! 2. The active set `R` is the set of elements improving on `S`, recognized on arrival.
//! 3. The contention map sees the remaining arrivals with the members of `S` inserted as
//!    inactive at fresh uniformly random positions, then its selections are accepted.
//!
//! Placing `S` at its original positions (the front of the order) would tell the map that
//! early arrivals are never active. Fresh positions make the map's order uniform and
//! independent of `R`, which is what its guarantee assumes.

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::Rng as _;
use serde::Serialize;

use super::{drive, drive_clairvoyant, pick, require_exact, Resolver};
use crate::dist::improving_set;
use crate::error::{Error, Result};
use crate::matroid::WeightedMatroid;
use crate::rational::{self, serde_rational, Rational};
use crate::rng::{self, Rng};
use crate::subset::Subset;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlueprintRun {
    pub arrival: Vec<usize>,
    pub sample: Subset,
    pub improving: Subset,
    /// Order presented to the contention map.
    pub crm_order: Vec<usize>,
    pub accepted: Subset,
    #[serde(with = "serde_rational")]
    pub weight: Rational,
}

fn check_p(p: &Rational) -> Result<()> {
    if *p < Rational::zero() || *p > Rational::one() {
        return Err(Error::InvalidProbability(p.to_string()));
    }
    Ok(())
}

/// Fills `positions` (sorted) with `sample` in order and the other slots with `rest` in order.
fn interleave(rest: &[usize], sample: &[usize], positions: &[usize], n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    let (mut a, mut b) = (0, 0);
    for slot in 0..n {
        if b < positions.len() && positions[b] == slot {
            out.push(sample[b]);
            b += 1;
        } else {
            out.push(rest[a]);
            a += 1;
        }
    }
    out
}

fn resolve(wm: &WeightedMatroid, resolver: &Resolver, branch: usize, order: &[usize], r: Subset, target: Subset) -> Subset {
    match resolver {
        Resolver::Online(crm) => drive(wm.matroid(), *crm, branch, order, r).accepted,
        Resolver::Clairvoyant(_) => drive_clairvoyant(wm.matroid(), order, r, target).accepted,
    }
}

/// One run of the three-step procedure.
pub fn blueprint_secretary(
    wm: &WeightedMatroid,
    p: &Rational,
    resolver: &Resolver,
    rng: &mut Rng,
) -> Result<BlueprintRun> {
    check_p(p)?;
    let n = wm.n();
    let arrival = rng::permutation(n, rng);
    let pf = rational::to_f64(p);
    let k = (0..n).filter(|_| rng.random_bool(pf)).count();
    let sample_set: Subset = arrival[..k].iter().collect();
    let improving = improving_set(wm, sample_set);
    let mut positions = sample(rng, n, k).into_vec();
    positions.sort_unstable();
    let crm_order = interleave(&arrival[k..], &arrival[..k], &positions, n);
    let (branch, target) = match resolver {
        Resolver::Online(crm) => (pick(&crm.branches(), rng), Subset::EMPTY),
        Resolver::Clairvoyant(map) => {
            let choices = map
                .get(improving)
                .ok_or_else(|| Error::MissingSupportSet(improving.to_string()))?;
            let probs: Vec<Rational> = choices.iter().map(|(_, q)| q.clone()).collect();
            (0, choices[pick(&probs, rng)].0)
        }
    };
    let accepted = resolve(wm, resolver, branch, &crm_order, improving, target);
    Ok(BlueprintRun {
        weight: wm.total(accepted),
        arrival,
        sample: sample_set,
        improving,
        crm_order,
        accepted,
    })
}

/// Exact `E[w(accepted)]`, enumerating every arrival order, sample size, interleaving
/// pattern, and internal choice of the contention map.
pub fn blueprint_exact(wm: &WeightedMatroid, p: &Rational, resolver: &Resolver) -> Result<Rational> {
    check_p(p)?;
    let n = wm.n();
    require_exact(n, "exact blueprint evaluation")?;
    let q = Rational::one() - p;
    let orders: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let per_order = Rational::new(1.into(), (orders.len() as i64).into());
    let branches: Vec<(usize, Rational)> = match resolver {
        Resolver::Online(crm) => crm.branches().into_iter().enumerate().collect(),
        Resolver::Clairvoyant(_) => vec![(0, Rational::one())],
    };
    let mut total = Rational::zero();
    for k in 0..=n {
        let size_mass = binomial(n, k) * rational::pow(p, k) * rational::pow(&q, n - k);
        if size_mass.is_zero() {
            continue;
        }
        let patterns: Vec<Vec<usize>> = (0..n).combinations(k).collect();
        let per_pattern = Rational::new(1.into(), (patterns.len() as i64).into());
        for arrival in &orders {
            let sample_set: Subset = arrival[..k].iter().collect();
            let r = improving_set(wm, sample_set);
            let targets: Vec<(Subset, Rational)> = match resolver {
                Resolver::Online(_) => vec![(Subset::EMPTY, Rational::one())],
                Resolver::Clairvoyant(map) => map
                    .get(r)
                    .ok_or_else(|| Error::MissingSupportSet(r.to_string()))?
                    .to_vec(),
            };
            let mut sum = Rational::zero();
            for positions in &patterns {
                let crm_order = interleave(&arrival[k..], &arrival[..k], positions, n);
                for (b, pb) in &branches {
                    for (target, pt) in &targets {
                        let accepted = resolve(wm, resolver, *b, &crm_order, r, *target);
                        sum += pb * pt * wm.total(accepted);
                    }
                }
            }
            total += &size_mass * &per_order * &per_pattern * sum;
        }
    }
    Ok(total)
}

fn binomial(n: usize, k: usize) -> Rational {
    let mut c = Rational::one();
    for j in 0..k {
        c = c * rational::int((n - j) as i64) / rational::int((j + 1) as i64);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::improving_distribution;
    use crate::matroid::Matroid;
    use crate::offline::synthesize_crm;
    use crate::online::{exact_selection, phi_w, GreedyOnline};
    use crate::rational::{int, ratio, Factor};

    fn weighted(m: Matroid, ws: &[i64]) -> WeightedMatroid {
        WeightedMatroid::new(m, ws.iter().map(|&w| int(w)).collect()).unwrap()
    }

    #[test]
    fn interleaving_keeps_relative_orders() {
        assert_eq!(interleave(&[5, 6], &[1, 2], &[0, 2], 4), vec![1, 5, 2, 6]);
        assert_eq!(interleave(&[5, 6], &[], &[], 2), vec![5, 6]);
    }

    #[test]
    fn exact_value_is_the_improving_composition() {
        // the map's order is uniform and independent of R, so the blueprint's expected weight
        // equals sum_i w_i y_i under the improving distribution
        let wm = weighted(Matroid::uniform(4, 1), &[4, 3, 2, 1]);
        let p = ratio(1, 2);
        let d = improving_distribution(&wm, &p).unwrap();
        let greedy = phi_w(&GreedyOnline, vec![int(1); 4]).unwrap();
        let resolver = Resolver::Online(&greedy);
        let y = exact_selection(wm.matroid(), &d, &resolver).unwrap();
        let composed: Rational = y.iter().zip(wm.weights()).map(|(a, b)| a * b).sum();
        assert_eq!(blueprint_exact(&wm, &p, &resolver).unwrap(), composed);
    }

    #[test]
    fn clairvoyant_bound_on_rank_one() {
        let wm = weighted(Matroid::uniform(4, 1), &[7, 5, 2, 1]);
        for p in [ratio(1, 4), ratio(1, 2)] {
            let d = improving_distribution(&wm, &p).unwrap();
            let synth = synthesize_crm(wm.matroid(), &d).unwrap();
            let alpha_crm = Factor::reciprocal_of(&synth.beta);
            let value = blueprint_exact(&wm, &p, &Resolver::Clairvoyant(&synth.crm)).unwrap();
            let bound = (int(1) - &p) * int(7) / alpha_crm.finite().unwrap();
            assert!(value >= bound, "{value} < {bound}");
        }
    }

    #[test]
    fn sampling_everything_accepts_nothing() {
        let wm = weighted(Matroid::uniform(5, 1), &[5, 4, 3, 2, 1]);
        let greedy = phi_w(&GreedyOnline, vec![int(1); 5]).unwrap();
        let mut rng = rng::seeded(3);
        let empty = (0..200)
            .filter(|_| {
                blueprint_secretary(&wm, &ratio(999, 1000), &Resolver::Online(&greedy), &mut rng)
                    .unwrap()
                    .accepted
                    .is_empty()
            })
            .count();
        assert!(empty >= 180);
    }

    #[test]
    fn runs_accept_independent_improving_elements() {
        let wm = weighted(Matroid::graphic(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap(), &[5, 4, 3, 2, 1]);
        let greedy = phi_w(&GreedyOnline, vec![int(1); 5]).unwrap();
        let mut rng = rng::seeded(11);
        for _ in 0..100 {
            let run = blueprint_secretary(&wm, &ratio(1, 3), &Resolver::Online(&greedy), &mut rng).unwrap();
            assert!(run.accepted.is_subset_of(run.improving));
            assert!(run.improving.is_disjoint(run.sample));
            assert!(wm.matroid().is_independent(run.accepted));
        }
    }
}
