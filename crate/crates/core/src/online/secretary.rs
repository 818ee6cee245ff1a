//! Secretary algorithms: irrevocable accept/reject decisions on weighted arrivals.

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use super::require_exact;
use crate::error::Result;
use crate::matroid::{Matroid, WeightedMatroid};
use crate::rational::{Factor, Rational};
use crate::subset::Subset;

/// What a secretary policy sees at one arrival.
#[derive(Clone, Copy, Debug)]
pub struct Offer<'a> {
    pub position: usize,
    pub element: usize,
    pub weight: &'a Rational,
    /// Accepting keeps the accepted set independent and the weight is positive.
    pub can_accept: bool,
}

pub trait SecretaryPolicy {
    fn offer(&mut self, offer: Offer<'_>) -> bool;
}

pub trait SecretaryAlgorithm: Sync {
    fn name(&self) -> String;

    /// Fresh decision state for a run over `n` arrivals.
    fn start(&self, n: usize) -> Box<dyn SecretaryPolicy + '_>;

    /// Decisions depend only on comparisons between weights and on which weights are zero,
    /// never on their magnitudes. Lets callers reuse results across weight vectors.
    fn comparison_based(&self) -> bool {
        false
    }
}

/// Observe the first `cutoff` arrivals, then take the first arrival that beats all of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dynkin {
    pub cutoff: usize,
}

/// The classical stopping rule with cutoff `floor(n/e)`.
pub fn dynkin(n: usize) -> Dynkin {
    Dynkin {
        cutoff: (n as f64 / std::f64::consts::E).floor() as usize,
    }
}

struct DynkinRun {
    cutoff: usize,
    /// Heaviest observed arrival as `(weight, element)`.
    best: Option<(Rational, usize)>,
    done: bool,
}

impl DynkinRun {
    // ties are broken toward the lower index, as in the greedy order
    fn beaten_by(&self, weight: &Rational, element: usize) -> bool {
        match &self.best {
            None => true,
            Some((w, idx)) => weight > w || (weight == w && element < *idx),
        }
    }
}

impl SecretaryPolicy for DynkinRun {
    fn offer(&mut self, offer: Offer<'_>) -> bool {
        if self.done {
            return false;
        }
        let beats = self.beaten_by(offer.weight, offer.element);
        if offer.position < self.cutoff {
            if beats {
                self.best = Some((offer.weight.clone(), offer.element));
            }
            return false;
        }
        if offer.can_accept && beats {
            self.done = true;
            return true;
        }
        false
    }
}

impl SecretaryAlgorithm for Dynkin {
    fn name(&self) -> String {
        format!("dynkin(cutoff={})", self.cutoff)
    }

    fn start(&self, _: usize) -> Box<dyn SecretaryPolicy + '_> {
        Box::new(DynkinRun {
            cutoff: self.cutoff,
            best: None,
            done: false,
        })
    }

    fn comparison_based(&self) -> bool {
        true
    }
}

/// Accepts every arrival it is allowed to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GreedyOnline;

pub fn greedy_online() -> GreedyOnline {
    GreedyOnline
}

impl SecretaryPolicy for GreedyOnline {
    fn offer(&mut self, offer: Offer<'_>) -> bool {
        offer.can_accept
    }
}

impl SecretaryAlgorithm for GreedyOnline {
    fn name(&self) -> String {
        "greedy".into()
    }

    fn start(&self, _: usize) -> Box<dyn SecretaryPolicy + '_> {
        Box::new(GreedyOnline)
    }

    fn comparison_based(&self) -> bool {
        true
    }
}

/// Runs a secretary algorithm on one order; zero-weight arrivals can never be accepted.
pub fn run_secretary(m: &Matroid, alg: &dyn SecretaryAlgorithm, order: &[usize], w: &[Rational]) -> Subset {
    let mut policy = alg.start(m.n());
    let mut accepted = Subset::EMPTY;
    for (position, &e) in order.iter().enumerate() {
        let can_accept = w[e].is_positive() && m.is_independent(accepted.with(e));
        let says = policy.offer(Offer {
            position,
            element: e,
            weight: &w[e],
            can_accept,
        });
        if says && can_accept {
            accepted = accepted.with(e);
        }
    }
    accepted
}

/// Exact `rank_w(E) / E[w(A)]` over all arrival orders; the per-instance competitive ratio.
pub fn secretary_ratio(wm: &WeightedMatroid, alg: &dyn SecretaryAlgorithm) -> Result<Factor> {
    let n = wm.n();
    require_exact(n, "secretary ratio")?;
    let mut total = Rational::zero();
    let mut count = 0u64;
    for order in (0..n).permutations(n) {
        total += wm.total(run_secretary(wm.matroid(), alg, &order, wm.weights()));
        count += 1;
    }
    let expected = total / Rational::from_integer(count.into());
    Ok(Factor::quotient(&wm.weighted_rank(wm.matroid().full()), &expected).unwrap_or(Factor::Finite(Rational::one())))
}

/// Exact probability that the algorithm accepts the heaviest of `n` distinct weights on a
/// rank-one uniform matroid, over all `n!` orders.
pub fn best_choice_probability(alg: &dyn SecretaryAlgorithm, n: usize) -> Result<Rational> {
    require_exact(n.max(1), "best-choice probability")?;
    let m = Matroid::uniform(n, 1);
    let w: Vec<Rational> = (0..n).map(|i| Rational::from_integer((n - i).into())).collect();
    let mut hits = 0u64;
    let mut count = 0u64;
    for order in (0..n).permutations(n) {
        if run_secretary(&m, alg, &order, &w).contains(0) {
            hits += 1;
        }
        count += 1;
    }
    Ok(Rational::new(hits.into(), count.into()))
}

/// `1 / Pr[best chosen]` for the cutoff rule on `n` arrivals.
///
/// On a rank-one uniform matroid this bounds the ratio for every non-negative weight vector:
/// zero weights are never accepted, which can only help the heaviest element.
pub fn dynkin_gamma(n: usize) -> Result<Rational> {
    Ok(best_choice_probability(&dynkin(n), n)?.recip())
}
