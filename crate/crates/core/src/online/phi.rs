//! Online contention maps built from a secretary algorithm and a weight vector.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{exact_selection, CrmPolicy, OnlineCrm, Offer, Resolver, SecretaryAlgorithm, SecretaryPolicy};
use crate::dist::SubsetDistribution;
use crate::error::{Error, Result};
use crate::matroid::{Matroid, WeightedMatroid};
use crate::rational::{serde_rational, serde_rational_vec, Rational};

/// Presents active arrivals with their weight and inactive ones with weight zero, and
/// selects exactly what the algorithm accepts.
pub struct PhiW<'a> {
    alg: &'a dyn SecretaryAlgorithm,
    w: Vec<Rational>,
}

pub fn phi_w(alg: &dyn SecretaryAlgorithm, w: Vec<Rational>) -> Result<PhiW<'_>> {
    if let Some(bad) = w.iter().find(|v| v.is_negative()) {
        return Err(Error::InvalidDistribution(format!("negative weight {bad}")));
    }
    Ok(PhiW { alg, w })
}

impl PhiW<'_> {
    pub fn weights(&self) -> &[Rational] {
        &self.w
    }
}

struct PhiRun<'a> {
    inner: Box<dyn SecretaryPolicy + 'a>,
    w: &'a [Rational],
    zero: Rational,
}

impl CrmPolicy for PhiRun<'_> {
    fn offer(&mut self, position: usize, element: usize, active: bool, can_accept: bool) -> bool {
        let weight = if active { &self.w[element] } else { &self.zero };
        self.inner.offer(Offer {
            position,
            element,
            weight,
            can_accept: can_accept && weight.is_positive(),
        })
    }
}

impl OnlineCrm for PhiW<'_> {
    fn name(&self) -> String {
        format!("phi_w[{}]", self.alg.name())
    }

    fn start(&self, n: usize, _: usize) -> Box<dyn CrmPolicy + '_> {
        Box::new(PhiRun {
            inner: self.alg.start(n),
            w: &self.w,
            zero: Rational::zero(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixtureComponent {
    #[serde(with = "serde_rational_vec")]
    pub w: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub p: Rational,
}

/// A finite distribution over weight vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct WeightMixture {
    components: Vec<MixtureComponent>,
}

impl WeightMixture {
    /// Probabilities must be non-negative and sum to one; zero-probability entries are dropped.
    pub fn new(components: Vec<(Vec<Rational>, Rational)>) -> Result<Self> {
        let total: Rational = components.iter().map(|(_, p)| p).sum();
        if !total.is_one() || components.iter().any(|(_, p)| p.is_negative()) {
            return Err(Error::InvalidDistribution(format!(
                "mixture probabilities must be non-negative and sum to 1 (sum is {total})"
            )));
        }
        Ok(WeightMixture {
            components: components
                .into_iter()
                .filter(|(_, p)| !p.is_zero())
                .map(|(w, p)| MixtureComponent { w, p })
                .collect(),
        })
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Draws `w` from the mixture once per run, then behaves as `phi_w`.
pub struct MixtureCrm<'a> {
    alg: &'a dyn SecretaryAlgorithm,
    mixture: WeightMixture,
}

impl<'a> MixtureCrm<'a> {
    pub fn new(alg: &'a dyn SecretaryAlgorithm, mixture: WeightMixture) -> Result<Self> {
        for c in mixture.components() {
            phi_w(alg, c.w.clone())?;
        }
        Ok(MixtureCrm { alg, mixture })
    }

    pub fn mixture(&self) -> &WeightMixture {
        &self.mixture
    }
}

impl OnlineCrm for MixtureCrm<'_> {
    fn name(&self) -> String {
        format!("mixture[{} x {}]", self.mixture.len(), self.alg.name())
    }

    fn branches(&self) -> Vec<Rational> {
        self.mixture.components.iter().map(|c| c.p.clone()).collect()
    }

    fn start(&self, n: usize, branch: usize) -> Box<dyn CrmPolicy + '_> {
        Box::new(PhiRun {
            inner: self.alg.start(n),
            w: &self.mixture.components[branch].w,
            zero: Rational::zero(),
        })
    }
}

/// The three expectations compared by the weight-based guarantees of `phi_w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightGuarantees {
    /// `E[w(phi_w(R))]`.
    #[serde(with = "serde_rational")]
    pub selected_weight: Rational,
    /// `E[rank_w(R)]`.
    #[serde(with = "serde_rational")]
    pub expected_weighted_rank: Rational,
    /// `E[w(R)]`.
    #[serde(with = "serde_rational")]
    pub expected_weight: Rational,
}

impl WeightGuarantees {
    /// `E[w(phi_w(R))] >= E[rank_w(R)] / gamma`.
    pub fn against_rank(&self, gamma: &Rational) -> bool {
        &self.selected_weight * gamma >= self.expected_weighted_rank
    }

    /// `E[w(phi_w(R))] >= E[w(R)] / (gamma alpha)`.
    pub fn against_weight(&self, gamma: &Rational, alpha: &Rational) -> bool {
        &self.selected_weight * gamma * alpha >= self.expected_weight
    }
}

pub fn weight_guarantees(
    m: &Matroid,
    d: &SubsetDistribution,
    alg: &dyn SecretaryAlgorithm,
    w: &[Rational],
) -> Result<WeightGuarantees> {
    let map = phi_w(alg, w.to_vec())?;
    let y = exact_selection(m, d, &Resolver::Online(&map))?;
    let wm = WeightedMatroid::new(m.clone(), w.to_vec())?;
    Ok(WeightGuarantees {
        selected_weight: y.iter().zip(w).map(|(a, b)| a * b).sum(),
        expected_weighted_rank: d.expectation(|r| wm.weighted_rank(r)),
        expected_weight: d.expectation(|r| wm.total(r)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::online::{dynkin, dynkin_gamma, exact_y, GreedyOnline};
    use crate::rational::{int, ratio};
    use crate::subset::Subset;

    fn chain(n: usize) -> SubsetDistribution {
        let mut pairs: Vec<(Subset, Rational)> = (0..n)
            .map(|k| (Subset::full(k), ratio(1, 1 << (k + 1))))
            .collect();
        pairs.push((Subset::full(n), ratio(1, 1 << n)));
        SubsetDistribution::explicit(n, &pairs).unwrap()
    }

    #[test]
    fn zero_weights_select_nothing() {
        let m = Matroid::uniform(3, 1);
        let y = exact_y(&m, &chain(3), &dynkin(3), &[int(0), int(0), int(0)]).unwrap();
        assert!(y.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn single_element_point() {
        let m = Matroid::uniform(1, 1);
        let d = SubsetDistribution::point(1, Subset::singleton(0)).unwrap();
        assert_eq!(exact_y(&m, &d, &dynkin(1), &[int(1)]).unwrap(), vec![int(1)]);
    }

    #[test]
    fn chain_of_three_under_the_cutoff_rule() {
        // Hand count over the 6 orders: on {0} the active element is taken unless it arrives
        // first (2/3). On {0,1} and {0,1,2} the cutoff rule with unit weights picks the
        // lowest-index active element that arrives after position 0 and beats the first.
        let m = Matroid::uniform(3, 1);
        let y = exact_y(&m, &chain(3), &dynkin(3), &[int(1), int(1), int(1)]).unwrap();
        // {0}: 2/3 for element 0.
        // {0,1}: orders (first, then) -> accepted: 0 first: 1 never beats 0 -> none (2 orders);
        //   1 first: 0 beats 1 -> 0 (2 orders); 2 first: first active after, 0 or 1 -> 2 orders
        //   with 0 before 1 -> 0, 1 before 0 -> 1. So 0 w.p. 1/2, 1 w.p. 1/6.
        // {0,1,2}: 0 first: none; 1 first: 0 (2 orders); 2 first: 0 beats 2 and 1 beats 2,
        //   first of them -> 0 or 1. So 0 w.p. 1/2, 1 w.p. 1/6.
        let expected0 = ratio(1, 4) * ratio(2, 3) + ratio(1, 8) * ratio(1, 2) + ratio(1, 8) * ratio(1, 2);
        let expected1 = ratio(1, 8) * ratio(1, 6) + ratio(1, 8) * ratio(1, 6);
        assert_eq!(y, vec![expected0, expected1, int(0)]);
    }

    #[test]
    fn weight_guarantees_hold_on_the_chain() {
        let m = Matroid::uniform(3, 1);
        let d = chain(3);
        let gamma = dynkin_gamma(3).unwrap();
        for w in [[3, 2, 1], [1, 1, 1], [1, 5, 2], [0, 4, 4]] {
            let w: Vec<Rational> = w.iter().map(|&v| int(v)).collect();
            let g = weight_guarantees(&m, &d, &dynkin(3), &w).unwrap();
            assert!(g.against_rank(&gamma));
            assert!(g.against_weight(&gamma, &ratio(7, 4)));
        }
    }

    #[test]
    fn mixture_validation() {
        assert!(WeightMixture::new(vec![(vec![int(1)], ratio(1, 2))]).is_err());
        let mix = WeightMixture::new(vec![(vec![int(1)], ratio(1, 2)), (vec![int(2)], ratio(1, 2))]).unwrap();
        assert!(MixtureCrm::new(&GreedyOnline, mix).is_ok());
    }
}
