use num_traits::{Signed, Zero};

use super::Matroid;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::subset::Subset;

/// A matroid with non-negative rational weights.
///
/// Elements are totally ordered by `(weight, -index)`: heavier first, lower index first among
/// equal weights. Every "higher weight" comparison in the crate goes through this order, so the
/// greedy optimum is unique even when weights repeat.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedMatroid {
    matroid: Matroid,
    weights: Vec<Rational>,
    order: Vec<usize>,
    position: Vec<usize>,
}

impl WeightedMatroid {
    pub fn new(matroid: Matroid, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != matroid.n() {
            return Err(Error::MismatchedGroundSets(weights.len(), matroid.n()));
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::InvalidMatroid(format!("negative weight {w}")));
        }
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
        let mut position = vec![0; order.len()];
        for (p, &e) in order.iter().enumerate() {
            position[e] = p;
        }
        Ok(WeightedMatroid {
            matroid,
            weights,
            order,
            position,
        })
    }

    pub fn unit(matroid: Matroid) -> Self {
        let n = matroid.n();
        Self::new(matroid, vec![Rational::from_integer(1.into()); n]).expect("unit weights")
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weights[i]
    }

    pub fn n(&self) -> usize {
        self.matroid.n()
    }

    /// Elements from highest to lowest priority.
    pub fn greedy_order(&self) -> &[usize] {
        &self.order
    }

    /// Whether `a` outranks `b` in the tie-broken weight order.
    pub fn outranks(&self, a: usize, b: usize) -> bool {
        self.position[a] < self.position[b]
    }

    /// Members of `s` that outrank `i`.
    pub fn above(&self, s: Subset, i: usize) -> Subset {
        s.iter().filter(|&j| self.outranks(j, i)).collect()
    }

    pub fn total(&self, s: Subset) -> Rational {
        s.iter().map(|i| &self.weights[i]).sum()
    }

    /// Greedy maximum-weight independent subset of `s`; zero-weight elements are never taken.
    pub fn opt(&self, s: Subset) -> Subset {
        let mut chosen = Subset::EMPTY;
        for &e in &self.order {
            if !s.contains(e) || self.weights[e].is_zero() {
                continue;
            }
            let candidate = chosen.with(e);
            if self.matroid.rank(candidate) == candidate.len() {
                chosen = candidate;
            }
        }
        chosen
    }

    pub fn weighted_rank(&self, s: Subset) -> Rational {
        self.total(self.opt(s))
    }

    pub fn checked_opt(&self, s: Subset) -> Result<Subset> {
        self.matroid.check_subset(s)?;
        Ok(self.opt(s))
    }

    pub fn checked_weighted_rank(&self, s: Subset) -> Result<Rational> {
        self.matroid.check_subset(s)?;
        Ok(self.weighted_rank(s))
    }

    /// Whether `i` improves the sample `s`: positive weight, outside `s`, and not spanned by the
    /// members of `s` that outrank it. Equals `i in opt(s + i)`; with distinct weights it is
    /// also `rank_w(s + i) > rank_w(s)`.
    pub fn improves(&self, s: Subset, i: usize) -> bool {
        !s.contains(i)
            && !self.weights[i].is_zero()
            && !self.matroid.spans(self.above(s, i), i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use proptest::prelude::*;

    fn weights(ws: &[i64]) -> Vec<Rational> {
        ws.iter().map(|&w| int(w)).collect()
    }

    fn triangle() -> Matroid {
        Matroid::graphic(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    /// Brute force over all independent subsets; ties go to the smaller set, then to the
    /// smaller bitmask under the priority order.
    fn brute_force_best(wm: &WeightedMatroid, s: Subset) -> Rational {
        s.subsets()
            .filter(|&t| wm.matroid().is_independent(t))
            .map(|t| wm.total(t))
            .max()
            .unwrap()
    }

    #[test]
    fn weighted_rank_examples() {
        let wm = WeightedMatroid::new(Matroid::uniform(2, 1), weights(&[3, 5])).unwrap();
        assert_eq!(wm.weighted_rank(Subset::full(2)), int(5));
        assert_eq!(wm.weighted_rank(Subset::EMPTY), int(0));
        let tri = WeightedMatroid::new(triangle(), weights(&[2, 3, 4])).unwrap();
        assert_eq!(tri.weighted_rank(Subset::full(3)), int(7));
        assert_eq!(brute_force_best(&tri, Subset::full(3)), int(7));
    }

    #[test]
    fn opt_examples() {
        let wm = WeightedMatroid::new(Matroid::uniform(3, 1), weights(&[1, 9, 4])).unwrap();
        assert_eq!(wm.opt(Subset::full(3)), Subset::singleton(1));
        let zero = WeightedMatroid::new(Matroid::uniform(3, 2), weights(&[0, 0, 0])).unwrap();
        assert_eq!(zero.opt(Subset::full(3)), Subset::EMPTY);
        let tri = WeightedMatroid::new(triangle(), weights(&[2, 3, 4])).unwrap();
        assert_eq!(tri.opt(Subset::full(3)), [1, 2].iter().collect());
    }

    #[test]
    fn ties_break_toward_lower_index() {
        let wm = WeightedMatroid::new(Matroid::uniform(3, 1), weights(&[2, 2, 2])).unwrap();
        assert_eq!(wm.greedy_order(), &[0, 1, 2]);
        assert_eq!(wm.opt(Subset::full(3)), Subset::singleton(0));
        assert!(wm.outranks(0, 2));
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(WeightedMatroid::new(Matroid::uniform(2, 1), weights(&[1])).is_err());
        assert!(WeightedMatroid::new(Matroid::uniform(2, 1), weights(&[1, -1])).is_err());
    }

    proptest! {
        #[test]
        fn greedy_is_optimal_and_independent(
            ws in prop::collection::vec(0i64..4, 6),
            bits in 0u64..64,
        ) {
            let k4 = Matroid::graphic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
            let wm = WeightedMatroid::new(k4, weights(&ws)).unwrap();
            let s = Subset::from_bits(bits);
            let opt = wm.opt(s);
            prop_assert!(opt.is_subset_of(s));
            prop_assert!(wm.matroid().is_independent(opt));
            prop_assert!(opt.iter().all(|i| !wm.weight(i).is_zero()));
            prop_assert_eq!(wm.weighted_rank(s), brute_force_best(&wm, s));
        }

        #[test]
        fn improving_agrees_with_weighted_rank_increase(
            ws in prop::collection::vec(0i64..6, 5),
            bits in 0u64..32,
        ) {
            let m = Matroid::partition(5, &[vec![0, 1, 2], vec![3, 4]], &[2, 1]).unwrap();
            let wm = WeightedMatroid::new(m, weights(&ws)).unwrap();
            let s = Subset::from_bits(bits);
            for i in 0..5 {
                let by_rank = wm.weighted_rank(s.with(i)) > wm.weighted_rank(s);
                let by_opt = !s.contains(i) && wm.opt(s.with(i)).contains(i);
                prop_assert_eq!(wm.improves(s, i), by_opt);
                // with repeated weights the rank-increase form loses the tie-break
                let distinct = (0..5).all(|a| (0..a).all(|b| ws[a] != ws[b]));
                if distinct {
                    prop_assert_eq!(wm.improves(s, i), by_rank);
                }
            }
        }
    }
}
