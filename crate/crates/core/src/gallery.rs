//! Small named instances: the chain, half-base and disjoint-bases distributions, the
//! subsampling tightness instance, and a zoo of weighted matroids for improving elements.

use num_traits::One;

use crate::dist::SubsetDistribution;
use crate::error::{Error, Result};
use crate::matroid::{Matroid, WeightedMatroid};
use crate::offline::ContentionMap;
use crate::rational::{self, int, Rational};
use crate::subset::Subset;

fn two_pow_neg(k: usize) -> Rational {
    rational::pow(&rational::ratio(1, 2), k)
}

/// Prefix `{0, ..., k-1}`.
pub fn prefix(k: usize) -> Subset {
    Subset::full(k)
}

/// The chain: `R = {0, ..., k-1}` with probability `2^-(k+1)` for `k < n`, and `R = E` with
/// probability `2^-n`. Paired with [`chain_matroid`].
pub fn chain(n: usize) -> Result<SubsetDistribution> {
    let mut pairs: Vec<(Subset, Rational)> = (0..n).map(|k| (prefix(k), two_pow_neg(k + 1))).collect();
    pairs.push((prefix(n), two_pow_neg(n)));
    SubsetDistribution::explicit(n, &pairs)
}

pub fn chain_matroid(n: usize) -> Matroid {
    Matroid::uniform(n, 1)
}

/// `{0..k-1} -> {k-1}`, and the empty set to itself. Exactly 2-competitive on the chain.
pub fn prefix_crm(n: usize) -> ContentionMap {
    ContentionMap::deterministic(n, (0..=n).map(prefix), |r| match r.len() {
        0 => Subset::EMPTY,
        k => Subset::singleton(k - 1),
    })
}

/// Picks one active non-loop element uniformly at random: greedy under a random order, on a
/// rank-one matroid.
pub fn uniform_choice_crm(m: &Matroid, d: &SubsetDistribution) -> Result<ContentionMap> {
    let mut map = ContentionMap::new(d.n());
    for (r, _) in d.support() {
        let usable = r.difference(m.loops());
        let choices = if usable.is_empty() {
            vec![(Subset::EMPTY, Rational::one())]
        } else {
            let share = rational::ratio(1, usable.len() as i64);
            usable.iter().map(|i| (Subset::singleton(i), share.clone())).collect()
        };
        map.insert(*r, choices)?;
    }
    Ok(map)
}

/// `R` is empty with probability 1/2 and otherwise a uniformly random `k`-subset of `n`;
/// 1-uncontentious on the `k`-uniform matroid despite positive correlation.
pub fn half_base(n: usize, k: usize) -> Result<SubsetDistribution> {
    if k > n {
        return Err(Error::InvalidDistribution(format!("no {k}-subsets of {n} elements")));
    }
    let bases: Vec<Subset> = Subset::full(n).subsets().filter(|s| s.len() == k).collect();
    let share = rational::ratio(1, 2) / int(bases.len() as i64);
    let mut pairs = vec![(Subset::EMPTY, rational::ratio(1, 2))];
    pairs.extend(bases.into_iter().map(|b| (b, share.clone())));
    SubsetDistribution::explicit(n, &pairs)
}

pub fn half_base_matroid(n: usize, k: usize) -> Matroid {
    Matroid::uniform(n, k)
}

/// A matroid with `m` disjoint bases `B_1..B_m`, a chain of their unions, and the map that
/// returns the last base added.
#[derive(Clone, Debug)]
pub struct DisjointBasesChain {
    pub matroid: Matroid,
    pub bases: Vec<Subset>,
    pub distribution: SubsetDistribution,
    pub crm: ContentionMap,
}

/// Partition matroid of `m` blocks of size `m`, capacity one each; `B_j` holds the `j`-th
/// element of every block. `R = B_1 ∪ ... ∪ B_k` with probability `2^-k` for `k < m`, and
/// the whole ground set with probability `2^(1-m)`.
pub fn disjoint_bases_chain(m: usize) -> Result<DisjointBasesChain> {
    if m < 2 || m * m > crate::subset::MAX_ELEMENTS {
        return Err(Error::InvalidDistribution(format!("disjoint-bases chain needs 2 <= m <= 7, got {m}")));
    }
    let n = m * m;
    let blocks: Vec<Vec<usize>> = (0..m).map(|b| (b * m..(b + 1) * m).collect()).collect();
    let matroid = Matroid::partition(n, &blocks, &vec![1; m])?;
    let bases: Vec<Subset> = (0..m).map(|j| (0..m).map(|b| b * m + j).collect()).collect();
    let unions: Vec<Subset> = (1..=m)
        .map(|k| bases[..k].iter().fold(Subset::EMPTY, |acc, b| acc.union(*b)))
        .collect();
    let mut pairs: Vec<(Subset, Rational)> = (1..m).map(|k| (unions[k - 1], two_pow_neg(k))).collect();
    pairs.push((unions[m - 1], two_pow_neg(m - 1)));
    let distribution = SubsetDistribution::explicit(n, &pairs)?;
    let crm = ContentionMap::deterministic(n, unions.iter().copied(), |r| {
        let k = unions.iter().position(|u| *u == r).expect("chain member");
        bases[k]
    });
    Ok(DisjointBasesChain {
        matroid,
        bases,
        distribution,
        crm,
    })
}

/// Each singleton and the full set with probability `1/(n+1)` on a rank-one matroid; the
/// factor `2n/(n+1)` mostly survives subsampling.
pub fn subsampling_tightness(n: usize) -> Result<(Matroid, SubsetDistribution)> {
    let share = rational::ratio(1, n as i64 + 1);
    let mut pairs: Vec<(Subset, Rational)> = (0..n).map(|i| (Subset::singleton(i), share.clone())).collect();
    pairs.push((Subset::full(n), share));
    Ok((Matroid::uniform(n, 1), SubsetDistribution::explicit(n, &pairs)?))
}

pub fn triangle() -> Matroid {
    Matroid::graphic(3, &[(0, 1), (1, 2), (2, 0)]).expect("triangle")
}

pub fn k4() -> Matroid {
    Matroid::graphic(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).expect("K4")
}

/// Weighted matroids for the improving-elements checks: uniform of rank one and two, two
/// partition matroids, the triangle and `K4`, all with distinct positive weights.
pub fn improving_zoo() -> Vec<(String, WeightedMatroid)> {
    const WEIGHTS: [i64; 6] = [5, 3, 8, 1, 9, 2];
    let weighted = |m: Matroid| {
        let w = WEIGHTS[..m.n()].iter().map(|&v| int(v)).collect();
        WeightedMatroid::new(m, w).expect("zoo weights")
    };
    let mut zoo = Vec::new();
    for n in [2, 4, 6] {
        zoo.push((format!("uniform n={n} k=1"), weighted(Matroid::uniform(n, 1))));
    }
    for n in [3, 5] {
        zoo.push((format!("uniform n={n} k=2"), weighted(Matroid::uniform(n, 2))));
    }
    let p1 = Matroid::partition(5, &[vec![0, 1, 2], vec![3, 4]], &[1, 1]).expect("partition");
    let p2 = Matroid::partition(5, &[vec![0, 1, 2], vec![3, 4]], &[2, 1]).expect("partition");
    zoo.push(("partition 3+2 caps 1,1".into(), weighted(p1)));
    zoo.push(("partition 3+2 caps 2,1".into(), weighted(p2)));
    zoo.push(("triangle".into(), weighted(triangle())));
    zoo.push(("K4".into(), weighted(k4())));
    zoo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::offline::{alpha_star, verify_crm};
    use crate::rational::ratio;
    use crate::Factor;

    #[test]
    fn chain_masses() {
        let d = chain(3).unwrap();
        assert_eq!(d.probability(Subset::EMPTY), ratio(1, 2));
        assert_eq!(d.probability(prefix(2)), ratio(1, 8));
        assert_eq!(d.probability(prefix(3)), ratio(1, 8));
        assert_eq!(d.marginals(), vec![ratio(1, 2), ratio(1, 4), ratio(1, 8)]);
    }

    #[test]
    fn prefix_crm_is_two_competitive() {
        let v = verify_crm(&chain_matroid(4), &chain(4).unwrap(), &prefix_crm(4)).unwrap();
        let two = Some(Factor::Finite(int(2)));
        assert_eq!(v.ratios, vec![two.clone(), two.clone(), two, Some(Factor::Finite(int(1)))]);
    }

    #[test]
    fn half_base_is_one_uncontentious() {
        let a = alpha_star(&half_base_matroid(4, 2), &half_base(4, 2).unwrap()).unwrap();
        assert_eq!(a.alpha, Factor::Finite(int(1)));
    }

    #[test]
    fn disjoint_bases_chain_shape() {
        let c = disjoint_bases_chain(3).unwrap();
        assert!(c.bases.iter().all(|b| c.matroid.rank(*b) == 3 && b.len() == 3));
        assert_eq!(c.distribution.support().len(), 3);
        let v = verify_crm(&c.matroid, &c.distribution, &c.crm).unwrap();
        assert!(v.achieved_alpha.at_most(&int(2)));
    }

    #[test]
    fn tightness_factor() {
        let (m, d) = subsampling_tightness(6).unwrap();
        assert_eq!(alpha_star(&m, &d).unwrap().alpha, Factor::Finite(ratio(12, 7)));
    }

    #[test]
    fn zoo_is_small() {
        assert!(improving_zoo().iter().all(|(_, wm)| wm.n() <= 6));
    }
}
