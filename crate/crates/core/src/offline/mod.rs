//! Offline contention resolution: exact uncontentiousness factors, optimal maps, and checks.

mod adversary;
mod synthesis;

use std::collections::BTreeMap;
use std::ops::{AddAssign, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dist::SubsetDistribution;
use crate::error::{Error, Result};
use crate::matroid::{Matroid, RankCache, WeightedMatroid, EXHAUSTIVE_CAP};
use crate::rational::{serde_rational, Extended, Factor, Rational};
use crate::subset::Subset;

pub use adversary::{oblivious_adversary, AdversaryOutcome};
pub use synthesis::{synthesize_crm, synthesize_crm_colgen, Synthesis};

/// A randomized map from each support set `R` to a distribution over independent subsets of `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContentionMap {
    n: usize,
    choices: BTreeMap<Subset, Vec<(Subset, Rational)>>,
}

#[derive(Serialize, Deserialize)]
struct ChoiceDoc {
    set: Subset,
    #[serde(with = "serde_rational")]
    p: Rational,
}

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    #[serde(rename = "R")]
    r: Subset,
    choices: Vec<ChoiceDoc>,
}

#[derive(Serialize, Deserialize)]
struct MapDoc {
    n: usize,
    entries: Vec<EntryDoc>,
}

impl ContentionMap {
    pub fn new(n: usize) -> Self {
        ContentionMap {
            n,
            choices: BTreeMap::new(),
        }
    }

    /// A map that always returns `f(R)`.
    pub fn deterministic(n: usize, sets: impl IntoIterator<Item = Subset>, f: impl Fn(Subset) -> Subset) -> Self {
        let mut map = ContentionMap::new(n);
        for r in sets {
            map.choices.insert(r, vec![(f(r), Rational::one())]);
        }
        map
    }

    /// Sets the distribution used on `r`. Weights must be non-negative and sum to one;
    /// zero weights are dropped and repeated sets merged.
    pub fn insert(&mut self, r: Subset, distribution: Vec<(Subset, Rational)>) -> Result<()> {
        let total: Rational = distribution.iter().map(|(_, p)| p).sum();
        if distribution.iter().any(|(_, p)| p.is_negative()) || !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "choices on {r} must be non-negative and sum to 1 (sum is {total})"
            )));
        }
        let mut merged: BTreeMap<Subset, Rational> = BTreeMap::new();
        for (s, p) in distribution {
            if !p.is_zero() {
                *merged.entry(s).or_insert_with(Rational::zero) += p;
            }
        }
        self.choices.insert(r, merged.into_iter().collect());
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: Subset) -> Option<&[(Subset, Rational)]> {
        self.choices.get(&r).map(|v| v.as_slice())
    }

    pub fn domain(&self) -> impl Iterator<Item = Subset> + '_ {
        self.choices.keys().copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (Subset, &[(Subset, Rational)])> {
        self.choices.iter().map(|(r, c)| (*r, c.as_slice()))
    }

    /// `Pr[i in phi(r)]` for each element.
    pub fn inclusion(&self, r: Subset) -> Option<Vec<Rational>> {
        let choices = self.choices.get(&r)?;
        let mut y = vec![Rational::zero(); self.n];
        for (s, p) in choices {
            for i in s.iter() {
                y[i] += p;
            }
        }
        Some(y)
    }
}

impl Serialize for ContentionMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MapDoc {
            n: self.n,
            entries: self
                .choices
                .iter()
                .map(|(r, c)| EntryDoc {
                    r: *r,
                    choices: c
                        .iter()
                        .map(|(set, p)| ChoiceDoc {
                            set: *set,
                            p: p.clone(),
                        })
                        .collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ContentionMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = MapDoc::deserialize(d)?;
        let mut map = ContentionMap::new(doc.n);
        for entry in doc.entries {
            let choices = entry.choices.into_iter().map(|c| (c.set, c.p)).collect();
            map.insert(entry.r, choices).map_err(serde::de::Error::custom)?;
        }
        Ok(map)
    }
}

/// The exact uncontentiousness factor together with the subset that attains it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaStar {
    pub alpha: Factor,
    /// Smallest-bitmask maximizer of `E|R∩F| / E rank(R∩F)`, or `{i}` for an offending loop.
    pub witness: Subset,
    /// A loop with positive marginal, when the factor is infinite.
    pub offending_element: Option<usize>,
    /// All marginals are zero; the factor is reported as 1 by convention.
    pub degenerate: bool,
}

/// Probabilities scaled to integers over their least common denominator.
fn integer_masses(d: &SubsetDistribution) -> Vec<BigInt> {
    let lcm = d
        .support()
        .iter()
        .fold(BigInt::one(), |acc, (_, p)| acc.lcm(p.denom()));
    d.support()
        .iter()
        .map(|(_, p)| p.numer() * (&lcm / p.denom()))
        .collect()
}

/// Scans every `F` and returns the maximizing `(F, E|R∩F|, E rank(R∩F))` in scaled units.
fn scan<T>(masses: &[T], sets: &[Subset], n: usize, ranks: &mut RankCache) -> (Subset, T, T)
where
    T: Clone + Ord + Zero + From<u8> + AddAssign + Mul<Output = T>,
{
    let mut best = (Subset::EMPTY, T::zero(), T::zero());
    for f in Subset::all(n) {
        let mut num = T::zero();
        let mut den = T::zero();
        for (a, r) in masses.iter().zip(sets) {
            let rf = r.intersection(f);
            if rf.is_empty() {
                continue;
            }
            num += a.clone() * T::from(rf.len() as u8);
            den += a.clone() * T::from(ranks.rank(rf) as u8);
        }
        if den.is_zero() {
            continue;
        }
        // num/den > best.1/best.2, with best.2 = 0 meaning nothing recorded yet
        if best.2.is_zero() || num.clone() * best.2.clone() > best.1.clone() * den.clone() {
            best = (f, num, den);
        }
    }
    best
}

/// `alpha* = max_F E|R∩F| / E rank(R∩F)`, by exhaustive enumeration of `F`.
pub fn alpha_star(m: &Matroid, d: &SubsetDistribution) -> Result<AlphaStar> {
    if m.n() != d.n() {
        return Err(Error::MismatchedGroundSets(m.n(), d.n()));
    }
    let n = m.n();
    if n > EXHAUSTIVE_CAP {
        return Err(Error::GroundSetTooLarge {
            n,
            cap: EXHAUSTIVE_CAP,
            operation: "alpha_star",
        });
    }
    let x = d.marginals();
    if let Some(i) = (0..n).find(|&i| x[i].is_positive() && m.is_loop(i)) {
        return Ok(AlphaStar {
            alpha: Extended::Infinite,
            witness: Subset::singleton(i),
            offending_element: Some(i),
            degenerate: false,
        });
    }
    if x.iter().all(|xi| xi.is_zero()) {
        return Ok(AlphaStar {
            alpha: Extended::Finite(Rational::one()),
            witness: Subset::EMPTY,
            offending_element: None,
            degenerate: true,
        });
    }
    let masses = integer_masses(d);
    let sets: Vec<Subset> = d.support().iter().map(|(s, _)| *s).collect();
    let mut ranks = RankCache::new(m);
    let total: BigInt = masses.iter().sum();
    let small: Option<Vec<i128>> = if total.bits() < 50 {
        masses.iter().map(|a| a.to_i128()).collect()
    } else {
        None
    };
    let (witness, num, den) = match small {
        Some(small) => {
            let (f, num, den) = scan(&small, &sets, n, &mut ranks);
            (f, BigInt::from(num), BigInt::from(den))
        }
        None => scan(&masses, &sets, n, &mut ranks),
    };
    Ok(AlphaStar {
        alpha: Extended::Finite(Rational::new(num, den)),
        witness,
        offending_element: None,
        degenerate: false,
    })
}

/// Exact per-element selection ratios of a contention map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrmVerification {
    /// `Pr[i in phi(R)]`.
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub selection: Vec<Rational>,
    /// `Pr[i in R] / Pr[i in phi(R)]`; `None` when both are zero.
    pub ratios: Vec<Option<Factor>>,
    pub achieved_alpha: Factor,
}

/// Checks feasibility of `crm` on the support of `d` and computes its ratios.
pub fn verify_crm(m: &Matroid, d: &SubsetDistribution, crm: &ContentionMap) -> Result<CrmVerification> {
    if m.n() != d.n() {
        return Err(Error::MismatchedGroundSets(m.n(), d.n()));
    }
    if crm.n() != d.n() {
        return Err(Error::MismatchedGroundSets(crm.n(), d.n()));
    }
    let n = d.n();
    let mut selection = vec![Rational::zero(); n];
    for (r, pr) in d.support() {
        let choices = crm
            .get(*r)
            .ok_or_else(|| Error::MissingSupportSet(r.to_string()))?;
        for (s, q) in choices {
            if !s.is_subset_of(*r) {
                return Err(Error::InfeasibleMap(format!("{s} chosen on {r} is not a subset")));
            }
            if !m.is_independent(*s) {
                return Err(Error::InfeasibleMap(format!("{s} chosen on {r} is dependent")));
            }
            let mass = pr * q;
            for i in s.iter() {
                selection[i] += &mass;
            }
        }
    }
    Ok(ratios_from(d.marginals(), selection))
}

pub(crate) fn ratios_from(x: Vec<Rational>, selection: Vec<Rational>) -> CrmVerification {
    let ratios: Vec<Option<Factor>> = x
        .iter()
        .zip(&selection)
        .map(|(xi, yi)| Factor::quotient(xi, yi))
        .collect();
    let achieved_alpha = ratios
        .iter()
        .flatten()
        .max()
        .cloned()
        .unwrap_or(Extended::Finite(Rational::one()));
    CrmVerification {
        selection,
        ratios,
        achieved_alpha,
    }
}

/// Both sides of `E[rank_w(R)] >= E[w(R)] / alpha`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionB {
    #[serde(with = "serde_rational")]
    pub expected_weighted_rank: Rational,
    #[serde(with = "serde_rational")]
    pub expected_weight: Rational,
    #[serde(with = "serde_rational")]
    pub slack: Rational,
    pub holds: bool,
}

pub fn condition_b_check(
    m: &Matroid,
    d: &SubsetDistribution,
    w: &[Rational],
    alpha: &Rational,
) -> Result<ConditionB> {
    if m.n() != d.n() {
        return Err(Error::MismatchedGroundSets(m.n(), d.n()));
    }
    if !alpha.is_positive() {
        return Err(Error::InvalidProbability(format!("alpha = {alpha} must be positive")));
    }
    let wm = WeightedMatroid::new(m.clone(), w.to_vec())?;
    let expected_weighted_rank = d.expectation(|r| wm.weighted_rank(r));
    let expected_weight = d.expectation(|r| wm.total(r));
    let slack = &expected_weighted_rank - &expected_weight / alpha;
    Ok(ConditionB {
        holds: !slack.is_negative(),
        expected_weighted_rank,
        expected_weight,
        slack,
    })
}

/// Fewest independent sets covering `t`: `max ceil(|S| / rank(S))` over `S ⊆ t`.
///
/// Infinite when `t` holds a loop; zero for the empty set.
pub fn covering_number(m: &Matroid, t: Subset) -> Result<Extended<usize>> {
    m.check_subset(t)?;
    if t.len() > EXHAUSTIVE_CAP {
        return Err(Error::GroundSetTooLarge {
            n: t.len(),
            cap: EXHAUSTIVE_CAP,
            operation: "covering number",
        });
    }
    if t.iter().any(|i| m.is_loop(i)) {
        return Ok(Extended::Infinite);
    }
    let best = t
        .subsets()
        .filter(|s| !s.is_empty())
        .map(|s| s.len().div_ceil(m.rank(s)))
        .max()
        .unwrap_or(0);
    Ok(Extended::Finite(best))
}

/// Factor, witness and (when within the LP cap) an optimal map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UncontentiousnessReport {
    pub alpha_star: Factor,
    pub witness: Subset,
    pub offending_element: Option<usize>,
    pub degenerate: bool,
    pub crm: Option<ContentionMap>,
    pub per_element_ratios: Vec<Option<Factor>>,
    /// Why no map was synthesized.
    pub crm_skipped: Option<String>,
}

/// `alpha_star` plus a synthesized optimal map; a size cap on the LP only drops the map.
pub fn analyze(m: &Matroid, d: &SubsetDistribution) -> Result<UncontentiousnessReport> {
    let star = alpha_star(m, d)?;
    let (crm, per_element_ratios, crm_skipped) = match synthesize_crm(m, d) {
        Ok(s) => {
            let check = verify_crm(m, d, &s.crm)?;
            (Some(s.crm), check.ratios, None)
        }
        Err(e @ Error::CapExceeded(_)) => (None, Vec::new(), Some(e.to_string())),
        Err(e) => return Err(e),
    };
    Ok(UncontentiousnessReport {
        alpha_star: star.alpha,
        witness: star.witness,
        offending_element: star.offending_element,
        degenerate: star.degenerate,
        crm,
        per_element_ratios,
        crm_skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn set(items: &[usize]) -> Subset {
        items.iter().collect()
    }

    fn chain(n: usize) -> SubsetDistribution {
        let mut pairs: Vec<(Subset, Rational)> = (0..n)
            .map(|k| (Subset::full(k), ratio(1, 1 << (k + 1))))
            .collect();
        pairs.push((Subset::full(n), ratio(1, 1 << n)));
        SubsetDistribution::explicit(n, &pairs).unwrap()
    }

    /// Direct evaluation of the ratio for one `F`, straight from the definition.
    fn ratio_of(m: &Matroid, d: &SubsetDistribution, f: Subset) -> Option<Rational> {
        let num = d.expectation(|r| int(r.intersection(f).len() as i64));
        let den = d.expectation(|r| int(m.rank(r.intersection(f)) as i64));
        (!den.is_zero()).then(|| num / den)
    }

    #[test]
    fn point_on_independent_set() {
        let m = Matroid::uniform(4, 2);
        let d = SubsetDistribution::point(4, set(&[1, 3])).unwrap();
        assert_eq!(alpha_star(&m, &d).unwrap().alpha, Extended::Finite(int(1)));
    }

    #[test]
    fn two_element_chain() {
        let m = Matroid::uniform(2, 1);
        let star = alpha_star(&m, &chain(2)).unwrap();
        assert_eq!(star.alpha, Extended::Finite(ratio(3, 2)));
        assert_eq!(star.witness, set(&[0, 1]));
        let three = alpha_star(&Matroid::uniform(3, 1), &chain(3)).unwrap();
        assert_eq!(three.alpha, Extended::Finite(ratio(7, 4)));
    }

    #[test]
    fn loops_make_the_factor_infinite() {
        let m = Matroid::partition(2, &[vec![0]], &[1]).unwrap();
        assert!(m.is_loop(1));
        let d = SubsetDistribution::explicit(2, &[(set(&[1]), ratio(1, 2)), (set(&[0]), ratio(1, 2))]).unwrap();
        let star = alpha_star(&m, &d).unwrap();
        assert_eq!(star.alpha, Extended::Infinite);
        assert_eq!(star.offending_element, Some(1));
    }

    #[test]
    fn empty_support_is_flagged() {
        let d = SubsetDistribution::point(3, Subset::EMPTY).unwrap();
        let star = alpha_star(&Matroid::uniform(3, 1), &d).unwrap();
        assert!(star.degenerate);
        assert_eq!(star.alpha, Extended::Finite(int(1)));
    }

    #[test]
    fn size_cap() {
        let m = Matroid::free(21);
        let d = SubsetDistribution::point(21, Subset::EMPTY).unwrap();
        assert!(matches!(alpha_star(&m, &d), Err(Error::GroundSetTooLarge { .. })));
    }

    #[test]
    fn covering_numbers() {
        assert_eq!(covering_number(&Matroid::uniform(3, 1), Subset::full(3)).unwrap(), Extended::Finite(3));
        let triangle = Matroid::graphic(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(covering_number(&triangle, Subset::full(3)).unwrap(), Extended::Finite(2));
        assert_eq!(covering_number(&triangle, set(&[0, 1])).unwrap(), Extended::Finite(1));
        let with_loop = Matroid::graphic(2, &[(0, 1), (1, 1)]).unwrap();
        assert_eq!(covering_number(&with_loop, Subset::full(2)).unwrap(), Extended::Infinite);
    }

    #[test]
    fn condition_b_is_tight_at_the_witness() {
        let m = Matroid::uniform(3, 1);
        let d = chain(3);
        let star = alpha_star(&m, &d).unwrap();
        let alpha = star.alpha.finite().unwrap().clone();
        let w: Vec<Rational> = (0..3).map(|i| int(star.witness.contains(i) as i64)).collect();
        let check = condition_b_check(&m, &d, &w, &alpha).unwrap();
        assert!(check.holds);
        assert!(check.slack.is_zero());
        let zero = condition_b_check(&m, &d, &[int(0), int(0), int(0)], &int(1)).unwrap();
        assert!(zero.holds && zero.slack.is_zero());
    }

    #[test]
    fn verify_rejects_bad_maps() {
        let m = Matroid::uniform(2, 1);
        let d = chain(2);
        let partial = ContentionMap::deterministic(2, [Subset::EMPTY], |r| r);
        assert!(matches!(verify_crm(&m, &d, &partial), Err(Error::MissingSupportSet(_))));
        let greedy = ContentionMap::deterministic(2, Subset::all(2), |r| r);
        assert!(matches!(verify_crm(&m, &d, &greedy), Err(Error::InfeasibleMap(_))));
        let outside = ContentionMap::deterministic(2, Subset::all(2), |_| set(&[1]));
        assert!(matches!(verify_crm(&m, &d, &outside), Err(Error::InfeasibleMap(_))));
    }

    #[test]
    fn map_json_round_trip() {
        let mut crm = ContentionMap::new(3);
        crm.insert(set(&[0, 1]), vec![(set(&[0]), ratio(1, 3)), (set(&[1]), ratio(2, 3))])
            .unwrap();
        let text = serde_json::to_string(&crm).unwrap();
        assert!(text.contains("\"R\":[0,1]"));
        let back: ContentionMap = serde_json::from_str(&text).unwrap();
        assert_eq!(back, crm);
        assert!(crm.insert(Subset::EMPTY, vec![(Subset::EMPTY, ratio(1, 2))]).is_err());
    }

    proptest! {
        #[test]
        fn factor_matches_brute_force(
            k in 1usize..3,
            masses in prop::collection::vec((0u64..32, 1i64..5), 1..6),
        ) {
            let n = 5;
            let m = Matroid::uniform(n, k);
            let pairs: Vec<(Subset, Rational)> = masses
                .iter()
                .map(|&(b, w)| (Subset::from_bits(b), int(w)))
                .collect();
            let d = SubsetDistribution::explicit(n, &pairs).unwrap();
            let star = alpha_star(&m, &d).unwrap();
            let best = Subset::all(n).filter_map(|f| ratio_of(&m, &d, f)).max();
            match best {
                None => prop_assert!(star.degenerate),
                Some(best) => {
                    prop_assert_eq!(star.alpha.finite(), Some(&best));
                    prop_assert_eq!(ratio_of(&m, &d, star.witness), Some(best.clone()));
                    prop_assert!(best >= int(1));
                    // smallest bitmask among maximizers
                    let first = Subset::all(n).find(|&f| ratio_of(&m, &d, f) == Some(best.clone()));
                    prop_assert_eq!(first, Some(star.witness));
                }
            }
        }
    }
}
