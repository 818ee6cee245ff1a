//! A distribution that defeats any fixed (prior-oblivious) map on a rank-one uniform matroid.

use num_traits::{One, Signed};
use serde::Serialize;

use super::{alpha_star, verify_crm, ContentionMap};
use crate::dist::SubsetDistribution;
use crate::error::{Error, Result};
use crate::matroid::{Family, Matroid};
use crate::rational::{int, serde_rational, Factor, Rational};
use crate::subset::Subset;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdversaryOutcome {
    /// The element least likely to be chosen from the full set.
    pub element: usize,
    #[serde(with = "serde_rational")]
    pub chosen_from_full: Rational,
    #[serde(skip)]
    pub distribution: SubsetDistribution,
    /// The map's ratio on `element` under the built distribution.
    pub element_ratio: Factor,
    pub achieved_alpha: Factor,
    /// Exact factor of the built distribution, at most `1 + epsilon`.
    pub alpha_star: Factor,
}

/// Puts mass `1/(n-1+eps)` on each singleton `{j}`, `j != i`, and `eps/(n-1+eps)` on the full
/// set, where `i` minimizes `Pr[i in phi([n])]`.
pub fn oblivious_adversary(
    m: &Matroid,
    phi: &ContentionMap,
    epsilon: &Rational,
) -> Result<AdversaryOutcome> {
    if !matches!(m.family(), Family::Uniform { k: 1 }) {
        return Err(Error::InvalidMatroid("the construction needs a rank-one uniform matroid".into()));
    }
    let n = m.n();
    if n < 2 {
        return Err(Error::InvalidMatroid(format!("need at least 2 elements, got {n}")));
    }
    if !epsilon.is_positive() {
        return Err(Error::InvalidProbability(format!("epsilon = {epsilon} must be positive")));
    }
    if phi.n() != n {
        return Err(Error::MismatchedGroundSets(phi.n(), n));
    }
    let full = Subset::full(n);
    let on_full = phi
        .inclusion(full)
        .ok_or_else(|| Error::MissingSupportSet(full.to_string()))?;
    let element = (0..n)
        .min_by(|&a, &b| on_full[a].cmp(&on_full[b]).then(a.cmp(&b)))
        .expect("n >= 2");
    let denom = int(n as i64 - 1) + epsilon;
    let mut pairs: Vec<(Subset, Rational)> = (0..n)
        .filter(|&j| j != element)
        .map(|j| (Subset::singleton(j), Rational::one() / &denom))
        .collect();
    pairs.push((full, epsilon / &denom));
    let distribution = SubsetDistribution::explicit(n, &pairs)?;
    let check = verify_crm(m, &distribution, phi)?;
    let star = alpha_star(m, &distribution)?;
    Ok(AdversaryOutcome {
        element,
        chosen_from_full: on_full[element].clone(),
        element_ratio: check.ratios[element].clone().expect("element is active"),
        achieved_alpha: check.achieved_alpha,
        alpha_star: star.alpha,
        distribution,
    })
}
