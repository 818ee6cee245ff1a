//! The best online contention map when the arrival order is fixed and known.
//!
//! A policy sees the activity of every earlier arrival and its own accepted set. Activity
//! prefixes with the same conditional law of the future are merged into one information
//! node: any policy can be replaced by its average over the merged prefixes without changing
//! what happens next. The LP is in sequence form: `u(node, A)` is the probability of
//! reaching `node` with accepted set `A`, and `s(node, A) <= Pr[active | node] u(node, A)`
//! is the probability of also accepting the current arrival there.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::dist::SubsetDistribution;
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, Relation, Sense};
use crate::matroid::Matroid;
use crate::rational::{serde_rational, serde_rational_vec, Factor, Rational};
use crate::subset::Subset;

/// Cap on the number of `(node, accepted set)` pairs.
pub const STATE_CAP: usize = 2_000;
const ORDER_CAP: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedOrderBound {
    /// Best achievable `min_i Pr[i in T] / x_i`.
    #[serde(with = "serde_rational")]
    pub beta: Rational,
    /// `1 / beta`: the smallest competitive ratio of any online map under this order.
    pub alpha: Factor,
    pub order: Vec<usize>,
    pub nodes: usize,
    pub states: usize,
    /// `Pr[i in T]` under an optimal policy.
    #[serde(with = "serde_rational_vec")]
    pub selection: Vec<Rational>,
}

/// Conditional law of the remaining activity pattern; bit `j` is the `j`-th next arrival.
type Law = Vec<(u64, Rational)>;

fn branch(law: &Law, bit: u64) -> Option<(Rational, Law)> {
    let mut mass = Rational::zero();
    let mut next: BTreeMap<u64, Rational> = BTreeMap::new();
    for (pattern, p) in law {
        if pattern & 1 == bit {
            mass += p;
            *next.entry(pattern >> 1).or_insert_with(Rational::zero) += p;
        }
    }
    if mass.is_zero() {
        return None;
    }
    let law = next.into_iter().map(|(k, p)| (k, p / &mass)).collect();
    Some((mass, law))
}

struct Node {
    /// Accepted sets reachable here, each with its `u` variable.
    states: BTreeMap<Subset, usize>,
    /// `(Pr[bit], child index at the next level)` for inactive and active arrivals.
    children: [Option<(Rational, usize)>; 2],
}

pub fn fixed_order_lower_bound(m: &Matroid, d: &SubsetDistribution, order: &[usize]) -> Result<FixedOrderBound> {
    let n = m.n();
    if d.n() != n {
        return Err(Error::MismatchedGroundSets(n, d.n()));
    }
    if n > ORDER_CAP {
        return Err(Error::GroundSetTooLarge {
            n,
            cap: ORDER_CAP,
            operation: "fixed-order policy LP",
        });
    }
    super::check_order(order, n)?;

    // information nodes, level by level
    let mut root: BTreeMap<u64, Rational> = BTreeMap::new();
    for (r, p) in d.support() {
        let pattern = order
            .iter()
            .enumerate()
            .filter(|(_, &e)| r.contains(e))
            .fold(0u64, |acc, (j, _)| acc | 1 << j);
        *root.entry(pattern).or_insert_with(Rational::zero) += p;
    }
    let mut laws: Vec<Vec<Law>> = vec![vec![root.into_iter().collect()]];
    let mut levels: Vec<Vec<Node>> = Vec::with_capacity(n);
    for t in 0..n {
        let mut next_laws: Vec<Law> = Vec::new();
        let mut nodes = Vec::new();
        for law in &laws[t] {
            let mut children = [None, None];
            for bit in 0..2u64 {
                if let Some((q, child)) = branch(law, bit) {
                    let idx = match next_laws.iter().position(|l| *l == child) {
                        Some(i) => i,
                        None => {
                            next_laws.push(child);
                            next_laws.len() - 1
                        }
                    };
                    children[bit as usize] = Some((q, idx));
                }
            }
            nodes.push(Node {
                states: BTreeMap::new(),
                children,
            });
        }
        levels.push(nodes);
        laws.push(next_laws);
    }

    // reachable accepted sets and their variables
    let mut lp = LinearProgram::new(Sense::Maximize);
    let beta = lp.add_variable(Rational::one());
    lp.set_upper(beta, Rational::one());
    let mut states = 0usize;
    let root_u = lp.add_variable(Rational::zero());
    levels[0][0].states.insert(Subset::EMPTY, root_u);
    lp.add_constraint(vec![(root_u, Rational::one())], Relation::Eq, Rational::one());
    // per level: inflow terms for each (child node, accepted set)
    let mut selection_terms: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    for t in 0..n {
        let e = order[t];
        let mut inflow: BTreeMap<(usize, Subset), Vec<(usize, Rational)>> = BTreeMap::new();
        for node in &levels[t] {
            states += node.states.len();
            if states > STATE_CAP {
                return Err(Error::CapExceeded(format!(
                    "more than {STATE_CAP} information states in the fixed-order LP"
                )));
            }
            for (&acc, &u) in &node.states {
                if let Some((q0, c0)) = &node.children[0] {
                    inflow.entry((*c0, acc)).or_default().push((u, q0.clone()));
                }
                if let Some((q1, c1)) = &node.children[1] {
                    inflow.entry((*c1, acc)).or_default().push((u, q1.clone()));
                    if m.is_independent(acc.with(e)) {
                        let s = lp.add_variable(Rational::zero());
                        lp.add_constraint(vec![(s, Rational::one()), (u, -q1.clone())], Relation::Le, Rational::zero());
                        selection_terms[e].push((s, Rational::one()));
                        inflow.entry((*c1, acc)).or_default().push((s, -Rational::one()));
                        inflow.entry((*c1, acc.with(e))).or_default().push((s, Rational::one()));
                    }
                }
            }
        }
        if t + 1 == n {
            break;
        }
        for ((child, acc), terms) in inflow {
            let u = lp.add_variable(Rational::zero());
            let mut row: Vec<(usize, Rational)> = terms.into_iter().map(|(v, a)| (v, -a)).collect();
            row.push((u, Rational::one()));
            lp.add_constraint(row, Relation::Eq, Rational::zero());
            levels[t + 1][child].states.insert(acc, u);
        }
    }
    let x = d.marginals();
    for (i, xi) in x.iter().enumerate() {
        if xi.is_positive() {
            let mut row = selection_terms[i].clone();
            row.push((beta, -xi.clone()));
            lp.add_constraint(row, Relation::Ge, Rational::zero());
        }
    }
    let sol = lp::solve(&lp)?;
    if !sol.is_optimal() {
        return Err(Error::InfeasibleMap(format!("fixed-order LP ended {:?}", sol.status)));
    }
    let selection = selection_terms
        .iter()
        .map(|terms| terms.iter().map(|(v, _)| sol.values[*v].clone()).sum())
        .collect();
    let b = sol.values[beta].clone();
    Ok(FixedOrderBound {
        alpha: Factor::reciprocal_of(&b),
        beta: b,
        order: order.to_vec(),
        nodes: levels.iter().map(|l| l.len()).sum(),
        states,
        selection,
    })
}
