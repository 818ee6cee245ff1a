//! Optimal contention maps by exact linear programming.
//!
//! The LP chooses, for every support set `R`, a distribution `q_R` over bases of `M|R` and
//! maximizes `beta` subject to `sum_R Pr[R] Pr[i in q_R] >= beta x_i`. Every independent
//! subset of `R` extends to a basis of `M|R`, so restricting to bases loses nothing.

use num_traits::{One, Signed, Zero};

use super::ContentionMap;
use crate::dist::SubsetDistribution;
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, Relation, Sense};
use crate::matroid::{Matroid, WeightedMatroid};
use crate::rational::Rational;
use crate::subset::Subset;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Synthesis {
    /// Optimal `beta = 1/alpha*`.
    pub beta: Rational,
    pub crm: ContentionMap,
    /// LP solves performed (one for the direct formulation).
    pub rounds: usize,
    pub columns: usize,
}

struct Master {
    lp: LinearProgram,
    beta: usize,
    /// `(support index, chosen set)` per column variable.
    columns: Vec<(usize, Subset)>,
    simplex_rows: Vec<usize>,
    element_rows: Vec<Option<usize>>,
}

impl Master {
    fn new(d: &SubsetDistribution) -> Self {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let beta = lp.add_variable(Rational::one());
        lp.set_upper(beta, Rational::one());
        let x = d.marginals();
        let mut element_rows = vec![None; d.n()];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_positive() {
                element_rows[i] =
                    Some(lp.add_constraint(vec![(beta, -xi.clone())], Relation::Ge, Rational::zero()));
            }
        }
        let simplex_rows = d
            .support()
            .iter()
            .map(|_| lp.add_constraint(Vec::new(), Relation::Eq, Rational::one()))
            .collect();
        Master {
            lp,
            beta,
            columns: Vec::new(),
            simplex_rows,
            element_rows,
        }
    }

    fn add_column(&mut self, d: &SubsetDistribution, idx: usize, set: Subset) -> Result<()> {
        let v = self.lp.add_variable(Rational::zero());
        let pr = &d.support()[idx].1;
        let mut coefficients = vec![(v, Rational::one())];
        let mut rows = vec![self.simplex_rows[idx]];
        for i in set.iter() {
            if let Some(row) = self.element_rows[i] {
                coefficients.push((v, pr.clone()));
                rows.push(row);
            }
        }
        // rows are stored per constraint, so splice the new column into each one
        for (row, (var, a)) in rows.into_iter().zip(coefficients) {
            self.lp.extend_row(row, var, a)?;
        }
        self.columns.push((idx, set));
        Ok(())
    }

    fn extract(&self, d: &SubsetDistribution, values: &[Rational]) -> Result<ContentionMap> {
        let mut per_set: Vec<Vec<(Subset, Rational)>> = vec![Vec::new(); d.support().len()];
        for (k, (idx, set)) in self.columns.iter().enumerate() {
            let q = &values[self.beta + 1 + k];
            if !q.is_zero() {
                per_set[*idx].push((*set, q.clone()));
            }
        }
        let mut crm = ContentionMap::new(d.n());
        for ((r, _), choices) in d.support().iter().zip(per_set) {
            crm.insert(*r, choices)?;
        }
        Ok(crm)
    }
}

fn check_inputs(m: &Matroid, d: &SubsetDistribution) -> Result<()> {
    if m.n() != d.n() {
        return Err(Error::MismatchedGroundSets(m.n(), d.n()));
    }
    Ok(())
}

/// Solves the decomposed LP over every basis of every `M|R`.
pub fn synthesize_crm(m: &Matroid, d: &SubsetDistribution) -> Result<Synthesis> {
    check_inputs(m, d)?;
    let mut total = 0usize;
    let mut bases = Vec::with_capacity(d.support().len());
    for (r, _) in d.support() {
        let b = m.bases_within(*r);
        total += b.len();
        if total > lp::SIZE_CAP {
            return Err(Error::CapExceeded(format!(
                "more than {} basis variables in the synthesis LP",
                lp::SIZE_CAP
            )));
        }
        bases.push(b);
    }
    let mut master = Master::new(d);
    for (idx, b) in bases.into_iter().enumerate() {
        for set in b {
            master.add_column(d, idx, set)?;
        }
    }
    let sol = lp::solve(&master.lp)?;
    if !sol.is_optimal() {
        return Err(Error::InfeasibleMap(format!("synthesis LP ended {:?}", sol.status)));
    }
    Ok(Synthesis {
        beta: sol.values[master.beta].clone(),
        crm: master.extract(d, &sol.values)?,
        rounds: 1,
        columns: master.columns.len(),
    })
}

/// Same optimum by column generation: the pricing problem for support set `R` is a
/// max-weight independent subset of `R` under weights `-dual_i`, solved greedily.
pub fn synthesize_crm_colgen(m: &Matroid, d: &SubsetDistribution) -> Result<Synthesis> {
    check_inputs(m, d)?;
    let mut master = Master::new(d);
    for (idx, (r, _)) in d.support().iter().enumerate() {
        let start = WeightedMatroid::unit(m.clone()).opt(*r);
        master.add_column(d, idx, start)?;
    }
    let mut rounds = 0;
    loop {
        rounds += 1;
        let sol = lp::solve(&master.lp)?;
        if !sol.is_optimal() {
            return Err(Error::InfeasibleMap(format!("restricted master ended {:?}", sol.status)));
        }
        let prices: Vec<Rational> = master
            .element_rows
            .iter()
            .map(|row| row.map_or_else(Rational::zero, |r| -sol.duals[r].clone()))
            .collect();
        let wm = WeightedMatroid::new(m.clone(), prices)?;
        let mut added = false;
        for (idx, (r, pr)) in d.support().iter().enumerate() {
            let best = wm.opt(*r);
            let gain = pr * wm.total(best);
            if gain > sol.duals[master.simplex_rows[idx]] {
                master.add_column(d, idx, best)?;
                added = true;
            }
        }
        if !added {
            return Ok(Synthesis {
                beta: sol.values[master.beta].clone(),
                crm: master.extract(d, &sol.values)?,
                rounds,
                columns: master.columns.len(),
            });
        }
        if master.columns.len() > lp::SIZE_CAP {
            return Err(Error::CapExceeded("column generation exceeded the LP size cap".into()));
        }
    }
}
