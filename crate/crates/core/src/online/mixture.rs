//! A mixture of `phi_w` maps whose selection probabilities dominate `x / (alpha gamma)`.
//!
//! This is a zero-sum game: the mixer picks a weight vector `w`, the adversary an element
//! `i`, and the payoff is `g_i(w) = alpha gamma y_i(w) / x_i`. Against adversary weights
//! `lambda`, the vector `w = lambda / x` always scores at least `1` when the assumptions on
//! `alpha` and `gamma` hold, so the game value is at least `1`.
//!
//! Two solvers are provided. Column generation solves the restricted game exactly by LP and
//! adds the best response to the adversary's optimal `lambda` until the value reaches
//! `1 - eps`; since `y(w)` takes finitely many values it terminates. Multiplicative weights
//! runs Hedge on the adversary side and averages the best responses.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{exact_y, sampled_y, SecretaryAlgorithm, WeightMixture};
use crate::dist::SubsetDistribution;
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, Relation, Sense};
use crate::matroid::Matroid;
use crate::rational::{self, serde_rational, serde_rational_vec, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MixtureMethod {
    ColumnGeneration,
    MultiplicativeWeights,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evaluation {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixtureOptions {
    pub eps: Rational,
    pub max_iterations: usize,
    pub method: MixtureMethod,
    pub evaluation: Evaluation,
}

impl Default for MixtureOptions {
    fn default() -> Self {
        MixtureOptions {
            eps: Rational::new(1.into(), 1024.into()),
            max_iterations: 100_000,
            method: MixtureMethod::ColumnGeneration,
            evaluation: Evaluation::Exact,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Guarantee `min_i g_i` of the current mixture.
    #[serde(with = "serde_rational")]
    pub guarantee: Rational,
    /// Payoff of the newest best response against the current adversary weights.
    #[serde(with = "serde_rational")]
    pub response_value: Rational,
}

/// A weight vector `w` with `sum_i w_i x_i / (alpha gamma) > sum_i w_i y_i(w)`: the
/// weight-based guarantee fails for `w`, so `alpha` or `gamma` was set too low.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Separation {
    #[serde(with = "serde_rational_vec")]
    pub weights: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub target: Rational,
    #[serde(with = "serde_rational")]
    pub achieved: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MixtureOutcome {
    pub mixture: WeightMixture,
    /// `min_i alpha gamma y_i(W) / x_i` over elements with `x_i > 0`.
    #[serde(with = "serde_rational")]
    pub guarantee: Rational,
    /// `y(W)` under the evaluation mode used.
    #[serde(with = "serde_rational_vec")]
    pub selection: Vec<Rational>,
    pub converged: bool,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
    pub diagnostic: Option<Separation>,
}

impl MixtureOutcome {
    pub fn into_result(self) -> Result<MixtureOutcome> {
        if self.converged {
            return Ok(self);
        }
        Err(Error::NonConvergence(match &self.diagnostic {
            Some(sep) => format!(
                "guarantee {} after {} iterations; weights {:?} give {} < {}",
                self.guarantee,
                self.iterations,
                sep.weights.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                sep.achieved,
                sep.target
            ),
            None => format!("guarantee {} after {} iterations", self.guarantee, self.iterations),
        }))
    }
}

/// Computes `y(w)`, memoized on the comparison pattern when the algorithm allows it.
struct Oracle<'a> {
    m: &'a Matroid,
    d: &'a SubsetDistribution,
    alg: &'a dyn SecretaryAlgorithm,
    evaluation: Evaluation,
    cache: HashMap<(Vec<usize>, u64, u64), Vec<Rational>>,
}

impl Oracle<'_> {
    fn y(&mut self, w: &[Rational]) -> Result<Vec<Rational>> {
        if !self.alg.comparison_based() {
            return self.compute(w);
        }
        let mut rank: Vec<usize> = (0..w.len()).collect();
        rank.sort_by(|&a, &b| w[b].cmp(&w[a]).then(a.cmp(&b)));
        let zeros = w
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_zero())
            .fold(0u64, |acc, (i, _)| acc | 1 << i);
        // equal weights compare by index, so ties are part of the pattern too
        let ties = rank
            .windows(2)
            .filter(|p| w[p[0]] == w[p[1]])
            .fold(0u64, |acc, p| acc | 1 << p[0]);
        let key = (rank, zeros, ties);
        if let Some(y) = self.cache.get(&key) {
            return Ok(y.clone());
        }
        let y = self.compute(w)?;
        self.cache.insert(key, y.clone());
        Ok(y)
    }

    fn compute(&self, w: &[Rational]) -> Result<Vec<Rational>> {
        match self.evaluation {
            Evaluation::Exact => exact_y(self.m, self.d, self.alg, w),
            Evaluation::MonteCarlo { samples, seed } => sampled_y(self.m, self.d, self.alg, w, samples, seed),
        }
    }
}

struct Game {
    x: Vec<Rational>,
    scale: Rational,
    positive: Vec<usize>,
}

impl Game {
    fn payoff(&self, y: &[Rational]) -> Vec<Rational> {
        self.positive.iter().map(|&i| &self.scale * &y[i] / &self.x[i]).collect()
    }

    fn weights_for(&self, lambda: &[Rational]) -> Vec<Rational> {
        let mut w = vec![Rational::zero(); self.x.len()];
        for (k, &i) in self.positive.iter().enumerate() {
            w[i] = &lambda[k] / &self.x[i];
        }
        w
    }

    fn separation(&self, w: &[Rational], y: &[Rational]) -> Option<Separation> {
        let target: Rational = w.iter().zip(&self.x).map(|(a, b)| a * b).sum::<Rational>() / &self.scale;
        let achieved: Rational = w.iter().zip(y).map(|(a, b)| a * b).sum();
        (target > achieved).then(|| Separation {
            weights: w.to_vec(),
            target,
            achieved,
        })
    }
}

/// Finds a weight mixture with `alpha gamma y_i(W) >= (1 - eps) x_i` for every element.
///
/// Non-convergence is reported in the outcome (with a separating weight vector when one was
/// found) rather than as an error; see [`MixtureOutcome::into_result`].
pub fn solve_mixture(
    m: &Matroid,
    d: &SubsetDistribution,
    alg: &dyn SecretaryAlgorithm,
    gamma: &Rational,
    alpha: &Rational,
    options: &MixtureOptions,
) -> Result<MixtureOutcome> {
    if m.n() != d.n() {
        return Err(Error::MismatchedGroundSets(m.n(), d.n()));
    }
    if !gamma.is_positive() || !alpha.is_positive() {
        return Err(Error::InvalidProbability(format!("alpha = {alpha} and gamma = {gamma} must be positive")));
    }
    if options.eps.is_negative() || options.eps >= Rational::one() {
        return Err(Error::InvalidProbability(format!("eps = {} must lie in [0,1)", options.eps)));
    }
    let x = d.marginals();
    let positive: Vec<usize> = (0..x.len()).filter(|&i| x[i].is_positive()).collect();
    let game = Game {
        x,
        scale: alpha * gamma,
        positive,
    };
    let mut oracle = Oracle {
        m,
        d,
        alg,
        evaluation: options.evaluation,
        cache: HashMap::new(),
    };
    if game.positive.is_empty() {
        let w = vec![Rational::zero(); m.n()];
        let y = oracle.y(&w)?;
        return Ok(MixtureOutcome {
            mixture: WeightMixture::new(vec![(w, Rational::one())])?,
            guarantee: Rational::one(),
            selection: y,
            converged: true,
            iterations: 0,
            trace: Vec::new(),
            diagnostic: None,
        });
    }
    match options.method {
        MixtureMethod::ColumnGeneration => column_generation(&game, &mut oracle, options),
        MixtureMethod::MultiplicativeWeights => multiplicative_weights(&game, &mut oracle, options),
    }
}

fn finish(
    game: &Game,
    columns: Vec<(Vec<Rational>, Vec<Rational>)>,
    probabilities: Vec<Rational>,
    converged: bool,
    trace: Vec<IterationRecord>,
    diagnostic: Option<Separation>,
) -> Result<MixtureOutcome> {
    let n = game.x.len();
    let mut selection = vec![Rational::zero(); n];
    let mut components = Vec::new();
    for ((w, y), p) in columns.into_iter().zip(probabilities) {
        if p.is_zero() {
            continue;
        }
        for i in 0..n {
            selection[i] += &p * &y[i];
        }
        components.push((w, p));
    }
    let guarantee = game.payoff(&selection).into_iter().min().expect("some positive marginal");
    Ok(MixtureOutcome {
        mixture: WeightMixture::new(components)?,
        guarantee,
        selection,
        converged,
        iterations: trace.len(),
        trace,
        diagnostic,
    })
}

fn column_generation(game: &Game, oracle: &mut Oracle, options: &MixtureOptions) -> Result<MixtureOutcome> {
    let target = Rational::one() - &options.eps;
    let k = game.positive.len();
    let uniform = vec![Rational::new(1.into(), (k as i64).into()); k];
    let w0 = game.weights_for(&uniform);
    let y0 = oracle.y(&w0)?;
    let mut columns = vec![(w0, y0)];
    let mut trace = Vec::new();
    let mut diagnostic = None;
    for iteration in 1..=options.max_iterations {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let t = lp.add_variable(Rational::one());
        let mu: Vec<usize> = columns.iter().map(|_| lp.add_variable(Rational::zero())).collect();
        let payoffs: Vec<Vec<Rational>> = columns.iter().map(|(_, y)| game.payoff(y)).collect();
        let rows: Vec<usize> = (0..k)
            .map(|e| {
                let mut row: Vec<(usize, Rational)> = mu
                    .iter()
                    .zip(&payoffs)
                    .filter(|(_, g)| !g[e].is_zero())
                    .map(|(&v, g)| (v, g[e].clone()))
                    .collect();
                row.push((t, -Rational::one()));
                lp.add_constraint(row, Relation::Ge, Rational::zero())
            })
            .collect();
        lp.add_constraint(mu.iter().map(|&v| (v, Rational::one())).collect(), Relation::Eq, Rational::one());
        let sol = lp::solve(&lp)?;
        if !sol.is_optimal() {
            return Err(Error::NonConvergence(format!("restricted game LP ended {:?}", sol.status)));
        }
        let value = sol.values[t].clone();
        let probabilities: Vec<Rational> = mu.iter().map(|&v| sol.values[v].clone()).collect();
        if value >= target {
            trace.push(IterationRecord {
                iteration,
                guarantee: value.clone(),
                response_value: value,
            });
            return finish(game, columns, probabilities, true, trace, None);
        }
        let lambda: Vec<Rational> = rows.iter().map(|&r| -sol.duals[r].clone()).collect();
        let w = game.weights_for(&lambda);
        let y = oracle.y(&w)?;
        let response: Rational = game
            .payoff(&y)
            .iter()
            .zip(&lambda)
            .map(|(g, l)| g * l)
            .sum();
        trace.push(IterationRecord {
            iteration,
            guarantee: value.clone(),
            response_value: response.clone(),
        });
        if let Some(sep) = game.separation(&w, &y) {
            diagnostic = Some(sep);
        }
        if response <= value {
            // the restricted game is already the full game; its value is below target
            return finish(game, columns, probabilities, false, trace, diagnostic);
        }
        columns.push((w, y));
    }
    let n_cols = columns.len();
    let uniform_mix = vec![Rational::new(1.into(), (n_cols as i64).into()); n_cols];
    finish(game, columns, uniform_mix, false, trace, diagnostic)
}

fn multiplicative_weights(game: &Game, oracle: &mut Oracle, options: &MixtureOptions) -> Result<MixtureOutcome> {
    let k = game.positive.len();
    let eps = rational::to_f64(&options.eps).max(1e-9);
    let target = Rational::one() - &options.eps;
    let width = game
        .positive
        .iter()
        .map(|&i| rational::to_f64(&(&game.scale / &game.x[i])))
        .fold(1.0f64, f64::max);
    let eta = eps / (2.0 * width);
    let mut cumulative = vec![0.0f64; k];
    let mut totals = vec![Rational::zero(); k];
    let mut counts: Vec<(Vec<Rational>, Vec<Rational>, u64)> = Vec::new();
    let mut trace = Vec::new();
    let mut diagnostic = None;
    for iteration in 1..=options.max_iterations {
        let low = cumulative.iter().cloned().fold(f64::INFINITY, f64::min);
        let raw: Vec<f64> = cumulative.iter().map(|c| (-eta * (c - low)).exp()).collect();
        let sum: f64 = raw.iter().sum();
        let lambda: Vec<Rational> = raw.iter().map(|v| rational::from_f64(v / sum)).collect();
        let w = game.weights_for(&lambda);
        let y = oracle.y(&w)?;
        let g = game.payoff(&y);
        let response: Rational = g.iter().zip(&lambda).map(|(a, b)| a * b).sum();
        if let Some(sep) = game.separation(&w, &y) {
            diagnostic = Some(sep);
        }
        for e in 0..k {
            cumulative[e] += rational::to_f64(&g[e]);
            totals[e] += &g[e];
        }
        match counts.iter_mut().find(|(_, cy, _)| *cy == y) {
            Some(entry) => entry.2 += 1,
            None => counts.push((w, y, 1)),
        }
        let steps = Rational::from_integer((iteration as i64).into());
        let guarantee = totals.iter().min().expect("k > 0") / &steps;
        let done = guarantee >= target;
        trace.push(IterationRecord {
            iteration,
            guarantee,
            response_value: response,
        });
        if done {
            break;
        }
    }
    let steps = Rational::from_integer((trace.len() as i64).into());
    let probabilities = counts
        .iter()
        .map(|(_, _, c)| Rational::from_integer((*c as i64).into()) / &steps)
        .collect();
    let columns = counts.into_iter().map(|(w, y, _)| (w, y)).collect();
    let converged = trace.last().is_some_and(|r| r.guarantee >= target);
    finish(game, columns, probabilities, converged, trace, diagnostic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::offline::alpha_star;
    use crate::online::{dynkin, dynkin_gamma, exact_selection, MixtureCrm, Resolver};
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
    fn point_on_independent_set_needs_one_column() {
        let m = Matroid::uniform(3, 2);
        let d = SubsetDistribution::point(3, [0, 2].iter().collect()).unwrap();
        let out = solve_mixture(&m, &d, &crate::online::GreedyOnline, &int(1), &int(1), &MixtureOptions::default())
            .unwrap();
        assert!(out.converged);
        assert_eq!(out.mixture.len(), 1);
        assert_eq!(out.guarantee, int(1));
    }

    #[test]
    fn chain_of_three_reaches_the_target() {
        let m = Matroid::uniform(3, 1);
        let d = chain(3);
        let alg = dynkin(3);
        let gamma = dynkin_gamma(3).unwrap();
        let alpha = alpha_star(&m, &d).unwrap().alpha.finite().unwrap().clone();
        let out = solve_mixture(&m, &d, &alg, &gamma, &alpha, &MixtureOptions::default()).unwrap();
        assert!(out.converged, "{:?}", out.trace);
        assert!(out.guarantee >= Rational::one() - ratio(1, 1024));
        let crm = MixtureCrm::new(&alg, out.mixture.clone()).unwrap();
        let y = exact_selection(&m, &d, &Resolver::Online(&crm)).unwrap();
        assert_eq!(y, out.selection);
    }

    #[test]
    fn underestimated_alpha_yields_a_separation() {
        let m = Matroid::uniform(3, 1);
        let d = chain(3);
        let out = solve_mixture(&m, &d, &dynkin(3), &int(1), &int(1), &MixtureOptions::default()).unwrap();
        assert!(!out.converged);
        let sep = out.diagnostic.clone().expect("separating weights");
        assert!(sep.target > sep.achieved);
        assert!(matches!(out.into_result(), Err(Error::NonConvergence(_))));
    }

    #[test]
    fn multiplicative_weights_makes_progress() {
        let m = Matroid::uniform(3, 1);
        let d = chain(3);
        let options = MixtureOptions {
            eps: ratio(1, 4),
            max_iterations: 20_000,
            method: MixtureMethod::MultiplicativeWeights,
            evaluation: Evaluation::Exact,
        };
        let out = solve_mixture(&m, &d, &dynkin(3), &int(2), &ratio(7, 4), &options).unwrap();
        assert!(out.converged, "guarantee {}", out.guarantee);
        assert!(out.guarantee >= ratio(3, 4));
    }
}
