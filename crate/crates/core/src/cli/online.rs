use std::path::Path;

use num_traits::{One, Zero};

use super::{Check, Report};
use crate::descriptor::{self, AlgorithmSpec, ModeSpec, OrderSpec, Scenario, TaskSpec};
use crate::dist::{improving_distribution, SubsetDistribution};
use crate::error::{Error, Result};
use crate::matroid::{Family, Matroid, WeightedMatroid};
use crate::offline::{alpha_star, synthesize_crm};
use crate::online::{
    blueprint_exact, blueprint_secretary, dynkin, dynkin_gamma, exact_selection, fixed_order_lower_bound, greedy_online,
    phi_w, simulate, solve_mixture, weight_guarantees, Evaluation, MixtureCrm, MixtureOptions, Resolver,
    SecretaryAlgorithm,
};
use crate::rational::{self, Rational};
use crate::{rng, Factor};

/// Command-line values that take precedence over the scenario file.
#[derive(Clone, Debug, Default)]
pub struct OnlineOverrides {
    pub mode: Option<ModeSpec>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub order: Option<OrderSpec>,
    pub jobs: usize,
}

pub fn cmd_online(scenario: &Path, overrides: &OnlineOverrides) -> Report {
    match descriptor::load::<Scenario>(scenario) {
        Ok((s, raw)) => online_report(&s, overrides, &[&raw]),
        Err(e) => {
            let mut report = Report::new("online", &[]);
            report.fail(&e);
            report
        }
    }
}

pub fn online_report(scenario: &Scenario, overrides: &OnlineOverrides, inputs: &[&[u8]]) -> Report {
    let mut s = scenario.clone();
    if let Some(mode) = overrides.mode {
        s.mode = mode;
    }
    if let Some(trials) = overrides.trials {
        s.trials = trials;
    }
    if let Some(seed) = overrides.seed {
        s.seed = seed;
    }
    if let Some(order) = &overrides.order {
        s.order = order.clone();
    }
    let settings = serde_json::to_vec(&s).unwrap_or_default();
    let mut all_inputs = inputs.to_vec();
    all_inputs.push(&settings);
    let mut report = Report::new("online", &all_inputs);
    report.seed = Some(s.seed);
    if let Some(name) = &s.name {
        report.set("name", name);
    }
    report.set("task", s.task());
    report.set("mode", s.mode);
    if let Err(e) = run(&mut report, &s, overrides.jobs.max(1)) {
        report.fail(&e);
    }
    report
}

fn algorithm(spec: AlgorithmSpec, n: usize) -> Box<dyn SecretaryAlgorithm> {
    match spec {
        AlgorithmSpec::Dynkin => Box::new(dynkin(n)),
        AlgorithmSpec::Greedy => Box::new(greedy_online()),
    }
}

fn required<'a, T>(value: &'a Option<T>, what: &str) -> Result<&'a T> {
    value
        .as_ref()
        .ok_or_else(|| Error::Parse(format!("scenario needs \"{what}\" for this task")))
}

fn weights(s: &Scenario) -> Result<Vec<Rational>> {
    Ok(required(&s.weights, "weights")?.iter().map(|q| q.0.clone()).collect())
}

fn distribution(s: &Scenario, m: &Matroid) -> Result<SubsetDistribution> {
    required(&s.distribution, "distribution")?.build(Some(m))
}

/// Given `gamma`, or the exact value for the cutoff rule on a rank-one uniform matroid.
fn gamma(s: &Scenario, m: &Matroid) -> Result<Option<Rational>> {
    if let Some(g) = &s.gamma {
        return Ok(Some(g.0.clone()));
    }
    match (s.algorithm, m.family()) {
        (AlgorithmSpec::Dynkin, Family::Uniform { k: 1 }) => Ok(Some(dynkin_gamma(m.n())?)),
        _ => Ok(None),
    }
}

fn run(report: &mut Report, s: &Scenario, jobs: usize) -> Result<()> {
    if s.mode == ModeSpec::Mc && s.trials == 0 {
        return Err(Error::Parse("Monte Carlo mode needs at least one trial".into()));
    }
    let m = s.matroid.build()?;
    match s.task() {
        TaskSpec::LowerBound => lower_bound(report, s, &m),
        TaskSpec::Mixture => mixture(report, s, &m, jobs),
        TaskSpec::PhiW => single_weight(report, s, &m, jobs),
        TaskSpec::Blueprint => blueprint(report, s, &m),
    }
}

fn ratio_strings(x: &[Rational], y: &[Rational]) -> Vec<Option<String>> {
    x.iter()
        .zip(y)
        .map(|(xi, yi)| Factor::quotient(xi, yi).map(|f| f.to_string()))
        .collect()
}

fn achieved(x: &[Rational], y: &[Rational]) -> Factor {
    x.iter()
        .zip(y)
        .filter_map(|(xi, yi)| Factor::quotient(xi, yi))
        .max()
        .unwrap_or(Factor::Finite(Rational::one()))
}

fn lower_bound(report: &mut Report, s: &Scenario, m: &Matroid) -> Result<()> {
    let OrderSpec::Fixed(order) = &s.order else {
        return Err(Error::Parse("the lower_bound task needs order \"fixed:[...]\"".into()));
    };
    let d = distribution(s, m)?;
    let a = alpha_star(m, &d)?;
    let bound = fixed_order_lower_bound(m, &d, order)?;
    report.line(format!("best alpha = {}", bound.alpha));
    report.line(format!("alpha_star: {}", a.alpha));
    report.line(format!("policy states: {} over {} nodes", bound.states, bound.nodes));
    report.set("alpha_star", &a.alpha);
    report.set("witness", a.witness);
    report.set("per_element_ratios", ratio_strings(&d.marginals(), &bound.selection));
    report.set("lower_bound", &bound);
    Ok(())
}

fn mixture(report: &mut Report, s: &Scenario, m: &Matroid, jobs: usize) -> Result<()> {
    let d = distribution(s, m)?;
    let a = alpha_star(m, &d)?;
    report.set("alpha_star", &a.alpha);
    report.set("witness", a.witness);
    report.line(format!("alpha_star: {}", a.alpha));
    let Some(alpha) = a.alpha.finite().cloned() else {
        report.check(Check::new("finite alpha_star", false, format!("offending element {:?}", a.offending_element)));
        return Ok(());
    };
    let Some(gamma) = gamma(s, m)? else {
        return Err(Error::Parse("scenario needs \"gamma\" for this algorithm and matroid".into()));
    };
    report.set("gamma", gamma.to_string());
    report.line(format!("gamma: {gamma}"));

    let alg = algorithm(s.algorithm, m.n());
    let mut options = MixtureOptions::default();
    if let Some(eps) = &s.eps {
        options.eps = eps.0.clone();
    }
    if s.mode == ModeSpec::Mc {
        options.evaluation = Evaluation::MonteCarlo {
            samples: s.trials,
            seed: s.seed,
        };
    }
    let outcome = solve_mixture(m, &d, alg.as_ref(), &gamma, &alpha, &options)?;
    let x = d.marginals();
    let scale = &alpha * &gamma;
    let per_element: Vec<Option<String>> = x
        .iter()
        .zip(&outcome.selection)
        .map(|(xi, yi)| (!xi.is_zero()).then(|| (&scale * yi / xi).to_string()))
        .collect();
    let target = Rational::one() - &options.eps;
    report.line(format!("mixture: {} weight vectors after {} iterations", outcome.mixture.len(), outcome.iterations));
    report.check(Check::new(
        format!("alpha·gamma·y_i/x_i ≥ {target} for every active element"),
        outcome.converged,
        format!("guarantee {}", outcome.guarantee),
    ));
    report.set("mixture", &outcome.mixture);
    report.set("guarantee", outcome.guarantee.to_string());
    report.set("per_element_guarantees", per_element);
    report.set("iterations", outcome.iterations);
    report.set("converged", outcome.converged);
    if let Some(sep) = &outcome.diagnostic {
        report.line(format!("separating weights found: target {}, achieved {}", sep.target, sep.achieved));
        report.set("diagnostic", sep);
    }

    let crm = MixtureCrm::new(alg.as_ref(), outcome.mixture.clone())?;
    match s.mode {
        ModeSpec::Exact => {
            let y = exact_selection(m, &d, &Resolver::Online(&crm))?;
            let got = achieved(&x, &y);
            let bound = &gamma * &alpha / &target;
            report.check(Check::new(
                format!("online map achieves alpha ≤ gamma·alpha_star/({target})"),
                got.at_most(&bound),
                format!("achieved {got}, bound {bound}"),
            ));
            report.set("achieved_alpha", &got);
            report.set("per_element_ratios", ratio_strings(&x, &y));
        }
        ModeSpec::Mc => {
            let sim = simulate(m, &d, &Resolver::Online(&crm), s.trials, s.seed, jobs)?;
            report.line(format!("empirical ratios over {} trials: {:?}", s.trials, sim.ratios));
            report.set("per_element_ratios", &sim.ratios);
            report.set("empirical", &sim);
        }
    }
    Ok(())
}

fn single_weight(report: &mut Report, s: &Scenario, m: &Matroid, jobs: usize) -> Result<()> {
    let d = distribution(s, m)?;
    let w = weights(s)?;
    let alg = algorithm(s.algorithm, m.n());
    let map = phi_w(alg.as_ref(), w.clone())?;
    let x = d.marginals();
    report.set("weights", w.iter().map(ToString::to_string).collect::<Vec<_>>());
    match s.mode {
        ModeSpec::Exact => {
            let y = exact_selection(m, &d, &Resolver::Online(&map))?;
            let g = weight_guarantees(m, &d, alg.as_ref(), &w)?;
            report.line(format!(
                "E[w(phi_w(R))] = {}, E[rank_w(R)] = {}, E[w(R)] = {}",
                g.selected_weight, g.expected_weighted_rank, g.expected_weight
            ));
            if let Some(gamma) = gamma(s, m)? {
                report.set("gamma", gamma.to_string());
                report.check(Check::new(
                    format!("gamma·E[w(phi_w(R))] ≥ E[rank_w(R)] with gamma = {gamma}"),
                    g.against_rank(&gamma),
                    "",
                ));
            }
            report.set("selection", y.iter().map(ToString::to_string).collect::<Vec<_>>());
            report.set("per_element_ratios", ratio_strings(&x, &y));
            report.set("selected_weight", g.selected_weight.to_string());
            report.set("expected_weighted_rank", g.expected_weighted_rank.to_string());
            report.set("expected_weight", g.expected_weight.to_string());
        }
        ModeSpec::Mc => {
            let sim = simulate(m, &d, &Resolver::Online(&map), s.trials, s.seed, jobs)?;
            report.line(format!("empirical ratios over {} trials: {:?}", s.trials, sim.ratios));
            report.set("per_element_ratios", &sim.ratios);
            report.set("empirical", &sim);
        }
    }
    Ok(())
}

/// The sample-then-resolve procedure with the optimal offline map for the improving set.
fn blueprint(report: &mut Report, s: &Scenario, m: &Matroid) -> Result<()> {
    let w = weights(s)?;
    let p = required(&s.p, "p")?.0.clone();
    let wm = WeightedMatroid::new(m.clone(), w)?;
    let d = improving_distribution(&wm, &p)?;
    let synthesis = synthesize_crm(m, &d)?;
    let crm_alpha = Factor::reciprocal_of(&synthesis.beta);
    let resolver = Resolver::Clairvoyant(&synthesis.crm);
    let optimum = wm.weighted_rank(m.full());
    report.set("p", p.to_string());
    report.set("crm_alpha", &crm_alpha);
    report.set("optimum", optimum.to_string());
    report.line(format!("offline map on improving set: alpha = {crm_alpha}"));
    let floor = match crm_alpha.finite() {
        Some(a) => (Rational::one() - &p) * &optimum / a,
        None => Rational::zero(),
    };
    report.set("guaranteed", floor.to_string());
    match s.mode {
        ModeSpec::Exact => {
            let value = blueprint_exact(&wm, &p, &resolver)?;
            report.line(format!("E[w(accepted)] = {value}, rank_w = {optimum}"));
            report.check(Check::new(
                "E[w(accepted)] ≥ (1-p)·rank_w/alpha",
                value >= floor,
                format!("{value} ≥ {floor}"),
            ));
            report.set("expected_weight", value.to_string());
        }
        ModeSpec::Mc => {
            let mut total = Rational::zero();
            for t in 0..s.trials {
                let mut r = rng::stream(s.seed, t);
                total += blueprint_secretary(&wm, &p, &resolver, &mut r)?.weight;
            }
            let mean = rational::to_f64(&total) / s.trials.max(1) as f64;
            report.line(format!(
                "mean accepted weight over {} trials: {mean:.4} (guaranteed {})",
                s.trials,
                rational::to_f64(&floor)
            ));
            report.set("empirical", serde_json::json!({"trials": s.trials, "mean_weight": mean}));
        }
    }
    Ok(())
}
