use std::path::Path;

use num_traits::{One, Zero};
use serde_json::json;

use super::{Check, Report, Status};
use crate::descriptor::{self, DistributionSpec, MatroidSpec};
use crate::dist::{fact_check, improving_distribution, lemma_checks, LemmaCheck};
use crate::error::Result;
use crate::matroid::WeightedMatroid;
use crate::offline::{alpha_star, analyze};
use crate::rational::Rational;

/// `alpha` from descriptor files.
pub fn cmd_alpha(matroid: &Path, dist: &Path) -> Report {
    let loaded = descriptor::load::<MatroidSpec>(matroid)
        .and_then(|m| Ok((m, descriptor::load::<DistributionSpec>(dist)?)));
    match loaded {
        Ok(((m, m_raw), (d, d_raw))) => alpha_report(&m, &d, &[&m_raw, &d_raw]),
        Err(e) => {
            let mut report = Report::new("alpha", &[]);
            report.fail(&e);
            report
        }
    }
}

/// Exact `alpha*`, its witness, and the synthesized map when the LP fits under its cap.
pub fn alpha_report(m: &MatroidSpec, d: &DistributionSpec, inputs: &[&[u8]]) -> Report {
    let mut report = Report::new("alpha", inputs);
    if let Err(e) = fill_alpha(&mut report, m, d) {
        report.fail(&e);
    }
    report
}

fn fill_alpha(report: &mut Report, m: &MatroidSpec, d: &DistributionSpec) -> Result<()> {
    let m = m.build()?;
    let d = d.build(Some(&m))?;
    let analysis = analyze(&m, &d)?;
    report.line(format!("alpha_star: {}", analysis.alpha_star));
    report.line(format!("witness: {}", analysis.witness));
    if let Some(e) = analysis.offending_element {
        report.line(format!("offending element: {e}"));
    }
    if analysis.degenerate {
        report.line("degenerate: every marginal is zero");
    }
    match (&analysis.crm, &analysis.crm_skipped) {
        (Some(crm), _) => report.line(format!("crm: synthesized over {} support sets", crm.domain().count())),
        (None, Some(reason)) => {
            report.line(format!("crm: skipped ({reason})"));
            report.escalate(Status::ResourceCap);
        }
        (None, None) => report.line("crm: none (no finite factor)"),
    }
    let ratios: Vec<String> = analysis
        .per_element_ratios
        .iter()
        .map(|r| r.as_ref().map_or("-".to_string(), ToString::to_string))
        .collect();
    report.line(format!("per-element ratios: [{}]", ratios.join(", ")));
    let value = serde_json::to_value(&analysis).expect("report serializes");
    if let serde_json::Value::Object(fields) = value {
        report.body.extend(fields);
    }
    Ok(())
}

/// `improving` from a matroid file plus weights and `p`.
pub fn cmd_improving(matroid: &Path, weights: &[Rational], p: &Rational) -> Report {
    match descriptor::load::<MatroidSpec>(matroid) {
        Ok((m, raw)) => {
            let extra = format!("{weights:?}|{p}");
            improving_report(&m, weights, p, &[&raw, extra.as_bytes()])
        }
        Err(e) => {
            let mut report = Report::new("improving", &[]);
            report.fail(&e);
            report
        }
    }
}

/// Exact improving distribution, `alpha* <= 1/p`, the optimum-element facts and the three
/// exhaustive inequality checks.
pub fn improving_report(m: &MatroidSpec, weights: &[Rational], p: &Rational, inputs: &[&[u8]]) -> Report {
    let mut report = Report::new("improving", inputs);
    if let Err(e) = fill_improving(&mut report, m, weights, p) {
        report.fail(&e);
    }
    report
}

fn lemma_json(c: &LemmaCheck) -> serde_json::Value {
    json!({
        "name": c.name,
        "checked": c.checked,
        "min_slack": c.min_slack.to_string(),
        "worst_sample": c.worst_sample,
        "worst_set": c.worst_set,
        "holds": c.holds(),
    })
}

fn fill_improving(report: &mut Report, m: &MatroidSpec, weights: &[Rational], p: &Rational) -> Result<()> {
    let wm = WeightedMatroid::new(m.build()?, weights.to_vec())?;
    let d = improving_distribution(&wm, p)?;
    report.set("p", p.to_string());
    report.set("distribution", DistributionSpec::describe(&d));
    report.line(format!("support size: {}", d.support().len()));

    let a = alpha_star(wm.matroid(), &d)?;
    let bound = if p.is_zero() { None } else { Some(Rational::one() / p) };
    report.set("alpha_star", &a.alpha);
    report.set("witness", a.witness);
    report.line(format!("alpha_star: {} (witness {})", a.alpha, a.witness));
    if let Some(bound) = &bound {
        report.check(Check::new(
            format!("alpha_star ≤ {bound}"),
            a.alpha.at_most(bound),
            format!("alpha_star = {}", a.alpha),
        ));
    }

    let fact = fact_check(&wm, p)?;
    let target = Rational::one() - p;
    let marginals: Vec<String> = fact
        .optimum_marginals
        .iter()
        .map(|(i, x)| format!("{i}: {x}"))
        .collect();
    report.check(Check::new(
        format!("optimum elements improve with probability {target}"),
        fact.marginals_exact(p),
        marginals.join(", "),
    ));
    report.check(Check::new(
        format!("E[rank_w(R)] ≥ ({target})·rank_w"),
        fact.chain_holds(),
        format!(
            "E[w(R)] = {}, E[rank_w(R)] = {}, bound = {}",
            fact.expected_weight, fact.expected_weighted_rank, fact.bound
        ),
    ));
    report.set(
        "fact",
        json!({
            "optimum": fact.optimum,
            "optimum_marginals": fact.optimum_marginals.iter().map(|(i, x)| json!([i, x.to_string()])).collect::<Vec<_>>(),
            "expected_weight": fact.expected_weight.to_string(),
            "expected_weighted_rank": fact.expected_weighted_rank.to_string(),
            "bound": fact.bound.to_string(),
        }),
    );

    match lemma_checks(&wm, p) {
        Ok(lemmas) => {
            let all = [&lemmas.exchange, &lemmas.retention, &lemmas.sampling, &lemmas.combined];
            for c in all {
                report.check(Check::new(
                    c.name,
                    c.holds(),
                    format!("{} cases, min slack {}", c.checked, c.min_slack),
                ));
            }
            report.set("lemmas", all.iter().map(|c| lemma_json(c)).collect::<Vec<_>>());
        }
        Err(e) => {
            report.line(format!("lemma checks skipped: {e}"));
            report.escalate(Status::of_error(&e));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn chain2() -> (MatroidSpec, DistributionSpec) {
        let m = descriptor::from_json(r#"{"type":"uniform","n":2,"k":1}"#).unwrap();
        let d = descriptor::from_json(
            r#"{"type":"explicit","n":2,"support":[{"set":[],"p":"1/2"},{"set":[0],"p":"1/4"},{"set":[0,1],"p":"1/4"}]}"#,
        )
        .unwrap();
        (m, d)
    }

    #[test]
    fn chain_alpha_line() {
        let (m, d) = chain2();
        let r = alpha_report(&m, &d, &[]);
        assert!(r.lines.contains(&"alpha_star: 3/2".to_string()));
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.get("witness").unwrap(), &json!([0, 1]));
    }

    #[test]
    fn loop_gives_infinity() {
        let m = descriptor::from_json(r#"{"type":"graphic","vertices":1,"edges":[[0,0]]}"#).unwrap();
        let d = descriptor::from_json(r#"{"type":"product","x":["1/2"]}"#).unwrap();
        let r = alpha_report(&m, &d, &[]);
        assert!(r.lines.contains(&"alpha_star: inf".to_string()));
        assert!(r.lines.contains(&"offending element: 0".to_string()));
    }

    #[test]
    fn bad_distribution_is_an_input_error() {
        let (m, _) = chain2();
        let d = descriptor::from_json(r#"{"type":"product","x":["1/2"]}"#).unwrap();
        assert_eq!(alpha_report(&m, &d, &[]).status.exit_code(), 2);
    }

    #[test]
    fn improving_uniform_passes() {
        let m = descriptor::from_json(r#"{"type":"uniform","n":5,"k":1}"#).unwrap();
        let w: Vec<Rational> = [5, 4, 3, 2, 1].iter().map(|&v| int(v)).collect();
        let r = improving_report(&m, &w, &ratio(1, 2), &[]);
        assert_eq!(r.status, Status::Pass, "{:?}", r.lines);
        assert!(r.lines.iter().any(|l| l.starts_with("alpha_star ≤ 2: pass")));
    }
}
