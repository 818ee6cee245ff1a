use num_traits::{One, Zero};

use super::{Check, Report};
use crate::dist::SubsetDistribution;
use crate::error::{Error, Result};
use crate::gallery::{self, chain, chain_matroid, prefix_crm};
use crate::matroid::{Family, Matroid};
use crate::offline::{
    alpha_star, condition_b_check, covering_number, oblivious_adversary, synthesize_crm, verify_crm, ContentionMap,
};
use crate::online::{dynkin_gamma, fixed_order_lower_bound};
use crate::rational::{int, ratio, Rational};
use crate::subset::Subset;
use crate::{Extended, Factor};

type Group = (&'static str, fn() -> Result<Vec<Check>>);

fn finite(a: &Factor) -> Result<Rational> {
    a.finite()
        .cloned()
        .ok_or_else(|| Error::InvalidDistribution("unexpected infinite factor".into()))
}

fn chain_values() -> Result<Vec<Check>> {
    let a2 = alpha_star(&chain_matroid(2), &chain(2)?)?;
    let a3 = alpha_star(&chain_matroid(3), &chain(3)?)?;
    Ok(vec![
        Check::new(
            "chain n=2: alpha_star = 3/2, witness {0,1}",
            a2.alpha == Factor::Finite(ratio(3, 2)) && a2.witness == Subset::full(2),
            format!("alpha_star = {}, witness {}", a2.alpha, a2.witness),
        ),
        Check::new(
            "chain n=3: alpha_star = 7/4",
            a3.alpha == Factor::Finite(ratio(7, 4)),
            format!("alpha_star = {}", a3.alpha),
        ),
    ])
}

fn prefix_map() -> Result<Vec<Check>> {
    let mut bad = Vec::new();
    for n in 2..=10 {
        let v = verify_crm(&chain_matroid(n), &chain(n)?, &prefix_crm(n))?;
        let expected: Vec<Option<Factor>> = (0..n)
            .map(|i| Some(Factor::Finite(int(if i + 1 < n { 2 } else { 1 }))))
            .collect();
        if v.ratios != expected {
            bad.push(n);
        }
    }
    Ok(vec![Check::new(
        "chain n=2..10: prefix map ratios are 2,...,2,1",
        bad.is_empty(),
        if bad.is_empty() { String::new() } else { format!("mismatch at n = {bad:?}") },
    )])
}

fn uniform_choice() -> Result<Vec<Check>> {
    let n = 4;
    let (m, d) = (chain_matroid(n), chain(n)?);
    let v = verify_crm(&m, &d, &gallery::uniform_choice_crm(&m, &d)?)?;
    Ok(vec![Check::new(
        "chain n=4: uniform choice among active elements is worse than 2-competitive",
        !v.achieved_alpha.at_most(&int(2)),
        format!("achieved {}", v.achieved_alpha),
    )])
}

fn half_base() -> Result<Vec<Check>> {
    let (n, k) = (4, 2);
    let d = gallery::half_base(n, k)?;
    let a = alpha_star(&gallery::half_base_matroid(n, k), &d)?;
    let conditional = d.conditional_marginal(1, 0).unwrap_or_else(Rational::zero);
    let marginal = ratio(k as i64, 2 * n as i64);
    Ok(vec![
        Check::new(
            "half base k=2 n=4: alpha_star = 1",
            a.alpha == Factor::Finite(Rational::one()),
            format!("alpha_star = {}", a.alpha),
        ),
        Check::new(
            "half base k=2 n=4: positive correlation",
            conditional > marginal,
            format!("Pr[1 in R | 0 in R] = {conditional} > Pr[1 in R] = {marginal}"),
        ),
    ])
}

fn disjoint_bases() -> Result<Vec<Check>> {
    let c = gallery::disjoint_bases_chain(3)?;
    let a = alpha_star(&c.matroid, &c.distribution)?;
    let v = verify_crm(&c.matroid, &c.distribution, &c.crm)?;
    Ok(vec![
        Check::new(
            "disjoint-bases chain m=3: alpha_star ≤ 2",
            a.alpha.at_most(&int(2)),
            format!("alpha_star = {}", a.alpha),
        ),
        Check::new(
            "disjoint-bases chain m=3: last-base map is 2-competitive",
            v.achieved_alpha.at_most(&int(2)),
            format!("achieved {}", v.achieved_alpha),
        ),
    ])
}

fn subsampling() -> Result<Vec<Check>> {
    let (m, d) = gallery::subsampling_tightness(6)?;
    let before = alpha_star(&m, &d)?.alpha;
    let mut checks = vec![Check::new(
        "subsampling instance n=6: alpha_star = 12/7",
        before == Factor::Finite(ratio(12, 7)),
        format!("alpha_star = {before}"),
    )];
    for p in [ratio(1, 2), ratio(9, 10)] {
        let after = alpha_star(&m, &d.subsample(&p)?)?.alpha;
        checks.push(Check::new(
            format!("subsampling instance n=6, keep {p}: alpha_star does not grow"),
            after <= before,
            format!("before {before}, after {after}"),
        ));
    }
    Ok(checks)
}

fn polytope() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let cases: Vec<(&str, Matroid, SubsetDistribution)> = vec![
        ("chain n=4", chain_matroid(4), chain(4)?),
        ("half base k=2 n=4", gallery::half_base_matroid(4, 2), gallery::half_base(4, 2)?),
        ("triangle product 2/3", gallery::triangle(), SubsetDistribution::product(&vec![ratio(2, 3); 3])?),
    ];
    for (name, m, d) in cases {
        let a = finite(&alpha_star(&m, &d)?.alpha)?;
        let inside = m.in_scaled_polytope(&d.marginals(), &a)?.inside;
        checks.push(Check::new(
            format!("{name}: marginals lie in alpha_star·P(M)"),
            inside,
            format!("alpha_star = {a}"),
        ));
    }
    Ok(checks)
}

fn mixture() -> Result<Vec<Check>> {
    let m = Matroid::uniform(3, 1);
    let parts = [chain(3)?, gallery::half_base(3, 1)?, SubsetDistribution::product(&vec![ratio(1, 3); 3])?];
    let alphas: Vec<Factor> = parts.iter().map(|d| alpha_star(&m, d).map(|a| a.alpha)).collect::<Result<_>>()?;
    let weighted: Vec<(SubsetDistribution, Rational)> =
        parts.iter().cloned().zip([ratio(1, 2), ratio(1, 4), ratio(1, 4)]).collect();
    let mixed = alpha_star(&m, &SubsetDistribution::mixture(&weighted)?)?.alpha;
    let worst = alphas.iter().max().cloned().unwrap_or(Extended::Finite(Rational::one()));
    Ok(vec![Check::new(
        "mixture on U(3,1): alpha_star ≤ max component",
        mixed <= worst,
        format!("mixture {mixed}, components {alphas:?}"),
    )])
}

fn minor() -> Result<Vec<Check>> {
    let host = gallery::k4();
    let minor = host.minor(Subset::singleton(5), Subset::singleton(0))?;
    let Family::Minor { elements, .. } = minor.family() else {
        return Err(Error::InvalidMatroid("expected a minor".into()));
    };
    let d = SubsetDistribution::product(&vec![ratio(3, 4); minor.n()])?;
    let in_minor = alpha_star(&minor, &d)?.alpha;
    let in_host = alpha_star(&host, &d.embed(elements, host.n())?)?.alpha;
    Ok(vec![Check::new(
        "K4 / edge 0 \\ edge 5: host alpha_star ≤ minor alpha_star",
        in_host <= in_minor,
        format!("host {in_host}, minor {in_minor}"),
    )])
}

fn equivalence() -> Result<Vec<Check>> {
    let cases: Vec<(&str, Matroid, SubsetDistribution)> = vec![
        ("chain n=3", chain_matroid(3), chain(3)?),
        ("chain n=5", chain_matroid(5), chain(5)?),
        ("half base k=2 n=4", gallery::half_base_matroid(4, 2), gallery::half_base(4, 2)?),
        ("K4 product 1/2", gallery::k4(), SubsetDistribution::product(&vec![ratio(1, 2); 6])?),
    ];
    let mut checks = Vec::new();
    for (name, m, d) in cases {
        let a = alpha_star(&m, &d)?.alpha;
        let s = synthesize_crm(&m, &d)?;
        let v = verify_crm(&m, &d, &s.crm)?;
        let inverse = Factor::reciprocal_of(&s.beta);
        checks.push(Check::new(
            format!("{name}: 1/beta* = alpha_star and the map achieves it"),
            inverse == a && v.achieved_alpha == a,
            format!("alpha_star {a}, 1/beta* {inverse}, achieved {}", v.achieved_alpha),
        ));
    }
    Ok(checks)
}

fn condition_b() -> Result<Vec<Check>> {
    let (m, d) = (chain_matroid(3), chain(3)?);
    let a = alpha_star(&m, &d)?;
    let alpha = finite(&a.alpha)?;
    let w: Vec<Rational> = (0..3).map(|i| int(a.witness.contains(i) as i64)).collect();
    let tight = condition_b_check(&m, &d, &w, &alpha)?;
    let zero = condition_b_check(&m, &d, &[Rational::zero(), Rational::zero(), Rational::zero()], &alpha)?;
    Ok(vec![
        Check::new(
            "chain n=3: weighted-rank condition is tight at the witness",
            tight.holds && tight.slack.is_zero(),
            format!("slack {}", tight.slack),
        ),
        Check::new("chain n=3: zero weights give slack 0", zero.holds && zero.slack.is_zero(), ""),
    ])
}

fn covering() -> Result<Vec<Check>> {
    let tri = covering_number(&gallery::triangle(), Subset::full(3))?;
    let par = covering_number(&Matroid::uniform(3, 1), Subset::full(3))?;
    Ok(vec![
        Check::new("triangle: covered by 2 forests", tri == Extended::Finite(2), format!("{tri}")),
        Check::new("U(3,1): covered by 3 independent sets", par == Extended::Finite(3), format!("{par}")),
    ])
}

fn adversary() -> Result<Vec<Check>> {
    let n = 3;
    let m = Matroid::uniform(n, 1);
    let mut phi = ContentionMap::new(n);
    let third = ratio(1, 3);
    phi.insert(Subset::full(n), (0..n).map(|i| (Subset::singleton(i), third.clone())).collect())?;
    for i in 0..n {
        phi.insert(Subset::singleton(i), vec![(Subset::singleton(i), Rational::one())])?;
    }
    let eps = ratio(1, 2);
    let out = oblivious_adversary(&m, &phi, &eps)?;
    Ok(vec![
        Check::new(
            "oblivious map on U(3,1), eps=1/2: element ratio 3",
            out.element_ratio == Factor::Finite(int(3)),
            format!("element {} ratio {}", out.element, out.element_ratio),
        ),
        Check::new(
            "oblivious adversary distribution: alpha_star ≤ 1+eps",
            out.alpha_star.at_most(&(Rational::one() + &eps)),
            format!("alpha_star = {}", out.alpha_star),
        ),
    ])
}

fn fixed_order() -> Result<Vec<Check>> {
    let n = 4;
    let (m, d) = (chain_matroid(n), chain(n)?);
    let bound = fixed_order_lower_bound(&m, &d, &(0..n).collect::<Vec<_>>())?;
    let a = alpha_star(&m, &d)?.alpha;
    Ok(vec![
        Check::new(
            "chain n=4, increasing order: best alpha = 4",
            bound.alpha == Factor::Finite(int(n as i64)),
            format!("best alpha = {}", bound.alpha),
        ),
        Check::new("chain n=4: alpha_star ≤ 2", a.at_most(&int(2)), format!("alpha_star = {a}")),
    ])
}

fn secretary() -> Result<Vec<Check>> {
    let g3 = dynkin_gamma(3)?;
    Ok(vec![Check::new("cutoff rule n=3: gamma = 2", g3 == int(2), format!("gamma = {g3}"))])
}

const GROUPS: &[Group] = &[
    ("chain", chain_values),
    ("prefix map", prefix_map),
    ("uniform choice", uniform_choice),
    ("half base", half_base),
    ("disjoint bases", disjoint_bases),
    ("subsampling", subsampling),
    ("polytope", polytope),
    ("mixture", mixture),
    ("minor", minor),
    ("equivalence", equivalence),
    ("weighted rank condition", condition_b),
    ("covering", covering),
    ("oblivious adversary", adversary),
    ("fixed order", fixed_order),
    ("secretary", secretary),
];

fn run_group((name, f): &Group) -> Vec<Check> {
    f().unwrap_or_else(|e| vec![Check::new(*name, false, format!("error: {e}"))])
}

/// Every example and closure-property check, in a fixed order whatever `jobs` is.
pub fn suite_checks(jobs: usize) -> Vec<Check> {
    let jobs = jobs.clamp(1, GROUPS.len());
    let chunk = GROUPS.len().div_ceil(jobs);
    std::thread::scope(|scope| {
        let handles: Vec<_> = GROUPS
            .chunks(chunk)
            .map(|groups| scope.spawn(move || groups.iter().flat_map(run_group).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("check thread panicked"))
            .collect()
    })
}

pub fn cmd_examples(jobs: usize) -> Report {
    let mut report = Report::new("examples", &[]);
    for check in suite_checks(jobs) {
        report.check(check);
    }
    let passed = report.checks.iter().filter(|c| c.pass).count();
    report.line(format!("{passed}/{} checks passed", report.checks.len()));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::Status;

    #[test]
    fn suite_passes_and_is_order_stable() {
        let one = suite_checks(1);
        let many = suite_checks(4);
        assert_eq!(one, many);
        let failing: Vec<&Check> = one.iter().filter(|c| !c.pass).collect();
        assert!(failing.is_empty(), "{failing:?}");
        assert_eq!(cmd_examples(2).status, Status::Pass);
    }
}
