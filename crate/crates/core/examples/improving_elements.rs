// Elements that improve a random sample form a `1/p`-uncontentious set; checked exactly on a
// small zoo of weighted matroids.

use uncontentious::dist::{fact_check, improving_distribution, lemma_checks};
use uncontentious::gallery::improving_zoo;
use uncontentious::offline::alpha_star;
use uncontentious::rational::ratio;
use uncontentious::Result;

pub fn run_example() -> Result<()> {
    for p in [ratio(1, 4), ratio(1, 2), ratio(3, 4)] {
        println!("p = {p}");
        for (name, wm) in improving_zoo() {
            let d = improving_distribution(&wm, &p)?;
            let a = alpha_star(wm.matroid(), &d)?;
            let fact = fact_check(&wm, &p)?;
            let lemmas = lemma_checks(&wm, &p)?;
            println!(
                "  {name:<24} alpha* = {:<12} E[rank_w(R)] = {:<10} lemmas hold: {}",
                a.alpha.to_string(),
                fact.expected_weighted_rank.to_string(),
                lemmas.all_hold()
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
