// The sample-then-resolve secretary procedure: observe a random sample, keep the elements that
// improve it, and resolve them with an offline contention map.

use uncontentious::dist::improving_distribution;
use uncontentious::gallery::k4;
use uncontentious::matroid::WeightedMatroid;
use uncontentious::offline::synthesize_crm;
use uncontentious::online::{blueprint_exact, blueprint_secretary, Resolver};
use uncontentious::rational::{int, ratio, to_f64};
use uncontentious::{rng, Result};

pub fn run_example() -> Result<()> {
    let wm = WeightedMatroid::new(k4(), [6, 1, 4, 3, 5, 2].into_iter().map(int).collect())?;
    let p = ratio(1, 2);
    let d = improving_distribution(&wm, &p)?;
    let synthesis = synthesize_crm(wm.matroid(), &d)?;
    let resolver = Resolver::Clairvoyant(&synthesis.crm);
    let exact = blueprint_exact(&wm, &p, &resolver)?;
    let optimum = wm.weighted_rank(wm.matroid().full());
    println!("max-weight spanning tree of K4: {optimum}");
    println!("offline map on the improving set: beta* = {}", synthesis.beta);
    println!("exact expected accepted weight: {exact} ≈ {:.4}", to_f64(&exact));

    let mut r = rng::seeded(5);
    for _ in 0..3 {
        let run = blueprint_secretary(&wm, &p, &resolver, &mut r)?;
        println!(
            "  sample {} improving {} accepted {} (weight {})",
            run.sample, run.improving, run.accepted, run.weight
        );
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
