// Mixtures, subsampling and minors never make a distribution harder to resolve.

use uncontentious::dist::SubsetDistribution;
use uncontentious::gallery::{chain, half_base, k4, subsampling_tightness};
use uncontentious::matroid::{Family, Matroid};
use uncontentious::offline::alpha_star;
use uncontentious::rational::ratio;
use uncontentious::{Result, Subset};

pub fn run_example() -> Result<()> {
    let m = Matroid::uniform(3, 1);
    let (a, b) = (chain(3)?, half_base(3, 1)?);
    let mix = SubsetDistribution::mixture(&[(a.clone(), ratio(2, 3)), (b.clone(), ratio(1, 3))])?;
    println!(
        "mixture: alpha* {} and {} combine to {}",
        alpha_star(&m, &a)?.alpha,
        alpha_star(&m, &b)?.alpha,
        alpha_star(&m, &mix)?.alpha
    );

    let (m6, d6) = subsampling_tightness(6)?;
    println!("subsampling instance n=6: alpha* = {}", alpha_star(&m6, &d6)?.alpha);
    for p in [ratio(9, 10), ratio(1, 2), ratio(1, 10)] {
        println!("  keep each element w.p. {p}: alpha* = {}", alpha_star(&m6, &d6.subsample(&p)?)?.alpha);
    }

    let host = k4();
    let minor = host.minor(Subset::singleton(5), Subset::singleton(0))?;
    if let Family::Minor { elements, .. } = minor.family() {
        let d = SubsetDistribution::product(&vec![ratio(3, 4); minor.n()])?;
        println!(
            "minor of K4: alpha* {} in the minor, {} in the host",
            alpha_star(&minor, &d)?.alpha,
            alpha_star(&host, &d.embed(elements, host.n())?)?.alpha
        );
    }

    let x = chain(4)?.marginals();
    let a4 = alpha_star(&Matroid::uniform(4, 1), &chain(4)?)?;
    if let Some(scale) = a4.alpha.finite() {
        let check = Matroid::uniform(4, 1).in_scaled_polytope(&x, scale)?;
        println!("chain n=4 marginals inside {scale}·P(M): {}", check.inside);
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
