// No fixed map works for every nearly-uncontentious distribution: given any map on the
// rank-one uniform matroid, build a distribution it resolves only `n`-competitively.

use rand::Rng;
use uncontentious::matroid::Matroid;
use uncontentious::offline::{oblivious_adversary, ContentionMap};
use uncontentious::rational::{int, ratio, Rational};
use uncontentious::{rng, Result, Subset};

fn random_map(n: usize, seed: u64) -> Result<ContentionMap> {
    let mut r = rng::seeded(seed);
    let raw: Vec<i64> = (0..n).map(|_| r.random_range(1..10)).collect();
    let total: i64 = raw.iter().sum();
    let mut phi = ContentionMap::new(n);
    phi.insert(
        Subset::full(n),
        raw.iter().enumerate().map(|(i, &v)| (Subset::singleton(i), ratio(v, total))).collect(),
    )?;
    for i in 0..n {
        phi.insert(Subset::singleton(i), vec![(Subset::singleton(i), int(1))])?;
    }
    Ok(phi)
}

pub fn run_example() -> Result<()> {
    let eps: Rational = ratio(1, 10);
    for n in 3..=6 {
        let phi = random_map(n, n as u64)?;
        let out = oblivious_adversary(&Matroid::uniform(n, 1), &phi, &eps)?;
        println!(
            "n={n}: target element {}, map ratio {}, distribution alpha* {}",
            out.element, out.element_ratio, out.alpha_star
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
