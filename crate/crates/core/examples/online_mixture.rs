// An online contention resolution map built from a secretary algorithm: solve for a mixture
// of weight vectors, then check the resulting map by exact enumeration.

use num_traits::One;
use uncontentious::gallery::{chain, chain_matroid};
use uncontentious::offline::alpha_star;
use uncontentious::online::{dynkin, dynkin_gamma, exact_selection, solve_mixture, MixtureCrm, MixtureOptions, Resolver};
use uncontentious::rational::Rational;
use uncontentious::{Factor, Result};

pub fn run_example() -> Result<()> {
    let n = 3;
    let (m, d) = (chain_matroid(n), chain(n)?);
    let alg = dynkin(n);
    let gamma = dynkin_gamma(n)?;
    let alpha = alpha_star(&m, &d)?.alpha.finite().cloned().unwrap_or_else(Rational::one);
    let options = MixtureOptions::default();
    let outcome = solve_mixture(&m, &d, &alg, &gamma, &alpha, &options)?.into_result()?;
    println!("gamma = {gamma}, alpha* = {alpha}");
    for c in outcome.mixture.components() {
        let w: Vec<String> = c.w.iter().map(ToString::to_string).collect();
        println!("  w = [{}] with probability {}", w.join(", "), c.p);
    }
    println!("  guarantee min_i alpha gamma y_i / x_i = {}", outcome.guarantee);

    let crm = MixtureCrm::new(&alg, outcome.mixture)?;
    let y = exact_selection(&m, &d, &Resolver::Online(&crm))?;
    let x = d.marginals();
    let ratios: Vec<String> = x
        .iter()
        .zip(&y)
        .filter_map(|(a, b)| Factor::quotient(a, b))
        .map(|f| f.to_string())
        .collect();
    println!("  online map ratios x_i / y_i: [{}]", ratios.join(", "));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
