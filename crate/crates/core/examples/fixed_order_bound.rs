// Against the chain, any online map that sees elements in increasing order is no better than
// `n`-competitive, although the chain itself is 2-uncontentious.

use uncontentious::gallery::{chain, chain_matroid};
use uncontentious::offline::alpha_star;
use uncontentious::online::{exact_selection, fixed_order_lower_bound, greedy_online, phi_w, Resolver};
use uncontentious::rational::int;
use uncontentious::Result;

pub fn run_example() -> Result<()> {
    for n in 2..=6 {
        let (m, d) = (chain_matroid(n), chain(n)?);
        let increasing: Vec<usize> = (0..n).collect();
        let decreasing: Vec<usize> = (0..n).rev().collect();
        let up = fixed_order_lower_bound(&m, &d, &increasing)?;
        let down = fixed_order_lower_bound(&m, &d, &decreasing)?;
        println!(
            "n={n}: alpha* = {}, best online alpha increasing = {}, decreasing = {}",
            alpha_star(&m, &d)?.alpha,
            up.alpha,
            down.alpha
        );
    }

    // greedy in random order picks the first active arrival
    let n = 5;
    let (m, d) = (chain_matroid(n), chain(n)?);
    let alg = greedy_online();
    let map = phi_w(&alg, vec![int(1); n])?;
    let y = exact_selection(&m, &d, &Resolver::Online(&map))?;
    for (k, yk) in y.iter().enumerate() {
        println!("  greedy selects element {k} with probability {yk}");
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
