// Exact uncontentiousness factor of the chain distribution, with its witness set and an
// optimal contention resolution map.

use uncontentious::gallery::{chain, chain_matroid};
use uncontentious::offline::{analyze, verify_crm};
use uncontentious::Result;

pub fn run_example() -> Result<()> {
    for n in 2..=5 {
        let (m, d) = (chain_matroid(n), chain(n)?);
        let report = analyze(&m, &d)?;
        println!("chain n={n}: alpha* = {}, witness {}", report.alpha_star, report.witness);
        if let Some(crm) = &report.crm {
            let check = verify_crm(&m, &d, crm)?;
            println!("  synthesized map achieves {}", check.achieved_alpha);
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
