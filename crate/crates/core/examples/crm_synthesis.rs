// Optimal contention resolution by linear programming: the direct LP over bases and the
// column-generation variant agree, and both match alpha* exactly.

use uncontentious::dist::SubsetDistribution;
use uncontentious::gallery::k4;
use uncontentious::offline::{alpha_star, synthesize_crm, synthesize_crm_colgen, verify_crm};
use uncontentious::rational::ratio;
use uncontentious::{Factor, Result};

pub fn run_example() -> Result<()> {
    let m = k4();
    let x = [ratio(1, 2), ratio(2, 3), ratio(1, 3), ratio(3, 4), ratio(1, 2), ratio(1, 4)];
    let d = SubsetDistribution::product(&x)?;
    let direct = synthesize_crm(&m, &d)?;
    let colgen = synthesize_crm_colgen(&m, &d)?;
    let a = alpha_star(&m, &d)?;
    println!("K4 product distribution over {} sets", d.support().len());
    println!("  alpha* = {} (witness {})", a.alpha, a.witness);
    println!("  direct LP: beta* = {}, {} columns", direct.beta, direct.columns);
    println!(
        "  column generation: beta* = {}, {} columns in {} rounds",
        colgen.beta, colgen.columns, colgen.rounds
    );
    let check = verify_crm(&m, &d, &direct.crm)?;
    let ratios: Vec<String> = check
        .ratios
        .iter()
        .map(|r| r.as_ref().map_or("-".to_string(), ToString::to_string))
        .collect();
    println!("  map ratios: [{}]", ratios.join(", "));
    assert_eq!(Factor::reciprocal_of(&direct.beta), a.alpha);
    assert_eq!(direct.beta, colgen.beta);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
