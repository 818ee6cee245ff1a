// Monte Carlo harness: random arrivals, the cutoff rule as an online map, Wilson intervals,
// and a cross-check against exact enumeration.

use uncontentious::gallery::half_base;
use uncontentious::matroid::Matroid;
use uncontentious::online::{dynkin, exact_selection, phi_w, simulate, Resolver};
use uncontentious::rational::{int, to_f64};
use uncontentious::Result;

pub fn run_example() -> Result<()> {
    let n = 5;
    let m = Matroid::uniform(n, 2);
    let d = half_base(n, 2)?;
    let alg = dynkin(n);
    let w: Vec<_> = (1..=n as i64).rev().map(int).collect();
    let map = phi_w(&alg, w)?;
    let exact = exact_selection(&m, &d, &Resolver::Online(&map))?;
    let sim = simulate(&m, &d, &Resolver::Online(&map), 50_000, 2024, 4)?;
    println!("element  exact    estimate  95% interval");
    for (i, (y, (lo, hi))) in exact.iter().zip(&sim.intervals).enumerate() {
        println!("{i:>7}  {:.5}  {:.5}   [{lo:.5}, {hi:.5}]", to_f64(y), sim.frequencies[i]);
    }
    println!("feasibility violations: {}", sim.violations);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
