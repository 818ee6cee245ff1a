// The exact simplex solver on its own: a small production-planning LP with a certified
// optimal primal and dual.

use uncontentious::lp::{solve, LinearProgram, Relation, Sense};
use uncontentious::rational::{int, ratio};
use uncontentious::Result;

pub fn run_example() -> Result<()> {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let chairs = lp.add_variable(int(3));
    let tables = lp.add_variable(int(5));
    lp.add_constraint(vec![(chairs, int(1))], Relation::Le, int(4));
    lp.add_constraint(vec![(tables, int(2))], Relation::Le, int(12));
    lp.add_constraint(vec![(chairs, int(3)), (tables, int(2))], Relation::Le, int(18));
    lp.set_upper(tables, ratio(11, 2));
    let sol = solve(&lp)?;
    sol.certify(&lp)?;
    println!("status {:?}, objective {}", sol.status, sol.objective);
    println!("chairs {}, tables {}", sol.values[chairs], sol.values[tables]);
    let duals: Vec<String> = sol.duals.iter().map(ToString::to_string).collect();
    println!("row duals [{}], {} pivots", duals.join(", "), sol.pivots);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
