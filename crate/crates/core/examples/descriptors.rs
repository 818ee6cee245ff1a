// Loading matroids, distributions and scenarios from JSON and producing reports.

use uncontentious::cli::{alpha_report, online_report, OnlineOverrides};
use uncontentious::descriptor::{from_json, DistributionSpec, MatroidSpec, Scenario};
use uncontentious::Result;

pub fn run_example() -> Result<()> {
    let m: MatroidSpec = from_json(r#"{"type":"partition","blocks":[[0,1],[2,3]],"capacities":[1,1]}"#)?;
    let d: DistributionSpec = from_json(
        r#"{"type":"mixture",
            "components":[{"type":"product","x":["1/2","1/2","1/2","1/2"]},
                          {"type":"explicit","n":4,"support":[{"set":[0,1,2,3],"p":"1"}]}],
            "weights":["3/4","1/4"]}"#,
    )?;
    let report = alpha_report(&m, &d, &[]);
    for line in &report.lines {
        println!("{line}");
    }

    let scenario: Scenario = from_json(
        r#"{"matroid":{"type":"uniform","n":3,"k":1},
            "distribution":{"type":"explicit","n":3,"support":[{"set":[],"p":"1/2"},{"set":[0],"p":"1/4"},{"set":[0,1],"p":"1/8"},{"set":[0,1,2],"p":"1/8"}]},
            "order":"fixed:[0,1,2]"}"#,
    )?;
    let report = online_report(&scenario, &OnlineOverrides::default(), &[]);
    println!("{}", report.to_json());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
