//! Full acceptance run at desk scale. Prints one block per criterion and
//! fails on any check outside the known shortfalls listed below.

use dirac_moire_cli::config::ExperimentConfig;
use dirac_moire_cli::suite::{run_suite, Status};
use std::io::Write;

/// Checks that fail for reasons recorded in the README: an unpublished
/// geometry at N=16, a gluing target inconsistent with W = −2, and the edge
/// orientation of the literal interface model.
const KNOWN_SHORTFALLS: [&str; 3] = [
    "N=16 x0=50",
    "W+^3 − W−^4",
    "selected crossings with dE/dξ1 > 0",
];

#[test]
fn acceptance_criteria() {
    faer::set_global_parallelism(faer::Par::Seq);
    let cfg = ExperimentConfig::default();
    let mut stdout = std::io::stdout();
    // written past the test harness capture so the report shows up in logs
    let reports = run_suite(&cfg, |r| {
        writeln!(stdout, "{}", r.line()).unwrap();
        stdout.flush().unwrap();
    });
    let mut unexpected = vec![];
    for r in &reports {
        if r.status == Status::Fail && r.checks.is_empty() {
            unexpected.push(format!("criterion {}: {}", r.id, r.note));
        }
        for c in r.checks.iter().filter(|c| !c.pass) {
            if !KNOWN_SHORTFALLS.contains(&c.name.as_str()) {
                unexpected.push(format!("criterion {}: {}", r.id, c.name));
            }
        }
    }
    let line = |id: u8| reports.iter().find(|r| r.id == id).map(|r| r.status);
    writeln!(
        stdout,
        "summary: {} pass, {} fail, {} skip",
        reports.iter().filter(|r| r.status == Status::Pass).count(),
        reports.iter().filter(|r| r.status == Status::Fail).count(),
        reports.iter().filter(|r| r.status == Status::Skip).count()
    )
    .unwrap();
    assert_eq!(line(10), Some(Status::Skip));
    assert!(unexpected.is_empty(), "unexpected failures: {unexpected:?}");
}
