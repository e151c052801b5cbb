//! Theory and fixed-point files, series output and an append-only ledger.

use quiver_vertex::catalog;
use quiver_vertex::io::{self, Ledger};
use quiver_vertex::verify::check_branching;
use quiver_vertex::vertex::DescendantShift;

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let p = catalog::gr23_point();
    let path = dir.path().join("gr23.json");
    std::fs::write(
        &path,
        serde_json::to_string_pretty(&io::point_to_value(&p)).unwrap(),
    )
    .unwrap();
    println!("{}", std::fs::read_to_string(&path).unwrap());
    assert_eq!(io::load_point(&path).unwrap(), p);

    let ledger = Ledger::new(dir.path().join("ledger.jsonl"));
    let r = check_branching(&catalog::flag3_instance(), 3, &[1], DescendantShift::Inverse);
    ledger.append(&r).unwrap();
    for e in ledger.read().unwrap() {
        println!("{} {} {}", e.timestamp, e.version, e.report.summary());
    }
}
