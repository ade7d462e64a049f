//! Runs the acceptance criteria and prints one line per criterion.

use clo_core::suite::{run_criterion, CRITERIA};
use clo_core::Engine;

#[test]
fn acceptance_criteria() {
    let engine = Engine::default();
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let result = run_criterion(&engine, id);
        println!("{result}");
        if !result.pass {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
