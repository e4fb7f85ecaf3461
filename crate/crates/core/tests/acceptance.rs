//! Runs criteria 1–9 and prints one pass/fail line each.
//!
//! Criteria listed in `OPEN_CONFLICTS` fail for reasons recorded in the
//! decisions ledger; they are printed as FAIL and do not fail the target.
//! If one of them starts passing the target fails so the list is updated.
//! Set `COMBING_ACCEPTANCE_STRICT=1` to fail on every FAIL line.

use combing::cli::verify::{criterion, CRITERIA};

const OPEN_CONFLICTS: [usize; 2] = [6, 9];

fn main() {
    let strict = std::env::var("COMBING_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut passed = 0;
    let mut unexpected = Vec::new();
    for id in 1..=CRITERIA.len() {
        let o = criterion(id);
        let open = OPEN_CONFLICTS.contains(&id);
        let note = if !o.passed && open { "  [open conflict, see ledger]" } else { "" };
        println!("{}{note}", o.line());
        if o.passed {
            passed += 1;
        }
        if o.passed == open || (strict && !o.passed) {
            unexpected.push(id);
        }
    }
    println!("acceptance: {passed}/{} criteria pass", CRITERIA.len());
    if !unexpected.is_empty() {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
