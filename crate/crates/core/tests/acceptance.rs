//! Acceptance suite: every headline value at its stated tolerance, one
//! printed line per criterion group. Run with `--nocapture` to see the
//! full table.

use ncx_core::reproduce::{run, SuiteOptions};

#[test]
fn acceptance() {
    let criteria = run("", &SuiteOptions::default());
    assert_eq!(criteria.len(), 8, "all eight criterion groups must run");
    let mut all_pass = true;
    for criterion in &criteria {
        let status = if criterion.pass() { "PASS" } else { "FAIL" };
        println!("[{status}] {}", criterion.name);
        for row in &criterion.rows {
            if !row.pass {
                println!(
                    "       FAILED {}: expected {:.9e}, computed {:.9e}, tolerance {:.1e}",
                    row.id, row.expected, row.computed, row.tolerance
                );
            }
        }
        all_pass &= criterion.pass();
    }
    assert!(all_pass, "acceptance criteria failed; see lines above");
}
