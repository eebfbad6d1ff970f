use std::process::ExitCode;

use ptbec::acceptance::{Suite, CRITERIA};

fn main() -> ExitCode {
    let suite = Suite::new();
    let mut failed = 0;
    for (id, _) in CRITERIA {
        let outcome = suite.run(id);
        println!("{}", outcome.line());
        failed += usize::from(!outcome.passed);
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
