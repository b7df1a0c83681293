//! Acceptance gate: every criterion at its stated tolerance, one line each.
//! Exits non-zero if any criterion fails or the perturbed gate still passes.

use std::process::ExitCode;

use wallbounce::acceptance::{run_all, run_criterion, Hooks, CRITERIA};

fn main() -> ExitCode {
    let report = run_all(&Hooks::default());
    println!("{report}");

    let perturbed = Hooks {
        collision_beta_scale: 1.1,
    };
    let compression = CRITERIA.iter().find(|c| c.id == "1").expect("criterion 1");
    let outcomes = run_criterion(compression, &perturbed);
    let caught = !outcomes.is_empty() && outcomes.iter().all(|o| !o.pass);
    println!(
        "{} perturbed collision width (β × 1.1) rejected by criterion 1: {}/{} lines fail",
        if caught { "PASS" } else { "FAIL" },
        outcomes.iter().filter(|o| !o.pass).count(),
        outcomes.len()
    );

    if report.all_pass() && caught {
        ExitCode::SUCCESS
    } else {
        let mut failed: Vec<&str> = report.outcomes.iter().filter(|o| !o.pass).map(|o| o.id.as_str()).collect();
        failed.dedup();
        eprintln!("acceptance failed: criteria {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
