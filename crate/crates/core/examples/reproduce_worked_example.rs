//! Recomputes the four-state worked example and checks it against the
//! published figures.

use coherent_amp::cli::reproduce;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let report = reproduce()?;
    for check in &report.checks {
        println!(
            "{:<11} {} max deviation {:.2e} (tolerance {:.0e})",
            check.name,
            if check.pass { "pass" } else { "FAIL" },
            check.max_deviation,
            check.tolerance
        );
    }
    println!(
        "nontrivial leaks saturate the bound: {} (best {:.6} vs {:.6})",
        report.lemma1.saturates, report.lemma1.best_nontrivial_leaky_p, report.lemma1.p_up
    );
    println!("all pass: {}", report.all_pass);
    Ok(())
}
