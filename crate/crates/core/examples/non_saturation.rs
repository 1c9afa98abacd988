//! Probes whether any leak with two or more nonzero weights reaches the
//! upper bound.

use coherent_amp::transform::{check_lemma1, AmplificationRequest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (n, alpha, beta) in [(4, 2.0, 2.3), (3, 0.5, 0.8), (7, 1.0, 1.4)] {
        let report = check_lemma1(&AmplificationRequest::new(n, alpha, beta)?, 2000, 1)?;
        println!(
            "n={n} α={alpha} β={beta}: unique min {}, best nontrivial p {:.6}, p_up {:.6}, saturates {}",
            report.min_unique, report.best_nontrivial_leaky_p, report.p_up, report.saturates
        );
    }
    Ok(())
}
