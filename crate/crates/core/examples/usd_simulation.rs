//! Monte-Carlo discrimination with beam splitters and threshold detectors.

use coherent_amp::optics_sim::{monte_carlo_sharded, Branching, Detector, Scenario};
use coherent_amp::transform::usd_success;
use coherent_amp::SymmetricCoherentSet;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trials = 200_000;
    let shards = 4;
    for alpha in [0.5, 1.0] {
        let r = monte_carlo_sharded(&Scenario::usd_two(alpha), trials, 1, shards)?;
        println!(
            "two states  α={alpha}: rate {:.4} ± {:.4}, expected {:.4}, wrong {}",
            r.empirical_rate, r.ci_halfwidth, r.expected_rate, r.wrong_count
        );
    }
    for n in [3, 4, 6] {
        let optimum = usd_success(&SymmetricCoherentSet::new(n, 1.0)?)?;
        for branching in [Branching::Full, Branching::OmitLast] {
            let s = Scenario::usd_multiport(n, 1.0).with_branching(branching);
            let r = monte_carlo_sharded(&s, trials, 2, shards)?;
            println!(
                "multiport   n={n} {branching:?}: rate {:.4} ± {:.4}, expected {:.4}, optimum {optimum:.4}",
                r.empirical_rate, r.ci_halfwidth, r.expected_rate
            );
        }
    }
    let lossy = Scenario::usd_two(1.0).with_detector(Detector::with_efficiency(0.6)?);
    let r = monte_carlo_sharded(&lossy, trials, 3, shards)?;
    println!("two states  η=0.6: rate {:.4}, expected {:.4}", r.empirical_rate, r.expected_rate);
    Ok(())
}
