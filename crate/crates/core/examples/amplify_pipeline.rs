//! Discriminate-then-reprepare amplification, compared with the optimum.

use coherent_amp::optics_sim::{amplify_pipeline, monte_carlo, Detector, PipelineOutcome, Scenario};
use coherent_amp::transform::{leaky_optimum, AmplificationRequest};
use coherent_amp::SymmetricCoherentSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (n, alpha, gain) = (3, 1.0, 1.5);
    let set = SymmetricCoherentSet::new(n, alpha)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for actual in 0..n {
        match amplify_pipeline(&set, gain, actual, &Detector::ideal(), &mut rng)? {
            PipelineOutcome::Amplified { index, amplitude } => {
                println!("input {actual}: emitted |{}⟩ for state {index}", amplitude.value())
            }
            PipelineOutcome::Fail => println!("input {actual}: failure heralded"),
        }
    }
    let report = monte_carlo(&Scenario::amplify(n, alpha, gain), 100_000, 7)?;
    let optimum = leaky_optimum(&AmplificationRequest::from_gain(n, alpha, gain)?)?;
    println!(
        "pipeline success {:.4} (expected {:.4}); optimal transform {:.4}",
        report.empirical_rate, report.expected_rate, optimum.p
    );
    Ok(())
}
