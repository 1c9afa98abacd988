//! Upper bound on amplification success as the gain grows.

use coherent_amp::transform::{small_amplitude_popt, upper_bound, AmplificationRequest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (n, alpha) = (3, 0.5);
    println!("n = {n}, α = {alpha}");
    println!("{:>6}  {:>12}  {:>12}", "gain", "p_up", "closed form");
    for step in 0..=10 {
        let gain = 1.0 + 0.1 * step as f64;
        let req = AmplificationRequest::from_gain(n, alpha, gain)?;
        let bound = upper_bound(&req)?;
        let closed = small_amplitude_popt(&req)
            .map(|p| format!("{p:.10}"))
            .unwrap_or_else(|_| "-".into());
        println!("{gain:>6.2}  {:>12.10}  {closed:>12}", bound.p_up);
    }
    Ok(())
}
