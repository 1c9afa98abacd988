//! Leakless and leaky optima for one amplification task.
//!
//! `cargo run --example optimize_transform -- 4 2.0 2.3`

use coherent_amp::transform::{leakless_optimum, leaky_optimum, upper_bound, AmplificationRequest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(4), |s| s.parse())?;
    let alpha: f64 = args.next().map_or(Ok(2.0), |s| s.parse())?;
    let beta: f64 = args.next().map_or(Ok(2.3), |s| s.parse())?;

    let req = AmplificationRequest::new(n, alpha, beta)?;
    let source = req.source_spectrum()?;
    let target = req.target_spectrum()?;
    println!("upper bound  p = {:.9}", upper_bound(&req)?.p_up);
    for (name, plan) in [("leakless", leakless_optimum(&req)?), ("leaky", leaky_optimum(&req)?)] {
        println!("{name:<12} p = {:.9}  ({:?})", plan.p, plan.mode);
        println!("  leak       {:?}", plan.leak.values());
        if let Some(r) = &plan.redundancy {
            println!("  redundancy {:?}", r.values());
        }
        println!("  reconstruction error {:.1e}", plan.reconstruction_error(&source, &target)?);
    }
    Ok(())
}
