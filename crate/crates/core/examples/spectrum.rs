//! Gram spectra of a symmetric coherent set, computed three ways.
//!
//! `cargo run --example spectrum -- 4 2.0`

use coherent_amp::coherent::{gram_matrix, spectrum_closed, spectrum_series, SymmetricCoherentSet, DEFAULT_SERIES_TOLERANCE};
use coherent_amp::spectral::diagonalize_circulant;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(4), |s| s.parse())?;
    let alpha: f64 = args.next().map_or(Ok(2.0), |s| s.parse())?;

    let set = SymmetricCoherentSet::new(n, alpha)?;
    let series = spectrum_series(&set, DEFAULT_SERIES_TOLERANCE)?;
    let closed = spectrum_closed(&set)?;
    let dft = diagonalize_circulant(&gram_matrix(&set))?;

    println!("n = {n}, α = {alpha}");
    println!("{:>3}  {:>18}  {:>18}  {:>18}", "j", "series", "closed", "dft");
    for j in 0..n {
        println!("{j:>3}  {:>18.15}  {:>18.15}  {:>18.15}", series[j], closed[j], dft[j]);
    }
    println!("optimal USD probability: {:.9}", series.min());
    Ok(())
}
