//! Eigenvalue ordering, quotient ordering and log-concavity checks.

use coherent_amp::spectral::{
    amplitude_grid, check_logconcavity, check_property1, check_property2, open_unit_grid,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = amplitude_grid(0.01, 1.0);
    for n in 2..=8 {
        let r = check_property1(n, &grid)?;
        println!("ordering      n={n}: holds={} margin={:.3e}", r.holds, r.margin);
    }
    // ordering breaks down for large amplitudes
    let r = check_property1(4, &[2.0])?;
    println!("ordering      n=4, α=2: holds={} witness={:?}", r.holds, r.witness);

    let unit = open_unit_grid(0.05);
    let pairs: Vec<(f64, f64)> = unit
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| unit[i + 1..].iter().map(move |&b| (a, b)))
        .collect();
    for n in [3, 5] {
        let r = check_property2(n, &pairs)?;
        println!("quotients     n={n}: holds={} over {} pairs", r.holds, pairs.len());
    }

    for n in 2..=4 {
        for j in 1..n {
            let r = check_logconcavity(n, j, &open_unit_grid(0.01))?;
            println!("log-concave   n={n}, j={j}: holds={} margin={:.3e}", r.holds, r.margin);
        }
    }
    Ok(())
}
