//! Circulant diagonalisation, circular convolution and grid checks of the
//! eigenvalue ordering properties of symmetric coherent-state sets.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::coherent::{
    residue_class_sum, root_of_unity, spectrum_series, CoherentError, GramMatrix, Spectrum,
    SymmetricCoherentSet, DEFAULT_SERIES_TOLERANCE, NEGATIVE_CLAMP, TRACE_TOLERANCE,
};

/// Off-diagonal residue of `U†GU` above which a matrix is not circulant.
pub const CIRCULANT_TOLERANCE: f64 = 1e-8;
/// Allowed positive second difference of `log f_j`.
pub const CONCAVITY_TOLERANCE: f64 = 1e-9;
/// Default spacing of amplitude grids.
pub const DEFAULT_GRID_STEP: f64 = 0.01;

const QUOTIENT_RELATIVE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrix is not circulant: off-diagonal residue {0:e}")]
    NotCirculant(f64),
    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("index j = {j} outside 1..={max}")]
    InvalidIndex { j: usize, max: usize },
    #[error(transparent)]
    Coherent(#[from] CoherentError),
}

/// The unitary DFT matrix, `U(p, q) = exp(-2πi·pq/n) / √n` (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryDft {
    n: usize,
    entries: Vec<Complex64>,
}

impl UnitaryDft {
    pub fn new(n: usize) -> Self {
        let scale = 1.0 / (n as f64).sqrt();
        let mut entries = Vec::with_capacity(n * n);
        for p in 0..n {
            for q in 0..n {
                entries.push(root_of_unity((n - (p * q) % n) % n, n) * scale);
            }
        }
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, p: usize, q: usize) -> Complex64 {
        self.entries[p * self.n + q]
    }

    /// Largest entry of `|U†U - I|`.
    pub fn unitarity_residue(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let dot: Complex64 = (0..n).map(|k| self.entry(k, i).conj() * self.entry(k, j)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    /// `U† M U` for a row-major `n×n` matrix `M`.
    pub fn conjugate(&self, m: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut mu = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                mu[i * n + j] = (0..n).map(|k| m[i * n + k] * self.entry(k, j)).sum();
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|k| self.entry(k, i).conj() * mu[k * n + j]).sum();
            }
        }
        out
    }
}

/// Diagonal of `U† G U`, i.e. the unnormalised DFT of the first row of a
/// circulant `G`, in DFT index order.
pub fn diagonalize_circulant(g: &GramMatrix) -> Result<Spectrum, SpectralError> {
    let n = g.n();
    let d = UnitaryDft::new(n).conjugate(g.entries());
    let mut residue = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                residue = residue.max(d[i * n + j].norm());
            }
        }
    }
    let imaginary = (0..n).map(|j| d[j * n + j].im.abs()).fold(0.0, f64::max);
    if residue > CIRCULANT_TOLERANCE || imaginary > CIRCULANT_TOLERANCE {
        return Err(SpectralError::NotCirculant(residue.max(imaginary)));
    }
    Ok(Spectrum::new((0..n).map(|j| d[j * n + j].re).collect())?)
}

/// `(u ∗ v)_i = (1/n) Σ_j u_j v_{(i - j) mod n}` on raw vectors.
pub fn convolve(u: &[f64], v: &[f64]) -> Result<Vec<f64>, SpectralError> {
    if u.len() != v.len() {
        return Err(SpectralError::LengthMismatch(u.len(), v.len()));
    }
    let n = u.len();
    let scale = 1.0 / n as f64;
    Ok((0..n)
        .map(|i| scale * (0..n).map(|j| u[j] * v[(n - j + i) % n]).sum::<f64>())
        .collect())
}

/// Circular convolution of two spectra; the result is again a spectrum.
pub fn circular_convolve(u: &Spectrum, v: &Spectrum) -> Result<Spectrum, SpectralError> {
    Ok(Spectrum::new(convolve(u.values(), v.values())?)?)
}

/// Nonnegative (up to round-off) and summing to the length.
pub fn is_valid_spectrum(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite() && *x >= -NEGATIVE_CLAMP)
        && (v.iter().sum::<f64>() - v.len() as f64).abs() <= TRACE_TOLERANCE
}

/// Where a checked inequality failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `λ_index < λ_{index+1}` (or equality where strictness was required).
    Ordering { amplitude: f64, index: usize },
    /// `λ_index(α)/λ_index(β) < λ_{n-1}(α)/λ_{n-1}(β)`.
    Quotient { alpha: f64, beta: f64, index: usize },
    /// Positive second difference of `log f_j` centred at `x`.
    Concavity { j: usize, x: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub holds: bool,
    pub witness: Option<Witness>,
    /// Smallest slack seen; negative when the property fails.
    pub margin: f64,
}

impl PropertyReport {
    /// The report of an empty check.
    pub fn vacuous() -> Self {
        Self {
            holds: true,
            witness: None,
            margin: f64::INFINITY,
        }
    }

    fn observe(slack: f64, passed: bool, witness: impl FnOnce() -> Witness) -> Self {
        Self {
            holds: passed,
            witness: if passed { None } else { Some(witness()) },
            margin: slack,
        }
    }

    /// Associative merge: minimum margin, first witness wins.
    pub fn merge(self, other: Self) -> Self {
        Self {
            holds: self.holds && other.holds,
            witness: self.witness.or(other.witness),
            margin: self.margin.min(other.margin),
        }
    }
}

/// `{step, 2·step, …}` up to and including `upper` (within `step·1e-9`).
pub fn amplitude_grid(step: f64, upper: f64) -> Vec<f64> {
    if !(step > 0.0) || !(upper >= step) {
        return Vec::new();
    }
    let count = (upper / step + 1e-9).floor() as usize;
    (1..=count).map(|k| k as f64 * step).collect()
}

/// Strictly interior points `{step, …} ∩ (0, 1)`.
pub fn open_unit_grid(step: f64) -> Vec<f64> {
    amplitude_grid(step, 1.0)
        .into_iter()
        .filter(|&x| x < 1.0 - step * 1e-6)
        .collect()
}

fn series(n: usize, amplitude: f64) -> Result<Spectrum, SpectralError> {
    let set = SymmetricCoherentSet::new(n, amplitude)?;
    Ok(spectrum_series(&set, DEFAULT_SERIES_TOLERANCE)?)
}

/// Checks that eigenvalues decrease with the DFT index at every amplitude:
/// strictly below amplitude 1, non-strictly at or above it.
///
/// Amplitudes above 1 are accepted so that counterexamples can be shown.
pub fn check_property1(n: usize, amplitude_grid: &[f64]) -> Result<PropertyReport, SpectralError> {
    if let Some(bad) = amplitude_grid.iter().find(|a| !(**a > 0.0)) {
        return Err(SpectralError::InvalidGrid(format!(
            "amplitude {bad} is not positive"
        )));
    }
    amplitude_grid
        .iter()
        .map(|&amplitude| {
            let s = series(n, amplitude)?;
            let strict = amplitude < 1.0;
            let mut report = PropertyReport::vacuous();
            for index in 0..n - 1 {
                let slack = s[index] - s[index + 1];
                let passed = if strict { slack > 0.0 } else { slack >= 0.0 };
                report = report.merge(PropertyReport::observe(slack, passed, || {
                    Witness::Ordering { amplitude, index }
                }));
            }
            Ok(report)
        })
        .try_fold(PropertyReport::vacuous(), |acc, r| r.map(|r| acc.merge(r)))
}

/// Checks `λ_j(α)/λ_j(β) ≥ λ_{n-1}(α)/λ_{n-1}(β)` for every pair.
///
/// Pairs must satisfy `0 < α < β`; pairs above 1 are accepted so that
/// counterexamples can be shown.
pub fn check_property2(n: usize, pair_grid: &[(f64, f64)]) -> Result<PropertyReport, SpectralError> {
    if let Some((a, b)) = pair_grid.iter().find(|(a, b)| !(*a > 0.0 && a < b)) {
        return Err(SpectralError::InvalidGrid(format!(
            "pair ({a}, {b}) does not satisfy 0 < α < β"
        )));
    }
    pair_grid
        .iter()
        .map(|&(alpha, beta)| {
            let sa = series(n, alpha)?;
            let sb = series(n, beta)?;
            let last = sa[n - 1] / sb[n - 1];
            let mut report = PropertyReport::vacuous();
            for index in 0..n - 1 {
                let slack = sa[index] / sb[index] - last;
                let passed = slack >= -QUOTIENT_RELATIVE_TOLERANCE * last;
                report = report.merge(PropertyReport::observe(slack, passed, || {
                    Witness::Quotient { alpha, beta, index }
                }));
            }
            Ok(report)
        })
        .try_fold(PropertyReport::vacuous(), |acc, r| r.map(|r| acc.merge(r)))
}

/// `f_j(x) = Σ_r x^{nr+j} / (nr+j)!`.
pub fn residue_class_exponential(n: usize, j: usize, x: f64) -> f64 {
    residue_class_sum(x, n, j, DEFAULT_SERIES_TOLERANCE)
}

/// Checks concavity of `log f_j` on a sorted grid in `(0, 1)` through
/// second differences. On a non-uniform grid the chord form
/// `2·(chord(x₁) - g(x₁))` is used, which reduces to `g₀ - 2g₁ + g₂`.
pub fn check_logconcavity(n: usize, j: usize, grid: &[f64]) -> Result<PropertyReport, SpectralError> {
    if j < 1 || j > n - 1 {
        return Err(SpectralError::InvalidIndex { j, max: n - 1 });
    }
    if let Some(bad) = grid.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
        return Err(SpectralError::InvalidGrid(format!("point {bad} outside (0, 1)")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SpectralError::InvalidGrid("grid must be strictly increasing".into()));
    }
    let logs: Vec<f64> = grid
        .iter()
        .map(|&x| residue_class_exponential(n, j, x).ln())
        .collect();
    Ok(grid
        .windows(3)
        .zip(logs.windows(3))
        .map(|(x, g)| {
            let chord = ((x[2] - x[1]) * g[0] + (x[1] - x[0]) * g[2]) / (x[2] - x[0]);
            let second_difference = 2.0 * (chord - g[1]);
            let x = x[1];
            PropertyReport::observe(
                -second_difference,
                second_difference <= CONCAVITY_TOLERANCE,
                || Witness::Concavity { j, x },
            )
        })
        .fold(PropertyReport::vacuous(), PropertyReport::merge))
}
