//! Coherent-state arithmetic for symmetric sets.
//!
//! A symmetric set holds the `n` coherent states `|α e^{2πik/n}⟩`,
//! `k = 0..n`. Their Gram matrix is circulant, so its eigenvalues are the
//! discrete Fourier transform of the first row. This module computes that
//! spectrum two ways:
//!
//! * [`spectrum_closed`] evaluates the finite `n`-term DFT of the overlaps
//!   `⟨α|α ω^l⟩ = exp(-α²(1 - ω^l))`;
//! * [`spectrum_series`] sums the Fock-basis series
//!   `λ_j = e^{-α²} n Σ_r α^{2(nr+j)} / (nr+j)!`, which keeps full relative
//!   precision for the tiny trailing eigenvalues at small amplitude.
//!
//! Eigenvalues are always reported in DFT index order `j = 0..n`, never
//! sorted, because the ordering statements downstream are about that index.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Eigenvalues in `[-NEGATIVE_CLAMP, 0)` are treated as round-off and clamped.
pub const NEGATIVE_CLAMP: f64 = 1e-10;
/// Allowed deviation of a spectrum's sum from `n`.
pub const TRACE_TOLERANCE: f64 = 1e-9;
/// Default relative cutoff for [`spectrum_series`].
pub const DEFAULT_SERIES_TOLERANCE: f64 = 1e-16;
/// Largest admissible `α²`; beyond this `e^{α²}` overflows an `f64`.
pub const MAX_AMPLITUDE_SQUARED: f64 = 700.0;

const IMAGINARY_RESIDUE_LIMIT: f64 = 1e-8;
const GRAM_HERMITIAN_TOLERANCE: f64 = 1e-12;
const GRAM_PSD_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoherentError {
    #[error("a symmetric set needs at least 2 states, got {0}")]
    TooFewStates(usize),
    #[error("amplitude must be finite and nonnegative, got {0}")]
    InvalidAmplitude(f64),
    #[error("amplitude {0} is too large to evaluate (|α|² > {MAX_AMPLITUDE_SQUARED})")]
    AmplitudeTooLarge(f64),
    #[error("eigenvalue {index} = {value:e} is below the PSD tolerance")]
    NegativeEigenvalue { index: usize, value: f64 },
    #[error("spectrum sums to {sum}, expected {expected}")]
    TraceMismatch { sum: f64, expected: f64 },
    #[error("spectrum contains a non-finite value at index {0}")]
    NonFinite(usize),
    #[error("eigenvalue {index} has imaginary residue {residue:e}")]
    ImaginaryResidueTooLarge { index: usize, residue: f64 },
    #[error("matrix has {got} entries, expected {n}x{n}")]
    BadShape { n: usize, got: usize },
    #[error("diagonal entry {0} is not 1")]
    DiagonalNotUnit(usize),
    #[error("entries ({0}, {1}) and ({1}, {0}) are not conjugate")]
    NotHermitian(usize, usize),
    #[error("matrix is not positive semi-definite")]
    NotPositiveSemidefinite,
    #[error("series tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
}

/// `e^{2πik/n}`, exact on the real and imaginary axes.
pub fn root_of_unity(k: usize, n: usize) -> Complex64 {
    let k = k % n;
    if (4 * k).is_multiple_of(n) {
        return match 4 * k / n {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

/// Inner product `⟨a|b⟩ = exp(-|a|²/2 - |b|²/2 + conj(a)·b)`.
pub fn overlap(a: Complex64, b: Complex64) -> Complex64 {
    (-0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a.conj() * b).exp()
}

/// The `n` coherent states `|amplitude · e^{2πik/n}⟩` with zero global phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricCoherentSet {
    n: usize,
    amplitude: f64,
}

impl SymmetricCoherentSet {
    pub fn new(n: usize, amplitude: f64) -> Result<Self, CoherentError> {
        if n < 2 {
            return Err(CoherentError::TooFewStates(n));
        }
        if !amplitude.is_finite() || amplitude < 0.0 {
            return Err(CoherentError::InvalidAmplitude(amplitude));
        }
        if amplitude * amplitude > MAX_AMPLITUDE_SQUARED {
            return Err(CoherentError::AmplitudeTooLarge(amplitude));
        }
        Ok(Self { n, amplitude })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Complex amplitude of the `k`-th state.
    pub fn member(&self, k: usize) -> Complex64 {
        root_of_unity(k, self.n) * self.amplitude
    }

    pub fn members(&self) -> Vec<Complex64> {
        (0..self.n).map(|k| self.member(k)).collect()
    }

    /// Same `n`, different amplitude.
    pub fn with_amplitude(&self, amplitude: f64) -> Result<Self, CoherentError> {
        Self::new(self.n, amplitude)
    }
}

/// Square matrix of pairwise overlaps, row-major.
///
/// Construction checks the unit diagonal, Hermiticity and positive
/// semi-definiteness (eigenvalues ≥ -1e-10, tested by a Cholesky
/// factorisation of `G + 1e-10·I`).
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

impl GramMatrix {
    pub fn from_entries(n: usize, entries: Vec<Complex64>) -> Result<Self, CoherentError> {
        if entries.len() != n * n || n == 0 {
            return Err(CoherentError::BadShape {
                n,
                got: entries.len(),
            });
        }
        for i in 0..n {
            if entries[i * n + i] != Complex64::new(1.0, 0.0) {
                return Err(CoherentError::DiagonalNotUnit(i));
            }
            for j in i + 1..n {
                if (entries[i * n + j] - entries[j * n + i].conj()).norm() > GRAM_HERMITIAN_TOLERANCE
                {
                    return Err(CoherentError::NotHermitian(i, j));
                }
            }
        }
        let gram = Self { n, entries };
        if !gram.is_positive_semidefinite(GRAM_PSD_TOLERANCE) {
            return Err(CoherentError::NotPositiveSemidefinite);
        }
        Ok(gram)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn first_row(&self) -> &[Complex64] {
        &self.entries[..self.n]
    }

    /// Largest `|G(i,j) - G(0, (j-i) mod n)|`.
    pub fn circulant_residue(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d = (self.entry(i, j) - self.entry(0, (j + n - i) % n)).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Cholesky factorisation of `G + shift·I`; succeeds iff the smallest
    /// eigenvalue of `G` exceeds `-shift`.
    pub fn is_positive_semidefinite(&self, shift: f64) -> bool {
        let n = self.n;
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = self.entry(j, j).re + shift;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d.is_nan() || d <= 0.0 {
                return false;
            }
            let d = d.sqrt();
            l[j * n + j] = Complex64::new(d, 0.0);
            for i in j + 1..n {
                let mut s = self.entry(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / d;
            }
        }
        true
    }
}

/// Gram matrix of a symmetric set. Entry `(i, j)` is `⟨a_i|a_j⟩`.
pub fn gram_matrix(set: &SymmetricCoherentSet) -> GramMatrix {
    let n = set.n();
    let first_row: Vec<Complex64> = (0..n)
        .map(|l| {
            if l == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                overlap(set.member(0), set.member(l))
            }
        })
        .collect();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(first_row[(j + n - i) % n]);
        }
    }
    GramMatrix { n, entries }
}

/// Eigenvalues of a circulant Gram matrix in DFT index order.
///
/// Always nonnegative and summing to `n` (within [`TRACE_TOLERANCE`]).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Validates and clamps round-off negatives to zero.
    pub fn new(mut values: Vec<f64>) -> Result<Self, CoherentError> {
        let n = values.len();
        for (index, v) in values.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(CoherentError::NonFinite(index));
            }
            if *v < -NEGATIVE_CLAMP {
                return Err(CoherentError::NegativeEigenvalue { index, value: *v });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - n as f64).abs() > TRACE_TOLERANCE {
            return Err(CoherentError::TraceMismatch {
                sum,
                expected: n as f64,
            });
        }
        Ok(Self { values })
    }

    /// `n·e_shift`: the spectrum of a leak whose states differ only by phase.
    pub fn point_mass(n: usize, shift: usize) -> Self {
        let mut values = vec![0.0; n];
        values[shift % n] = n as f64;
        Self { values }
    }

    /// All ones: the spectrum of an orthonormal set.
    pub fn uniform(n: usize) -> Self {
        Self {
            values: vec![1.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// If all the weight sits on one index, return it.
    pub fn point_mass_index(&self) -> Option<usize> {
        let mut support = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i);
        match (support.next(), support.next()) {
            (Some(i), None) => Some(i),
            _ => None,
        }
    }
}

impl std::ops::Index<usize> for Spectrum {
    type Output = f64;

    fn index(&self, j: usize) -> &f64 {
        &self.values[j]
    }
}

/// Spectrum from the Fock-basis series, one sub-series per residue class.
///
/// Each sub-series stops once its next term is at most
/// `terms_tolerance × partial sum`.
pub fn spectrum_series(
    set: &SymmetricCoherentSet,
    terms_tolerance: f64,
) -> Result<Spectrum, CoherentError> {
    if !(terms_tolerance > 0.0) {
        return Err(CoherentError::InvalidTolerance(terms_tolerance));
    }
    let n = set.n();
    let x = set.amplitude() * set.amplitude();
    if x == 0.0 {
        return Ok(Spectrum::point_mass(n, 0));
    }
    let prefactor = (-x).exp() * n as f64;
    let values = (0..n)
        .map(|j| prefactor * residue_class_sum(x, n, j, terms_tolerance))
        .collect();
    Spectrum::new(values)
}

/// `Σ_r x^{nr+j} / (nr+j)!` with the relative cutoff described above.
pub(crate) fn residue_class_sum(x: f64, n: usize, j: usize, tolerance: f64) -> f64 {
    // x^j / j!
    let mut term = 1.0;
    for k in 1..=j {
        term *= x / k as f64;
    }
    let mut sum = term;
    let mut k = j;
    loop {
        let mut next = term;
        for step in 1..=n {
            next *= x / (k + step) as f64;
        }
        k += n;
        if next <= tolerance * sum {
            break;
        }
        sum += next;
        term = next;
    }
    sum
}

/// Spectrum as the unnormalised DFT of the Gram matrix's first row.
pub fn spectrum_closed(set: &SymmetricCoherentSet) -> Result<Spectrum, CoherentError> {
    let n = set.n();
    let x = set.amplitude() * set.amplitude();
    let row: Vec<Complex64> = (0..n)
        .map(|l| (-(Complex64::new(1.0, 0.0) - root_of_unity(l, n)) * x).exp())
        .collect();
    let mut values = Vec::with_capacity(n);
    for j in 0..n {
        let lambda: Complex64 = (0..n)
            .map(|l| root_of_unity((n - (j * l) % n) % n, n) * row[l])
            .sum();
        if lambda.im.abs() > IMAGINARY_RESIDUE_LIMIT {
            return Err(CoherentError::ImaginaryResidueTooLarge {
                index: j,
                residue: lambda.im.abs(),
            });
        }
        values.push(lambda.re);
    }
    Spectrum::new(values)
}
