//! Success-probability bounds and optimal transform plans for amplifying a
//! symmetric set of coherent states `|α e^{iθ_k}⟩ → |β e^{iθ_k}⟩`.
//!
//! A transform succeeding with probability `p` exists iff there are leak and
//! redundancy spectra `λ_L`, `λ_R` with
//!
//! ```text
//! λ_A = p·(λ_B ∗ λ_L) + (1 - p)·λ_R
//! ```
//!
//! Since `λ_R` only has to be a valid spectrum, this reduces to
//! `λ_A - p·(λ_B ∗ λ_L) ≥ 0` componentwise. Leakless transforms have
//! `λ_L = n·e_s`, which turns the convolution into a cyclic shift of `λ_B`.
//! The general (leaky) optimum is a linear program in `μ = p·λ_L`.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::coherent::{
    spectrum_series, CoherentError, Spectrum, SymmetricCoherentSet, DEFAULT_SERIES_TOLERANCE,
    MAX_AMPLITUDE_SQUARED,
};
use crate::lp::{LinearProgram, LpError};
use crate::spectral::{convolve, SpectralError};

/// Largest tolerated negative component of `λ_A - p·(λ_B ∗ λ_L)`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
/// Success probabilities at least `1 - DEGENERATE_P_GAP` carry no redundancy.
pub const DEGENERATE_P_GAP: f64 = 1e-12;
/// Relative gap under which two smallest eigenvalues count as tied.
pub const UNIQUENESS_GAP: f64 = 1e-9;
/// Slack below `p_up` that a nontrivial leak must clear to not saturate.
pub const SATURATION_SLACK: f64 = 1e-9;
/// Smallest share of the leak weight each support component must carry in
/// the support-restricted programs of [`check_lemma1`].
pub const MIN_LEAK_FRACTION: f64 = 1e-3;
/// Exhaustive support enumeration up to this `n`.
pub const EXHAUSTIVE_SUPPORT_LIMIT: usize = 6;
const RANDOM_SUPPORT_PATTERNS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("target set has zero unambiguous-discrimination probability")]
    DegenerateTarget,
    #[error("linear program failed: {0}")]
    SolverFailure(#[from] LpError),
    #[error("residual component {index} = {value:e} is negative")]
    InvalidResidual { index: usize, value: f64 },
    #[error("p = {0} is too close to 1 for a redundancy to be defined")]
    DegenerateP(f64),
    #[error("amplitudes ({alpha}, {beta}) are outside 0 < α < β < 1")]
    OutOfRegime { alpha: f64, beta: f64 },
    #[error("at least one random sample is required")]
    NoSamples,
    #[error(transparent)]
    Coherent(#[from] CoherentError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Amplify `n` symmetric states from amplitude `α` to `β = g·α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplificationRequest {
    n: usize,
    source_amplitude: f64,
    target_amplitude: f64,
}

impl AmplificationRequest {
    /// Requires `0 ≤ α ≤ β`, `β > 0`. `α = 0` is admitted and yields `p = 0`
    /// everywhere.
    pub fn new(n: usize, source_amplitude: f64, target_amplitude: f64) -> Result<Self, TransformError> {
        let (a, b) = (source_amplitude, target_amplitude);
        if n < 2 {
            return Err(TransformError::InvalidRequest(format!("n = {n} must be at least 2")));
        }
        if !(a.is_finite() && b.is_finite() && a >= 0.0 && b > 0.0) {
            return Err(TransformError::InvalidRequest(format!(
                "amplitudes must be finite with α ≥ 0 and β > 0, got ({a}, {b})"
            )));
        }
        if a > b {
            return Err(TransformError::InvalidRequest(format!(
                "gain below 1: α = {a} exceeds β = {b}"
            )));
        }
        if b * b > MAX_AMPLITUDE_SQUARED {
            return Err(CoherentError::AmplitudeTooLarge(b).into());
        }
        Ok(Self {
            n,
            source_amplitude: a,
            target_amplitude: b,
        })
    }

    pub fn from_gain(n: usize, source_amplitude: f64, gain: f64) -> Result<Self, TransformError> {
        if !(gain >= 1.0) {
            return Err(TransformError::InvalidRequest(format!("gain {gain} is below 1")));
        }
        Self::new(n, source_amplitude, gain * source_amplitude)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn source_amplitude(&self) -> f64 {
        self.source_amplitude
    }

    pub fn target_amplitude(&self) -> f64 {
        self.target_amplitude
    }

    /// `β/α`; infinite for a vacuum source.
    pub fn gain(&self) -> f64 {
        self.target_amplitude / self.source_amplitude
    }

    pub fn source_set(&self) -> SymmetricCoherentSet {
        SymmetricCoherentSet::new(self.n, self.source_amplitude).expect("validated in new")
    }

    pub fn target_set(&self) -> SymmetricCoherentSet {
        SymmetricCoherentSet::new(self.n, self.target_amplitude).expect("validated in new")
    }

    pub fn source_spectrum(&self) -> Result<Spectrum, TransformError> {
        Ok(spectrum_series(&self.source_set(), DEFAULT_SERIES_TOLERANCE)?)
    }

    pub fn target_spectrum(&self) -> Result<Spectrum, TransformError> {
        Ok(spectrum_series(&self.target_set(), DEFAULT_SERIES_TOLERANCE)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanMode {
    /// `λ_L = n·e_0`: the leak is one fixed state.
    LeaklessTrivial,
    /// `λ_L = n·e_s`, `s ≠ 0`: leak states differ only by symmetric phases.
    LeaklessShifted,
    Leaky,
}

impl PlanMode {
    pub fn is_leakless(self) -> bool {
        !matches!(self, PlanMode::Leaky)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformPlan {
    pub p: f64,
    pub leak: Spectrum,
    /// Absent when `p` is 1 (within [`DEGENERATE_P_GAP`]).
    pub redundancy: Option<Spectrum>,
    pub mode: PlanMode,
}

impl TransformPlan {
    fn build(source: &Spectrum, target: &Spectrum, p: f64, leak: Spectrum) -> Result<Self, TransformError> {
        let p = p.clamp(0.0, 1.0);
        let mode = match leak.point_mass_index() {
            Some(0) => PlanMode::LeaklessTrivial,
            Some(_) => PlanMode::LeaklessShifted,
            None => PlanMode::Leaky,
        };
        let redundancy = if p < 1.0 - DEGENERATE_P_GAP {
            Some(redundancy(source, target, p, &leak)?)
        } else {
            let residual = residual(source, target, p, &leak)?;
            check_residual(&residual)?;
            None
        };
        Ok(Self {
            p,
            leak,
            redundancy,
            mode,
        })
    }

    /// Largest componentwise deviation of `p·(λ_B ∗ λ_L) + (1-p)·λ_R` from `λ_A`.
    pub fn reconstruction_error(&self, source: &Spectrum, target: &Spectrum) -> Result<f64, TransformError> {
        let success = convolve(target.values(), self.leak.values())?;
        let n = source.n();
        let worst = (0..n)
            .map(|i| {
                let failure = self.redundancy.as_ref().map_or(0.0, |r| r[i]);
                (source[i] - self.p * success[i] - (1.0 - self.p) * failure).abs()
            })
            .fold(0.0, f64::max);
        Ok(worst)
    }
}

/// Optimal unambiguous-discrimination probability: the smallest eigenvalue.
pub fn usd_success(set: &SymmetricCoherentSet) -> Result<f64, TransformError> {
    Ok(spectrum_series(set, DEFAULT_SERIES_TOLERANCE)?.min())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperBound {
    /// `d_A / d_B`.
    pub p_up: f64,
    pub source_usd: f64,
    pub target_usd: f64,
    /// Set when `α = 0`; the bound is then 0.
    pub degenerate_source: bool,
}

/// `p_up = d_A / d_B`, the ratio of optimal USD probabilities.
pub fn upper_bound(req: &AmplificationRequest) -> Result<UpperBound, TransformError> {
    let source_usd = usd_success(&req.source_set())?;
    let target_usd = usd_success(&req.target_set())?;
    if req.source_amplitude() == 0.0 {
        return Ok(UpperBound {
            p_up: 0.0,
            source_usd,
            target_usd,
            degenerate_source: true,
        });
    }
    if target_usd <= 0.0 {
        return Err(TransformError::DegenerateTarget);
    }
    Ok(UpperBound {
        p_up: source_usd / target_usd,
        source_usd,
        target_usd,
        degenerate_source: false,
    })
}

/// `min_i λ_A^i / c_i`; components with `c_i = 0` impose no constraint.
fn max_feasible_p(source: &[f64], convolved: &[f64]) -> f64 {
    source
        .iter()
        .zip(convolved)
        .filter(|(_, c)| **c > 0.0)
        .map(|(a, c)| a / c)
        .fold(f64::INFINITY, f64::min)
}

/// Best leakless plan: try every cyclic shift of `λ_B`, smallest shift on ties.
pub fn leakless_optimum(req: &AmplificationRequest) -> Result<TransformPlan, TransformError> {
    let source = req.source_spectrum()?;
    let target = req.target_spectrum()?;
    let n = req.n();
    let mut best = (0usize, f64::NEG_INFINITY);
    for s in 0..n {
        let shifted: Vec<f64> = (0..n).map(|i| target[(i + n - s) % n]).collect();
        let p = max_feasible_p(source.values(), &shifted);
        if p > best.1 {
            best = (s, p);
        }
    }
    TransformPlan::build(&source, &target, best.1, Spectrum::point_mass(n, best.0))
}

/// Constraint rows `(λ_B ∗ μ)_i = Σ_k λ_B[(i-k) mod n]/n · μ_k`.
fn convolution_rows(target: &Spectrum, support: &[usize]) -> Vec<Vec<f64>> {
    let n = target.n();
    (0..n)
        .map(|i| support.iter().map(|&k| target[(i + n - k) % n] / n as f64).collect())
        .collect()
}

/// Solves `max Σμ/n  s.t.  λ_B ∗ μ ≤ λ_A, μ ≥ 0` with `μ` supported on
/// `support`; if `min_fraction > 0` every support component must carry at
/// least that share of `Σμ`. Returns `(p, μ)` with `μ` expanded to length `n`.
///
/// `p` is re-evaluated from the original spectra for the leak `μ/Σμ`, so a
/// constraint the tableau under-resolved (coefficients near 1e-15 for tiny
/// amplitudes) lowers `p` instead of producing an infeasible plan.
fn solve_leak_program(
    source: &Spectrum,
    target: &Spectrum,
    support: &[usize],
    min_fraction: f64,
) -> Result<(f64, Vec<f64>), TransformError> {
    let n = source.n();
    let k = support.len();
    let mut rows = convolution_rows(target, support);
    let mut bounds = source.values().to_vec();
    if min_fraction > 0.0 {
        for own in 0..k {
            rows.push(
                (0..k)
                    .map(|other| min_fraction - if other == own { 1.0 } else { 0.0 })
                    .collect(),
            );
            bounds.push(0.0);
        }
    }
    let lp = LinearProgram::new(vec![1.0 / n as f64; k], rows, bounds)?;
    let solution = lp.solve()?;
    let mut mu = vec![0.0; n];
    for (&idx, &v) in support.iter().zip(&solution.x) {
        mu[idx] = v;
    }
    let total: f64 = mu.iter().sum();
    if total <= 0.0 {
        return Ok((0.0, mu));
    }
    let leak: Vec<f64> = mu.iter().map(|v| v * n as f64 / total).collect();
    let exact = max_feasible_p(source.values(), &convolve(target.values(), &leak)?);
    Ok(((total / n as f64).min(exact).min(1.0), mu))
}

/// `λ_L = μ·n/Σμ`, with a point mass at 0 for `μ = 0`.
fn leak_from_mu(mu: &[f64]) -> Result<Spectrum, TransformError> {
    let n = mu.len();
    let total: f64 = mu.iter().sum();
    if total <= 0.0 {
        return Ok(Spectrum::point_mass(n, 0));
    }
    if let Some(idx) = mu.iter().position(|&v| v == total) {
        return Ok(Spectrum::point_mass(n, idx));
    }
    Ok(Spectrum::new(mu.iter().map(|v| v * n as f64 / total).collect())?)
}

/// Global optimum over all leak spectra via the `μ = p·λ_L` linear program.
pub fn leaky_optimum(req: &AmplificationRequest) -> Result<TransformPlan, TransformError> {
    let source = req.source_spectrum()?;
    let target = req.target_spectrum()?;
    let support: Vec<usize> = (0..req.n()).collect();
    let (p, mu) = solve_leak_program(&source, &target, &support, 0.0)?;
    let leakless = leakless_optimum(req)?;
    if leakless.p >= p {
        return Ok(leakless);
    }
    TransformPlan::build(&source, &target, p, leak_from_mu(&mu)?)
}

fn residual(source: &Spectrum, target: &Spectrum, p: f64, leak: &Spectrum) -> Result<Vec<f64>, TransformError> {
    let c = convolve(target.values(), leak.values())?;
    Ok(source.values().iter().zip(&c).map(|(a, c)| a - p * c).collect())
}

fn check_residual(residual: &[f64]) -> Result<(), TransformError> {
    match residual.iter().position(|&r| r < -RESIDUAL_TOLERANCE) {
        Some(index) => Err(TransformError::InvalidResidual {
            index,
            value: residual[index],
        }),
        None => Ok(()),
    }
}

/// `λ_R = (λ_A - p·(λ_B ∗ λ_L)) / (1 - p)`.
pub fn redundancy(source: &Spectrum, target: &Spectrum, p: f64, leak: &Spectrum) -> Result<Spectrum, TransformError> {
    if p >= 1.0 - DEGENERATE_P_GAP {
        return Err(TransformError::DegenerateP(p));
    }
    if p == 0.0 {
        return Ok(source.clone());
    }
    let residual = residual(source, target, p, leak)?;
    check_residual(&residual)?;
    // Σ residual = n(1-p) exactly; normalising by the computed sum keeps the
    // trace at n when 1-p is small enough to amplify round-off.
    let n = source.n() as f64;
    let clamped: Vec<f64> = residual.into_iter().map(|r| r.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    if (total - n * (1.0 - p)).abs() > RESIDUAL_TOLERANCE * n {
        return Err(TransformError::InvalidResidual {
            index: 0,
            value: total - n * (1.0 - p),
        });
    }
    if total <= 0.0 {
        return Err(TransformError::DegenerateP(p));
    }
    Ok(Spectrum::new(clamped.iter().map(|r| r * n / total).collect())?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma1Report {
    /// Smallest target eigenvalue is unique within relative gap [`UNIQUENESS_GAP`].
    pub min_unique: bool,
    pub best_nontrivial_leaky_p: f64,
    pub best_nontrivial_leak: Spectrum,
    pub p_up: f64,
    /// Some nontrivial leak reached `p_up - SATURATION_SLACK`.
    pub saturates: bool,
    pub support_patterns: usize,
    pub random_samples: usize,
}

fn smallest_is_unique(spectrum: &Spectrum) -> bool {
    let mut sorted = spectrum.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[1] - sorted[0] > UNIQUENESS_GAP * sorted[1]
}

fn support_patterns(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    if n <= EXHAUSTIVE_SUPPORT_LIMIT {
        return (0u32..1 << n)
            .filter(|mask| mask.count_ones() >= 2)
            .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
            .collect();
    }
    let mut patterns: Vec<Vec<usize>> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| vec![i, j]))
        .collect();
    for _ in 0..RANDOM_SUPPORT_PATTERNS {
        let size = rng.random_range(3..=n);
        let mut pattern = index::sample(rng, n, size).into_vec();
        pattern.sort_unstable();
        patterns.push(pattern);
    }
    patterns
}

/// Random leak with at least two nonzero components: uniform weights on a
/// random support of size ≥ 2.
fn random_leak(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let size = rng.random_range(2..=n);
    let support = index::sample(rng, n, size);
    let mut w = vec![0.0; n];
    for i in support.iter() {
        // exponential draws give a flat Dirichlet on the support
        w[i] = -(1.0 - rng.random::<f64>()).ln() + f64::MIN_POSITIVE;
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v * n as f64 / total).collect()
}

/// Probes whether any nontrivial leak saturates `p_up`.
///
/// Every support pattern of size ≥ 2 (all of them for `n ≤ 6`, all pairs
/// plus random patterns above) is solved as a restricted linear program in
/// which each support component holds at least [`MIN_LEAK_FRACTION`] of the
/// weight; `samples` random leaks are evaluated on top.
pub fn check_lemma1(req: &AmplificationRequest, samples: usize, seed: u64) -> Result<Lemma1Report, TransformError> {
    if samples == 0 {
        return Err(TransformError::NoSamples);
    }
    let n = req.n();
    let source = req.source_spectrum()?;
    let target = req.target_spectrum()?;
    let p_up = upper_bound(req)?.p_up;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut best_p = f64::NEG_INFINITY;
    let mut best_leak = Spectrum::uniform(n).into_values();
    let patterns = support_patterns(n, &mut rng);
    for support in &patterns {
        let (p, mu) = solve_leak_program(&source, &target, support, MIN_LEAK_FRACTION)?;
        let total: f64 = mu.iter().sum();
        if p > best_p && total > 0.0 {
            best_p = p;
            best_leak = mu.iter().map(|v| v * n as f64 / total).collect();
        }
    }
    for _ in 0..samples {
        let leak = random_leak(n, &mut rng);
        let p = max_feasible_p(source.values(), &convolve(target.values(), &leak)?).min(1.0);
        if p > best_p {
            best_p = p;
            best_leak = leak;
        }
    }
    let best_nontrivial_leak = Spectrum::new(best_leak)?;
    Ok(Lemma1Report {
        min_unique: smallest_is_unique(&target),
        best_nontrivial_leaky_p: best_p,
        best_nontrivial_leak,
        p_up,
        saturates: best_p >= p_up - SATURATION_SLACK,
        support_patterns: patterns.len(),
        random_samples: samples,
    })
}

/// `ln` of the last DFT eigenvalue
/// `e^{-x²} n Σ_r x^{2(n(r+1)-1)} / (n(r+1)-1)!`, evaluated term by term in
/// the log domain.
fn ln_last_eigenvalue(n: usize, x: f64) -> f64 {
    let ln_x2 = (x * x).ln();
    let mut ln_factorial = 0.0;
    let mut k = 0usize;
    let mut ln_terms = Vec::new();
    for r in 0.. {
        let order = n * (r + 1) - 1;
        while k < order {
            k += 1;
            ln_factorial += (k as f64).ln();
        }
        let ln_term = order as f64 * ln_x2 - ln_factorial;
        if let Some(&first) = ln_terms.first() {
            if ln_term - first < -40.0 {
                break;
            }
        }
        ln_terms.push(ln_term);
    }
    let lead = ln_terms[0];
    let tail: f64 = ln_terms.iter().map(|t| (t - lead).exp()).sum();
    -x * x + (n as f64).ln() + lead + tail.ln()
}

/// Closed-form optimum in the small-amplitude regime `0 < α < β < 1`:
/// the ratio of the last eigenvalues, prefactors `e^{-α²}`, `e^{-β²}` included.
pub fn small_amplitude_popt(req: &AmplificationRequest) -> Result<f64, TransformError> {
    let (alpha, beta) = (req.source_amplitude(), req.target_amplitude());
    if !(alpha > 0.0 && alpha < beta && beta < 1.0) {
        return Err(TransformError::OutOfRegime { alpha, beta });
    }
    let n = req.n();
    Ok((ln_last_eigenvalue(n, alpha) - ln_last_eigenvalue(n, beta)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn req(n: usize, a: f64, b: f64) -> AmplificationRequest {
        AmplificationRequest::new(n, a, b).unwrap()
    }

    #[test]
    fn request_validation() {
        assert!(AmplificationRequest::new(1, 0.5, 0.6).is_err());
        assert!(AmplificationRequest::new(3, 0.7, 0.6).is_err());
        assert!(AmplificationRequest::new(3, 0.0, 0.0).is_err());
        assert!(AmplificationRequest::new(3, -0.1, 0.6).is_err());
        assert!(AmplificationRequest::new(3, 0.0, 0.6).is_ok());
        assert!(AmplificationRequest::from_gain(3, 0.5, 0.9).is_err());
        let r = AmplificationRequest::from_gain(3, 0.5, 2.0).unwrap();
        assert_eq!(r.target_amplitude(), 1.0);
        assert_eq!(r.gain(), 2.0);
    }

    #[test]
    fn usd_success_examples() {
        let two = SymmetricCoherentSet::new(2, 1.0).unwrap();
        assert_abs_diff_eq!(usd_success(&two).unwrap(), 1.0 - (-2.0f64).exp(), epsilon = 1e-14);
        let four = SymmetricCoherentSet::new(4, 2.0).unwrap();
        assert_abs_diff_eq!(usd_success(&four).unwrap(), 0.971942, epsilon = 1e-6);
        for n in 2..6 {
            assert_eq!(usd_success(&SymmetricCoherentSet::new(n, 0.0).unwrap()).unwrap(), 0.0);
        }
    }

    #[test]
    fn upper_bound_examples() {
        assert_abs_diff_eq!(upper_bound(&req(4, 2.0, 2.3)).unwrap().p_up, 0.980248, epsilon = 1e-6);
        assert_abs_diff_eq!(upper_bound(&req(3, 0.5, 0.5)).unwrap().p_up, 1.0, epsilon = 1e-15);
        let want = (1.0 - (-0.5f64).exp()) / (1.0 - (-1.28f64).exp());
        assert_abs_diff_eq!(upper_bound(&req(2, 0.5, 0.8)).unwrap().p_up, want, epsilon = 1e-14);
        let vacuum = upper_bound(&req(3, 0.0, 0.8)).unwrap();
        assert!(vacuum.degenerate_source);
        assert_eq!(vacuum.p_up, 0.0);
    }

    #[test]
    fn leakless_examples() {
        let plan = leakless_optimum(&req(4, 2.0, 2.3)).unwrap();
        assert_abs_diff_eq!(plan.p, 0.977298, epsilon = 1e-6);
        assert!(plan.mode.is_leakless());

        let r = req(4, 0.3, 0.7);
        let plan = leakless_optimum(&r).unwrap();
        assert_eq!(plan.mode, PlanMode::LeaklessTrivial);
        assert_abs_diff_eq!(plan.p, upper_bound(&r).unwrap().p_up, epsilon = 1e-12);

        let plan = leakless_optimum(&req(5, 1.3, 1.3)).unwrap();
        assert_eq!(plan.p, 1.0);
        assert_eq!(plan.leak, Spectrum::point_mass(5, 0));
        assert!(plan.redundancy.is_none());
    }

    #[test]
    fn leaky_matches_independent_lp_oracle() {
        // frozen from an independent LP solver (HiGHS via scipy.optimize.linprog)
        // on the same μ-substituted program
        let plan = leaky_optimum(&req(4, 2.0, 2.3)).unwrap();
        assert_abs_diff_eq!(plan.p, 0.9786041748049278, epsilon = 1e-9);
        assert_eq!(plan.mode, PlanMode::Leaky);
        let mu: Vec<f64> = plan.leak.values().iter().map(|v| v * plan.p).collect();
        let want = [1.73639861, 0.0, 0.0, 2.17801809];
        for (g, w) in mu.iter().zip(want) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-7);
        }
    }

    #[test]
    fn leaky_small_amplitude_is_trivial() {
        let r = req(4, 0.3, 0.7);
        let plan = leaky_optimum(&r).unwrap();
        assert_eq!(plan.mode, PlanMode::LeaklessTrivial);
        assert_eq!(plan.leak, Spectrum::point_mass(4, 0));
        assert_abs_diff_eq!(plan.p, upper_bound(&r).unwrap().p_up, epsilon = 1e-12);

        let plan = leaky_optimum(&req(3, 0.8, 0.8)).unwrap();
        assert_abs_diff_eq!(plan.p, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn vacuum_source_gives_zero_plans() {
        let r = req(3, 0.0, 0.5);
        for plan in [leakless_optimum(&r).unwrap(), leaky_optimum(&r).unwrap()] {
            assert_eq!(plan.p, 0.0);
            assert_eq!(plan.redundancy.as_ref().unwrap(), &r.source_spectrum().unwrap());
        }
    }

    #[test]
    fn redundancy_examples() {
        let r = req(4, 2.0, 2.3);
        let a = r.source_spectrum().unwrap();
        let b = r.target_spectrum().unwrap();
        let leak = Spectrum::point_mass(4, 0);
        assert_eq!(redundancy(&a, &b, 0.0, &leak).unwrap(), a);

        let plan = leakless_optimum(&r).unwrap();
        let red = redundancy(&a, &b, plan.p, &plan.leak).unwrap();
        assert!(red.values().iter().any(|v| v.abs() <= 1e-9));

        let red = redundancy(&a, &a, 0.5, &leak).unwrap();
        for (x, y) in red.values().iter().zip(a.values()) {
            assert_abs_diff_eq!(*x, *y, epsilon = 1e-15);
        }

        assert!(matches!(
            redundancy(&a, &b, 1.0, &leak),
            Err(TransformError::DegenerateP(_))
        ));
        assert!(matches!(
            redundancy(&a, &b, 0.99, &leak),
            Err(TransformError::InvalidResidual { .. })
        ));
    }

    #[test]
    fn lemma1_examples() {
        let report = check_lemma1(&req(4, 2.0, 2.3), 500, 7).unwrap();
        assert!(report.min_unique);
        assert!(!report.saturates);
        assert!(report.best_nontrivial_leaky_p < 0.980248);
        assert!(report.best_nontrivial_leaky_p >= 0.978604 - 1e-4);
        assert_eq!(report.support_patterns, 11);

        let report = check_lemma1(&req(4, 0.3, 0.7), 500, 7).unwrap();
        assert!(report.min_unique);
        assert!(!report.saturates);

        let report = check_lemma1(&req(3, 0.6, 0.6), 200, 1).unwrap();
        assert!(report.best_nontrivial_leaky_p < 1.0);
        assert!(!report.saturates);

        assert_eq!(check_lemma1(&req(3, 0.6, 0.7), 0, 1), Err(TransformError::NoSamples));
    }

    #[test]
    fn lemma1_large_n_uses_random_patterns() {
        let report = check_lemma1(&req(7, 0.4, 0.6), 10, 3).unwrap();
        assert_eq!(report.support_patterns, 21 + RANDOM_SUPPORT_PATTERNS);
        assert!(!report.saturates);
    }

    #[test]
    fn leaky_never_exceeds_bound_for_tiny_eigenvalues() {
        // smallest eigenvalues near 1e-15: the tableau cannot resolve the binding row
        let r = AmplificationRequest::from_gain(6, 0.05, 1.0838683732971215).unwrap();
        let p_up = upper_bound(&r).unwrap().p_up;
        let plan = leaky_optimum(&r).unwrap();
        assert!(plan.p <= p_up + 1e-12, "{} > {p_up}", plan.p);
        assert_abs_diff_eq!(plan.p, p_up, epsilon = 1e-9);
    }

    #[test]
    fn small_amplitude_examples() {
        let want = (1.0 - (-0.5f64).exp()) / (1.0 - (-1.28f64).exp());
        let got = small_amplitude_popt(&req(2, 0.5, 0.8)).unwrap();
        assert_abs_diff_eq!(got, want, epsilon = 1e-14);
        assert_abs_diff_eq!(got, 0.544999541575149, epsilon = 1e-12);

        let near = small_amplitude_popt(&req(3, 0.5 - 1e-9, 0.5)).unwrap();
        assert_abs_diff_eq!(near, 1.0, epsilon = 1e-7);

        let r = req(3, 0.2, 0.9);
        assert_abs_diff_eq!(
            small_amplitude_popt(&r).unwrap(),
            upper_bound(&r).unwrap().p_up,
            epsilon = 1e-12
        );

        assert!(matches!(
            small_amplitude_popt(&req(3, 0.5, 1.0)),
            Err(TransformError::OutOfRegime { .. })
        ));
        assert!(small_amplitude_popt(&req(3, 0.5, 0.5)).is_err());
    }
}
