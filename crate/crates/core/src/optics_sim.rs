//! Linear-optics simulation of amplification by unambiguous discrimination.
//!
//! Modes carry coherent amplitudes only. Detectors are vacuum/non-vacuum
//! threshold detectors: a mode of amplitude `a` stays dark with probability
//! `exp(-η|a|²)`. Without dark counts a mode of exactly zero amplitude can
//! never click, which is what makes the discrimination unambiguous.
//!
//! Two discriminators are provided. [`usd_two`] mixes `±α` with a reference
//! `α` on a balanced beam splitter, so exactly one output port is lit; it
//! fails with probability `e^{-2α²}`, the optimum. [`usd_multiport`] splits
//! an `n`-ary input into branches and nulls each branch against one
//! candidate; a click rules that candidate out. It is unambiguous but not
//! optimal.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::coherent::{CoherentError, SymmetricCoherentSet};

/// Name of the generator recorded in every [`SimReport`].
pub const RNG_ALGORITHM: &str = "ChaCha8Rng";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("unknown scenario {0:?} (expected usd-two, usd-multiport or amplify)")]
    UnknownScenario(String),
    #[error("detector efficiency must lie in (0, 1], got {0}")]
    InvalidEfficiency(f64),
    #[error("non-finite mode amplitude")]
    NonFiniteAmplitude,
    #[error("amplitude must be positive, got {0}")]
    NonPositiveAmplitude(f64),
    #[error("gain must be at least 1, got {0}")]
    InvalidGain(f64),
    #[error("at least one trial and one shard are required")]
    NoTrials,
    #[error("candidate index {index} out of range for {n} states")]
    IndexOutOfRange { index: usize, n: usize },
    #[error(transparent)]
    Coherent(#[from] CoherentError),
}

/// Coherent amplitude of one optical mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ModeAmplitude(Complex64);

impl ModeAmplitude {
    pub const VACUUM: Self = Self(Complex64::new(0.0, 0.0));

    pub fn new(value: Complex64) -> Result<Self, SimError> {
        if value.re.is_finite() && value.im.is_finite() {
            Ok(Self(value))
        } else {
            Err(SimError::NonFiniteAmplitude)
        }
    }

    pub fn real(value: f64) -> Result<Self, SimError> {
        Self::new(Complex64::new(value, 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    /// Mean photon number `|a|²`.
    pub fn intensity(self) -> f64 {
        self.0.norm_sqr()
    }
}

/// Balanced beam splitter: `(a, b) → ((a+b)/√2, (a-b)/√2)`.
pub fn beamsplitter(a: ModeAmplitude, b: ModeAmplitude) -> (ModeAmplitude, ModeAmplitude) {
    (
        ModeAmplitude((a.0 + b.0) * FRAC_1_SQRT_2),
        ModeAmplitude((a.0 - b.0) * FRAC_1_SQRT_2),
    )
}

pub fn displace(a: ModeAmplitude, d: Complex64) -> ModeAmplitude {
    ModeAmplitude(a.0 + d)
}

/// Probability that a threshold detector of the given efficiency fires.
pub fn click_probability(a: ModeAmplitude, efficiency: f64) -> f64 {
    -(-efficiency * a.intensity()).exp_m1()
}

/// Threshold detector without dark counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Detector {
    efficiency: f64,
}

impl Detector {
    pub fn ideal() -> Self {
        Self { efficiency: 1.0 }
    }

    pub fn with_efficiency(efficiency: f64) -> Result<Self, SimError> {
        if efficiency > 0.0 && efficiency <= 1.0 {
            Ok(Self { efficiency })
        } else {
            Err(SimError::InvalidEfficiency(efficiency))
        }
    }

    pub fn efficiency(&self) -> f64 {
        self.efficiency
    }

    pub fn click_probability(&self, a: ModeAmplitude) -> f64 {
        click_probability(a, self.efficiency)
    }

    /// A zero-probability event never fires: `random() ∈ [0, 1)`.
    pub fn fires<R: Rng + ?Sized>(&self, a: ModeAmplitude, rng: &mut R) -> bool {
        rng.random::<f64>() < self.click_probability(a)
    }
}

impl Default for Detector {
    fn default() -> Self {
        Self::ideal()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum UsdOutcome {
    Identified(usize),
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Index in the two-state symmetric set: `+α` is 0, `-α` is 1.
    pub fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn from_index(index: usize) -> Self {
        if index.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Two-state discrimination of `|±α⟩` against a reference `|α⟩`.
///
/// Port 1 lights up only for `+α`, port 2 only for `-α`.
pub fn usd_two<R: Rng + ?Sized>(alpha: f64, actual: Sign, detector: &Detector, rng: &mut R) -> UsdOutcome {
    let input = ModeAmplitude(Complex64::new(
        match actual {
            Sign::Plus => alpha,
            Sign::Minus => -alpha,
        },
        0.0,
    ));
    let reference = ModeAmplitude(Complex64::new(alpha, 0.0));
    let (port1, port2) = beamsplitter(input, reference);
    // both ports are sampled so the random stream does not depend on the input
    let d1 = detector.fires(port1, rng);
    let d2 = detector.fires(port2, rng);
    match (d1, d2) {
        (true, false) => UsdOutcome::Identified(Sign::Plus.index()),
        (false, true) => UsdOutcome::Identified(Sign::Minus.index()),
        _ => UsdOutcome::Inconclusive,
    }
}

/// How many branches the multiport splits the input into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branching {
    /// One branch per candidate.
    #[default]
    Full,
    /// `n - 1` branches testing candidates `0..n-1`; the untested last
    /// candidate is identified when every tested one is ruled out.
    OmitLast,
}

impl Branching {
    fn tested(self, n: usize) -> usize {
        match self {
            Branching::Full => n,
            Branching::OmitLast => n - 1,
        }
    }
}

/// Ideal-splitter branch amplitudes `a/√branches`.
pub fn split(a: ModeAmplitude, branches: usize) -> Vec<ModeAmplitude> {
    let scale = 1.0 / (branches as f64).sqrt();
    vec![ModeAmplitude(a.0 * scale); branches]
}

/// Multiport discrimination among the members of `set`.
///
/// Branch `k` is displaced by minus candidate `k` (scaled like the branch),
/// so it is exactly vacuum when `k` is the true state. A click rules `k`
/// out; the outcome is `Identified(m)` iff every candidate but `m` is ruled
/// out.
pub fn usd_multiport<R: Rng + ?Sized>(
    set: &SymmetricCoherentSet,
    actual: usize,
    branching: Branching,
    detector: &Detector,
    rng: &mut R,
) -> UsdOutcome {
    let n = set.n();
    let tested = branching.tested(n);
    let scale = 1.0 / (tested as f64).sqrt();
    let branches = split(ModeAmplitude(set.member(actual)), tested);
    let mut survivors: Vec<usize> = Vec::with_capacity(n);
    for (k, branch) in branches.into_iter().enumerate() {
        let probe = displace(branch, -(set.member(k) * scale));
        if !detector.fires(probe, rng) {
            survivors.push(k);
        }
    }
    survivors.extend(tested..n);
    match survivors.as_slice() {
        [m] => UsdOutcome::Identified(*m),
        _ => UsdOutcome::Inconclusive,
    }
}

/// `Π_{k≠m} (1 - exp(-η(α²/b)|e^{iθ_m} - e^{iθ_k}|²))` for the full
/// multiport with `b = n` branches (success is independent of `m`).
pub fn multiport_success_probability(set: &SymmetricCoherentSet, detector: &Detector) -> f64 {
    let n = set.n();
    let scale = 1.0 / (n as f64).sqrt();
    (1..n)
        .map(|k| {
            let probe = ModeAmplitude((set.member(0) - set.member(k)) * scale);
            detector.click_probability(probe)
        })
        .product()
}

/// Probability that a single trial of the given scenario succeeds,
/// averaged over a uniformly random input state.
pub fn two_state_success_probability(alpha: f64, detector: &Detector) -> f64 {
    detector.click_probability(ModeAmplitude(Complex64::new(2.0f64.sqrt() * alpha, 0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PipelineOutcome {
    /// The identified index and the prepared state `g·α·e^{iθ_m}`.
    Amplified { index: usize, amplitude: ModeAmplitude },
    Fail,
}

/// Heralded amplification: discriminate, then phase-shift a reference beam
/// of amplitude `g·α` onto the identified candidate. Two-state sets use
/// [`usd_two`], larger sets the full multiport.
pub fn amplify_pipeline<R: Rng + ?Sized>(
    set: &SymmetricCoherentSet,
    gain: f64,
    actual: usize,
    detector: &Detector,
    rng: &mut R,
) -> Result<PipelineOutcome, SimError> {
    if !(gain >= 1.0 && gain.is_finite()) {
        return Err(SimError::InvalidGain(gain));
    }
    if actual >= set.n() {
        return Err(SimError::IndexOutOfRange { index: actual, n: set.n() });
    }
    let outcome = if set.n() == 2 {
        usd_two(set.amplitude(), Sign::from_index(actual), detector, rng)
    } else {
        usd_multiport(set, actual, Branching::Full, detector, rng)
    };
    Ok(match outcome {
        UsdOutcome::Identified(index) => {
            let amplified = set.with_amplitude(gain * set.amplitude())?;
            PipelineOutcome::Amplified {
                index,
                amplitude: ModeAmplitude::new(amplified.member(index))?,
            }
        }
        UsdOutcome::Inconclusive => PipelineOutcome::Fail,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    UsdTwo,
    UsdMultiport,
    Amplify,
}

impl FromStr for ScenarioKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        match s {
            "usd-two" | "usd_two" => Ok(Self::UsdTwo),
            "usd-multiport" | "usd_multiport" => Ok(Self::UsdMultiport),
            "amplify" | "amplify-pipeline" | "amplify_pipeline" => Ok(Self::Amplify),
            other => Err(SimError::UnknownScenario(other.to_string())),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::UsdTwo => "usd-two",
            Self::UsdMultiport => "usd-multiport",
            Self::Amplify => "amplify",
        })
    }
}

/// A fully specified simulation scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub n: usize,
    pub alpha: f64,
    pub gain: f64,
    pub branching: Branching,
    pub detector: Detector,
}

impl Scenario {
    pub fn usd_two(alpha: f64) -> Self {
        Self {
            kind: ScenarioKind::UsdTwo,
            n: 2,
            alpha,
            gain: 1.0,
            branching: Branching::Full,
            detector: Detector::ideal(),
        }
    }

    pub fn usd_multiport(n: usize, alpha: f64) -> Self {
        Self {
            kind: ScenarioKind::UsdMultiport,
            n,
            ..Self::usd_two(alpha)
        }
    }

    pub fn amplify(n: usize, alpha: f64, gain: f64) -> Self {
        Self {
            kind: ScenarioKind::Amplify,
            n,
            gain,
            ..Self::usd_two(alpha)
        }
    }

    pub fn with_detector(self, detector: Detector) -> Self {
        Self { detector, ..self }
    }

    pub fn with_branching(self, branching: Branching) -> Self {
        Self { branching, ..self }
    }

    fn set(&self) -> Result<SymmetricCoherentSet, SimError> {
        Ok(SymmetricCoherentSet::new(self.n, self.alpha)?)
    }

    fn validate(&self) -> Result<(), SimError> {
        if !(self.alpha > 0.0) {
            return Err(SimError::NonPositiveAmplitude(self.alpha));
        }
        self.set()?;
        if self.kind == ScenarioKind::Amplify && !(self.gain >= 1.0 && self.gain.is_finite()) {
            return Err(SimError::InvalidGain(self.gain));
        }
        Ok(())
    }

    /// Analytic success probability of one trial.
    pub fn expected_success_rate(&self) -> Result<f64, SimError> {
        let set = self.set()?;
        Ok(match (self.kind, self.n, self.branching) {
            (ScenarioKind::UsdTwo, _, _) | (ScenarioKind::Amplify, 2, _) => {
                two_state_success_probability(self.alpha, &self.detector)
            }
            (ScenarioKind::UsdMultiport, _, Branching::OmitLast) => {
                // only the untested candidate can be identified
                let b = 1.0 / ((self.n - 1) as f64).sqrt();
                let last = self.n - 1;
                let hit: f64 = (0..last)
                    .map(|k| {
                        let probe = ModeAmplitude((set.member(last) - set.member(k)) * b);
                        self.detector.click_probability(probe)
                    })
                    .product();
                hit / self.n as f64
            }
            _ => multiport_success_probability(&set, &self.detector),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub scenario: Scenario,
    pub trials: u64,
    pub success_count: u64,
    pub inconclusive_count: u64,
    pub wrong_count: u64,
    pub empirical_rate: f64,
    /// Three standard errors of the empirical rate (normal approximation).
    pub ci_halfwidth: f64,
    pub expected_rate: f64,
    pub seed: u64,
    pub shards: usize,
    pub rng: &'static str,
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
struct Tally {
    success: u64,
    inconclusive: u64,
    wrong: u64,
}

impl Tally {
    fn merge(self, other: Self) -> Self {
        Self {
            success: self.success + other.success,
            inconclusive: self.inconclusive + other.inconclusive,
            wrong: self.wrong + other.wrong,
        }
    }
}

fn run_shard(scenario: &Scenario, set: &SymmetricCoherentSet, trials: u64, rng: &mut ChaCha8Rng) -> Tally {
    let mut tally = Tally::default();
    for _ in 0..trials {
        let actual = rng.random_range(0..scenario.n);
        let identified = match scenario.kind {
            ScenarioKind::UsdTwo => usd_two(scenario.alpha, Sign::from_index(actual), &scenario.detector, rng),
            ScenarioKind::UsdMultiport => {
                usd_multiport(set, actual, scenario.branching, &scenario.detector, rng)
            }
            ScenarioKind::Amplify => {
                match amplify_pipeline(set, scenario.gain, actual, &scenario.detector, rng)
                    .expect("scenario validated")
                {
                    PipelineOutcome::Amplified { index, .. } => UsdOutcome::Identified(index),
                    PipelineOutcome::Fail => UsdOutcome::Inconclusive,
                }
            }
        };
        match identified {
            UsdOutcome::Identified(m) if m == actual => tally.success += 1,
            UsdOutcome::Identified(_) => tally.wrong += 1,
            UsdOutcome::Inconclusive => tally.inconclusive += 1,
        }
    }
    tally
}

/// Runs `trials` independent trials on a single stream.
pub fn monte_carlo(scenario: &Scenario, trials: u64, seed: u64) -> Result<SimReport, SimError> {
    monte_carlo_sharded(scenario, trials, seed, 1)
}

/// Splits the trials over `shards` threads; shard `i` uses stream `i` of
/// the seeded ChaCha generator. Results are deterministic for a fixed
/// `(seed, shards)` pair.
pub fn monte_carlo_sharded(
    scenario: &Scenario,
    trials: u64,
    seed: u64,
    shards: usize,
) -> Result<SimReport, SimError> {
    if trials == 0 || shards == 0 {
        return Err(SimError::NoTrials);
    }
    scenario.validate()?;
    let set = scenario.set()?;
    let per_shard = trials / shards as u64;
    let extra = trials % shards as u64;
    let tally = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..shards)
            .map(|shard| {
                let count = per_shard + u64::from((shard as u64) < extra);
                let set = &set;
                scope.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(shard as u64);
                    run_shard(scenario, set, count, &mut rng)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation shard panicked"))
            .fold(Tally::default(), Tally::merge)
    });
    let rate = tally.success as f64 / trials as f64;
    Ok(SimReport {
        scenario: *scenario,
        trials,
        success_count: tally.success,
        inconclusive_count: tally.inconclusive,
        wrong_count: tally.wrong,
        empirical_rate: rate,
        ci_halfwidth: 3.0 * (rate * (1.0 - rate) / trials as f64).sqrt(),
        expected_rate: scenario.expected_success_rate()?,
        seed,
        shards,
        rng: RNG_ALGORITHM,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn m(re: f64, im: f64) -> ModeAmplitude {
        ModeAmplitude::new(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn beamsplitter_examples() {
        let a = 1.3;
        let (p1, p2) = beamsplitter(m(a, 0.0), m(a, 0.0));
        assert_abs_diff_eq!(p1.value().re, 2f64.sqrt() * a, epsilon = 1e-15);
        assert_eq!(p2, ModeAmplitude::VACUUM);
        let (p1, p2) = beamsplitter(m(-a, 0.0), m(a, 0.0));
        assert_eq!(p1, ModeAmplitude::VACUUM);
        assert_abs_diff_eq!(p2.value().re, -(2f64.sqrt()) * a, epsilon = 1e-15);
        assert_eq!(
            beamsplitter(ModeAmplitude::VACUUM, ModeAmplitude::VACUUM),
            (ModeAmplitude::VACUUM, ModeAmplitude::VACUUM)
        );
    }

    #[test]
    fn displacement_examples() {
        let (a, b) = (0.4, 1.1);
        assert_eq!(displace(m(a, 0.0), Complex64::new(-a, 0.0)), ModeAmplitude::VACUUM);
        let d = displace(m(b, 0.0), Complex64::new(-(a + b) / 2.0, 0.0));
        assert_abs_diff_eq!(d.value().re, (b - a) / 2.0, epsilon = 1e-15);
        let z = Complex64::new(0.3, -0.2);
        assert_eq!(displace(ModeAmplitude::VACUUM, z).value(), z);
    }

    #[test]
    fn click_probability_examples() {
        assert_eq!(click_probability(ModeAmplitude::VACUUM, 1.0), 0.0);
        let p = click_probability(m(2f64.sqrt(), 0.0), 1.0);
        assert_abs_diff_eq!(p, 1.0 - (-2.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(p, 0.8646647, epsilon = 1e-7);
        let p = click_probability(m(2f64.sqrt(), 0.0), 0.5);
        assert_abs_diff_eq!(p, 1.0 - (-1.0f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn detector_validation() {
        assert!(Detector::with_efficiency(0.0).is_err());
        assert!(Detector::with_efficiency(1.1).is_err());
        assert!(Detector::with_efficiency(0.3).is_ok());
        assert!(ModeAmplitude::new(Complex64::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn usd_two_limits() {
        let det = Detector::ideal();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(usd_two(8.0, Sign::Plus, &det, &mut rng), UsdOutcome::Identified(0));
            assert_eq!(usd_two(8.0, Sign::Minus, &det, &mut rng), UsdOutcome::Identified(1));
            assert_eq!(usd_two(1e-200, Sign::Minus, &det, &mut rng), UsdOutcome::Inconclusive);
        }
    }

    #[test]
    fn multiport_never_rules_out_truth() {
        let det = Detector::ideal();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 2..=7 {
            let set = SymmetricCoherentSet::new(n, 1.4).unwrap();
            for actual in 0..n {
                for _ in 0..200 {
                    match usd_multiport(&set, actual, Branching::Full, &det, &mut rng) {
                        UsdOutcome::Identified(m) => assert_eq!(m, actual),
                        UsdOutcome::Inconclusive => {}
                    }
                    match usd_multiport(&set, actual, Branching::OmitLast, &det, &mut rng) {
                        UsdOutcome::Identified(m) => assert_eq!(m, actual),
                        UsdOutcome::Inconclusive => {}
                    }
                }
            }
        }
    }

    #[test]
    fn multiport_vacuum_is_inconclusive() {
        let set = SymmetricCoherentSet::new(3, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            assert_eq!(
                usd_multiport(&set, 1, Branching::Full, &Detector::ideal(), &mut rng),
                UsdOutcome::Inconclusive
            );
        }
    }

    #[test]
    fn multiport_two_states_matches_beamsplitter() {
        let det = Detector::ideal();
        for alpha in [0.3, 0.7, 1.0, 1.5] {
            let set = SymmetricCoherentSet::new(2, alpha).unwrap();
            let multi = multiport_success_probability(&set, &det);
            let two = two_state_success_probability(alpha, &det);
            assert_abs_diff_eq!(multi, 1.0 - (-2.0 * alpha * alpha).exp(), epsilon = 1e-14);
            assert_abs_diff_eq!(multi, two, epsilon = 1e-14);
        }
    }

    #[test]
    fn pipeline_emits_exact_amplitudes() {
        let set = SymmetricCoherentSet::new(2, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let det = Detector::ideal();
        for actual in [0, 1] {
            match amplify_pipeline(&set, 2.5, actual, &det, &mut rng).unwrap() {
                PipelineOutcome::Amplified { index, amplitude } => {
                    assert_eq!(index, actual);
                    let sign = if actual == 0 { 1.0 } else { -1.0 };
                    assert_eq!(amplitude.value(), Complex64::new(sign * 7.5, 0.0));
                }
                PipelineOutcome::Fail => panic!("α = 3 essentially never fails"),
            }
        }
        match amplify_pipeline(&set, 1.0, 1, &det, &mut rng).unwrap() {
            PipelineOutcome::Amplified { amplitude, .. } => {
                assert_eq!(amplitude.value(), set.member(1))
            }
            PipelineOutcome::Fail => panic!(),
        }
        let tiny = SymmetricCoherentSet::new(2, 1e-200).unwrap();
        assert_eq!(
            amplify_pipeline(&tiny, 2.0, 0, &det, &mut rng).unwrap(),
            PipelineOutcome::Fail
        );
        assert!(amplify_pipeline(&set, 0.5, 0, &det, &mut rng).is_err());
        assert!(amplify_pipeline(&set, 2.0, 2, &det, &mut rng).is_err());
    }

    #[test]
    fn scenario_parsing() {
        assert_eq!("usd-two".parse::<ScenarioKind>().unwrap(), ScenarioKind::UsdTwo);
        assert_eq!("amplify".parse::<ScenarioKind>().unwrap(), ScenarioKind::Amplify);
        assert_eq!(
            "teleport".parse::<ScenarioKind>(),
            Err(SimError::UnknownScenario("teleport".into()))
        );
    }

    #[test]
    fn single_trial_rates_are_binary() {
        for scenario in [
            Scenario::usd_two(0.8),
            Scenario::usd_multiport(3, 0.8),
            Scenario::amplify(4, 0.8, 2.0),
        ] {
            let r = monte_carlo(&scenario, 1, 11).unwrap();
            assert!(r.empirical_rate == 0.0 || r.empirical_rate == 1.0);
            assert_eq!(r.success_count + r.inconclusive_count, 1);
        }
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let s = Scenario::usd_multiport(4, 1.0);
        assert_eq!(monte_carlo(&s, 5000, 3).unwrap(), monte_carlo(&s, 5000, 3).unwrap());
        let a = monte_carlo_sharded(&s, 5001, 3, 4).unwrap();
        let b = monte_carlo_sharded(&s, 5001, 3, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.success_count + a.inconclusive_count + a.wrong_count, 5001);
        assert_ne!(monte_carlo(&s, 5000, 4).unwrap(), monte_carlo(&s, 5000, 3).unwrap());
    }

    #[test]
    fn monte_carlo_rejects_bad_input() {
        assert_eq!(monte_carlo(&Scenario::usd_two(1.0), 0, 1), Err(SimError::NoTrials));
        assert!(monte_carlo(&Scenario::usd_two(0.0), 10, 1).is_err());
        assert!(monte_carlo(&Scenario::amplify(3, 1.0, 0.5), 10, 1).is_err());
    }

    #[test]
    fn inefficient_detectors_stay_unambiguous() {
        let det = Detector::with_efficiency(0.4).unwrap();
        let s = Scenario::usd_multiport(3, 1.2).with_detector(det);
        let r = monte_carlo(&s, 20_000, 8).unwrap();
        assert_eq!(r.wrong_count, 0);
        assert!((r.empirical_rate - r.expected_rate).abs() <= 3.0 * (r.expected_rate * (1.0 - r.expected_rate) / 20_000.0).sqrt());
    }

    #[test]
    fn omit_last_matches_its_analytic_rate() {
        let s = Scenario::usd_multiport(3, 1.5).with_branching(Branching::OmitLast);
        let r = monte_carlo(&s, 50_000, 21).unwrap();
        let p = r.expected_rate;
        assert_eq!(r.wrong_count, 0);
        assert!((r.empirical_rate - p).abs() <= 3.0 * (p * (1.0 - p) / 50_000.0).sqrt());
    }
}
