use approx::assert_abs_diff_eq;
use coherent_amp::coherent::{
    gram_matrix, overlap, spectrum_series, Spectrum, SymmetricCoherentSet, DEFAULT_SERIES_TOLERANCE,
};
use coherent_amp::optics_sim::{beamsplitter, ModeAmplitude};
use coherent_amp::spectral::{convolve, diagonalize_circulant};
use coherent_amp::transform::{
    leakless_optimum, leaky_optimum, upper_bound, usd_success, AmplificationRequest,
};
use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;
use proptest::prelude::*;

fn simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, n).prop_filter_map("all zero", move |w| {
        let total: f64 = w.iter().sum();
        (total > 1e-6).then(|| w.iter().map(|v| v * n as f64 / total).collect())
    })
}

fn amplitude() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn spectrum(n: usize, alpha: f64) -> Spectrum {
    spectrum_series(&SymmetricCoherentSet::new(n, alpha).unwrap(), DEFAULT_SERIES_TOLERANCE).unwrap()
}

proptest! {
    #[test]
    fn convolution_is_commutative_and_preserves_trace(
        (u, v) in (2usize..9).prop_flat_map(|n| (simplex(n), simplex(n)))
    ) {
        let uv = convolve(&u, &v).unwrap();
        let vu = convolve(&v, &u).unwrap();
        for (a, b) in uv.iter().zip(&vu) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let total: f64 = uv.iter().sum();
        prop_assert!((total - u.len() as f64).abs() < 1e-10);
        prop_assert!(uv.iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn convolution_is_associative(
        (u, v, w) in (2usize..7).prop_flat_map(|n| (simplex(n), simplex(n), simplex(n)))
    ) {
        let left = convolve(&convolve(&u, &v).unwrap(), &w).unwrap();
        let right = convolve(&u, &convolve(&v, &w).unwrap()).unwrap();
        for (a, b) in left.iter().zip(&right) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn overlap_modulus(a in amplitude(), b in amplitude()) {
        let o = overlap(a, b);
        prop_assert!((o.norm() - (-(a - b).norm_sqr() / 2.0).exp()).abs() < 1e-12);
        prop_assert!((overlap(a, a) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        prop_assert!((overlap(b, a) - o.conj()).norm() < 1e-14);
    }

    #[test]
    fn beamsplitter_preserves_energy_and_overlaps(
        a in amplitude(), b in amplitude(), c in amplitude(), d in amplitude()
    ) {
        let m = |z| ModeAmplitude::new(z).unwrap();
        let (a2, b2) = beamsplitter(m(a), m(b));
        let (c2, d2) = beamsplitter(m(c), m(d));
        let before = a.norm_sqr() + b.norm_sqr();
        prop_assert!((before - a2.intensity() - b2.intensity()).abs() < 1e-12);
        let o1 = overlap(a, c) * overlap(b, d);
        let o2 = overlap(a2.value(), c2.value()) * overlap(b2.value(), d2.value());
        prop_assert!((o1 - o2).norm() < 1e-12);
    }

    #[test]
    fn gram_matrix_is_circulant(n in 2usize..10, alpha in 0.0f64..4.0) {
        let g = gram_matrix(&SymmetricCoherentSet::new(n, alpha).unwrap());
        prop_assert!(g.circulant_residue() < 1e-12);
    }

    #[test]
    fn dft_spectrum_matches_dense_eigensolver(n in 2usize..9, alpha in 0.05f64..3.0) {
        let g = gram_matrix(&SymmetricCoherentSet::new(n, alpha).unwrap());
        let m = DMatrix::from_fn(n, n, |i, j| {
            let z = g.entry(i, j);
            Complex::new(z.re, z.im)
        });
        let mut dense: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        let mut ours = diagonalize_circulant(&g).unwrap().into_values();
        dense.sort_by(f64::total_cmp);
        ours.sort_by(f64::total_cmp);
        for (a, b) in dense.iter().zip(&ours) {
            prop_assert!((a - b).abs() < 1e-10, "{dense:?} vs {ours:?}");
        }
    }

    #[test]
    fn success_probabilities_are_ordered(
        n in 2usize..7, alpha in 0.05f64..2.5, gain in 1.0f64..1.8
    ) {
        let req = AmplificationRequest::new(n, alpha, alpha * gain).unwrap();
        let p_up = upper_bound(&req).unwrap().p_up;
        let leakless = leakless_optimum(&req).unwrap().p;
        let leaky = leaky_optimum(&req).unwrap().p;
        // discriminate-and-reprepare is a transform with a uniform leak
        let usd = usd_success(&req.source_set()).unwrap();
        prop_assert!(usd <= leaky + 1e-9);
        prop_assert!(leakless <= leaky + 1e-9);
        prop_assert!(leaky <= p_up + 1e-9);
    }

    #[test]
    fn leaky_optimum_has_an_active_constraint(
        n in 2usize..7, alpha in 0.05f64..2.5, gain in 1.01f64..1.8
    ) {
        let req = AmplificationRequest::new(n, alpha, alpha * gain).unwrap();
        let plan = leaky_optimum(&req).unwrap();
        let a = req.source_spectrum().unwrap();
        let b = req.target_spectrum().unwrap();
        let c = convolve(b.values(), plan.leak.values()).unwrap();
        let tight = (0..n).map(|i| a[i] - plan.p * c[i]).fold(f64::INFINITY, f64::min);
        prop_assert!(tight.abs() < 1e-9, "slack {tight}");
    }

    #[test]
    fn no_leak_beats_the_linear_program(
        (leak, alpha, gain) in (2usize..6).prop_flat_map(|n| (simplex(n), 0.2f64..2.5, 1.0f64..1.6))
    ) {
        let n = leak.len();
        let req = AmplificationRequest::new(n, alpha, alpha * gain).unwrap();
        let a = req.source_spectrum().unwrap();
        let b = req.target_spectrum().unwrap();
        let c = convolve(b.values(), &leak).unwrap();
        let p = (0..n)
            .filter(|&i| c[i] > 0.0)
            .map(|i| a[i] / c[i])
            .fold(f64::INFINITY, f64::min)
            .min(1.0);
        prop_assert!(p <= leaky_optimum(&req).unwrap().p + 1e-9);
    }
}

#[test]
fn brute_force_leak_grid_matches_linear_program() {
    // exhaustive search over a 1/40 grid of the leak simplex for n = 3
    for &(alpha, beta) in &[(0.7, 1.1), (1.5, 1.9), (2.0, 2.6)] {
        let req = AmplificationRequest::new(3, alpha, beta).unwrap();
        let a = spectrum(3, alpha);
        let b = spectrum(3, beta);
        let steps = 40;
        let mut best = 0.0f64;
        for i in 0..=steps {
            for j in 0..=steps - i {
                let k = steps - i - j;
                let leak = [i, j, k].map(|w| 3.0 * w as f64 / steps as f64);
                let c = convolve(b.values(), &leak).unwrap();
                let p = (0..3)
                    .filter(|&x| c[x] > 0.0)
                    .map(|x| a[x] / c[x])
                    .fold(f64::INFINITY, f64::min);
                best = best.max(p.min(1.0));
            }
        }
        let lp = leaky_optimum(&req).unwrap().p;
        assert!(best <= lp + 1e-12);
        assert_abs_diff_eq!(best, lp, epsilon = 5e-3);
    }
}
