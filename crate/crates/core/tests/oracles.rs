mod common;

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use catsize::distinguish::{ghz_like_nmin, ghz_like_probability, success_probability};
use catsize::entropy::{entropy_curve, fock_disconnectivity, DEFAULT_THRESHOLD};
use catsize::rdm::{fock_rdm, rdm_closed_form, rdm_finite_n, FockOccupation, RdmMode};
use catsize::sequential::{run_protocol, simulate_protocol, BranchChoice, ProductBranchPair};
use catsize::state::{branch_overlap, distillation_probability, number_distribution};
use catsize::{GaussianSpread, HermitianMatrix, SuperpositionSpec};
use common::Branches;
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec(big_n: usize, theta0: f64, sigma: f64) -> SuperpositionSpec {
    SuperpositionSpec::new(big_n, GaussianSpread::new(theta0, sigma).unwrap()).unwrap()
}

fn max_dev(m: &HermitianMatrix, dense: &[Vec<Complex64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (k, row) in dense.iter().enumerate() {
        for (l, x) in row.iter().enumerate() {
            worst = worst.max((m.get(k, l) - x).norm());
        }
    }
    worst
}

#[test]
fn overlap_matches_fock_basis_vectors() {
    let (big_n, t, s) = (8, PI / 8.0, 0.05 * PI);
    let a = common::fock_amplitudes(big_n, t, s, Branches::A);
    let b = common::fock_amplitudes(big_n, t, s, Branches::B);
    let ab: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let aa: f64 = a.iter().map(|x| x * x).sum();
    let bb: f64 = b.iter().map(|x| x * x).sum();
    let want = ab / (aa * bb).sqrt();
    let got = branch_overlap(&spec(big_n, t, s)).unwrap();
    assert!((got.re - want).abs() < 1e-10, "{got} vs {want}");
    assert!(got.im.abs() < 1e-10);
}

#[test]
fn number_distribution_matches_fock_basis_vectors() {
    let (big_n, t, s) = (40, 0.05 * PI, 0.010 * PI);
    let want =
        common::normalized_probabilities(&common::fock_amplitudes(big_n, t, s, Branches::Both));
    let got = number_distribution(&spec(big_n, t, s)).unwrap();
    for (g, w) in got.probs().iter().zip(&want) {
        assert!((g - w).abs() < 1e-10);
    }
    // Bimodal with the mass at the edges.
    let p = got.probs();
    assert!(p[0] > p[10] && p[40] > p[30] && p[20] < 1e-6);
}

#[test]
fn distillation_matches_kraus_operator() {
    // Two-dimensional model: |A⟩ = (1, 0), |B⟩ = (c, s). With |B⊥⟩ = (s, -c)
    // and |A⊥⟩ = (0, 1) the Kraus operator A1 maps |A⟩ + g|B⟩ to g(|A⟩ + |B⟩).
    let cases = [(0.0, FRAC_1_SQRT_2), (0.0, 0.3), (0.2, 0.5), (0.4, 0.9)];
    for (c, g) in cases {
        let s = (1.0_f64 - c * c).sqrt();
        let ket_a = [1.0, 0.0];
        let ket_b = [c, s];
        let b_perp = [s, -c];
        let a_perp = [0.0, 1.0];
        let bp_a = b_perp[0] * ket_a[0] + b_perp[1] * ket_a[1];
        let ap_b = a_perp[0] * ket_b[0] + a_perp[1] * ket_b[1];
        let k = |i: usize, j: usize| g * ket_a[i] * b_perp[j] / bp_a + ket_b[i] * a_perp[j] / ap_b;
        let psi = [ket_a[0] + g * ket_b[0], ket_a[1] + g * ket_b[1]];
        let out = [
            k(0, 0) * psi[0] + k(0, 1) * psi[1],
            k(1, 0) * psi[0] + k(1, 1) * psi[1],
        ];
        let norm_in = psi[0] * psi[0] + psi[1] * psi[1];
        let want = (out[0] * out[0] + out[1] * out[1]) / norm_in;
        // For orthogonal branches A1 is a contraction, so the weight is a
        // genuine outcome probability. Otherwise it is the weight of A1 as
        // written.
        if c == 0.0 {
            let kt = nalgebra::Matrix2::new(k(0, 0), k(0, 1), k(1, 0), k(1, 1));
            assert!(kt.singular_values().max() <= 1.0 + 1e-12, "g {g}");
        }
        let got = distillation_probability(Complex64::new(c, 0.0), Complex64::new(g, 0.0)).unwrap();
        assert!((got - want).abs() < 1e-14, "c {c} g {g}: {got} vs {want}");
    }
    let p = distillation_probability(Complex64::new(0.0, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0))
        .unwrap();
    assert!((p - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn ghz_like_probability_matches_product_state_oracle() {
    let (eps_sq, n) = (0.3_f64, 5);
    // Single-particle states with |⟨a|b⟩|² = 1 - ε².
    let c = (1.0 - eps_sq).sqrt();
    let want = common::collective_helstrom(&vec![c; n], 0.5);
    assert!((ghz_like_probability(eps_sq, n).unwrap() - want).abs() < 1e-12);
}

#[test]
fn ghz_like_nmin_matches_scan() {
    let oracle = |eps: f64, delta: f64| {
        common::scan_nmin(delta, 10_000, |n| {
            0.5 * (1.0 + (1.0 - (1.0 - eps).powi(n as i32)).sqrt())
        })
        .unwrap()
    };
    assert_eq!(ghz_like_nmin(0.5, 0.01).unwrap(), oracle(0.5, 0.01));
    assert_eq!(ghz_like_nmin(0.1, 1e-4).unwrap(), oracle(0.1, 1e-4));
    // ε² chosen so the logarithm ratio is an exact integer: (1-ε²)^4 = 4δ - 4δ².
    let delta: f64 = 0.01;
    let eps = 1.0 - (4.0 * delta - 4.0 * delta * delta).powf(0.25);
    assert_eq!(ghz_like_nmin(eps, delta).unwrap(), oracle(eps, delta));
}

#[test]
fn finite_n_rdms_match_dense_partial_trace_examples() {
    for (t, s) in [(0.0, 0.0), (PI / 8.0, PI / 16.0)] {
        let r = rdm_finite_n(&spec(6, t, s), 2).unwrap();
        assert!(max_dev(&r.rho_full, &common::dense_rdm(6, 2, t, s, Branches::Both)) < 1e-8);
        assert!(max_dev(&r.rho_a, &common::dense_rdm(6, 2, t, s, Branches::A)) < 1e-8);
        assert!(max_dev(&r.rho_b, &common::dense_rdm(6, 2, t, s, Branches::B)) < 1e-8);
    }
}

#[test]
fn ghz_single_particle_closed_form_matches_finite_n() {
    let cf = rdm_closed_form(&GaussianSpread::delta(0.0).unwrap(), 1).unwrap();
    let fin = rdm_finite_n(&spec(100, 0.0, 0.0), 1).unwrap();
    assert!(cf.rho_a.max_abs_diff(&fin.rho_a).unwrap() < 1e-14);
    assert!(cf.rho_b.max_abs_diff(&fin.rho_b).unwrap() < 1e-14);
    assert!(cf.rho_full.max_abs_diff(&fin.rho_full).unwrap() < 1e-14);
}

#[test]
fn closed_form_approaches_finite_n() {
    // The deviation shrinks like 1/N; at N = 400 it is about 1.9e-3, so the
    // 1e-3 agreement is checked at N = 800.
    let spread = GaussianSpread::new(PI / 8.0, PI / 16.0).unwrap();
    let cf = rdm_closed_form(&spread, 4).unwrap();
    let dev = |big_n: usize| {
        let fin = rdm_finite_n(&SuperpositionSpec::new(big_n, spread).unwrap(), 4).unwrap();
        cf.rho_full.max_abs_diff(&fin.rho_full).unwrap()
    };
    let devs: Vec<f64> = [50, 100, 200, 400, 800].iter().map(|n| dev(*n)).collect();
    assert!(devs.windows(2).all(|w| w[1] < w[0]), "{devs:?}");
    assert!(devs[4] < 1e-3, "{devs:?}");
    assert!(devs[3] < 2e-3, "{devs:?}");
}

#[test]
fn fock_rdm_matches_dense_symmetrization() {
    let occ = FockOccupation::new(vec![2, 1]).unwrap();
    let want = common::dense_fock_pattern_probs(&[2, 1], 2);
    let pats = occ.patterns(2).unwrap();
    assert_eq!(pats.len(), want.len());
    for (p, prob) in &pats {
        let w = want.iter().find(|(q, _)| q == p).unwrap().1;
        assert!((prob - w).abs() < 1e-14, "{p:?}");
    }
    let m = fock_rdm(&occ, 2).unwrap();
    assert!((m.trace() - 1.0).abs() < 1e-14);
}

#[test]
fn fock_rdm_matches_sampling_frequencies() {
    let occ = FockOccupation::new(vec![3, 2, 1]).unwrap();
    let labels = [0, 0, 0, 1, 1, 2];
    let pats = occ.patterns(2).unwrap();
    let mut counts = vec![0usize; pats.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let samples = 1_000_000;
    for _ in 0..samples {
        let i = rng.random_range(0..6);
        let mut j = rng.random_range(0..5);
        if j >= i {
            j += 1;
        }
        let mut p = vec![0; 3];
        p[labels[i]] += 1;
        p[labels[j]] += 1;
        let slot = pats.iter().position(|(q, _)| *q == p).unwrap();
        counts[slot] += 1;
    }
    for ((_, prob), c) in pats.iter().zip(&counts) {
        assert!((*c as f64 / samples as f64 - prob).abs() < 1e-2);
    }
}

#[test]
fn fock_disconnectivity_three_modes() {
    let occ = FockOccupation::new(vec![2, 2, 1]).unwrap();
    let r = fock_disconnectivity(&occ, DEFAULT_THRESHOLD).unwrap();
    assert_eq!(r.d_value, 5);
    // Only β_1 and β_N vanish.
    for (n, b) in &r.betas {
        if *n == 1 || *n == 5 {
            assert!(b.abs() < 1e-12);
        } else {
            assert!(*b > 0.3, "beta_{n} = {b}");
        }
    }
}

#[test]
fn protocol_matches_collective_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let overlaps: Vec<f64> = (0..6).map(|_| rng.random::<f64>()).collect();
    let pair = ProductBranchPair::new(overlaps.clone(), 0.5).unwrap();
    let p = run_protocol(&pair).final_success_probability;
    let prod: f64 = overlaps.iter().map(|c| c * c).product();
    assert!((p - 0.5 * (1.0 + (1.0 - prod).sqrt())).abs() < 1e-12);
    assert!((p - common::collective_helstrom(&overlaps, 0.5)).abs() < 1e-10);
}

#[test]
fn simulation_matches_analytic_rate() {
    let pair = ProductBranchPair::new(vec![0.6, 0.7, 0.3], 0.4).unwrap();
    let p = run_protocol(&pair).final_success_probability;
    let trials = 1_000_000;
    let rate = simulate_protocol(&pair, BranchChoice::FromPrior, 99, trials).unwrap();
    let sd = (p * (1.0 - p) / trials as f64).sqrt();
    assert!((rate - p).abs() < 3.0 * sd, "{rate} vs {p}");

    let same = ProductBranchPair::new(vec![1.0; 4], 0.5).unwrap();
    let rate = simulate_protocol(&same, BranchChoice::FromPrior, 5, trials).unwrap();
    assert!((rate - 0.5).abs() < 3.0 * (0.25 / trials as f64).sqrt());
}

#[test]
fn success_probability_of_product_pair() {
    let spread = GaussianSpread::delta(0.3 * PI).unwrap();
    let cf = rdm_closed_form(&spread, 3).unwrap();
    // Per-particle overlap |⟨v|u⟩| = sin 2θ0.
    let c = (0.6 * PI).sin();
    let want = common::collective_helstrom(&[c; 3], 0.5);
    assert!((success_probability(&cf.rho_a, &cf.rho_b).unwrap() - want).abs() < 1e-12);
}

#[test]
fn finite_n_entropy_vanishes_for_whole_system() {
    for (t, s) in [(0.0, 0.0), (PI / 8.0, 0.05 * PI)] {
        let curve = entropy_curve(&spec(10, t, s), RdmMode::FiniteN, 10..=10).unwrap();
        assert!(curve.values[0].1.abs() < 1e-8);
    }
}
