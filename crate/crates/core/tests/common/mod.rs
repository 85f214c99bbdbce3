//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Which branches of the superposition to keep.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Branches {
    A,
    B,
    Both,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Fock amplitudes `⟨k, N-k|Ψ⟩` (unnormalized), `k` = quanta in mode a,
/// by composite Simpson integration on `[-π/2, π/2]`.
pub fn fock_amplitudes(big_n: usize, theta0: f64, sigma: f64, which: Branches) -> Vec<f64> {
    let term = |theta: f64, k: usize| {
        let (s, c) = theta.sin_cos();
        let a = c.powi(k as i32) * s.powi((big_n - k) as i32);
        let b = s.powi(k as i32) * c.powi((big_n - k) as i32);
        binomial(big_n, k).sqrt()
            * match which {
                Branches::A => a,
                Branches::B => b,
                Branches::Both => a + b,
            }
    };
    if sigma == 0.0 {
        return (0..=big_n).map(|k| term(theta0, k)).collect();
    }
    let f = |t: f64| (-(t - theta0).powi(2) / (4.0 * sigma * sigma)).exp();
    let intervals = 20_000;
    let h = PI / intervals as f64;
    let mut out = vec![0.0; big_n + 1];
    for i in 0..=intervals {
        let t = -FRAC_PI_2 + h * i as f64;
        let w = if i == 0 || i == intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let ft = f(t);
        for (k, o) in out.iter_mut().enumerate() {
            *o += w * ft * term(t, k);
        }
    }
    out.iter().map(|x| x * h / 3.0).collect()
}

pub fn normalized_probabilities(amps: &[f64]) -> Vec<f64> {
    let norm: f64 = amps.iter().map(|a| a * a).sum();
    amps.iter().map(|a| a * a / norm).collect()
}

/// First-quantized symmetric state over `2^N` basis strings; bit `j` of the
/// index is particle `j`, 0 = mode a, 1 = mode b.
pub fn first_quantized(amps: &[f64]) -> Vec<Complex64> {
    let big_n = amps.len() - 1;
    (0..1usize << big_n)
        .map(|idx| {
            let in_b = idx.count_ones() as usize;
            let k = big_n - in_b;
            Complex64::new(amps[k] / binomial(big_n, k).sqrt(), 0.0)
        })
        .collect()
}

/// Rotates every particle to the c/d basis, `c† = (a† - i b†)/√2`,
/// `d† = (b† - i a†)/√2`; afterwards bit 0 = c, 1 = d.
pub fn to_cd_basis(psi: &mut [Complex64], big_n: usize) {
    let i = Complex64::i();
    for j in 0..big_n {
        let bit = 1usize << j;
        for idx in 0..psi.len() {
            if idx & bit == 0 {
                let (pa, pb) = (psi[idx], psi[idx | bit]);
                psi[idx] = (pa + i * pb) * FRAC_1_SQRT_2;
                psi[idx | bit] = (i * pa + pb) * FRAC_1_SQRT_2;
            }
        }
    }
}

/// Literal partial trace over particles `n..N`, leaving a `2^n × 2^n` matrix.
pub fn partial_trace(psi: &[Complex64], big_n: usize, n: usize) -> Vec<Vec<Complex64>> {
    let d = 1usize << n;
    let rest = 1usize << (big_n - n);
    let mut rho = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for (i, row) in rho.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            for r in 0..rest {
                *x += psi[i + (r << n)] * psi[j + (r << n)].conj();
            }
        }
    }
    rho
}

/// Projects onto Dicke states indexed by the number of c quanta, then
/// normalizes and transposes to the c-count coefficient convention.
pub fn dicke_project(rho: &[Vec<Complex64>], n: usize) -> Vec<Vec<Complex64>> {
    let count_c = |idx: usize| n - idx.count_ones() as usize;
    let mut sym = vec![vec![Complex64::new(0.0, 0.0); n + 1]; n + 1];
    for (i, row) in rho.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let (k, l) = (count_c(i), count_c(j));
            sym[k][l] += x / (binomial(n, k) * binomial(n, l)).sqrt();
        }
    }
    let trace: f64 = (0..=n).map(|k| sym[k][k].re).sum();
    (0..=n)
        .map(|k| (0..=n).map(|l| sym[l][k] / trace).collect())
        .collect()
}

/// Symmetrized n-RDM of the chosen branches by brute force.
pub fn dense_rdm(
    big_n: usize,
    n: usize,
    theta0: f64,
    sigma: f64,
    which: Branches,
) -> Vec<Vec<Complex64>> {
    let amps = fock_amplitudes(big_n, theta0, sigma, which);
    let mut psi = first_quantized(&amps);
    to_cd_basis(&mut psi, big_n);
    dicke_project(&partial_trace(&psi, big_n, n), n)
}

/// Diagonal n-RDM of a multi-mode Fock state by brute force: the
/// symmetrized first-quantized state over `d^N` strings is reduced to its
/// first `n` particles and summed over strings with a given pattern.
pub fn dense_fock_pattern_probs(occ: &[usize], n: usize) -> Vec<(Vec<usize>, f64)> {
    let d = occ.len();
    let big_n: usize = occ.iter().sum();
    let total = d.pow(big_n as u32);
    let digits = |mut idx: usize| {
        let mut v = Vec::with_capacity(big_n);
        for _ in 0..big_n {
            v.push(idx % d);
            idx /= d;
        }
        v
    };
    let pattern = |modes: &[usize]| {
        let mut p = vec![0; d];
        modes.iter().for_each(|m| p[*m] += 1);
        p
    };
    // Equal amplitude on every string with the right occupations.
    let support: Vec<Vec<usize>> = (0..total)
        .map(digits)
        .filter(|s| pattern(s) == occ)
        .collect();
    let weight = 1.0 / support.len() as f64;
    let mut probs: Vec<(Vec<usize>, f64)> = Vec::new();
    for s in &support {
        let p = pattern(&s[..n]);
        match probs.iter_mut().find(|(q, _)| *q == p) {
            Some(entry) => entry.1 += weight,
            None => probs.push((p, weight)),
        }
    }
    probs
}

/// Trace norm of a real symmetric matrix via nalgebra's eigensolver.
pub fn real_trace_norm(m: DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m)
        .eigenvalues
        .iter()
        .map(|x| x.abs())
        .sum()
}

/// Collective Helstrom bound for product states `⊗(cos t_k, ±sin t_k)` with
/// `cos 2t_k = c_k` and prior `q_a` on the `+` branch.
pub fn collective_helstrom(overlaps: &[f64], q_a: f64) -> f64 {
    let mut a = vec![1.0];
    let mut b = vec![1.0];
    for c in overlaps {
        let t = 0.5 * c.acos();
        let (x, y) = (t.cos(), t.sin());
        a = a.iter().flat_map(|v| [v * x, v * y]).collect();
        b = b.iter().flat_map(|v| [v * x, -v * y]).collect();
    }
    let dim = a.len();
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        q_a * a[i] * a[j] - (1.0 - q_a) * b[i] * b[j]
    });
    0.5 + 0.5 * real_trace_norm(m)
}

/// Smallest `n` in `1..=limit` with `p(n) ≥ 1 - δ`.
pub fn scan_nmin(delta: f64, limit: usize, p: impl Fn(usize) -> f64) -> Option<usize> {
    (1..=limit).find(|&n| p(n) >= 1.0 - delta)
}

/// Single-qubit direction with per-particle branch overlap `sin 2θ0`, as in
/// the σ = 0 two-mode state.
pub fn theta_for_epsilon_sq(epsilon_sq: f64) -> f64 {
    0.5 * (1.0 - epsilon_sq).sqrt().asin()
}
