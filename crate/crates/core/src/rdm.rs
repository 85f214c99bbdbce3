//! Symmetrized n-particle reduced density matrices.
//!
//! Matrices live in the rotated single-particle basis
//! `c† = (a† - i b†)/√2`, `d† = (b† - i a†)/√2`. Row and column index `k`
//! counts c-mode quanta among the `n` measured particles; entry `(k, l)` is
//! the coefficient of `c†^k d†^(n-k) |0⟩⟨0| c^l d^(n-l)`, which is the
//! complex conjugate of the usual `⟨k|ρ|l⟩`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, SQRT_2};

use num_complex::Complex64;

use crate::combinatorics::LnFactorials;
use crate::error::{Error, Result};
use crate::linalg::{singular_values, HermitianMatrix};
use crate::quadrature::Rule;
use crate::state::{kernel_resolution, GaussianSpread, SuperpositionSpec};

/// Tolerance within which `theta0 = ∓π/4` switches on `E_±` for a delta spread.
const DELTA_MATCH_TOLERANCE: f64 = 1e-12;

/// Full-state trace below which the superposition is treated as vanishing.
const VANISHING_TRACE: f64 = 1e-14;

/// Branch RDMs and the RDM of the full superposition, all at unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchRdms {
    pub n: usize,
    pub rho_a: HermitianMatrix,
    pub rho_b: HermitianMatrix,
    pub rho_full: HermitianMatrix,
}

/// How the RDMs are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RdmMode {
    /// Large-N limit; independent of the particle number.
    #[default]
    ClosedForm,
    /// Exact kernels at the given particle number, by quadrature.
    FiniteN,
}

/// RDMs of `spec` in the requested mode.
pub fn branch_rdms(spec: &SuperpositionSpec, n: usize, mode: RdmMode) -> Result<BranchRdms> {
    match mode {
        RdmMode::ClosedForm => rdm_closed_form(&spec.spread(), n),
        RdmMode::FiniteN => rdm_finite_n(spec, n),
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid(
            "n",
            "at least one particle must be measured",
        ));
    }
    Ok(())
}

/// `(E_-, E_+)` with `E_± = exp(-(θ0 ± π/4)² / 2σ²)`.
pub fn overlap_weights(spread: &GaussianSpread) -> (f64, f64) {
    let t = spread.theta0();
    if spread.is_delta() {
        let hit = |x: f64| {
            if x.abs() <= DELTA_MATCH_TOLERANCE {
                1.0
            } else {
                0.0
            }
        };
        (hit(t - FRAC_PI_4), hit(t + FRAC_PI_4))
    } else {
        let s2 = 2.0 * spread.sigma() * spread.sigma();
        (
            (-(t - FRAC_PI_4).powi(2) / s2).exp(),
            (-(t + FRAC_PI_4).powi(2) / s2).exp(),
        )
    }
}

/// Closed-form `ρ_A` entries, row-major; `ρ_B` is their complex conjugate.
fn closed_form_branch(spread: &GaussianSpread, n: usize, lf: &LnFactorials) -> Vec<Complex64> {
    let dim = n + 1;
    let sigma2 = spread.sigma() * spread.sigma();
    let mut a = Vec::with_capacity(dim * dim);
    for k in 0..dim {
        for l in 0..dim {
            let d = k as i64 - l as i64;
            let mag = (0.5 * (lf.ln_binomial(n, k) + lf.ln_binomial(n, l))
                - n as f64 * LN_2
                - 2.0 * (d * d) as f64 * sigma2)
                .exp();
            let i_pow = Complex64::i().powi(d.rem_euclid(4) as i32);
            a.push(i_pow * Complex64::from_polar(mag, -2.0 * d as f64 * spread.theta0()));
        }
    }
    a
}

/// `‖ρ_A - ρ_B‖₁` between the closed-form branch RDMs.
///
/// The difference is `2iK` with `K_kl = |ρ_A|_kl sin((k-l)(π/2 - 2θ0))` real
/// antisymmetric and odd under `k -> n-k`. In the even/odd basis of that
/// reflection `K` only couples the two halves through a block `B`, and the
/// trace norm is `4 Σ sv(B)`.
pub(crate) fn closed_form_trace_distance(spread: &GaussianSpread, n: usize) -> Result<f64> {
    check_n(n)?;
    let lf = LnFactorials::up_to(n);
    let sigma2 = spread.sigma() * spread.sigma();
    let phi = FRAC_PI_2 - 2.0 * spread.theta0();
    let k_entry = |k: usize, l: usize| {
        let d = k as f64 - l as f64;
        let mag = (0.5 * (lf.ln_binomial(n, k) + lf.ln_binomial(n, l))
            - n as f64 * LN_2
            - 2.0 * d * d * sigma2)
            .exp();
        mag * (d * phi).sin()
    };
    let odd: Vec<usize> = (0..=n).filter(|k| 2 * k < n).collect();
    let columns = (0..=n)
        .filter(|k| 2 * k <= n)
        .map(|kb| {
            odd.iter()
                .map(|&ka| {
                    if 2 * kb == n {
                        SQRT_2 * k_entry(ka, kb)
                    } else {
                        k_entry(ka, kb) + k_entry(ka, n - kb)
                    }
                })
                .collect()
        })
        .collect();
    Ok(4.0 * singular_values(columns)?.iter().sum::<f64>())
}

/// Large-N closed form of the branch and full-state RDMs.
pub fn rdm_closed_form(spread: &GaussianSpread, n: usize) -> Result<BranchRdms> {
    check_n(n)?;
    let dim = n + 1;
    let lf = LnFactorials::up_to(n);
    let (e_minus, e_plus) = overlap_weights(spread);
    let parity = |m: i64| if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };

    let a = closed_form_branch(spread, n, &lf);
    let b: Vec<Complex64> = a.iter().map(|z| z.conj()).collect();
    let trace = 2.0 + 2.0 * (e_minus + parity(n as i64) * e_plus);
    if trace < VANISHING_TRACE {
        return Err(Error::Domain(format!(
            "full state vanishes at theta0 = {} for n = {n} (trace {trace})",
            spread.theta0()
        )));
    }
    let mut full = Vec::with_capacity(dim * dim);
    for k in 0..dim {
        for l in 0..dim {
            let i = k * dim + l;
            // |ρ_A| entries double as the magnitude of the cross term.
            let d = k as i64 - l as i64;
            let cross = 2.0 * a[i].norm() * (e_minus + parity(n as i64 + d) * e_plus);
            full.push((a[i] + b[i] + cross) / trace);
        }
    }
    Ok(BranchRdms {
        n,
        rho_a: HermitianMatrix::from_row_major(dim, a)?,
        rho_b: HermitianMatrix::from_row_major(dim, b)?,
        rho_full: HermitianMatrix::from_row_major(dim, full)?,
    })
}

/// Single-particle amplitudes of branch A or B in the c/d basis, expanded to
/// the symmetric n-particle space and weighted by the quadrature weights.
/// Row-major `(n + 1) × nodes`.
fn dicke_factors(rule: &Rule, n: usize, lf: &LnFactorials, branch_b: bool) -> Vec<Complex64> {
    let m = rule.len();
    let mut out = vec![Complex64::new(0.0, 0.0); (n + 1) * m];
    for k in 0..=n {
        let pref = (0.5 * lf.ln_binomial(n, k) - 0.5 * n as f64 * LN_2).exp();
        let (kc, kd) = if branch_b { (n - k, k) } else { (k, n - k) };
        for (i, (x, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
            // u_c = e^{iθ}/√2, u_d = i e^{-iθ}/√2; branch B swaps the roles.
            let phase = kc as f64 * x + kd as f64 * (FRAC_PI_2 - x);
            out[k * m + i] = Complex64::from_polar(pref * w, phase);
        }
    }
    out
}

/// `X K Y†` for factor matrices `X`, `Y` of shape `dim × m` and a real
/// symmetric `m × m` kernel.
fn sandwich(
    x: &[Complex64],
    kernel: &[f64],
    y: &[Complex64],
    dim: usize,
    m: usize,
) -> Vec<Complex64> {
    let mut xk = vec![Complex64::new(0.0, 0.0); dim * m];
    for k in 0..dim {
        let row = &x[k * m..(k + 1) * m];
        let out = &mut xk[k * m..(k + 1) * m];
        for (i, xi) in row.iter().enumerate() {
            let krow = &kernel[i * m..(i + 1) * m];
            for (o, kij) in out.iter_mut().zip(krow) {
                *o += xi * kij;
            }
        }
    }
    let mut r = vec![Complex64::new(0.0, 0.0); dim * dim];
    for k in 0..dim {
        let a = &xk[k * m..(k + 1) * m];
        for l in 0..dim {
            let b = &y[l * m..(l + 1) * m];
            r[k * dim + l] = a.iter().zip(b).map(|(p, q)| p * q.conj()).sum();
        }
    }
    r
}

/// Unit-trace matrix in the c-count convention from a raw `⟨k|ρ|l⟩` array.
fn to_convention(dim: usize, raw: Vec<Complex64>) -> Result<HermitianMatrix> {
    let trace: f64 = (0..dim).map(|k| raw[k * dim + k].re).sum();
    let scale: f64 = raw.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(trace > VANISHING_TRACE * scale) {
        return Err(Error::Domain(format!(
            "reduced state has vanishing trace {trace}"
        )));
    }
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for k in 0..dim {
        for l in 0..dim {
            entries[l * dim + k] = raw[k * dim + l] / trace;
        }
    }
    HermitianMatrix::from_row_major(dim, entries)
}

fn finite_n_on_rule(rule: &Rule, big_n: usize, n: usize, lf: &LnFactorials) -> Result<BranchRdms> {
    let m = rule.len();
    let dim = n + 1;
    let rest = (big_n - n) as i32;
    let xa = dicke_factors(rule, n, lf, false);
    let xb = dicke_factors(rule, n, lf, true);
    let kc = cos_kernel(rule, rest);
    let mut ks = vec![0.0; m * m];
    for (i, xi) in rule.nodes.iter().enumerate() {
        for (j, xj) in rule.nodes.iter().enumerate() {
            ks[i * m + j] = (xi + xj).sin().powi(rest);
        }
    }
    let aa = sandwich(&xa, &kc, &xa, dim, m);
    let bb = sandwich(&xb, &kc, &xb, dim, m);
    let ab = sandwich(&xa, &ks, &xb, dim, m);
    let mut full = vec![Complex64::new(0.0, 0.0); dim * dim];
    for k in 0..dim {
        for l in 0..dim {
            full[k * dim + l] =
                aa[k * dim + l] + bb[k * dim + l] + ab[k * dim + l] + ab[l * dim + k].conj();
        }
    }
    Ok(BranchRdms {
        n,
        rho_a: to_convention(dim, aa)?,
        rho_b: to_convention(dim, bb)?,
        rho_full: to_convention(dim, full)?,
    })
}

/// Exact RDMs at particle number `N` by 2-D quadrature over the spread.
pub fn rdm_finite_n(spec: &SuperpositionSpec, n: usize) -> Result<BranchRdms> {
    check_n(n)?;
    let big_n = spec.n_particles();
    if n > big_n {
        return Err(Error::invalid(
            "n",
            format!("{n} exceeds the particle number {big_n}"),
        ));
    }
    let lf = LnFactorials::up_to(n);
    let change = |a: &BranchRdms, b: &BranchRdms| -> f64 {
        [
            (&a.rho_a, &b.rho_a),
            (&a.rho_b, &b.rho_b),
            (&a.rho_full, &b.rho_full),
        ]
        .iter()
        .map(|(x, y)| x.max_abs_diff(y).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max)
    };
    spec.spread().converge(
        kernel_resolution(big_n - n, n),
        |rule| finite_n_on_rule(rule, big_n, n, &lf),
        change,
    )
}

/// Branch RDMs `(ρ_A, ρ_B)` alone, without the full-state matrix.
///
/// Discrimination needs only these, and they stay well defined where the
/// full superposition vanishes.
pub fn branch_pair(
    spec: &SuperpositionSpec,
    n: usize,
    mode: RdmMode,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    check_n(n)?;
    match mode {
        RdmMode::ClosedForm => {
            let lf = LnFactorials::up_to(n);
            let dim = n + 1;
            let a = closed_form_branch(&spec.spread(), n, &lf);
            let b = a.iter().map(|z| z.conj()).collect();
            Ok((
                HermitianMatrix::from_row_major(dim, a)?,
                HermitianMatrix::from_row_major(dim, b)?,
            ))
        }
        RdmMode::FiniteN => {
            let big_n = spec.n_particles();
            if n > big_n {
                return Err(Error::invalid(
                    "n",
                    format!("{n} exceeds the particle number {big_n}"),
                ));
            }
            let lf = LnFactorials::up_to(n);
            let dim = n + 1;
            let eval = |rule: &Rule| -> Result<(HermitianMatrix, HermitianMatrix)> {
                let m = rule.len();
                let rest = (big_n - n) as i32;
                let kc = cos_kernel(rule, rest);
                let xa = dicke_factors(rule, n, &lf, false);
                let xb = dicke_factors(rule, n, &lf, true);
                Ok((
                    to_convention(dim, sandwich(&xa, &kc, &xa, dim, m))?,
                    to_convention(dim, sandwich(&xb, &kc, &xb, dim, m))?,
                ))
            };
            let change = |p: &(HermitianMatrix, HermitianMatrix),
                          q: &(HermitianMatrix, HermitianMatrix)| {
                let a = p.0.max_abs_diff(&q.0).unwrap_or(f64::INFINITY);
                let b = p.1.max_abs_diff(&q.1).unwrap_or(f64::INFINITY);
                a.max(b)
            };
            spec.spread()
                .converge(kernel_resolution(big_n - n, n), eval, change)
        }
    }
}

fn cos_kernel(rule: &Rule, power: i32) -> Vec<f64> {
    let m = rule.len();
    let mut k = vec![0.0; m * m];
    for (i, xi) in rule.nodes.iter().enumerate() {
        for (j, xj) in rule.nodes.iter().enumerate() {
            k[i * m + j] = (xi - xj).cos().powi(power);
        }
    }
    k
}

/// Occupation numbers of a multi-mode Fock state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockOccupation {
    counts: Vec<usize>,
}

impl FockOccupation {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::invalid("counts", "at least one mode is required"));
        }
        if counts.iter().sum::<usize>() == 0 {
            return Err(Error::invalid("counts", "state holds no particles"));
        }
        Ok(FockOccupation { counts })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn n_particles(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Reachable `n`-particle occupation patterns `p` with `p_k ≤ n_k` and
    /// their probabilities `∏ C(n_k, p_k) / C(N, n)`.
    pub fn patterns(&self, n: usize) -> Result<Vec<(Vec<usize>, f64)>> {
        check_n(n)?;
        let big_n = self.n_particles();
        if n > big_n {
            return Err(Error::invalid(
                "n",
                format!("{n} exceeds the particle number {big_n}"),
            ));
        }
        let lf = LnFactorials::up_to(big_n);
        let norm = lf.ln_binomial(big_n, n);
        let mut out = Vec::new();
        let mut p = vec![0; self.counts.len()];
        self.fill(0, n, &mut p, &lf, norm, &mut out);
        Ok(out)
    }

    fn fill(
        &self,
        mode: usize,
        left: usize,
        p: &mut Vec<usize>,
        lf: &LnFactorials,
        norm: f64,
        out: &mut Vec<(Vec<usize>, f64)>,
    ) {
        if mode + 1 == self.counts.len() {
            if left <= self.counts[mode] {
                p[mode] = left;
                let ln: f64 = self
                    .counts
                    .iter()
                    .zip(p.iter())
                    .map(|(nk, pk)| lf.ln_binomial(*nk, *pk))
                    .sum();
                out.push((p.clone(), (ln - norm).exp()));
            }
            return;
        }
        let tail: usize = self.counts[mode + 1..].iter().sum();
        let lo = left.saturating_sub(tail);
        for pk in lo..=left.min(self.counts[mode]) {
            p[mode] = pk;
            self.fill(mode + 1, left - pk, p, lf, norm, out);
        }
    }
}

/// Diagonal n-RDM of a Fock state over its reachable occupation patterns, in
/// the order returned by [`FockOccupation::patterns`].
pub fn fock_rdm(occ: &FockOccupation, n: usize) -> Result<HermitianMatrix> {
    let probs: Vec<f64> = occ.patterns(n)?.into_iter().map(|(_, p)| p).collect();
    HermitianMatrix::diagonal(&probs)
}
