//! The two-branch, two-mode bosonic superposition family.
//!
//! A state is an integral over the mixing angle `theta` of two GHZ-like
//! branches,
//!
//! ```text
//! |Psi> ∝ ∫ dθ f(θ) [ (cos θ a† + sin θ b†)^N + (sin θ a† + cos θ b†)^N ] |0>
//! ```
//!
//! with a Gaussian amplitude `f` of centre `theta0` and width `sigma`. The
//! integral runs over `[-π/2, π/2]`; the Gaussian tail outside that interval
//! is dropped. `sigma = 0` is a point mass and is evaluated exactly.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::combinatorics::{binomial_term, LnFactorials};
use crate::error::{Error, Result};
use crate::quadrature::{self, Panels, Rule, RELATIVE_TOLERANCE};

/// Slack allowed when checking `theta0` against `±π/2`, so that values
/// written as `0.5pi` survive rounding.
const ANGLE_SLACK: f64 = 1e-12;

/// Core of the spread, in units of `sigma`, that is split into fine panels.
/// The amplitude has fallen below 1e-21 of its peak at the edge.
const CORE_HALF_WIDTH: f64 = 14.0;

/// Gaussian amplitude spreading function `f(θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpread {
    theta0: f64,
    sigma: f64,
}

impl GaussianSpread {
    pub fn new(theta0: f64, sigma: f64) -> Result<Self> {
        if !theta0.is_finite() || theta0.abs() > FRAC_PI_2 + ANGLE_SLACK {
            return Err(Error::invalid(
                "theta0",
                format!("{theta0} is outside [-pi/2, pi/2]"),
            ));
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::invalid(
                "sigma",
                format!("{sigma} must be finite and >= 0"),
            ));
        }
        Ok(GaussianSpread {
            theta0: theta0.clamp(-FRAC_PI_2, FRAC_PI_2),
            sigma,
        })
    }

    /// Point mass at `theta0`.
    pub fn delta(theta0: f64) -> Result<Self> {
        Self::new(theta0, 0.0)
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn is_delta(&self) -> bool {
        self.sigma == 0.0
    }

    /// `f(θ) = (2πσ²)^{-1/4} exp(-(θ-θ0)²/4σ²)`; only meaningful for `σ > 0`.
    pub fn amplitude(&self, theta: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        (2.0 * PI * s2).powf(-0.25) * (-(theta - self.theta0).powi(2) / (4.0 * s2)).exp()
    }

    /// Initial panels on `[-π/2, π/2]`: fine panels of width at most
    /// `resolution` over the core of the Gaussian and single panels over the
    /// negligible tails.
    pub(crate) fn panels(&self, resolution: f64) -> Result<Panels> {
        let lo = (self.theta0 - CORE_HALF_WIDTH * self.sigma).max(-FRAC_PI_2);
        let hi = (self.theta0 + CORE_HALF_WIDTH * self.sigma).min(FRAC_PI_2);
        let width = resolution.min(2.0 * self.sigma).min(PI / 8.0);
        let count = ((hi - lo) / width).ceil().max(1.0) as usize;
        let h = (hi - lo) / count as f64;
        let mut edges = vec![-FRAC_PI_2, FRAC_PI_2];
        edges.extend((0..=count).map(|i| lo + h * i as f64));
        Panels::from_edges(edges)
    }

    /// Nodes and amplitude-weighted quadrature weights `w_i f(x_i)`.
    pub(crate) fn weighted(&self, rule: &Rule) -> Rule {
        Rule {
            nodes: rule.nodes.clone(),
            weights: rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| w * self.amplitude(*x))
                .collect(),
        }
    }

    /// Runs `eval` on a weighted rule, exactly for a delta spread and with
    /// panel refinement to convergence otherwise.
    pub(crate) fn converge<T>(
        &self,
        resolution: f64,
        mut eval: impl FnMut(&Rule) -> Result<T>,
        change: impl Fn(&T, &T) -> f64,
    ) -> Result<T> {
        if self.is_delta() {
            return eval(&Rule::point_mass(self.theta0));
        }
        let panels = self.panels(resolution)?;
        quadrature::converge_on_panels(
            panels,
            RELATIVE_TOLERANCE,
            |r| eval(&self.weighted(r)),
            change,
        )
    }
}

/// Particle number plus spread: one member of the superposition family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionSpec {
    n_particles: usize,
    spread: GaussianSpread,
}

impl SuperpositionSpec {
    pub fn new(n_particles: usize, spread: GaussianSpread) -> Result<Self> {
        if n_particles == 0 {
            return Err(Error::invalid("n_particles", "N must be at least 1"));
        }
        Ok(SuperpositionSpec {
            n_particles,
            spread,
        })
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn spread(&self) -> GaussianSpread {
        self.spread
    }
}

/// Probability of finding `k` particles in mode `a`, `k = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberDistribution {
    probs: Vec<f64>,
}

impl NumberDistribution {
    /// Tolerance on the total probability for [`NumberDistribution::new`].
    pub const SUM_TOLERANCE: f64 = 1e-10;

    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::renormalized(probs, Self::SUM_TOLERANCE)
    }

    /// Accepts `probs` if it sums to one within `tolerance` and rescales it to
    /// an exact unit sum.
    pub fn renormalized(probs: Vec<f64>, tolerance: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("probs", "distribution is empty"));
        }
        if let Some((k, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::invalid(
                "probs",
                format!("entry {k} = {p} is not a probability"),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tolerance {
            return Err(Error::Domain(format!(
                "distribution sums to {total}, outside 1 ± {tolerance:e}"
            )));
        }
        Ok(NumberDistribution {
            probs: probs.into_iter().map(|p| p / total).collect(),
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Particle number `N` (the vector has `N + 1` entries).
    pub fn n_particles(&self) -> usize {
        self.probs.len() - 1
    }

    /// The distribution with `k ↔ N - k` exchanged.
    pub fn reflected(&self) -> Self {
        NumberDistribution {
            probs: self.probs.iter().rev().copied().collect(),
        }
    }

    /// Sum of squared differences against another distribution of equal length.
    pub fn squared_distance(&self, other: &Self) -> Result<f64> {
        if self.probs.len() != other.probs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.probs.len(),
                found: other.probs.len(),
            });
        }
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b) * (a - b))
            .sum())
    }
}

/// Panel width that resolves `cos^m` kernels and `e^{i n θ}` phases.
pub(crate) fn kernel_resolution(kernel_power: usize, phase_order: usize) -> f64 {
    let kernel = 1.0 / ((kernel_power + 1) as f64).sqrt();
    let phase = 2.0 * PI / (phase_order + 1) as f64;
    kernel.min(phase)
}

/// Branch Gram sums `(⟨A|A⟩, ⟨A|B⟩)` for unnormalized branches; `⟨B|B⟩`
/// equals `⟨A|A⟩` because both carry the `cos^N(θ-θ')` kernel.
fn branch_gram(spec: &SuperpositionSpec) -> Result<(Complex64, Complex64)> {
    let n = spec.n_particles as i32;
    let eval = |rule: &Rule| -> Result<(Complex64, Complex64)> {
        let mut aa = 0.0;
        let mut ab = 0.0;
        for (xi, wi) in rule.nodes.iter().zip(&rule.weights) {
            for (xj, wj) in rule.nodes.iter().zip(&rule.weights) {
                let w = wi * wj;
                aa += w * (xi - xj).cos().powi(n);
                ab += w * (xi + xj).sin().powi(n);
            }
        }
        Ok((Complex64::new(aa, 0.0), Complex64::new(ab, 0.0)))
    };
    let change = |a: &(Complex64, Complex64), b: &(Complex64, Complex64)| {
        ((a.0 - b.0).norm() + (a.1 - b.1).norm()) / b.0.norm()
    };
    spec.spread
        .converge(kernel_resolution(spec.n_particles, 0), eval, change)
}

/// Normalized branch overlap `⟨Ψ_A|Ψ_B⟩ / (‖Ψ_A‖ ‖Ψ_B‖)`.
pub fn branch_overlap(spec: &SuperpositionSpec) -> Result<Complex64> {
    let (aa, ab) = branch_gram(spec)?;
    Ok(ab / aa)
}

/// `P(k) = |⟨k, N-k|Ψ⟩|²` for the normalized full state.
pub fn number_distribution(spec: &SuperpositionSpec) -> Result<NumberDistribution> {
    let n = spec.n_particles;
    let lf = LnFactorials::up_to(n);
    let spread = spec.spread;
    let half_ln_binom: Vec<f64> = (0..=n).map(|k| 0.5 * lf.ln_binomial(n, k)).collect();
    let integrand = |theta: f64, out: &mut [Complex64]| {
        let (s, c) = theta.sin_cos();
        if s == 0.0 || c == 0.0 {
            for (k, o) in out.iter_mut().enumerate() {
                let v = binomial_term(&lf, n, k, c, s) + binomial_term(&lf, n, k, s, c);
                *o = Complex64::new(v, 0.0);
            }
            return;
        }
        let (lc, ls) = (c.abs().ln(), s.abs().ln());
        // Signs of c^k s^(N-k) and s^k c^(N-k).
        let sign = |x: f64, p: usize| if x < 0.0 && p % 2 == 1 { -1.0 } else { 1.0 };
        for (k, o) in out.iter_mut().enumerate() {
            let m = n - k;
            let first =
                sign(c, k) * sign(s, m) * (half_ln_binom[k] + k as f64 * lc + m as f64 * ls).exp();
            let second =
                sign(s, k) * sign(c, m) * (half_ln_binom[k] + k as f64 * ls + m as f64 * lc).exp();
            *o = Complex64::new(first + second, 0.0);
        }
    };
    let amplitudes: Vec<Complex64> = if spread.is_delta() {
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        integrand(spread.theta0, &mut out);
        out
    } else {
        let panels = spread.panels(kernel_resolution(n, n))?;
        quadrature::integrate_adaptive(
            |t, out| {
                integrand(t, out);
                let f = spread.amplitude(t);
                out.iter_mut().for_each(|z| *z *= f);
            },
            n + 1,
            &panels,
            RELATIVE_TOLERANCE,
        )?
    };
    let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    if !(norm > 0.0) {
        return Err(Error::Domain("state has zero norm".into()));
    }
    NumberDistribution::new(amplitudes.iter().map(|z| z.norm_sqr() / norm).collect())
}

/// Probability of distilling `|A⟩ + g|B⟩` into the balanced superposition.
///
/// `overlap` is `⟨A|B⟩` for unit-norm branches. The effective cat size of an
/// unbalanced state is this probability times `C_δ` of the balanced one.
///
/// The value is `‖A₁ψ‖²` for the Kraus operator
/// `A₁ = g|A⟩⟨B⊥|/⟨B⊥|A⟩ + |B⟩⟨A⊥|/⟨A⊥|B⟩`, which is a contraction only for
/// orthogonal branches; for overlapping branches it is the weight of that
/// operator as written.
pub fn distillation_probability(overlap: Complex64, g: Complex64) -> Result<f64> {
    if !(g.norm() <= 1.0 + 1e-12) {
        return Err(Error::invalid("g", format!("|g| = {} exceeds 1", g.norm())));
    }
    if !(overlap.norm() <= 1.0 + 1e-12) {
        return Err(Error::invalid(
            "overlap",
            format!("|<A|B>| = {} exceeds 1", overlap.norm()),
        ));
    }
    let numerator = (2.0 + overlap + overlap.conj()) * g.norm_sqr();
    let denominator = 1.0 + overlap * g + overlap.conj() * g.conj() + g.norm_sqr();
    if denominator.norm() < 1e-14 {
        return Err(Error::Domain(format!(
            "distillation denominator {denominator} vanishes for overlap {overlap}, g {g}"
        )));
    }
    let p = numerator / denominator;
    if p.im.abs() > 1e-10 {
        return Err(Error::Domain(format!(
            "distillation probability {p} is not real"
        )));
    }
    if p.re > 1.0 + 1e-12 {
        return Err(Error::Domain(format!(
            "distillation operator is not contractive for overlap {overlap}, g {g} (p = {})",
            p.re
        )));
    }
    Ok(p.re.clamp(0.0, 1.0))
}
