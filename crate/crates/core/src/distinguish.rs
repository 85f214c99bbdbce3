//! Branch discrimination and the measurement-based cat size.

use crate::error::{Error, Result};
use crate::linalg::HermitianMatrix;
use crate::rdm::{branch_pair, closed_form_trace_distance, RdmMode};
use crate::state::{GaussianSpread, SuperpositionSpec};

/// Largest measured-particle count tried by default in closed-form scans.
pub const DEFAULT_CLOSED_FORM_N_MAX: usize = 100;

/// Optimal probability of telling `rho_a` from `rho_b` with equal priors,
/// `1/2 + ‖ρ_A - ρ_B‖₁ / 4`.
pub fn success_probability(rho_a: &HermitianMatrix, rho_b: &HermitianMatrix) -> Result<f64> {
    let diff = rho_a.try_sub(rho_b)?;
    let p = 0.5 + 0.25 * diff.trace_norm()?;
    Ok(p.clamp(0.5, 1.0))
}

/// `1 - success_probability`.
pub fn error_probability(rho_a: &HermitianMatrix, rho_b: &HermitianMatrix) -> Result<f64> {
    let diff = rho_a.try_sub(rho_b)?;
    Ok((0.5 - 0.25 * diff.trace_norm()?).clamp(0.0, 0.5))
}

/// Success probability between the closed-form branch RDMs of `n` particles.
pub fn closed_form_success_probability(spread: &GaussianSpread, n: usize) -> Result<f64> {
    Ok((0.5 + 0.25 * closed_form_trace_distance(spread, n)?).clamp(0.5, 1.0))
}

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::invalid(name, format!("{x} is outside [0, 1]")));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::invalid(
            "delta",
            format!("{delta} is outside (0, 1/2)"),
        ));
    }
    Ok(())
}

/// Success probability for branches that are n-fold products of
/// single-particle states with `|⟨a|b⟩|² = 1 - ε²`.
pub fn ghz_like_probability(epsilon_sq: f64, n: usize) -> Result<f64> {
    check_unit("epsilon_sq", epsilon_sq)?;
    let overlap = (1.0 - epsilon_sq).powi(n as i32);
    Ok(0.5 * (1.0 + (1.0 - overlap).sqrt()))
}

/// Smallest `n` with `ghz_like_probability(ε², n) ≥ 1 - δ`.
pub fn ghz_like_nmin(epsilon_sq: f64, delta: f64) -> Result<usize> {
    check_delta(delta)?;
    if !(epsilon_sq > 0.0 && epsilon_sq <= 1.0) {
        return Err(Error::invalid(
            "epsilon_sq",
            format!("{epsilon_sq} is outside (0, 1]"),
        ));
    }
    if epsilon_sq == 1.0 {
        return Ok(1);
    }
    let target = 4.0 * delta - 4.0 * delta * delta;
    let q = 1.0 - epsilon_sq;
    let reaches = |n: usize| q.powi(n as i32) <= target;
    let mut n = ((target.ln() / q.ln()).ceil().max(1.0)) as usize;
    // The logarithm ratio can land a hair off an integer; settle it exactly.
    while n > 1 && reaches(n - 1) {
        n -= 1;
    }
    while !reaches(n) {
        n += 1;
    }
    Ok(n)
}

/// Outcome of a cat-size search.
#[derive(Debug, Clone, PartialEq)]
pub struct CatSizeResult {
    pub delta: f64,
    /// Smallest number of measured particles reaching `1 - delta`, if any.
    pub n_min: Option<usize>,
    /// `N / n_min`, or zero when `n_min` is undefined.
    pub cat_size: f64,
    /// `1 / n_min`, or zero when `n_min` is undefined.
    pub relative_size: f64,
    /// Every `(n, P(n))` probed, in order.
    pub probability_trace: Vec<(usize, f64)>,
}

impl CatSizeResult {
    /// Error probability `1 - P` at the last probe.
    pub fn final_error_probability(&self) -> Option<f64> {
        self.probability_trace.last().map(|(_, p)| 1.0 - p)
    }
}

fn scan(
    delta: f64,
    n_max: usize,
    n_particles: f64,
    mut probe: impl FnMut(usize) -> Result<f64>,
) -> Result<CatSizeResult> {
    let mut trace = Vec::new();
    for n in 1..=n_max {
        let p = probe(n)?;
        trace.push((n, p));
        if p >= 1.0 - delta {
            return Ok(CatSizeResult {
                delta,
                n_min: Some(n),
                cat_size: n_particles / n as f64,
                relative_size: 1.0 / n as f64,
                probability_trace: trace,
            });
        }
    }
    Ok(CatSizeResult {
        delta,
        n_min: None,
        cat_size: 0.0,
        relative_size: 0.0,
        probability_trace: trace,
    })
}

/// Cat size `C_δ = N / n_min` by a linear scan over the number of measured
/// particles.
///
/// Closed-form mode scans `n = 1..=n_max`. Finite-N mode requires
/// `n_max ≤ N`.
pub fn cat_size(
    spec: &SuperpositionSpec,
    delta: f64,
    mode: RdmMode,
    n_max: usize,
) -> Result<CatSizeResult> {
    check_delta(delta)?;
    if n_max == 0 {
        return Err(Error::invalid("n_max", "must be at least 1"));
    }
    if mode == RdmMode::FiniteN && n_max > spec.n_particles() {
        return Err(Error::invalid(
            "n_max",
            format!("{n_max} exceeds the particle number {}", spec.n_particles()),
        ));
    }
    scan(delta, n_max, spec.n_particles() as f64, |n| match mode {
        RdmMode::ClosedForm => closed_form_success_probability(&spec.spread(), n),
        RdmMode::FiniteN => {
            let (a, b) = branch_pair(spec, n, mode)?;
            success_probability(&a, &b)
        }
    })
}

/// Closed-form scan without reference to a particle number: `cat_size`
/// in the result equals `relative_size = 1 / n_min`.
pub fn relative_cat_size(
    spread: &GaussianSpread,
    delta: f64,
    n_max: usize,
) -> Result<CatSizeResult> {
    let spec = SuperpositionSpec::new(n_max.max(1), *spread)?;
    let mut r = cat_size(&spec, delta, RdmMode::ClosedForm, n_max)?;
    r.cat_size = r.relative_size;
    Ok(r)
}
