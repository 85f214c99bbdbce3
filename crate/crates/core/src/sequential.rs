//! Sequential single-particle discrimination with Bayesian updating.
//!
//! Particle `k` of branch A or B is `cos θ_k |x_k⟩ ± sin θ_k |y_k⟩`, so the
//! per-particle overlap is `c_k = cos 2θ_k`. Each step measures one particle
//! in the Helstrom basis for the current priors; the outcome updates the
//! priors for the next step and the last outcome names the branch.
//!
//! For bosons with every particle in one mode the same mathematics applies
//! with a single shared `θ`, i.e. all `c_k` equal.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Per-particle overlaps `c_k = |⟨ψ_A^(k)|ψ_B^(k)⟩|` and the prior of branch A.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductBranchPair {
    overlaps: Vec<f64>,
    prior_a: f64,
}

impl ProductBranchPair {
    pub fn new(overlaps: Vec<f64>, prior_a: f64) -> Result<Self> {
        if overlaps.is_empty() {
            return Err(Error::invalid(
                "overlaps",
                "at least one particle is required",
            ));
        }
        if let Some(c) = overlaps.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(Error::invalid("overlaps", format!("{c} is outside [0, 1]")));
        }
        if !(prior_a > 0.0 && prior_a < 1.0) {
            return Err(Error::invalid(
                "prior_a",
                format!("{prior_a} is outside (0, 1)"),
            ));
        }
        Ok(ProductBranchPair { overlaps, prior_a })
    }

    pub fn overlaps(&self) -> &[f64] {
        &self.overlaps
    }

    pub fn prior_a(&self) -> f64 {
        self.prior_a
    }

    pub fn prior_b(&self) -> f64 {
        1.0 - self.prior_a
    }
}

/// Outcome of one single-particle measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// The projector that indicates branch A fired.
    IndicatesA,
    IndicatesB,
}

/// Optimal single-particle measurement at the current priors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleMeasurement {
    pub r: f64,
    /// Success probability `1/2 + R/2`.
    pub p: f64,
    pub ea_given_a: f64,
    pub ea_given_b: f64,
    pub eb_given_a: f64,
    pub eb_given_b: f64,
}

/// `R = √(1 - 4 q_A q_B c²)`, evaluated as `√((q_A - q_B)² + 4 q_A q_B (1 - c²))`.
fn optimal_r(qa: f64, c: f64) -> f64 {
    let qb = 1.0 - qa;
    ((qa - qb).powi(2) + 4.0 * qa * qb * (1.0 - c) * (1.0 + c)).sqrt()
}

/// `R = √(1 - 4 q_A q_B c²)` and the Helstrom outcome probabilities.
///
/// When `R = 0` (identical states, equal priors) no measurement helps; the
/// outcome is then always `IndicatesA` and carries no information.
pub fn optimal_single_measurement(prior_a: f64, c: f64) -> Result<SingleMeasurement> {
    if !(prior_a > 0.0 && prior_a < 1.0) {
        return Err(Error::invalid(
            "prior_a",
            format!("{prior_a} is outside (0, 1)"),
        ));
    }
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::invalid("c", format!("{c} is outside [0, 1]")));
    }
    let qa = prior_a;
    let qb = 1.0 - prior_a;
    let c2 = c * c;
    // 4 q_A q_B (1 - c²), kept separate so nothing below cancels.
    let spread = 4.0 * qa * qb * (1.0 - c) * (1.0 + c);
    let r = optimal_r(qa, c);
    // R + x for x = ±(q_A - q_B), rationalized when x < 0.
    let shifted = |x: f64| if x >= 0.0 { r + x } else { spread / (r - x) };
    let (ea_given_a, ea_given_b) = if r == 0.0 {
        (1.0, 1.0)
    } else {
        let eb_given_a = qb * c2 * shifted(qb - qa) / (r * (1.0 + r));
        let ea_given_b = qa * c2 * shifted(qa - qb) / (r * (1.0 + r));
        (
            (1.0 - eb_given_a).clamp(0.0, 1.0),
            ea_given_b.clamp(0.0, 1.0),
        )
    };
    Ok(SingleMeasurement {
        r,
        p: 0.5 + 0.5 * r,
        ea_given_a,
        ea_given_b,
        eb_given_a: 1.0 - ea_given_a,
        eb_given_b: 1.0 - ea_given_b,
    })
}

/// One step of the protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolStep {
    /// 1-based particle index.
    pub k: usize,
    pub r: f64,
    pub p: f64,
    /// Sampled outcome; `None` in the analytic trace.
    pub outcome: Option<Outcome>,
    /// Posterior of branch A after the step. Analytically the favored
    /// branch has posterior `p`, so only simulated steps record it.
    pub posterior_a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolTrace {
    pub steps: Vec<ProtocolStep>,
    pub final_success_probability: f64,
}

/// Analytic `R_k`, `P_k` sequence. The posterior after each step is `P_k`
/// or `1 - P_k`, so `q_A q_B` at step `k + 1` is `P_k (1 - P_k)` whatever
/// the outcome.
pub fn run_protocol(branches: &ProductBranchPair) -> ProtocolTrace {
    let mut qa = branches.prior_a;
    let mut steps = Vec::with_capacity(branches.overlaps.len());
    for (i, c) in branches.overlaps.iter().enumerate() {
        let r = optimal_r(qa, *c);
        let p = 0.5 + 0.5 * r;
        steps.push(ProtocolStep {
            k: i + 1,
            r,
            p,
            outcome: None,
            posterior_a: None,
        });
        qa = p;
    }
    let final_success_probability = steps.last().map_or(0.5, |s| s.p);
    ProtocolTrace {
        steps,
        final_success_probability,
    }
}

/// Closed form `1/2 + 1/2 √(1 - 4 q_A q_B ∏ c_k²)`.
pub fn final_success_probability(branches: &ProductBranchPair) -> f64 {
    let prod: f64 = branches.overlaps.iter().map(|c| c * c).product();
    let qa = branches.prior_a;
    0.5 + 0.5 * (1.0 - 4.0 * qa * (1.0 - qa) * prod).max(0.0).sqrt()
}

/// Which branch each simulated trial is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchChoice {
    A,
    B,
    /// Drawn per trial from the prior.
    FromPrior,
}

/// Bayesian update after `outcome`; returns the new posterior of A.
fn update(qa: f64, m: &SingleMeasurement, outcome: Outcome) -> f64 {
    let (la, lb) = match outcome {
        Outcome::IndicatesA => (m.ea_given_a, m.ea_given_b),
        Outcome::IndicatesB => (m.eb_given_a, m.eb_given_b),
    };
    let num = qa * la;
    let den = num + (1.0 - qa) * lb;
    if den == 0.0 {
        qa
    } else {
        num / den
    }
}

/// Runs the protocol once on a sampled branch, returning whether the final
/// outcome named it correctly, together with the step records.
pub fn simulate_once(
    branches: &ProductBranchPair,
    truth_is_a: bool,
    rng: &mut ChaCha8Rng,
) -> Result<(bool, Vec<ProtocolStep>)> {
    let mut qa = branches.prior_a;
    let mut steps = Vec::with_capacity(branches.overlaps.len());
    let mut last = Outcome::IndicatesA;
    for (i, c) in branches.overlaps.iter().enumerate() {
        let m = optimal_single_measurement(qa.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON), *c)?;
        let p_ea = if truth_is_a {
            m.ea_given_a
        } else {
            m.ea_given_b
        };
        let outcome = if rng.random::<f64>() < p_ea {
            Outcome::IndicatesA
        } else {
            Outcome::IndicatesB
        };
        qa = update(qa, &m, outcome);
        if m.r > 0.0 {
            let favored = match outcome {
                Outcome::IndicatesA => qa,
                Outcome::IndicatesB => 1.0 - qa,
            };
            debug_assert!(
                (favored - m.p).abs() < 1e-12,
                "posterior {favored} vs P_k {}",
                m.p
            );
        }
        steps.push(ProtocolStep {
            k: i + 1,
            r: m.r,
            p: m.p,
            outcome: Some(outcome),
            posterior_a: Some(qa),
        });
        last = outcome;
    }
    let correct = (last == Outcome::IndicatesA) == truth_is_a;
    Ok((correct, steps))
}

/// Fraction of `trials` simulated runs whose final outcome names the true
/// branch. Reproducible for a fixed `seed`.
pub fn simulate_protocol(
    branches: &ProductBranchPair,
    truth: BranchChoice,
    seed: u64,
    trials: usize,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut correct = 0usize;
    for _ in 0..trials {
        let truth_is_a = match truth {
            BranchChoice::A => true,
            BranchChoice::B => false,
            BranchChoice::FromPrior => rng.random::<f64>() < branches.prior_a,
        };
        if simulate_once(branches, truth_is_a, &mut rng)?.0 {
            correct += 1;
        }
    }
    Ok(correct as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Helstrom bound for two real pure qubit states with overlap `c`:
    /// `1/2 + 1/2 ‖q_A ρ_A - q_B ρ_B‖₁`, via the 2×2 eigenvalues.
    fn helstrom_qubit(qa: f64, c: f64) -> f64 {
        let t = 0.5 * c.acos();
        let a = [t.cos(), t.sin()];
        let b = [t.cos(), -t.sin()];
        let qb = 1.0 - qa;
        let m = |i: usize, j: usize| qa * a[i] * a[j] - qb * b[i] * b[j];
        let (x, y, z) = (m(0, 0), m(1, 1), m(0, 1));
        let mean = 0.5 * (x + y);
        let rad = (0.25 * (x - y).powi(2) + z * z).sqrt();
        0.5 + 0.5 * ((mean + rad).abs() + (mean - rad).abs())
    }

    #[test]
    fn matches_qubit_helstrom() {
        for qa in [0.5, 0.7, 0.2, 0.93] {
            for c in [0.0, 0.1, 0.6, 0.99, 1.0] {
                let m = optimal_single_measurement(qa, c).unwrap();
                assert!((m.p - helstrom_qubit(qa, c)).abs() < 1e-12, "qa {qa} c {c}");
                assert!((m.ea_given_a + m.eb_given_a - 1.0).abs() < 1e-15);
                assert!((m.ea_given_b + m.eb_given_b - 1.0).abs() < 1e-15);
                let from_conditionals = qa * m.ea_given_a + (1.0 - qa) * m.eb_given_b;
                assert!((from_conditionals - m.p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn limiting_overlaps() {
        let m = optimal_single_measurement(0.5, 0.0).unwrap();
        assert_eq!((m.r, m.p), (1.0, 1.0));
        let m = optimal_single_measurement(0.5, 1.0).unwrap();
        assert_eq!((m.r, m.p), (0.0, 0.5));
    }

    #[test]
    fn recursion_matches_closed_form() {
        let b = ProductBranchPair::new(vec![0.3, 0.9, 0.55, 0.8], 0.35).unwrap();
        let t = run_protocol(&b);
        assert_eq!(t.steps.len(), 4);
        for s in &t.steps {
            assert!((s.p - 0.5 - 0.5 * s.r).abs() < 1e-15);
        }
        assert!((t.final_success_probability - final_success_probability(&b)).abs() < 1e-14);
    }

    #[test]
    fn simulation_is_reproducible() {
        let b = ProductBranchPair::new(vec![0.6, 0.7], 0.5).unwrap();
        let x = simulate_protocol(&b, BranchChoice::FromPrior, 11, 5000).unwrap();
        let y = simulate_protocol(&b, BranchChoice::FromPrior, 11, 5000).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn orthogonal_particles_always_decide() {
        let b = ProductBranchPair::new(vec![0.0; 3], 0.5).unwrap();
        assert_eq!(
            simulate_protocol(&b, BranchChoice::A, 1, 1000).unwrap(),
            1.0
        );
        assert_eq!(
            simulate_protocol(&b, BranchChoice::B, 1, 1000).unwrap(),
            1.0
        );
    }

    #[test]
    fn invalid_inputs() {
        assert!(ProductBranchPair::new(vec![], 0.5).is_err());
        assert!(ProductBranchPair::new(vec![1.2], 0.5).is_err());
        assert!(ProductBranchPair::new(vec![0.5], 1.0).is_err());
        let b = ProductBranchPair::new(vec![0.5], 0.5).unwrap();
        assert!(simulate_protocol(&b, BranchChoice::A, 0, 0).is_err());
    }
}
