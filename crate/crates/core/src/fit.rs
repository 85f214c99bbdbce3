//! Least-squares grid fit of `(θ0, σ)` to a particle-number distribution.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::distinguish::{cat_size, CatSizeResult};
use crate::error::{Error, Result};
use crate::rdm::RdmMode;
use crate::state::{number_distribution, GaussianSpread, NumberDistribution, SuperpositionSpec};

/// Search grid over `θ0 ∈ [0, π/4]` and `σ ∈ [0, σ_max]`, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitGrid {
    pub theta_step: f64,
    pub sigma_step: f64,
    pub sigma_max: f64,
}

impl Default for FitGrid {
    fn default() -> Self {
        FitGrid {
            theta_step: 0.01 * PI,
            sigma_step: 0.005 * PI,
            sigma_max: 0.1 * PI,
        }
    }
}

impl FitGrid {
    pub fn new(theta_step: f64, sigma_step: f64, sigma_max: f64) -> Result<Self> {
        if !(theta_step > 0.0 && theta_step.is_finite()) {
            return Err(Error::invalid(
                "theta_step",
                format!("{theta_step} must be positive"),
            ));
        }
        if !(sigma_step > 0.0 && sigma_step.is_finite()) {
            return Err(Error::invalid(
                "sigma_step",
                format!("{sigma_step} must be positive"),
            ));
        }
        if !(sigma_max >= 0.0 && sigma_max.is_finite()) {
            return Err(Error::invalid(
                "sigma_max",
                format!("{sigma_max} must be >= 0"),
            ));
        }
        Ok(FitGrid {
            theta_step,
            sigma_step,
            sigma_max,
        })
    }

    /// Grid values of `θ0`, ascending. A final point within rounding of
    /// `π/4` is snapped onto it.
    pub fn thetas(&self) -> Vec<f64> {
        steps(FRAC_PI_4, self.theta_step)
    }

    pub fn sigmas(&self) -> Vec<f64> {
        steps(self.sigma_max, self.sigma_step)
    }

    /// The grid with both steps halved.
    pub fn refined(&self) -> Self {
        FitGrid {
            theta_step: 0.5 * self.theta_step,
            sigma_step: 0.5 * self.sigma_step,
            sigma_max: self.sigma_max,
        }
    }
}

fn steps(max: f64, step: f64) -> Vec<f64> {
    let count = (max / step + 1e-9).floor() as usize;
    (0..=count).map(|i| (i as f64 * step).min(max)).collect()
}

/// Model distributions on every grid cell, ordered by `σ` then `θ0`.
#[derive(Debug, Clone)]
pub struct ModelTable {
    n_particles: usize,
    grid: FitGrid,
    cells: Vec<(f64, f64, NumberDistribution)>,
}

impl ModelTable {
    pub fn new(n_particles: usize, grid: FitGrid) -> Result<Self> {
        let mut cells = Vec::new();
        for sigma in grid.sigmas() {
            for theta0 in grid.thetas() {
                let spec =
                    SuperpositionSpec::new(n_particles, GaussianSpread::new(theta0, sigma)?)?;
                cells.push((theta0, sigma, number_distribution(&spec)?));
            }
        }
        Ok(ModelTable {
            n_particles,
            grid,
            cells,
        })
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn grid(&self) -> FitGrid {
        self.grid
    }

    /// Best cell for `target`: smallest residual, ties to smaller `σ`, then
    /// smaller `θ0`.
    pub fn best(&self, target: &NumberDistribution) -> Result<(f64, f64, f64)> {
        if target.n_particles() != self.n_particles {
            return Err(Error::DimensionMismatch {
                expected: self.n_particles + 1,
                found: target.probs().len(),
            });
        }
        let mut best: Option<(f64, f64, f64)> = None;
        for (theta0, sigma, model) in &self.cells {
            let r = model.squared_distance(target)?;
            if best.is_none_or(|(_, _, b)| r < b) {
                best = Some((*theta0, *sigma, r));
            }
        }
        best.ok_or_else(|| Error::Domain("fit grid is empty".into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub theta0: f64,
    pub sigma: f64,
    pub residual: f64,
    pub grid: FitGrid,
    /// Finite-N cat size of the fitted state for each requested `δ`.
    pub cat_sizes: Vec<CatSizeResult>,
}

/// Fits `target` over `grid` and evaluates the fitted state's cat size at
/// each `δ` in `deltas`.
pub fn fit_number_distribution(
    target: &NumberDistribution,
    n_particles: usize,
    grid: FitGrid,
    deltas: &[f64],
) -> Result<FitResult> {
    let table = ModelTable::new(n_particles, grid)?;
    fit_with_table(&table, target, deltas)
}

/// As [`fit_number_distribution`] against a precomputed table.
pub fn fit_with_table(
    table: &ModelTable,
    target: &NumberDistribution,
    deltas: &[f64],
) -> Result<FitResult> {
    let (theta0, sigma, residual) = table.best(target)?;
    let spec = SuperpositionSpec::new(table.n_particles, GaussianSpread::new(theta0, sigma)?)?;
    let cat_sizes = deltas
        .iter()
        .map(|d| cat_size(&spec, *d, RdmMode::FiniteN, table.n_particles))
        .collect::<Result<Vec<_>>>()?;
    Ok(FitResult {
        theta0,
        sigma,
        residual,
        grid: table.grid,
        cat_sizes,
    })
}
