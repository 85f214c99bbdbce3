//! Von Neumann entropies of n-RDMs and Leggett's disconnectivity.

use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::linalg::HermitianMatrix;
use crate::rdm::{branch_rdms, fock_rdm, FockOccupation, RdmMode};
use crate::state::SuperpositionSpec;

/// Default "small fraction" below which `β_n` counts as disconnected.
pub const DEFAULT_THRESHOLD: f64 = 0.05;

/// Eigenvalues below this contribute nothing to the entropy.
const EIGENVALUE_FLOOR: f64 = 1e-14;

/// Most negative eigenvalue tolerated as rounding.
const NEGATIVITY_TOLERANCE: f64 = 1e-10;

/// Entropy sums at or below this are treated as zero in `β_n`.
const ZERO_ENTROPY: f64 = 1e-12;

/// `-tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(rho: &HermitianMatrix) -> Result<f64> {
    let mut s = 0.0;
    for lambda in rho.eigenvalues()? {
        if lambda < -NEGATIVITY_TOLERANCE {
            return Err(Error::Domain(format!(
                "density matrix has eigenvalue {lambda:e}"
            )));
        }
        if lambda > EIGENVALUE_FLOOR {
            s -= lambda * lambda.ln();
        }
    }
    Ok(s.max(0.0))
}

/// `(n, S_n)` pairs in increasing `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyCurve {
    pub values: Vec<(usize, f64)>,
}

impl EntropyCurve {
    pub fn get(&self, n: usize) -> Option<f64> {
        self.values.iter().find(|(m, _)| *m == n).map(|(_, s)| *s)
    }
}

/// Entropy of the full-state n-RDM for each `n` in `ns`.
pub fn entropy_curve(
    spec: &SuperpositionSpec,
    mode: RdmMode,
    ns: RangeInclusive<usize>,
) -> Result<EntropyCurve> {
    let values = ns
        .map(|n| {
            let rdms = branch_rdms(spec, n, mode)?;
            Ok((n, von_neumann_entropy(&rdms.rho_full)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyCurve { values })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisconnectivityResult {
    /// `(n, β_n)` for `n = 1..=N`.
    pub betas: Vec<(usize, f64)>,
    pub threshold: f64,
    /// Largest `n` with `β_n < threshold`.
    pub d_value: usize,
}

/// `β_n = S_n / min_{1≤m<n} (S_m + S_{n-m})` over a curve covering `1..=N`,
/// with `β_1 = 0`. A vanishing denominator gives `β_n = 1`.
pub fn disconnectivity(curve: &EntropyCurve, threshold: f64) -> Result<DisconnectivityResult> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::invalid(
            "threshold",
            format!("{threshold} is outside (0, 1)"),
        ));
    }
    let big_n = curve
        .values
        .iter()
        .map(|(n, _)| *n)
        .max()
        .ok_or(Error::CurveGap(1))?;
    let mut s = vec![0.0; big_n + 1];
    for n in 1..=big_n {
        s[n] = curve.get(n).ok_or(Error::CurveGap(n))?;
    }
    let mut betas = Vec::with_capacity(big_n);
    let mut d_value = 0;
    for n in 1..=big_n {
        let beta = if n == 1 {
            0.0
        } else {
            let den = (1..n)
                .map(|m| s[m] + s[n - m])
                .fold(f64::INFINITY, f64::min);
            if den <= ZERO_ENTROPY {
                1.0
            } else {
                s[n] / den
            }
        };
        if beta < threshold {
            d_value = n;
        }
        betas.push((n, beta));
    }
    Ok(DisconnectivityResult {
        betas,
        threshold,
        d_value,
    })
}

/// Entropy curve of a multi-mode Fock state over `n = 1..=N`.
pub fn fock_entropy_curve(occ: &FockOccupation) -> Result<EntropyCurve> {
    let values = (1..=occ.n_particles())
        .map(|n| Ok((n, von_neumann_entropy(&fock_rdm(occ, n)?)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyCurve { values })
}

pub fn fock_disconnectivity(occ: &FockOccupation, threshold: f64) -> Result<DisconnectivityResult> {
    disconnectivity(&fock_entropy_curve(occ)?, threshold)
}
