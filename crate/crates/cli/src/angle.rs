//! Angles given in radians (`0.3`) or as multiples of π (`0.05pi`).

use std::fmt;
use std::str::FromStr;

use std::f64::consts::PI;

/// An angle that remembers its coefficient of π, so that `0.05pi` prints
/// back as `0.05pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle {
    radians: f64,
    pi_units: f64,
}

impl Angle {
    pub fn from_pi_units(pi_units: f64) -> Self {
        Angle {
            radians: pi_units * PI,
            pi_units,
        }
    }

    pub fn from_radians(radians: f64) -> Self {
        Angle {
            radians,
            pi_units: radians / PI,
        }
    }

    pub fn radians(&self) -> f64 {
        self.radians
    }

    /// Points `start, start + step, ...` up to `end`, with coefficients
    /// snapped to 12 decimals so grid labels print cleanly.
    pub fn grid(start: Angle, end: Angle, step: Angle) -> Vec<Angle> {
        let count = ((end.pi_units - start.pi_units) / step.pi_units + 1e-9).floor();
        if !(count >= 0.0) {
            return Vec::new();
        }
        (0..=count as usize)
            .map(|i| {
                let c = start.pi_units + i as f64 * step.pi_units;
                Angle::from_pi_units((c * 1e12).round() / 1e12)
            })
            .collect()
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}pi", self.pi_units)
    }
}

impl FromStr for Angle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let parse = |x: &str| {
            x.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    format!("`{s}` is not an angle (radians, or a multiple like 0.05pi)")
                })
        };
        match t.strip_suffix("pi") {
            Some("") | Some("+") => Ok(Angle::from_pi_units(1.0)),
            Some("-") => Ok(Angle::from_pi_units(-1.0)),
            Some(coef) => parse(coef).map(Angle::from_pi_units),
            None => parse(t).map(Angle::from_radians),
        }
    }
}
