//! Composite Gauss-Legendre rules on adaptively chosen panels.
//!
//! Two entry points are provided. [`integrate_adaptive`] integrates a
//! vector-valued integrand by bisecting panels until each local error
//! estimate is small. [`converge_on_panels`] drives a caller-supplied
//! evaluation (typically a tensor-product double integral) through successive
//! global bisections until two consecutive estimates agree.

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative agreement required between successive estimates.
pub const RELATIVE_TOLERANCE: f64 = 1e-10;

/// Nodes per panel.
pub const PANEL_ORDER: usize = 12;

/// Bisection depth after which a panel is declared unresolvable.
const MAX_BISECTION_DEPTH: u32 = 40;

/// Global refinements attempted by [`converge_on_panels`].
pub const MAX_REFINEMENTS: usize = 8;

/// Nodes and weights of a quadrature rule on some interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// A single unit point mass at `x`, used for delta-function spreads.
    pub fn point_mass(x: f64) -> Self {
        Rule {
            nodes: vec![x],
            weights: vec![1.0],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn reference_rule(order: usize) -> (Vec<f64>, Vec<f64>) {
    let gl = GaussLegendre::new(order.try_into().expect("order is at least 2"));
    (
        gl.nodes().copied().collect(),
        gl.weights().copied().collect(),
    )
}

/// A partition of an interval into panels, stored as sorted breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Panels {
    edges: Vec<f64>,
}

impl Panels {
    pub fn from_edges(mut edges: Vec<f64>) -> Result<Self> {
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        if edges.len() < 2 || edges.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid(
                "edges",
                "need at least two finite breakpoints",
            ));
        }
        Ok(Panels { edges })
    }

    pub fn uniform(a: f64, b: f64, count: usize) -> Result<Self> {
        let count = count.max(1);
        let h = (b - a) / count as f64;
        let mut edges: Vec<f64> = (0..count).map(|i| a + h * i as f64).collect();
        edges.push(b);
        Self::from_edges(edges)
    }

    pub fn len(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.edges[0], self.edges[self.edges.len() - 1])
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.edges.windows(2).map(|w| (w[0], w[1]))
    }

    /// Splits every panel in two.
    pub fn bisected(&self) -> Self {
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        for (a, b) in self.iter() {
            edges.push(a);
            edges.push(0.5 * (a + b));
        }
        edges.push(self.bounds().1);
        Panels { edges }
    }

    /// Composite rule with `order` nodes per panel.
    pub fn rule(&self, order: usize) -> Rule {
        let (x, w) = reference_rule(order);
        let mut nodes = Vec::with_capacity(self.len() * order);
        let mut weights = Vec::with_capacity(self.len() * order);
        for (a, b) in self.iter() {
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        }
        Rule { nodes, weights }
    }
}

fn panel_estimate(
    f: &impl Fn(f64, &mut [Complex64]),
    a: f64,
    b: f64,
    x: &[f64],
    w: &[f64],
    scratch: &mut [Complex64],
    out: &mut [Complex64],
) {
    out.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    for (xi, wi) in x.iter().zip(w) {
        f(mid + half * xi, scratch);
        for (o, s) in out.iter_mut().zip(scratch.iter()) {
            *o += s * (half * wi);
        }
    }
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Adaptive integration of a `dim`-component integrand over the span of
/// `initial`.
///
/// Each panel is compared against the sum over its two halves and accepted
/// when the difference is below `tol` times the magnitude of the integral,
/// apportioned by panel width.
pub fn integrate_adaptive(
    f: impl Fn(f64, &mut [Complex64]),
    dim: usize,
    initial: &Panels,
    tol: f64,
) -> Result<Vec<Complex64>> {
    let (x, w) = reference_rule(PANEL_ORDER);
    let (lo, hi) = initial.bounds();
    let span = hi - lo;
    let mut scratch = vec![Complex64::new(0.0, 0.0); dim];
    let mut whole = vec![Complex64::new(0.0, 0.0); dim];
    let mut left = vec![Complex64::new(0.0, 0.0); dim];
    let mut right = vec![Complex64::new(0.0, 0.0); dim];

    // Coarse pass fixes the scale against which errors are measured.
    let mut coarse = vec![Complex64::new(0.0, 0.0); dim];
    let mut coarse_abs = 0.0_f64;
    for (a, b) in initial.iter() {
        panel_estimate(&f, a, b, &x, &w, &mut scratch, &mut whole);
        coarse_abs += max_norm(&whole);
        for (c, v) in coarse.iter_mut().zip(&whole) {
            *c += v;
        }
    }
    let scale = match max_norm(&coarse) {
        s if s > 0.0 => s,
        _ if coarse_abs > 0.0 => coarse_abs,
        _ => f64::MIN_POSITIVE,
    };

    let mut total = vec![Complex64::new(0.0, 0.0); dim];
    let mut stack: Vec<(f64, f64, u32)> = initial.iter().map(|(a, b)| (a, b, 0)).collect();
    while let Some((a, b, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        panel_estimate(&f, a, b, &x, &w, &mut scratch, &mut whole);
        panel_estimate(&f, a, m, &x, &w, &mut scratch, &mut left);
        panel_estimate(&f, m, b, &x, &w, &mut scratch, &mut right);
        let err = whole
            .iter()
            .zip(left.iter().zip(&right))
            .map(|(wh, (l, r))| (wh - l - r).norm())
            .fold(0.0, f64::max);
        let allowed = tol * scale * ((b - a) / span).max(1e-6);
        if err <= allowed {
            for (t, (l, r)) in total.iter_mut().zip(left.iter().zip(&right)) {
                *t += l + r;
            }
        } else if depth >= MAX_BISECTION_DEPTH {
            return Err(Error::QuadratureNotConverged {
                achieved: err / scale,
                levels: depth as usize,
            });
        } else {
            stack.push((a, m, depth + 1));
            stack.push((m, b, depth + 1));
        }
    }
    Ok(total)
}

/// Evaluates `eval` on successively bisected panel sets until the relative
/// change reported by `change` falls below `tol`, returning the finer
/// estimate.
pub fn converge_on_panels<T>(
    initial: Panels,
    tol: f64,
    mut eval: impl FnMut(&Rule) -> Result<T>,
    change: impl Fn(&T, &T) -> f64,
) -> Result<T> {
    let mut panels = initial;
    let mut previous = eval(&panels.rule(PANEL_ORDER))?;
    let mut achieved = f64::INFINITY;
    for _ in 0..MAX_REFINEMENTS {
        panels = panels.bisected();
        let current = eval(&panels.rule(PANEL_ORDER))?;
        achieved = change(&previous, &current);
        if achieved < tol {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::QuadratureNotConverged {
        achieved,
        levels: MAX_REFINEMENTS,
    })
}
