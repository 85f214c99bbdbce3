//! Log-space binomial helpers shared by the state and RDM builders.

/// Table of `ln(k!)` for `k = 0..=n`.
#[derive(Debug, Clone)]
pub struct LnFactorials(Vec<f64>);

impl LnFactorials {
    pub fn up_to(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for k in 1..=n {
            acc += (k as f64).ln();
            table.push(acc);
        }
        LnFactorials(table)
    }

    pub fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        self.0[n] - self.0[k] - self.0[n - k]
    }

    pub fn binomial(&self, n: usize, k: usize) -> f64 {
        self.ln_binomial(n, k).exp()
    }
}

/// `sqrt(C(n, k)) * x^k * y^(n-k)` for real `x`, `y`, evaluated in log space
/// so that large `n` neither overflows the binomial nor underflows early.
pub fn binomial_term(lf: &LnFactorials, n: usize, k: usize, x: f64, y: f64) -> f64 {
    let mut ln = 0.5 * lf.ln_binomial(n, k);
    let mut negative = false;
    if k > 0 {
        if x == 0.0 {
            return 0.0;
        }
        ln += k as f64 * x.abs().ln();
        negative ^= x < 0.0 && k % 2 == 1;
    }
    if n > k {
        if y == 0.0 {
            return 0.0;
        }
        ln += (n - k) as f64 * y.abs().ln();
        negative ^= y < 0.0 && (n - k) % 2 == 1;
    }
    let v = ln.exp();
    if negative {
        -v
    } else {
        v
    }
}

/// Exact binomial coefficient for small arguments.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
