//! Normalized Hermite functions `ψₙ(x) = Hₙ(x) e^{−x²/2} / √(2ⁿ n! √π)`.

use std::f64::consts::PI;

/// `ψₙ(x)` by the three-term recurrence on the normalized functions.
pub fn hermite_wavefunction(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 1..=n {
        let next = (2.0 / k as f64).sqrt() * x * cur - ((k - 1) as f64 / k as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `ψ₀..ψ_{n−1}` at every sample: row `k` holds `ψₖ(xs[j])`.
pub fn hermite_table(n: usize, xs: &[f64]) -> Vec<Vec<f64>> {
    let mut table = vec![vec![0.0; xs.len()]; n];
    if n == 0 {
        return table;
    }
    for (j, &x) in xs.iter().enumerate() {
        let mut prev = 0.0;
        let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
        table[0][j] = cur;
        for (k, row) in table.iter_mut().enumerate().skip(1) {
            let next =
                (2.0 / k as f64).sqrt() * x * cur - ((k - 1) as f64 / k as f64).sqrt() * prev;
            prev = cur;
            cur = next;
            row[j] = cur;
        }
    }
    table
}
