use serde::Serialize;

use super::thresholds::greedy_coefficient;

/// Tail estimates for the greedy decoder's separating threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparationTails {
    /// `exp(-c alpha^2 (1 - theta) / theta)`: a healthy score above the threshold.
    pub healthy_tail: f64,
    /// `exp(-c (1 - alpha)^2 (1 - theta) / theta)`: an infected score below it.
    pub infected_tail: f64,
    /// `(1 + sqrt(theta)) / (1 - sqrt(theta))`, the optimal test-count
    /// coefficient in units of `ln k`.
    pub c_n_opt: f64,
    /// `1 / (1 + sqrt(theta))`, where the two constraints on `c` meet.
    pub alpha_opt: f64,
}

pub fn separation_tails(alpha: f64, c: f64, theta: f64) -> SeparationTails {
    let ratio = (1.0 - theta) / theta;
    SeparationTails {
        healthy_tail: (-c * alpha * alpha * ratio).exp(),
        infected_tail: (-c * (1.0 - alpha).powi(2) * ratio).exp(),
        c_n_opt: greedy_coefficient(theta),
        alpha_opt: 1.0 / (1.0 + theta.sqrt()),
    }
}

/// Union bounds `((n - k) healthy_tail, k infected_tail)`.
pub fn union_bounds(n: usize, k: usize, alpha: f64, c: f64, theta: f64) -> (f64, f64) {
    let t = separation_tails(alpha, c, theta);
    ((n - k) as f64 * t.healthy_tail, k as f64 * t.infected_tail)
}
