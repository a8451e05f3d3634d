//! Closed-form thresholds and the numeric machinery behind them.
//!
//! Every combinatorial quantity is evaluated in log space through `ln_gamma`;
//! `0 * ln 0` is taken as 0 throughout.

mod first_moment;
mod info;
mod rate;
mod separation;
mod tails;
mod thresholds;

pub use first_moment::{expected_z_bound, ZBoundMode};
pub use info::{entropy, entropy_and_kl, kl_divergence};
pub use rate::{
    c_star, integer_maximizer, rate_derivative, rate_domain_max, rate_f, rate_f_form, rate_second_derivative,
    rate_value, RateEvaluation, RateForm, RateMaximum,
};
pub use separation::{separation_tails, union_bounds, SeparationTails};
pub use tails::{
    binomial_lower_tail, binomial_upper_tail, chernoff_kl_lower, chernoff_kl_upper, chernoff_lower, chernoff_upper,
    half_binomial_sides, jensen_gap_ratios, rw_return, truncated_binomial_moments, TruncatedMoments,
};
pub use thresholds::{bch_crossover, compute_thresholds, ThresholdReport, C_BCH};

use statrs::function::gamma::ln_gamma;

/// `ln C(n, k)` for real arguments, `-inf` outside `0 <= k <= n`.
pub fn ln_choose(n: f64, k: f64) -> f64 {
    if k < 0.0 || k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0.0 || k == n {
        return 0.0;
    }
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

/// `ln P(X = k)` for `X ~ Bin(n, p)`.
pub fn ln_binomial_pmf(n: u64, k: u64, p: f64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let (kf, rest) = (k as f64, (n - k) as f64);
    ln_choose(n as f64, kf) + xlny(kf, p) + xlny(rest, 1.0 - p)
}

/// `x * ln y` with `0 * ln 0 = 0`.
pub fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// `ln sum exp(v)` over the finite-or-`-inf` values of `values`.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + v.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_choose_small_values() {
        assert!((ln_choose(7.0, 3.0) - 35f64.ln()).abs() < 1e-12);
        assert!((ln_choose(50.0, 10.0) - 10_272_278_170f64.ln()).abs() < 1e-10);
        assert_eq!(ln_choose(5.0, 6.0), f64::NEG_INFINITY);
        assert_eq!(ln_choose(5.0, 0.0), 0.0);
    }

    #[test]
    fn binomial_pmf_sums_to_one() {
        let total: f64 = (0..=40).map(|k| ln_binomial_pmf(40, k, 0.3).exp()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(ln_binomial_pmf(5, 0, 0.0), 0.0);
        assert_eq!(ln_binomial_pmf(5, 1, 0.0), f64::NEG_INFINITY);
    }

    #[test]
    fn log_sum_exp_matches_direct_sum() {
        let v = [0.1f64.ln(), 0.2f64.ln(), f64::NEG_INFINITY];
        assert!((log_sum_exp(v) - 0.3f64.ln()).abs() < 1e-15);
        assert_eq!(log_sum_exp([f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }
}
