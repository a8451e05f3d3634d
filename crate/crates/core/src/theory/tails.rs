//! Binomial tails, Chernoff-type bounds and random-walk asymptotics.

use std::f64::consts::{LN_2, PI};

use super::{kl_divergence, ln_binomial_pmf, ln_choose, log_sum_exp};

/// `P(X > x)` for `X ~ Bin(n, p)`, summed exactly in log space.
pub fn binomial_upper_tail(n: u64, p: f64, x: f64) -> f64 {
    let start = if x < 0.0 { 0 } else { x.floor() as u64 + 1 };
    if start > n {
        return 0.0;
    }
    log_sum_exp((start..=n).map(|j| ln_binomial_pmf(n, j, p))).exp()
}

/// `P(X < x)` for `X ~ Bin(n, p)`.
pub fn binomial_lower_tail(n: u64, p: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let end = (x.ceil() as u64 - 1).min(n);
    log_sum_exp((0..=end).map(|j| ln_binomial_pmf(n, j, p))).exp()
}

/// `exp(-D(p + eps || p) n)`, the relative-entropy bound on `P(X > n(p + eps))`.
pub fn chernoff_kl_upper(n: u64, p: f64, eps: f64) -> f64 {
    let a = p + eps;
    if a > 1.0 {
        return 0.0;
    }
    (-kl_divergence(a, p).expect("arguments in [0, 1]") * n as f64).exp()
}

/// `exp(-D(p - eps || p) n)`, the bound on `P(X < n(p - eps))`.
pub fn chernoff_kl_lower(n: u64, p: f64, eps: f64) -> f64 {
    let a = p - eps;
    if a < 0.0 {
        return 0.0;
    }
    (-kl_divergence(a, p).expect("arguments in [0, 1]") * n as f64).exp()
}

/// `exp(-min(eps, eps^2) n p / 3)`, bounding `P(X > (1 + eps) n p)`.
pub fn chernoff_upper(n: u64, p: f64, eps: f64) -> f64 {
    (-eps.min(eps * eps) * n as f64 * p / 3.0).exp()
}

/// `exp(-delta^2 n p / 2)`, bounding `P(X < (1 - delta) n p)`.
pub fn chernoff_lower(n: u64, p: f64, delta: f64) -> f64 {
    (-delta * delta * n as f64 * p / 2.0).exp()
}

/// Probability that a simple random walk of `2j` steps is back at its start,
/// `C(2j, j) 4^-j`, together with its leading asymptotic `(pi j)^(-1/2)`.
pub fn rw_return(j: u64) -> (f64, f64) {
    let jf = j as f64;
    let exact = (ln_choose(2.0 * jf, jf) - 2.0 * jf * LN_2).exp();
    (exact, (PI * jf).powf(-0.5))
}

/// Both sides of the even-index half-binomial identity:
///
/// * `lhs = sum_{1 <= j <= n/2} C(n, 2j) p^2j (1-p)^(n-2j) j^-1/2`
/// * `rhs = 2^-1/2 sum_{1 <= j <= n} C(n, j) p^j (1-p)^(n-j) j^-1/2`
pub fn half_binomial_sides(n: u64, p: f64) -> (f64, f64) {
    let lhs = log_sum_exp((1..=n / 2).map(|j| ln_binomial_pmf(n, 2 * j, p) - 0.5 * (j as f64).ln())).exp();
    let rhs = log_sum_exp((1..=n).map(|j| ln_binomial_pmf(n, j, p) - 0.5 * (j as f64).ln())).exp()
        / std::f64::consts::SQRT_2;
    (lhs, rhs)
}

/// Moments of `X ~ Bin(n, p)` conditioned on `X >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedMoments {
    pub mean: f64,
    pub inv_sqrt: f64,
    pub inv: f64,
}

pub fn truncated_binomial_moments(n: u64, p: f64) -> TruncatedMoments {
    // ln P(X >= 1) = ln(1 - (1-p)^n)
    let ln_norm = (-((n as f64) * (1.0 - p).ln()).exp_m1()).ln();
    let ln_pmf: Vec<(f64, f64)> = (1..=n).map(|j| (j as f64, ln_binomial_pmf(n, j, p) - ln_norm)).collect();
    let moment = |g: fn(f64) -> f64| ln_pmf.iter().map(|&(j, lp)| lp.exp() * g(j)).sum::<f64>();
    TruncatedMoments {
        mean: n as f64 * p / (-(n as f64 * (1.0 - p).ln()).exp_m1()),
        inv_sqrt: moment(|j| j.powf(-0.5)),
        inv: moment(|j| 1.0 / j),
    }
}

/// `(E[X^-1/2] E[X]^1/2, E[X^-1] E[X])` for `X ~ Bin(n, p)` given `X >= 1`.
/// Both ratios tend to 1 as `np` grows.
pub fn jensen_gap_ratios(n: u64, p: f64) -> (f64, f64) {
    let m = truncated_binomial_moments(n, p);
    (m.inv_sqrt * m.mean.sqrt(), m.inv * m.mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tails_against_direct_sums() {
        let pmf = |j: u64| ln_binomial_pmf(20, j, 0.3).exp();
        let upper: f64 = (9..=20).map(pmf).sum();
        assert!((binomial_upper_tail(20, 0.3, 8.0) - upper).abs() < 1e-14);
        assert!((binomial_upper_tail(20, 0.3, 8.5) - upper).abs() < 1e-14);
        let lower: f64 = (0..=3).map(pmf).sum();
        assert!((binomial_lower_tail(20, 0.3, 4.0) - lower).abs() < 1e-14);
        assert!((binomial_lower_tail(20, 0.3, 3.5) - lower).abs() < 1e-14);
        assert_eq!(binomial_upper_tail(20, 0.3, 20.0), 0.0);
        assert_eq!(binomial_lower_tail(20, 0.3, 0.0), 0.0);
    }

    #[test]
    fn chernoff_kl_dominates_exact_tails() {
        for &n in &[1u64, 5, 10, 50, 100, 500, 1000] {
            for &p in &[0.01, 0.05, 0.1, 0.3, 0.5, 0.7, 0.9] {
                for &eps in &[0.001, 0.01, 0.05, 0.1, 0.2, 0.4] {
                    let nf = n as f64;
                    let up = binomial_upper_tail(n, p, nf * (p + eps));
                    assert!(up <= chernoff_kl_upper(n, p, eps) * (1.0 + 1e-12), "upper n={n} p={p} eps={eps}");
                    let lo = binomial_lower_tail(n, p, nf * (p - eps));
                    assert!(lo <= chernoff_kl_lower(n, p, eps) * (1.0 + 1e-12), "lower n={n} p={p} eps={eps}");
                }
            }
        }
    }

    #[test]
    fn plain_chernoff_dominates_exact_tails() {
        for &n in &[10u64, 100, 1000] {
            for &p in &[0.02, 0.1, 0.5] {
                for &eps in &[0.05, 0.3, 1.0, 2.0] {
                    let mean = n as f64 * p;
                    assert!(binomial_upper_tail(n, p, (1.0 + eps) * mean) <= chernoff_upper(n, p, eps) * (1.0 + 1e-12));
                }
                for &delta in &[0.05, 0.3, 0.9, 1.0] {
                    let mean = n as f64 * p;
                    assert!(binomial_lower_tail(n, p, (1.0 - delta) * mean) <= chernoff_lower(n, p, delta) * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn rw_return_values() {
        let (e1, _) = rw_return(1);
        assert!((e1 - 0.5).abs() < 1e-14);
        let (e10, a10) = rw_return(10);
        assert!((e10 - 184_756.0 / 1_048_576.0).abs() < 1e-13);
        assert!((e10 - 0.176197).abs() < 5e-7);
        assert!((a10 - 0.178412).abs() < 5e-7);
    }

    #[test]
    fn rw_return_matches_product_form() {
        // C(2j, j) / 4^j = prod_{i <= j} (2i - 1) / (2i)
        let mut prod = 1.0f64;
        for j in 1..=10_000u64 {
            prod *= (2 * j - 1) as f64 / (2 * j) as f64;
            let (exact, _) = rw_return(j);
            assert!((exact / prod - 1.0).abs() < 1e-9, "j = {j}");
        }
    }

    #[test]
    fn half_binomial_examples() {
        let (lhs, rhs) = half_binomial_sides(2, 0.5);
        assert!((lhs - 0.25).abs() < 1e-14);
        let expected_rhs = (2.0 * 0.25 + 0.25 / 2f64.sqrt()) / 2f64.sqrt();
        assert!((rhs - expected_rhs).abs() < 1e-14);

        // |lhs - rhs| <= 1 / (np) at n = 100, p = 0.3.
        let (lhs, rhs) = half_binomial_sides(100, 0.3);
        assert!((lhs - rhs).abs() <= 1.0 / 30.0, "{lhs} vs {rhs}");

        let (lhs, rhs) = half_binomial_sides(10_000, 0.1);
        assert!((lhs / rhs - 1.0).abs() <= 1e-2);
    }

    #[test]
    fn jensen_gap_shrinks_like_one_over_np() {
        for &(n, p) in &[(100u64, 0.5), (500, 0.1), (1000, 0.3), (5000, 0.01), (20_000, 0.5)] {
            let np = n as f64 * p;
            assert!(np >= 50.0);
            let (r_half, r_one) = jensen_gap_ratios(n, p);
            assert!((r_half - 1.0).abs() <= 5.0 / np, "n={n} p={p}: {r_half}");
            assert!((r_one - 1.0).abs() <= 5.0 / np, "n={n} p={p}: {r_one}");
        }
    }

    #[test]
    fn truncated_moments_small_case() {
        // Bin(2, 0.5) given X >= 1: P(1) = 2/3, P(2) = 1/3.
        let m = truncated_binomial_moments(2, 0.5);
        assert!((m.mean - 4.0 / 3.0).abs() < 1e-14);
        assert!((m.inv - (2.0 / 3.0 + 1.0 / 6.0)).abs() < 1e-14);
        assert!((m.inv_sqrt - (2.0 / 3.0 + 1.0 / (3.0 * 2f64.sqrt()))).abs() < 1e-14);
    }
}
