use super::tails::truncated_binomial_moments;
use super::{ln_choose, log_sum_exp};
use crate::error::{Error, Result};
use crate::model::ProblemParams;

/// Which expression `expected_z_bound` evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZBoundMode {
    /// `C(k,l) C(n-k,k-l) P^m` where `P = sum_{j >= 0} Gamma! / (j! j! (Gamma-2j)!) q^2j (1-2q)^(Gamma-2j)`
    /// and `q = (k - l)/n`: the probability that a test of `Gamma` uniform
    /// slots cannot tell a fixed overlap-`l` configuration from the truth.
    /// This is the exact first moment; `k_per_test` is ignored.
    #[default]
    FullSum,
    /// The same product with the inner sum restricted to `1 <= j <= k_i`.
    Truncated,
    /// `C(k,l) C(n-k,k-l) (E[X^-1/2] / sqrt(2 pi))^m` with `X ~ Bin(Gamma, 2q)` given `X >= 1`.
    RandomWalk,
    /// `C(k,l) C(n-k,k-l) (2 pi E[X])^(-m/2)` with `X ~ Bin(Gamma, 2q)`.
    Jensen,
}

/// `ln` of the first-moment expression for `E[Z_{k,l}]` selected by `mode`.
/// Returns `-inf` when a factor vanishes.
pub fn expected_z_bound(params: &ProblemParams, ell: usize, k_per_test: &[u32], mode: ZBoundMode) -> Result<f64> {
    let (n, k, gamma, m) = (params.n, params.k, params.gamma, params.m);
    if ell > k {
        return Err(Error::OutOfDomain(format!("overlap {ell} exceeds k = {k}")));
    }
    if k_per_test.len() != m {
        return Err(Error::DimensionMismatch { what: "k_per_test", expected: m, found: k_per_test.len() });
    }
    let prefix = ln_choose(k as f64, ell as f64) + ln_choose((n - k) as f64, (k - ell) as f64);
    if m == 0 {
        return Ok(prefix);
    }
    let q = (k - ell) as f64 / n as f64;
    let mf = m as f64;
    let per_test = match mode {
        // The truth is the only overlap-k configuration and is not counted.
        ZBoundMode::FullSum if ell == k => f64::NEG_INFINITY,
        ZBoundMode::FullSum => mf * ln_tie_probability(gamma, q, gamma / 2),
        ZBoundMode::Truncated => k_per_test.iter().map(|&ki| ln_tie_probability_from(gamma, q, 1, ki as usize)).sum(),
        ZBoundMode::RandomWalk => {
            if ell == k {
                return Err(Error::OutOfDomain("the random-walk form needs l < k".into()));
            }
            let moments = truncated_binomial_moments(gamma as u64, 2.0 * q);
            mf * (moments.inv_sqrt / (2.0 * std::f64::consts::PI).sqrt()).ln()
        }
        ZBoundMode::Jensen => -0.5 * mf * (2.0 * std::f64::consts::PI * gamma as f64 * 2.0 * q).ln(),
    };
    Ok(prefix + per_test)
}

fn ln_tie_probability(gamma: usize, q: f64, upper: usize) -> f64 {
    ln_tie_probability_from(gamma, q, 0, upper)
}

/// `ln sum_{j=lo}^{min(hi, Gamma/2)}` of the trinomial tie terms.
fn ln_tie_probability_from(gamma: usize, q: f64, lo: usize, hi: usize) -> f64 {
    let hi = hi.min(gamma / 2);
    if lo > hi {
        return f64::NEG_INFINITY;
    }
    let g = gamma as f64;
    let ln_g = ln_factorial(g);
    let rest = 1.0 - 2.0 * q;
    log_sum_exp((lo..=hi).map(|j| {
        let jf = j as f64;
        let free = g - 2.0 * jf;
        ln_g - 2.0 * ln_factorial(jf) - ln_factorial(free) + super::xlny(2.0 * jf, q) + super::xlny(free, rest)
    }))
}

fn ln_factorial(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, k: usize, m: usize) -> ProblemParams {
        ProblemParams::with_k(n, k, m).unwrap()
    }

    #[test]
    fn empty_design_counts_configurations() {
        let p = params(30, 3, 0);
        for mode in [ZBoundMode::FullSum, ZBoundMode::Truncated, ZBoundMode::Jensen] {
            let v = expected_z_bound(&p, 1, &[], mode).unwrap();
            assert!((v - (3.0f64 * 351.0).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn full_overlap_vanishes() {
        let p = params(30, 3, 4);
        let ki = [1, 2, 0, 3];
        assert_eq!(expected_z_bound(&p, 3, &ki, ZBoundMode::Truncated).unwrap(), f64::NEG_INFINITY);
        // The only overlap-k configuration is the truth, so its count is 0.
        assert_eq!(expected_z_bound(&p, 3, &ki, ZBoundMode::FullSum).unwrap(), f64::NEG_INFINITY);
        assert!(expected_z_bound(&p, 3, &ki, ZBoundMode::RandomWalk).is_err());
    }

    #[test]
    fn tie_probability_matches_enumeration() {
        // Gamma = 3 slots, each in category a (prob q), b (prob q) or neither.
        let q = 0.1f64;
        let mut direct = 0.0;
        for code in 0..27u32 {
            let (mut a, mut b, mut c, mut prob) = (0, 0, code, 1.0);
            for _ in 0..3 {
                match c % 3 {
                    0 => {
                        a += 1;
                        prob *= q;
                    }
                    1 => {
                        b += 1;
                        prob *= q;
                    }
                    _ => prob *= 1.0 - 2.0 * q,
                }
                c /= 3;
            }
            if a == b {
                direct += prob;
            }
        }
        assert!((ln_tie_probability(3, q, 1).exp() - direct).abs() < 1e-15);
    }

    #[test]
    fn frozen_small_instance() {
        // Independent summation at n = 30, k = 3, m = 10, Gamma = 15.
        let p = params(30, 3, 10);
        let expected = [0.001_527_556_327_7, 0.005_844_647_337_6, 0.030_961_130_356_6];
        for (ell, e) in expected.iter().enumerate() {
            let v = expected_z_bound(&p, ell, &[0; 10], ZBoundMode::FullSum).unwrap().exp();
            assert!((v / e - 1.0).abs() < 1e-9, "l = {ell}: {v}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = params(30, 3, 2);
        assert!(expected_z_bound(&p, 4, &[1, 1], ZBoundMode::FullSum).is_err());
        assert!(expected_z_bound(&p, 1, &[1], ZBoundMode::FullSum).is_err());
    }
}
