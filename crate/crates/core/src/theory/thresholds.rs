use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::infected_count;

/// Constant of the BCH-code based decoder's test count `c_BCH k ln(n/k)`.
pub const C_BCH: f64 = 1.72;

/// Test-count thresholds for one `(n, theta)`, all in natural logarithms and
/// with `k = round(n^theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub n: usize,
    pub theta: f64,
    pub k: usize,
    /// `2 k ln(n/k) / ln k`, sufficient for exhaustive decoding.
    pub m_inf: f64,
    /// `(1 + sqrt(theta)) / (1 - sqrt(theta)) k ln(n/k)`, sufficient for greedy decoding.
    pub m_greedy: f64,
    /// `k ln(n/k) / ln k`, the adaptive counting bound.
    pub m_adapt: f64,
    /// `min(greedy coefficient, C_BCH) k ln(n/k)`.
    pub m_alg: f64,
    pub c_bch: f64,
    /// `2 k ln(n/k) / ln k`, the non-adaptive counting lower bound.
    pub dyachkov_lower: f64,
    /// Sparsity below which the greedy coefficient beats `C_BCH`.
    pub bch_crossover: f64,
}

pub(crate) fn greedy_coefficient(theta: f64) -> f64 {
    let s = theta.sqrt();
    (1.0 + s) / (1.0 - s)
}

/// `theta*` solving `(1 + sqrt(theta)) / (1 - sqrt(theta)) = C_BCH`.
pub fn bch_crossover() -> f64 {
    ((C_BCH - 1.0) / (C_BCH + 1.0)).powi(2)
}

pub fn compute_thresholds(n: usize, theta: f64) -> Result<ThresholdReport> {
    if n < 4 {
        return Err(Error::InvalidParams(format!("n must be at least 4, got {n}")));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParams(format!("theta must lie in (0, 1), got {theta}")));
    }
    let k = infected_count(n, theta);
    let kf = k as f64;
    let base = kf * (n as f64 / kf).ln();
    // ln k = 0 at k = 1 makes both counting bounds infinite.
    let m_adapt = base / kf.ln();
    let coefficient = greedy_coefficient(theta);
    Ok(ThresholdReport {
        n,
        theta,
        k,
        m_inf: 2.0 * m_adapt,
        m_greedy: coefficient * base,
        m_adapt,
        m_alg: coefficient.min(C_BCH) * base,
        c_bch: C_BCH,
        dyachkov_lower: 2.0 * base / kf.ln(),
        bch_crossover: bch_crossover(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_point() {
        let r = compute_thresholds(10_000, 0.5).unwrap();
        assert_eq!(r.k, 100);
        assert!((r.m_inf / 200.0 - 1.0).abs() < 1e-12);
        assert!((r.m_adapt / 100.0 - 1.0).abs() < 1e-12);
        let base = 100.0 * 100f64.ln();
        assert!((r.m_greedy - (3.0 + 2.0 * 2f64.sqrt()) * base).abs() < 1e-9);
        assert!((r.m_greedy - 2684.1).abs() < 0.1);
        assert!((r.m_alg - 1.72 * base).abs() < 1e-9);
        assert!((r.m_alg - 792.1).abs() < 0.05);
        // k = n^theta exactly here, so the two forms of the counting bound agree.
        assert!((r.m_inf - 2.0 * (1.0 - 0.5) / 0.5 * 100.0).abs() < 1e-9);
        assert_eq!(r.m_inf, r.dyachkov_lower);
    }

    #[test]
    fn greedy_at_n1000() {
        let r = compute_thresholds(1000, 0.3).unwrap();
        assert_eq!(r.k, 8);
        assert!((r.m_greedy - 132.2).abs() < 0.05);
    }

    #[test]
    fn crossover() {
        let t = bch_crossover();
        assert!((t - 0.070_07).abs() < 1e-4);
        assert!((greedy_coefficient(t) - C_BCH).abs() < 1e-12);
        // Below the crossover the greedy coefficient wins.
        assert!(greedy_coefficient(0.05) < C_BCH);
        assert!(greedy_coefficient(0.1) > C_BCH);
    }

    #[test]
    fn ordering_over_theta_grid() {
        // At n = 10^6 every theta in [0.1, 0.9] has ln k large enough for the
        // greedy count to exceed the exhaustive one.
        for i in 1..=9 {
            let theta = i as f64 / 10.0;
            let r = compute_thresholds(1_000_000, theta).unwrap();
            assert!(r.m_adapt < r.m_inf, "theta {theta}");
            assert!(r.m_inf < r.m_greedy, "theta {theta}");
            assert!(r.m_alg <= r.m_greedy);
        }
    }

    #[test]
    fn ordering_can_flip_for_tiny_k() {
        // k = 2 at n = 1000, theta = 0.1: the greedy count is below m_inf.
        let r = compute_thresholds(1000, 0.1).unwrap();
        assert_eq!(r.k, 2);
        assert!(r.m_greedy < r.m_inf);
    }

    #[test]
    fn rejects_bad_theta() {
        assert!(compute_thresholds(100, 0.0).is_err());
        assert!(compute_thresholds(100, 1.2).is_err());
        assert!(compute_thresholds(3, 0.5).is_err());
    }
}
