use serde::Serialize;

use super::info::entropy;
use super::xlny;
use crate::error::{Error, Result};

/// Tolerance on `|f'|` for a point to count as a stationary maximum.
pub const AT_MAX_TOL: f64 = 1e-9;

/// Which test-count term the rate function carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RateForm {
    /// `c k ln(k/n) / (2 ln k) * ln(2 pi k (1 - l/k))`, the finite expansion.
    #[default]
    Finite,
    /// The same term with `ln(2 pi k (1 - l/k))` replaced by its leading
    /// order `ln k`, i.e. `c k ln(k/n) / 2`. Its stationary point is exactly `l = k^2/n`.
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEvaluation {
    pub ell: f64,
    pub value: f64,
    pub derivative: f64,
    pub at_max: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateMaximum {
    /// Integer overlap with the largest `f`.
    pub ell: usize,
    pub value: f64,
    /// `k^2 / n`, the stationary point of the entropy part.
    pub continuous_peak: f64,
    /// True when `k^2/n < 1`, so the peak lies below the first nonzero integer overlap.
    pub boundary: bool,
}

/// Largest admissible overlap `k - ln k`.
pub fn rate_domain_max(k: usize) -> f64 {
    k as f64 - (k as f64).ln()
}

fn check(n: usize, k: usize, c: f64, ell: f64) -> Result<()> {
    if k < 2 || n <= 2 * k {
        return Err(Error::InvalidParams(format!("need 2 <= k and 2k < n, got n = {n}, k = {k}")));
    }
    if c.is_nan() || c <= 0.0 {
        return Err(Error::InvalidParams(format!("c must be positive, got {c}")));
    }
    if !(ell >= 0.0 && ell <= rate_domain_max(k)) {
        return Err(Error::OutOfDomain(format!("overlap {ell} outside [0, k - ln k]")));
    }
    Ok(())
}

/// `f(n, k, l)` without domain checks.
pub fn rate_value(n: usize, k: usize, c: f64, ell: f64, form: RateForm) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    let d = kf - ell;
    let entropic = -xlny(ell, ell / kf) - xlny(d, d / kf) - xlny(d, d / (nf - kf))
        - xlny(nf - 2.0 * kf + ell, 1.0 - d / (nf - kf));
    let penalty = match form {
        RateForm::Finite => c * kf * (kf / nf).ln() / (2.0 * kf.ln()) * (2.0 * std::f64::consts::PI * d).ln(),
        RateForm::Asymptotic => c * kf * (kf / nf).ln() / 2.0,
    };
    (entropic + penalty) / nf
}

/// `df/dl` without domain checks.
pub fn rate_derivative(n: usize, k: usize, c: f64, ell: f64, form: RateForm) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    let d = kf - ell;
    // ln((k-l)/k) + ln((k-l)/(n-k)) - ln(l/k) - ln((n-2k+l)/(n-k))
    let entropic = (d * d).ln() - (ell * (nf - 2.0 * kf + ell)).ln();
    let penalty = match form {
        RateForm::Finite => -c * (kf / nf).ln() / (2.0 * (1.0 - ell / kf) * kf.ln()),
        RateForm::Asymptotic => 0.0,
    };
    (entropic + penalty) / nf
}

/// `d^2f/dl^2` without domain checks.
pub fn rate_second_derivative(n: usize, k: usize, c: f64, ell: f64, form: RateForm) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    let d = kf - ell;
    let entropic = -1.0 / ell - 2.0 / d - 1.0 / (nf - 2.0 * kf + ell);
    let penalty = match form {
        RateForm::Finite => -c * (kf / nf).ln() * kf / (2.0 * kf.ln() * d * d),
        RateForm::Asymptotic => 0.0,
    };
    (entropic + penalty) / nf
}

/// Evaluates `f`, `f'` and the stationary-maximum flag in the given form.
pub fn rate_f_form(n: usize, k: usize, c: f64, ell: f64, form: RateForm) -> Result<RateEvaluation> {
    check(n, k, c, ell)?;
    let derivative = rate_derivative(n, k, c, ell, form);
    let at_max = derivative.abs() <= AT_MAX_TOL && rate_second_derivative(n, k, c, ell, form) < 0.0;
    Ok(RateEvaluation { ell, value: rate_value(n, k, c, ell, form), derivative, at_max })
}

/// [`rate_f_form`] with the finite expansion.
pub fn rate_f(n: usize, k: usize, c: f64, ell: f64) -> Result<RateEvaluation> {
    rate_f_form(n, k, c, ell, RateForm::Finite)
}

/// The coefficient above which `f(k^2/n) < 0` in the asymptotic form:
/// `-2 H(k/n) / ((k/n) ln(k/n))`.
pub fn c_star(n: usize, k: usize) -> Result<f64> {
    if k == 0 || k >= n {
        return Err(Error::InvalidParams(format!("need 0 < k < n, got n = {n}, k = {k}")));
    }
    let a = k as f64 / n as f64;
    Ok(-2.0 * entropy(a)? / (a * a.ln()))
}

/// Scans the integer overlaps `0..=floor(k - ln k)` for the largest `f`.
pub fn integer_maximizer(n: usize, k: usize, c: f64, form: RateForm) -> Result<RateMaximum> {
    check(n, k, c, 0.0)?;
    let top = rate_domain_max(k).floor() as usize;
    let (ell, value) = (0..=top)
        .map(|l| (l, rate_value(n, k, c, l as f64, form)))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    let continuous_peak = (k * k) as f64 / n as f64;
    Ok(RateMaximum { ell, value, continuous_peak, boundary: continuous_peak < 1.0 })
}
