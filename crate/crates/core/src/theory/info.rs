use crate::error::{Error, Result};

use super::xlny;

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain(format!("{name} = {x} is not in [0, 1]")));
    }
    Ok(())
}

/// Bernoulli entropy in nats.
pub fn entropy(a: f64) -> Result<f64> {
    check_unit("a", a)?;
    Ok(-xlny(a, a) - xlny(1.0 - a, 1.0 - a))
}

/// `D(p || q)` between Bernoulli laws, in nats. Infinite when `q` puts no
/// mass where `p` does.
pub fn kl_divergence(p: f64, q: f64) -> Result<f64> {
    check_unit("p", p)?;
    check_unit("q", q)?;
    let term = |a: f64, b: f64| -> f64 {
        if a == 0.0 {
            0.0
        } else if b == 0.0 {
            f64::INFINITY
        } else {
            a * (a / b).ln()
        }
    };
    Ok(term(p, q) + term(1.0 - p, 1.0 - q))
}

pub fn entropy_and_kl(a: f64, p: f64, q: f64) -> Result<(f64, f64)> {
    Ok((entropy(a)?, kl_divergence(p, q)?))
}
