//! Problem parameters, infection configurations and test results.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pooling::PoolingGraph;

/// Parameters of one QGT instance family.
///
/// `k = round(n^theta)` clamped to `[1, n - 1]`, and the test size is
/// `gamma = floor(n / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub n: usize,
    pub theta: f64,
    pub k: usize,
    pub gamma: usize,
    pub m: usize,
    pub eps: f64,
}

impl ProblemParams {
    pub fn new(n: usize, theta: f64, m: usize, eps: f64) -> Result<Self> {
        derive_params(n, theta, m, eps)
    }

    /// Parameters with an explicit number of infected individuals. `theta`
    /// is recorded as `ln k / ln n`.
    pub fn with_k(n: usize, k: usize, m: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidParams(format!("n must be at least 4, got {n}")));
        }
        if k == 0 || k >= n {
            return Err(Error::InvalidParams(format!("k must lie in [1, n-1], got {k}")));
        }
        Ok(Self {
            n,
            theta: (k as f64).ln() / (n as f64).ln(),
            k,
            gamma: n / 2,
            m,
            eps: 0.0,
        })
    }

    pub fn with_m(self, m: usize) -> Self {
        Self { m, ..self }
    }
}

/// Number of infected individuals for population `n` and sparsity `theta`.
pub fn infected_count(n: usize, theta: f64) -> usize {
    let k = (n as f64).powf(theta).round() as usize;
    k.clamp(1, n - 1)
}

pub fn derive_params(n: usize, theta: f64, m: usize, eps: f64) -> Result<ProblemParams> {
    if n < 4 {
        return Err(Error::InvalidParams(format!("n must be at least 4, got {n}")));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParams(format!("theta must lie in (0, 1), got {theta}")));
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::InvalidParams(format!("eps must be non-negative, got {eps}")));
    }
    Ok(ProblemParams {
        n,
        theta,
        k: infected_count(n, theta),
        gamma: n / 2,
        m,
        eps,
    })
}

/// A 0/1 labeling of the population (1 = infected).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    labels: Vec<bool>,
    weight: usize,
}

impl Configuration {
    pub fn from_labels(labels: Vec<bool>) -> Self {
        let weight = labels.iter().filter(|&&b| b).count();
        Self { labels, weight }
    }

    pub fn healthy(n: usize) -> Self {
        Self { labels: vec![false; n], weight: 0 }
    }

    pub fn from_support(n: usize, support: &[usize]) -> Result<Self> {
        let mut labels = vec![false; n];
        for &i in support {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            labels[i] = true;
        }
        Ok(Self::from_labels(labels))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    #[inline]
    pub fn is_infected(&self, i: usize) -> bool {
        self.labels[i]
    }

    pub fn support(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    /// Sets label `i`, keeping the weight in sync.
    pub fn set(&mut self, i: usize, infected: bool) {
        match (self.labels[i], infected) {
            (false, true) => self.weight += 1,
            (true, false) => self.weight -= 1,
            _ => {}
        }
        self.labels[i] = infected;
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.labels.iter().map(|&b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let labels = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParams(format!("invalid label character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_labels(labels))
    }
}

impl Serialize for Configuration {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Configuration {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Per-test infected counts, with multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TestResults(pub Vec<u32>);

impl TestResults {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&y| y as u64).sum()
    }
}

impl fmt::Display for TestResults {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, y) in self.0.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            write!(f, "{y}")?;
        }
        Ok(())
    }
}

impl FromStr for TestResults {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Ok(Self(Vec::new()));
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::InvalidParams(format!("bad test result {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl Serialize for TestResults {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { what, expected, found });
    }
    Ok(())
}

/// Test results produced by `config` on `graph`. An individual occurring `t`
/// times in a test contributes `t` when infected.
pub fn encode(graph: &PoolingGraph, config: &Configuration) -> Result<TestResults> {
    check_len("configuration length", graph.n(), config.len())?;
    let labels = config.labels();
    let y = (0..graph.m())
        .map(|j| graph.test(j).iter().filter(|&&i| labels[i as usize]).count() as u32)
        .collect();
    Ok(TestResults(y))
}

pub fn overlap(a: &Configuration, b: &Configuration) -> Result<usize> {
    check_len("configuration length", a.len(), b.len())?;
    Ok(a.labels().iter().zip(b.labels()).filter(|(&x, &y)| x && y).count())
}

pub fn is_consistent(graph: &PoolingGraph, config: &Configuration, y: &TestResults) -> Result<bool> {
    check_len("test result length", graph.m(), y.len())?;
    Ok(encode(graph, config)? == *y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fig1;

    #[test]
    fn derive_params_examples() {
        let p = derive_params(10_000, 0.5, 200, 0.0).unwrap();
        assert_eq!((p.k, p.gamma, p.m), (100, 5000, 200));
        let p = derive_params(1000, 0.3, 300, 0.0).unwrap();
        assert_eq!((p.k, p.gamma), (8, 500));
        let p = derive_params(4, 0.5, 1, 0.0).unwrap();
        assert_eq!((p.k, p.gamma), (2, 2));
    }

    #[test]
    fn derive_params_rejects_bad_input() {
        assert!(derive_params(3, 0.5, 1, 0.0).is_err());
        assert!(derive_params(100, 0.0, 1, 0.0).is_err());
        assert!(derive_params(100, 1.0, 1, 0.0).is_err());
        assert!(derive_params(100, f64::NAN, 1, 0.0).is_err());
        assert!(derive_params(100, 0.5, 1, -1.0).is_err());
    }

    #[test]
    fn k_is_clamped() {
        // 5^0.01 rounds to 1, 5^0.999 rounds to 5 which clamps to 4.
        assert_eq!(infected_count(5, 0.01), 1);
        assert_eq!(infected_count(5, 0.999), 4);
    }

    #[test]
    fn fig1_encoding() {
        let (g, truth, y) = fig1();
        assert_eq!(encode(&g, &truth).unwrap().0, vec![2, 2, 3, 1, 1]);
        assert_eq!(y.0, vec![2, 2, 3, 1, 1]);
        assert!(is_consistent(&g, &truth, &y).unwrap());
        assert!(!is_consistent(&g, &Configuration::healthy(7), &y).unwrap());
    }

    #[test]
    fn extreme_configurations() {
        let (g, _, _) = fig1();
        assert_eq!(encode(&g, &Configuration::healthy(7)).unwrap().0, vec![0; 5]);
        let all = Configuration::from_labels(vec![true; 7]);
        let sizes: Vec<u32> = (0..g.m()).map(|j| g.test(j).len() as u32).collect();
        assert_eq!(encode(&g, &all).unwrap().0, sizes);
    }

    #[test]
    fn overlap_examples() {
        let a: Configuration = "1100100".parse().unwrap();
        let b: Configuration = "1110000".parse().unwrap();
        assert_eq!(overlap(&a, &b).unwrap(), 2);
        assert_eq!(overlap(&a, &a).unwrap(), 3);
        let c: Configuration = "0011011".parse().unwrap();
        assert_eq!(overlap(&a, &c).unwrap(), 0);
        assert!(overlap(&a, &"11".parse().unwrap()).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let (g, _, y) = fig1();
        assert!(matches!(
            encode(&g, &Configuration::healthy(6)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(is_consistent(&g, &Configuration::healthy(7), &TestResults(vec![0; 4])).is_err());
        assert!(is_consistent(&g, &Configuration::healthy(8), &y).is_err());
    }

    #[test]
    fn text_forms() {
        let (_, truth, y) = fig1();
        assert_eq!(truth.to_string(), "1100100");
        assert_eq!(y.to_string(), "2,2,3,1,1");
        assert_eq!("2,2,3,1,1".parse::<TestResults>().unwrap(), y);
        assert!("1102".parse::<Configuration>().is_err());
    }

    #[test]
    fn set_tracks_weight() {
        let mut c = Configuration::healthy(4);
        c.set(1, true);
        c.set(1, true);
        c.set(3, true);
        assert_eq!(c.weight(), 2);
        c.set(1, false);
        assert_eq!(c.weight(), 1);
        assert_eq!(c.support(), vec![3]);
    }
}
