//! Maximum Neighborhood greedy decoding, exhaustive decoding and the overlap
//! spectrum of alternative solutions.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{self, Configuration, TestResults};
use crate::pooling::PoolingGraph;

/// Default bound on the number of weight-`k` candidates an exhaustive search
/// may visit.
pub const DEFAULT_CAP: u128 = 10_000_000;

/// How a test result is credited to an individual that occupies several
/// slots of the same test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum ScoreWeighting {
    /// Once per slot (`sum_j v_ij * y_j`).
    #[default]
    Multiplicity,
    /// Once per distinct test.
    Distinct,
}

/// Greedy statistics per individual.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub psi: Vec<u64>,
    /// `psi_i * (m / 2) / delta_i`, or 0 when `delta_i = 0`.
    pub psi_norm: Vec<f64>,
    /// `psi_i - delta_i` for infected and `psi_i` for healthy individuals;
    /// only available when the planted configuration is supplied.
    pub phi: Option<Vec<u64>>,
    pub degrees: Vec<u32>,
}

impl ScoreVector {
    pub fn from_parts(m: usize, degrees: Vec<u32>, psi: Vec<u64>, truth: Option<&Configuration>) -> Self {
        let half_m = m as f64 / 2.0;
        let psi_norm = psi
            .iter()
            .zip(&degrees)
            .map(|(&p, &d)| if d == 0 { 0.0 } else { p as f64 * half_m / d as f64 })
            .collect();
        let phi = truth.map(|t| {
            psi.iter()
                .zip(&degrees)
                .enumerate()
                .map(|(i, (&p, &d))| if t.is_infected(i) { p - d as u64 } else { p })
                .collect()
        });
        Self { psi, psi_norm, phi, degrees }
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    /// Exact comparison of normalized scores, largest first. Individuals with
    /// no tests rank after everyone else; remaining ties go to the smaller
    /// index. Ratios are compared as `psi_a * delta_b` against
    /// `psi_b * delta_a`, so rounding never splits a tie.
    pub fn rank_cmp(&self, a: usize, b: usize) -> Ordering {
        let (da, db) = (self.degrees[a], self.degrees[b]);
        match (da == 0, db == 0) {
            (true, false) => return Ordering::Greater,
            (false, true) => return Ordering::Less,
            (true, true) => return a.cmp(&b),
            _ => {}
        }
        let lhs = self.psi[a] as u128 * db as u128;
        let rhs = self.psi[b] as u128 * da as u128;
        rhs.cmp(&lhs).then(a.cmp(&b))
    }

    /// All individuals ordered by decreasing normalized score.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_unstable_by(|&a, &b| self.rank_cmp(a, b));
        order
    }
}

pub fn compute_scores(
    graph: &PoolingGraph,
    y: &TestResults,
    truth: Option<&Configuration>,
) -> Result<ScoreVector> {
    compute_scores_weighted(graph, y, truth, ScoreWeighting::Multiplicity)
}

pub fn compute_scores_weighted(
    graph: &PoolingGraph,
    y: &TestResults,
    truth: Option<&Configuration>,
    weighting: ScoreWeighting,
) -> Result<ScoreVector> {
    if y.len() != graph.m() {
        return Err(Error::DimensionMismatch { what: "test result length", expected: graph.m(), found: y.len() });
    }
    if let Some(t) = truth {
        if t.len() != graph.n() {
            return Err(Error::DimensionMismatch { what: "configuration length", expected: graph.n(), found: t.len() });
        }
    }
    let ys = y.as_slice();
    let psi = (0..graph.n())
        .map(|i| {
            graph
                .adjacency(i)
                .iter()
                .map(|&(j, v)| {
                    let w = match weighting {
                        ScoreWeighting::Multiplicity => v as u64,
                        ScoreWeighting::Distinct => 1,
                    };
                    w * ys[j as usize] as u64
                })
                .sum()
        })
        .collect();
    Ok(ScoreVector::from_parts(graph.m(), graph.degrees().to_vec(), psi, truth))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeResult {
    pub estimate: Configuration,
    /// Exact recovery of the planted configuration, when one was supplied.
    pub success: Option<bool>,
    /// Smallest normalized score declared infected minus the largest declared
    /// healthy. Absent when either side is empty or for exhaustive decoding.
    pub score_margin: Option<f64>,
}

/// Declares the `k` individuals with the largest normalized scores infected.
pub fn mn_decode_scores(scores: &ScoreVector, k: usize, truth: Option<&Configuration>) -> Result<DecodeResult> {
    let n = scores.len();
    if k > n {
        return Err(Error::InvalidParams(format!("k = {k} exceeds population {n}")));
    }
    let order = scores.ranking();
    let estimate = Configuration::from_support(n, &order[..k])?;
    let score_margin = (k > 0 && k < n).then(|| {
        let lowest_in = order[..k].iter().map(|&i| scores.psi_norm[i]).fold(f64::INFINITY, f64::min);
        let highest_out = order[k..].iter().map(|&i| scores.psi_norm[i]).fold(f64::NEG_INFINITY, f64::max);
        lowest_in - highest_out
    });
    let success = truth.map(|t| *t == estimate);
    Ok(DecodeResult { estimate, success, score_margin })
}

pub fn mn_decode(graph: &PoolingGraph, y: &TestResults, k: usize) -> Result<DecodeResult> {
    let scores = compute_scores(graph, y, None)?;
    mn_decode_scores(&scores, k, None)
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn candidate_count(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // c * (n - i) / (i + 1) stays integral at every step.
        match c.checked_mul((n - i) as u128) {
            Some(v) => c = v / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    c
}

fn guard(n: usize, k: usize, cap: u128) -> Result<()> {
    let candidates = candidate_count(n, k);
    if candidates > cap {
        return Err(Error::InstanceTooLarge { candidates, cap });
    }
    Ok(())
}

struct Search<'a> {
    graph: &'a PoolingGraph,
    target: &'a [u32],
    partial: Vec<u32>,
    /// `sum_j (target_j - partial_j)`; every partial_j stays <= target_j.
    deficit: u64,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, start: usize, remaining: usize, out: &mut Vec<Configuration>) {
        let n = self.graph.n();
        if remaining == 0 {
            if self.deficit == 0 {
                out.push(Configuration::from_support(n, &self.chosen).expect("indices in range"));
            }
            return;
        }
        for i in start..=(n - remaining) {
            if self.try_add(i) {
                self.chosen.push(i);
                self.run(i + 1, remaining - 1, out);
                self.chosen.pop();
                self.remove(i);
            }
        }
    }

    /// Adds individual `i` unless that overshoots some test.
    fn try_add(&mut self, i: usize) -> bool {
        let adj = self.graph.adjacency(i);
        if adj.iter().any(|&(j, v)| self.partial[j as usize] + v > self.target[j as usize]) {
            return false;
        }
        for &(j, v) in adj {
            self.partial[j as usize] += v;
        }
        self.deficit -= self.graph.degree(i) as u64;
        true
    }

    fn remove(&mut self, i: usize) {
        for &(j, v) in self.graph.adjacency(i) {
            self.partial[j as usize] -= v;
        }
        self.deficit += self.graph.degree(i) as u64;
    }
}

/// All weight-`k` configurations consistent with `y`, in lexicographic order
/// of their sorted supports. Branches are cut as soon as a partial support
/// overshoots a test result.
pub fn exhaustive_solutions(graph: &PoolingGraph, y: &TestResults, k: usize, cap: u128) -> Result<Vec<Configuration>> {
    let n = graph.n();
    if y.len() != graph.m() {
        return Err(Error::DimensionMismatch { what: "test result length", expected: graph.m(), found: y.len() });
    }
    if k > n {
        return Err(Error::InvalidParams(format!("k = {k} exceeds population {n}")));
    }
    guard(n, k, cap)?;
    let mut search = Search {
        graph,
        target: y.as_slice(),
        partial: vec![0; graph.m()],
        deficit: y.total(),
        chosen: Vec::with_capacity(k),
    };
    let mut out = Vec::new();
    search.run(0, k, &mut out);
    Ok(out)
}

/// Counts consistent alternatives to `truth` by their overlap with it:
/// entry `l` is the number of weight-`k` solutions `sigma != truth` sharing
/// `l` infected individuals with `truth`.
pub fn overlap_spectrum(graph: &PoolingGraph, y: &TestResults, truth: &Configuration, cap: u128) -> Result<Vec<u64>> {
    let k = truth.weight();
    guard(graph.n(), k, cap)?;
    if !model::is_consistent(graph, truth, y)? {
        return Err(Error::InconsistentTruth);
    }
    let mut z = vec![0u64; k + 1];
    for sigma in exhaustive_solutions(graph, y, k, cap)? {
        if sigma != *truth {
            z[model::overlap(truth, &sigma)?] += 1;
        }
    }
    Ok(z)
}

/// Exhaustive decoding. The estimate is the first solution in enumeration
/// order (all healthy when there is none); success means the planted
/// configuration is the only solution.
pub fn exhaustive_decode(
    graph: &PoolingGraph,
    y: &TestResults,
    k: usize,
    cap: u128,
    truth: Option<&Configuration>,
) -> Result<DecodeResult> {
    let solutions = exhaustive_solutions(graph, y, k, cap)?;
    let success = truth.map(|t| solutions.len() == 1 && solutions[0] == *t);
    let estimate = solutions.into_iter().next().unwrap_or_else(|| Configuration::healthy(graph.n()));
    Ok(DecodeResult { estimate, success, score_margin: None })
}
