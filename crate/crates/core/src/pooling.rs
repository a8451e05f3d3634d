//! Random pooling designs and their structural diagnostics.
//!
//! A design is a bipartite multigraph: each of the `m` tests holds `gamma`
//! slots, and every slot is an independent uniform draw from the population.
//! An individual drawn twice into the same test occupies two slots.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Configuration, ProblemParams, TestResults};
use crate::rng::{self, Xoshiro256PlusPlus};

/// Draws the slots of successive tests from one seeded stream.
///
/// [`generate`] and the streaming trial paths both read tests through this
/// type, so a materialized graph and a streamed one agree slot for slot.
pub struct SlotSampler {
    rng: Xoshiro256PlusPlus,
    n: u64,
}

impl SlotSampler {
    pub fn new(n: usize, seed: u64) -> Self {
        Self { rng: rng::stream(seed), n: n as u64 }
    }

    #[inline]
    pub fn fill(&mut self, slots: &mut [u32]) {
        for s in slots {
            *s = rng::below(&mut self.rng, self.n) as u32;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolingGraph {
    n: usize,
    gamma: usize,
    /// Concatenated slots of all tests; test `j` is `slots[offsets[j]..offsets[j + 1]]`.
    slots: Vec<u32>,
    offsets: Vec<usize>,
    degrees: Vec<u32>,
    /// Per-individual `(test, multiplicity)` pairs in increasing test order.
    adjacency: Vec<Vec<(u32, u32)>>,
}

impl PoolingGraph {
    /// Builds a graph from explicit test multisets. Tests may have different
    /// sizes here; `gamma` is recorded as the nominal test size.
    pub fn from_tests(n: usize, gamma: usize, tests: &[Vec<u32>]) -> Result<Self> {
        let mut slots = Vec::with_capacity(tests.iter().map(Vec::len).sum());
        let mut offsets = Vec::with_capacity(tests.len() + 1);
        offsets.push(0);
        for t in tests {
            for &i in t {
                if i as usize >= n {
                    return Err(Error::IndexOutOfRange { index: i as usize, n });
                }
            }
            slots.extend_from_slice(t);
            offsets.push(slots.len());
        }
        Ok(Self::from_parts(n, gamma, slots, offsets))
    }

    fn from_parts(n: usize, gamma: usize, slots: Vec<u32>, offsets: Vec<usize>) -> Self {
        let m = offsets.len() - 1;
        let mut degrees = vec![0u32; n];
        let mut adjacency: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        for j in 0..m {
            for &i in &slots[offsets[j]..offsets[j + 1]] {
                degrees[i as usize] += 1;
                let adj = &mut adjacency[i as usize];
                match adj.last_mut() {
                    Some((t, v)) if *t == j as u32 => *v += 1,
                    _ => adj.push((j as u32, 1)),
                }
            }
        }
        Self { n, gamma, slots, offsets, degrees, adjacency }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    /// Slots of test `j`, one entry per occurrence.
    pub fn test(&self, j: usize) -> &[u32] {
        &self.slots[self.offsets[j]..self.offsets[j + 1]]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    pub fn adjacency(&self, i: usize) -> &[(u32, u32)] {
        &self.adjacency[i]
    }

    pub fn total_slots(&self) -> usize {
        self.slots.len()
    }

    /// Writes the dump format: a header `n m gamma seed`, then one line of
    /// zero-based slot indices per test.
    pub fn dump(&self, seed: u64) -> String {
        let mut out = String::with_capacity(self.slots.len() * 6 + 64);
        writeln!(out, "{} {} {} {}", self.n, self.m(), self.gamma, seed).unwrap();
        for j in 0..self.m() {
            for (pos, i) in self.test(j).iter().enumerate() {
                if pos > 0 {
                    out.push(' ');
                }
                write!(out, "{i}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Samples a design: `m` tests of `gamma` slots, each slot uniform on `0..n`.
pub fn generate(params: &ProblemParams, seed: u64) -> PoolingGraph {
    let (n, m, gamma) = (params.n, params.m, params.gamma);
    let mut sampler = SlotSampler::new(n, seed);
    let mut slots = vec![0u32; m * gamma];
    sampler.fill(&mut slots);
    let offsets = (0..=m).map(|j| j * gamma).collect();
    PoolingGraph::from_parts(n, gamma, slots, offsets)
}

/// Number of distinct tests containing individual `i`.
pub fn distinct_test_count(graph: &PoolingGraph, i: usize) -> Result<usize> {
    if i >= graph.n() {
        return Err(Error::IndexOutOfRange { index: i, n: graph.n() });
    }
    Ok(graph.adjacency(i).len())
}

/// Regularity diagnostics of a design with respect to a planted configuration.
///
/// `k_min`/`k_max` count infected slots per test (with multiplicity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RDiagnostics {
    pub delta_min: u32,
    pub delta_max: u32,
    pub k_min: u32,
    pub k_max: u32,
    pub delta_inf_star: u64,
    pub cond_i: bool,
    pub cond_ii: bool,
    pub cond_iii: bool,
    pub distinct_min: u32,
    /// Set when the planted configuration has weight zero; conditions (ii)
    /// and (iii) are then reported as true.
    pub vacuous: bool,
}

impl RDiagnostics {
    /// Evaluates the three regularity conditions from per-individual degrees,
    /// distinct-test counts and the test results of the planted configuration.
    pub fn from_parts(
        m: usize,
        degrees: &[u32],
        distinct: &[u32],
        y: &TestResults,
        truth: &Configuration,
    ) -> Self {
        let n = degrees.len();
        let k = truth.weight();
        let slack = 1.0 / (n as f64).ln();
        let (lo, hi) = (1.0 - slack, 1.0 + slack);

        let delta_min = degrees.iter().copied().min().unwrap_or(0);
        let delta_max = degrees.iter().copied().max().unwrap_or(0);
        let k_min = y.as_slice().iter().copied().min().unwrap_or(0);
        let k_max = y.as_slice().iter().copied().max().unwrap_or(0);
        let delta_inf_star: u64 = truth.support().iter().map(|&i| degrees[i] as u64).sum();
        let distinct_min = distinct.iter().copied().min().unwrap_or(0);

        let half_m = m as f64 / 2.0;
        let cond_i = lo * half_m <= delta_min as f64 && delta_max as f64 <= hi * half_m;
        let vacuous = k == 0;
        let (cond_ii, cond_iii) = if vacuous {
            (true, true)
        } else {
            let half_k = k as f64 / 2.0;
            let band = k as f64 * half_m;
            (
                lo * half_k <= k_min as f64 && k_max as f64 <= hi * half_k,
                lo * band <= delta_inf_star as f64 && delta_inf_star as f64 <= hi * band,
            )
        };
        Self {
            delta_min,
            delta_max,
            k_min,
            k_max,
            delta_inf_star,
            cond_i,
            cond_ii,
            cond_iii,
            distinct_min,
            vacuous,
        }
    }
}

pub fn check_event_r(graph: &PoolingGraph, truth: &Configuration) -> Result<RDiagnostics> {
    let y = crate::model::encode(graph, truth)?;
    let distinct: Vec<u32> = (0..graph.n()).map(|i| graph.adjacency(i).len() as u32).collect();
    Ok(RDiagnostics::from_parts(graph.m(), graph.degrees(), &distinct, &y, truth))
}

/// Per-individual aggregates of a design, accumulated while its tests are
/// drawn so the slots never need to be held in memory at once.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamedDesign {
    pub results: TestResults,
    pub degrees: Vec<u32>,
    pub distinct: Vec<u32>,
    /// Neighborhood sums `sum_j v_ij * y_j` (multiplicity-weighted).
    pub psi: Vec<u64>,
    /// Neighborhood sums over distinct tests, `sum_{j in adj(i)} y_j`.
    pub psi_distinct: Vec<u64>,
}

const PREFETCH_DISTANCE: usize = 32;

#[inline(always)]
fn prefetch<T>(item: &T) {
    #[cfg(target_arch = "x86_64")]
    // SAFETY: prefetching is a hint and never faults, whatever the address.
    unsafe {
        std::arch::x86_64::_mm_prefetch(item as *const T as *const i8, std::arch::x86_64::_MM_HINT_T0);
    }
    #[cfg(not(target_arch = "x86_64"))]
    let _ = item;
}

/// Draws the design for `(params, seed)` test by test, exactly as
/// [`generate`] would, and accumulates the statistics the greedy decoder and
/// the regularity diagnostics need. Memory is `O(n + gamma)`.
pub fn stream_design(params: &ProblemParams, seed: u64, truth: &Configuration) -> Result<StreamedDesign> {
    let (n, m, gamma) = (params.n, params.m, params.gamma);
    if truth.len() != n {
        return Err(Error::DimensionMismatch { what: "configuration length", expected: n, found: truth.len() });
    }
    // One record per individual keeps every per-slot update on a single cache line.
    #[derive(Clone, Copy, Default)]
    #[repr(align(32))]
    struct Acc {
        degree: u32,
        distinct: u32,
        last_seen: u32,
        psi: u64,
        psi_distinct: u64,
    }
    let mut acc = vec![Acc::default(); n];
    // Bit-packed labels stay cache resident during the counting pass.
    let mut infected = vec![0u64; n.div_ceil(64)];
    for i in truth.support() {
        infected[i / 64] |= 1 << (i % 64);
    }
    let mut sampler = SlotSampler::new(n, seed);
    let mut buf = vec![0u32; gamma];
    let mut results = Vec::with_capacity(m);

    for j in 0..m {
        sampler.fill(&mut buf);
        let y: u32 = buf.iter().map(|&i| (infected[i as usize / 64] >> (i % 64)) as u32 & 1).sum();
        let tag = j as u32 + 1;
        for (s, &i) in buf.iter().enumerate() {
            if let Some(&ahead) = buf.get(s + PREFETCH_DISTANCE) {
                prefetch(&acc[ahead as usize]);
            }
            let a = &mut acc[i as usize];
            a.degree += 1;
            a.psi += y as u64;
            if a.last_seen != tag {
                a.last_seen = tag;
                a.distinct += 1;
                a.psi_distinct += y as u64;
            }
        }
        results.push(y);
    }
    let degrees = acc.iter().map(|a| a.degree).collect();
    let distinct = acc.iter().map(|a| a.distinct).collect();
    let psi = acc.iter().map(|a| a.psi).collect();
    let psi_distinct = acc.iter().map(|a| a.psi_distinct).collect();
    Ok(StreamedDesign { results: TestResults(results), degrees, distinct, psi, psi_distinct })
}
