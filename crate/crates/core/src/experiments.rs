//! Seeded Monte Carlo harness.
//!
//! Every trial is identified by a 64-bit seed; the planted configuration and
//! the design are drawn from two sub-streams of it, so a trial is a pure
//! function of `(params, trial_seed)`. Sweeps derive trial seeds as
//! `mix_seed(master, [m, trial_index])` and collect results in trial order,
//! which makes every aggregate independent of the worker count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoders::{candidate_count, exhaustive_decode, mn_decode_scores, overlap_spectrum, ScoreVector};
use crate::error::{Error, Result};
use crate::model::{encode, Configuration, ProblemParams};
use crate::pooling::{check_event_r, generate, stream_design, RDiagnostics};
use crate::rng::{below, mix_seed, sample_subset, stream};
use crate::theory::{compute_thresholds, expected_z_bound, ZBoundMode};

const TRUTH_STREAM: u64 = 1;
const DESIGN_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decoder {
    #[default]
    Mn,
    Exhaustive,
}

impl fmt::Display for Decoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decoder::Mn => "mn",
            Decoder::Exhaustive => "exhaustive",
        })
    }
}

impl FromStr for Decoder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mn" => Ok(Decoder::Mn),
            "exhaustive" => Ok(Decoder::Exhaustive),
            other => Err(Error::InvalidParams(format!("unknown decoder '{other}'"))),
        }
    }
}

/// Seed of trial `trial_index` at test count `m` under `master`.
pub fn trial_seed(master: u64, m: usize, trial_index: usize) -> u64 {
    mix_seed(master, &[m as u64, trial_index as u64])
}

/// Uniformly random weight-`k` configuration drawn from the trial's truth stream.
pub fn plant_truth(n: usize, k: usize, trial_seed: u64) -> Configuration {
    let mut rng = stream(mix_seed(trial_seed, &[TRUTH_STREAM]));
    Configuration::from_support(n, &sample_subset(&mut rng, n, k)).expect("subset indices lie below n")
}

/// Seed of the trial's pooling design.
pub fn design_seed(trial_seed: u64) -> u64 {
    mix_seed(trial_seed, &[DESIGN_STREAM])
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub trial_seed: u64,
    pub m: usize,
    pub decoder: Decoder,
    pub success: bool,
    /// Set when the exhaustive decoder was not run because `C(n, k)` exceeds the cap.
    pub skipped: bool,
    pub score_margin: Option<f64>,
    pub r_diag: Option<RDiagnostics>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl PartialEq for TrialRecord {
    fn eq(&self, other: &Self) -> bool {
        self.trial_index == other.trial_index
            && self.trial_seed == other.trial_seed
            && self.m == other.m
            && self.decoder == other.decoder
            && self.success == other.success
            && self.skipped == other.skipped
            && self.score_margin == other.score_margin
            && self.r_diag == other.r_diag
    }
}

/// Plants a configuration, draws the design, decodes and compares.
pub fn run_trial(params: &ProblemParams, trial_seed: u64, decoder: Decoder) -> Result<TrialRecord> {
    run_trial_with_cap(params, trial_seed, decoder, crate::decoders::DEFAULT_CAP)
}

pub fn run_trial_with_cap(params: &ProblemParams, trial_seed: u64, decoder: Decoder, cap: u128) -> Result<TrialRecord> {
    let start = Instant::now();
    let truth = plant_truth(params.n, params.k, trial_seed);
    let seed = design_seed(trial_seed);
    let mut record = TrialRecord {
        trial_index: 0,
        trial_seed,
        m: params.m,
        decoder,
        success: false,
        skipped: false,
        score_margin: None,
        r_diag: None,
        wall_time: Duration::ZERO,
    };
    match decoder {
        Decoder::Mn => {
            let design = stream_design(params, seed, &truth)?;
            let diag = RDiagnostics::from_parts(params.m, &design.degrees, &design.distinct, &design.results, &truth);
            let scores = ScoreVector::from_parts(params.m, design.degrees, design.psi, Some(&truth));
            let decoded = mn_decode_scores(&scores, params.k, Some(&truth))?;
            record.success = decoded.success == Some(true);
            record.score_margin = decoded.score_margin;
            record.r_diag = Some(diag);
        }
        Decoder::Exhaustive => {
            if candidate_count(params.n, params.k) > cap {
                record.skipped = true;
            } else {
                let graph = generate(params, seed);
                let y = encode(&graph, &truth)?;
                let decoded = exhaustive_decode(&graph, &y, params.k, cap, Some(&truth))?;
                record.success = decoded.success == Some(true);
                record.r_diag = Some(check_event_r(&graph, &truth)?);
            }
        }
    }
    record.wall_time = start.elapsed();
    Ok(record)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n: usize,
    pub theta: f64,
    pub m_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub decoder: Decoder,
    pub cap: u128,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<ProblemParams> {
        if self.trials == 0 {
            return Err(Error::InvalidParams("trials must be at least 1".into()));
        }
        if self.m_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams("m values must be strictly increasing".into()));
        }
        let params = ProblemParams::new(self.n, self.theta, 0, 0.0)?;
        if self.decoder == Decoder::Exhaustive {
            let candidates = candidate_count(params.n, params.k);
            if candidates > self.cap {
                return Err(Error::InstanceTooLarge { candidates, cap: self.cap });
            }
        }
        Ok(params)
    }
}

/// Aggregate over the trials at one test count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub theta: f64,
    pub k: usize,
    pub m: usize,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub stderr: f64,
    pub cond_i_rate: f64,
    pub cond_ii_rate: f64,
    pub cond_iii_rate: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub version: String,
    pub rows: Vec<SweepRow>,
}

/// Binomial standard error `sqrt(p (1 - p) / trials)`.
pub fn binomial_stderr(rate: f64, trials: usize) -> f64 {
    (rate * (1.0 - rate) / trials as f64).sqrt()
}

/// Runs `trials` trials at test count `m` and returns them in trial order.
pub fn run_trials(params: &ProblemParams, master: u64, trials: usize, decoder: Decoder, cap: u128) -> Result<Vec<TrialRecord>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut record = run_trial_with_cap(params, trial_seed(master, params.m, t), decoder, cap)?;
            record.trial_index = t;
            Ok(record)
        })
        .collect()
}

fn summarize(params: &ProblemParams, records: &[TrialRecord], seed: u64) -> SweepRow {
    let trials = records.len();
    let frac = |f: &dyn Fn(&TrialRecord) -> bool| records.iter().filter(|r| f(r)).count() as f64 / trials as f64;
    let successes = records.iter().filter(|r| r.success).count();
    let rate = successes as f64 / trials as f64;
    SweepRow {
        n: params.n,
        theta: params.theta,
        k: params.k,
        m: params.m,
        trials,
        successes,
        rate,
        stderr: binomial_stderr(rate, trials),
        cond_i_rate: frac(&|r| r.r_diag.is_some_and(|d| d.cond_i)),
        cond_ii_rate: frac(&|r| r.r_diag.is_some_and(|d| d.cond_ii)),
        cond_iii_rate: frac(&|r| r.r_diag.is_some_and(|d| d.cond_iii)),
        seed,
    }
}

/// Success rate and event-R frequencies for every `m` in the spec.
pub fn success_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    let base = spec.validate()?;
    let rows = spec
        .m_values
        .iter()
        .map(|&m| {
            let params = base.with_m(m);
            let records = run_trials(&params, spec.seed, spec.trials, spec.decoder, spec.cap)?;
            Ok(summarize(&params, &records, spec.seed))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { spec: spec.clone(), version: env!("CARGO_PKG_VERSION").to_string(), rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinTestsResult {
    pub n: usize,
    pub theta: f64,
    pub k: usize,
    pub target_rate: f64,
    pub trials: usize,
    pub m_required: usize,
    pub m_greedy: f64,
    pub ratio: f64,
    pub seed: u64,
    /// Every test count evaluated during the search with its success rate.
    pub evaluated: Vec<(usize, f64)>,
}

/// Smallest `m` whose greedy success rate over `trials` trials reaches
/// `target_rate`, by doubling from 1 and then bisecting. Success is assumed
/// monotone in `m`. The search fails once the bracket passes `64 m_greedy`.
pub fn min_tests(n: usize, theta: f64, trials: usize, target_rate: f64, seed: u64) -> Result<MinTestsResult> {
    let report = compute_thresholds(n, theta)?;
    min_tests_with_ceiling(n, theta, trials, target_rate, seed, (64.0 * report.m_greedy).ceil() as usize)
}

pub fn min_tests_with_ceiling(
    n: usize,
    theta: f64,
    trials: usize,
    target_rate: f64,
    seed: u64,
    ceiling: usize,
) -> Result<MinTestsResult> {
    if !(0.0..=1.0).contains(&target_rate) {
        return Err(Error::InvalidParams(format!("target rate must lie in [0, 1], got {target_rate}")));
    }
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    let base = ProblemParams::new(n, theta, 0, 0.0)?;
    let m_greedy = compute_thresholds(n, theta)?.m_greedy;
    let mut cache: BTreeMap<usize, f64> = BTreeMap::new();
    let mut rate_at = |m: usize| -> Result<f64> {
        if let Some(&r) = cache.get(&m) {
            return Ok(r);
        }
        let records = run_trials(&base.with_m(m), seed, trials, Decoder::Mn, 0)?;
        let r = records.iter().filter(|r| r.success).count() as f64 / trials as f64;
        cache.insert(m, r);
        Ok(r)
    };

    let m_required = if rate_at(0)? >= target_rate {
        0
    } else {
        let (mut lo, mut hi) = (0usize, 1usize);
        while rate_at(hi)? < target_rate {
            lo = hi;
            hi *= 2;
            if hi > ceiling {
                return Err(Error::SearchCeiling { ceiling, target: target_rate });
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if rate_at(mid)? >= target_rate {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    Ok(MinTestsResult {
        n,
        theta,
        k: base.k,
        target_rate,
        trials,
        m_required,
        m_greedy,
        ratio: m_required as f64 / m_greedy,
        seed,
        evaluated: cache.into_iter().collect(),
    })
}

/// Monte Carlo overlap spectrum at one overlap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZEstimateRow {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub ell: usize,
    pub trials: usize,
    pub z_mean: f64,
    pub z_stderr: f64,
    /// Mean over the same instances of the exact first moment.
    pub bound_mean: f64,
    /// Mean over the same instances of the bound with the inner sums cut at `k_i`.
    pub truncated_bound_mean: f64,
    pub seed: u64,
}

/// Averages `Z_{k,l}` over `trials` planted instances for every `l` in `0..=k`.
pub fn z_estimate(n: usize, k: usize, m: usize, trials: usize, seed: u64, cap: u128) -> Result<Vec<ZEstimateRow>> {
    let params = ProblemParams::with_k(n, k, m)?;
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be at least 1".into()));
    }
    let candidates = candidate_count(n, k);
    if candidates > cap {
        return Err(Error::InstanceTooLarge { candidates, cap });
    }
    let full: Vec<f64> = (0..=k)
        .map(|ell| expected_z_bound(&params, ell, &vec![0; m], ZBoundMode::FullSum).map(f64::exp))
        .collect::<Result<_>>()?;
    let per_instance: Vec<(Vec<u64>, Vec<f64>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let ts = trial_seed(seed, m, t);
            let truth = plant_truth(n, k, ts);
            let graph = generate(&params, design_seed(ts));
            let y = encode(&graph, &truth)?;
            let z = overlap_spectrum(&graph, &y, &truth, cap)?;
            let truncated = (0..=k)
                .map(|ell| expected_z_bound(&params, ell, y.as_slice(), ZBoundMode::Truncated).map(f64::exp))
                .collect::<Result<Vec<_>>>()?;
            Ok((z, truncated))
        })
        .collect::<Result<_>>()?;

    let tf = trials as f64;
    Ok((0..=k)
        .map(|ell| {
            let values: Vec<f64> = per_instance.iter().map(|(z, _)| z[ell] as f64).collect();
            let (z_mean, z_stderr) = mean_and_stderr(&values);
            ZEstimateRow {
                n,
                k,
                m,
                ell,
                trials,
                z_mean,
                z_stderr,
                bound_mean: full[ell],
                truncated_bound_mean: per_instance.iter().map(|(_, b)| b[ell]).sum::<f64>() / tf,
                seed,
            }
        })
        .collect())
}

/// Monte Carlo mean and standard error of `Z_{k,l}`.
pub fn estimate_expected_z(n: usize, k: usize, m: usize, ell: usize, trials: usize, seed: u64) -> Result<(f64, f64)> {
    if ell > k {
        return Err(Error::OutOfDomain(format!("overlap {ell} exceeds k = {k}")));
    }
    let rows = z_estimate(n, k, m, trials, seed, crate::decoders::DEFAULT_CAP)?;
    Ok((rows[ell].z_mean, rows[ell].z_stderr))
}

/// Sample mean and `std / sqrt(len)` (sample standard deviation).
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let len = values.len() as f64;
    let mean = values.iter().sum::<f64>() / len;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (len - 1.0);
    (mean, (var / len).sqrt())
}

/// Least-squares non-decreasing fit of `values` (pool adjacent violators).
pub fn isotonic_fit(values: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (b, nb) = blocks[blocks.len() - 1];
            let (a, na) = blocks[blocks.len() - 2];
            if a <= b {
                break;
            }
            blocks.pop();
            let last = blocks.len() - 1;
            blocks[last] = ((a * na as f64 + b * nb as f64) / (na + nb) as f64, na + nb);
        }
    }
    blocks.into_iter().flat_map(|(v, count)| std::iter::repeat_n(v, count)).collect()
}

/// Largest deviation of `values` from their isotonic fit.
pub fn isotonic_residual(values: &[f64]) -> f64 {
    values.iter().zip(isotonic_fit(values)).map(|(v, f)| (v - f).abs()).fold(0.0, f64::max)
}

/// Fraction of `trials` experiments in which throwing `m` balls into `n`
/// uniform bins leaves some bin empty.
pub fn empty_bin_rate(n: usize, m: usize, trials: usize, seed: u64) -> f64 {
    let hits: usize = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(mix_seed(seed, &[n as u64, m as u64, t as u64]));
            let mut filled = vec![false; n];
            let mut remaining = n;
            for _ in 0..m {
                let b = below(&mut rng, n as u64) as usize;
                if !filled[b] {
                    filled[b] = true;
                    remaining -= 1;
                    if remaining == 0 {
                        break;
                    }
                }
            }
            usize::from(remaining > 0)
        })
        .sum();
    hits as f64 / trials as f64
}

/// Total-variation distance between the pooled empirical law of `Phi_i` over
/// healthy individuals and the matching mixture of `Bin(Delta_i (Gamma - 1), k/n)`.
pub fn phi_binomial_tv(params: &ProblemParams, trials: usize, seed: u64) -> Result<f64> {
    use crate::theory::ln_binomial_pmf;

    let p = params.k as f64 / params.n as f64;
    let samples: Vec<(Vec<u64>, Vec<u32>)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let ts = trial_seed(seed, params.m, t);
            let truth = plant_truth(params.n, params.k, ts);
            let design = stream_design(params, design_seed(ts), &truth)?;
            let healthy: Vec<usize> = (0..params.n).filter(|&i| !truth.is_infected(i)).collect();
            Ok((
                healthy.iter().map(|&i| design.psi[i]).collect(),
                healthy.iter().map(|&i| design.degrees[i]).collect(),
            ))
        })
        .collect::<Result<_>>()?;

    let mut empirical: BTreeMap<u64, f64> = BTreeMap::new();
    let mut degree_counts: BTreeMap<u32, f64> = BTreeMap::new();
    let mut total = 0.0;
    for (phi, deg) in &samples {
        for (&v, &d) in phi.iter().zip(deg) {
            *empirical.entry(v).or_default() += 1.0;
            *degree_counts.entry(d).or_default() += 1.0;
            total += 1.0;
        }
    }
    let support_max = empirical.keys().next_back().copied().unwrap_or(0);
    let mut model: BTreeMap<u64, f64> = BTreeMap::new();
    for (&d, &count) in &degree_counts {
        let trials_d = d as u64 * (params.gamma as u64).saturating_sub(1);
        let weight = count / total;
        for v in 0..=trials_d.min(support_max.max(1) * 4) {
            let mass = ln_binomial_pmf(trials_d, v, p).exp() * weight;
            if mass > 0.0 {
                *model.entry(v).or_default() += mass;
            }
        }
    }
    let mut tv = 0.0;
    let keys: std::collections::BTreeSet<u64> = empirical.keys().chain(model.keys()).copied().collect();
    for key in keys {
        let e = empirical.get(&key).copied().unwrap_or(0.0) / total;
        let q = model.get(&key).copied().unwrap_or(0.0);
        tv += (e - q).abs();
    }
    // Model mass beyond the scanned range counts as unmatched.
    let scanned: f64 = model.values().sum();
    Ok(0.5 * (tv + (1.0 - scanned).max(0.0)))
}
