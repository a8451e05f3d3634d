use serde::Serialize;

use qgt_core::decoders::{candidate_count, compute_scores, exhaustive_solutions, mn_decode_scores, overlap_spectrum};
use qgt_core::experiments::{design_seed, min_tests, plant_truth, run_trial_with_cap, success_sweep, z_estimate, SweepSpec};
use qgt_core::model::{encode, overlap, Configuration, ProblemParams, TestResults};
use qgt_core::pooling::{generate, PoolingGraph};
use qgt_core::theory::{
    compute_thresholds, half_binomial_sides, rate_derivative, rate_domain_max, rate_f_form, rw_return, separation_tails,
    RateForm,
};
use qgt_core::{fixtures, Error};

use crate::args::*;
use crate::output::{self, Block};
use crate::CliError;

pub fn execute(command: Command) -> Result<(), CliError> {
    let common = match &command {
        Command::Gen(a) => &a.common,
        Command::Run(a) => &a.common,
        Command::Sweep(a) => &a.common,
        Command::MinTests(a) => &a.common,
        Command::Verify(a) => &a.common,
        Command::Thresholds(a) => &a.common,
        Command::Analyze(a) => &a.common,
        Command::ZEstimate(a) => &a.common,
    }
    .clone();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.workers)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let bytes = pool.install(|| match command {
        Command::Gen(a) => gen(a),
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::MinTests(a) => min_tests_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Thresholds(a) => thresholds(a),
        Command::Analyze(a) => analyze(a),
        Command::ZEstimate(a) => z_estimate_cmd(a),
    })?;
    output::emit(common.output.as_deref(), &bytes)
}

fn unsupported(format: Format, what: &str) -> CliError {
    CliError::Usage(format!("--format {format:?} is not available for {what}").to_lowercase())
}

fn gen(a: GenArgs) -> Result<Vec<u8>, CliError> {
    #[derive(Serialize)]
    struct Instance {
        n: usize,
        theta: f64,
        k: usize,
        m: usize,
        gamma: usize,
        seed: u64,
        truth: Configuration,
        results: TestResults,
        tests: Vec<Vec<u32>>,
    }
    let params = ProblemParams::new(a.n, a.theta, a.m, 0.0)?;
    let seed = a.common.seed;
    let graph = generate(&params, design_seed(seed));
    match a.common.format {
        None => Ok(graph.dump(seed).into_bytes()),
        Some(Format::Json) => {
            let truth = plant_truth(params.n, params.k, seed);
            let results = encode(&graph, &truth)?;
            let tests = (0..graph.m()).map(|j| graph.test(j).to_vec()).collect();
            output::json(&Instance {
                n: params.n,
                theta: params.theta,
                k: params.k,
                m: params.m,
                gamma: params.gamma,
                seed,
                truth,
                results,
                tests,
            })
        }
        Some(f) => Err(unsupported(f, "gen")),
    }
}

fn run(a: RunArgs) -> Result<Vec<u8>, CliError> {
    #[derive(Serialize)]
    struct RunOutput {
        params: ProblemParams,
        seed: u64,
        record: qgt_core::experiments::TrialRecord,
    }
    #[derive(Serialize)]
    struct RunRow {
        n: usize,
        theta: f64,
        k: usize,
        m: usize,
        decoder: String,
        seed: u64,
        success: bool,
        skipped: bool,
        score_margin: Option<f64>,
        cond_i: Option<bool>,
        cond_ii: Option<bool>,
        cond_iii: Option<bool>,
    }
    let params = ProblemParams::new(a.n, a.theta, a.m, 0.0)?;
    let record = run_trial_with_cap(&params, a.common.seed, a.decoder.into(), a.cap)?;
    match a.common.format.unwrap_or(Format::Json) {
        Format::Json => output::json(&RunOutput { params, seed: a.common.seed, record }),
        Format::Csv => output::csv(&[RunRow {
            n: params.n,
            theta: params.theta,
            k: params.k,
            m: params.m,
            decoder: record.decoder.to_string(),
            seed: a.common.seed,
            success: record.success,
            skipped: record.skipped,
            score_margin: record.score_margin,
            cond_i: record.r_diag.map(|d| d.cond_i),
            cond_ii: record.r_diag.map(|d| d.cond_ii),
            cond_iii: record.r_diag.map(|d| d.cond_iii),
        }]),
        f => Err(unsupported(f, "run")),
    }
}

fn sweep(a: SweepArgs) -> Result<Vec<u8>, CliError> {
    let results = a
        .theta
        .iter()
        .map(|&theta| {
            success_sweep(&SweepSpec {
                n: a.n,
                theta,
                m_values: a.m.0.clone(),
                trials: a.trials,
                seed: a.common.seed,
                decoder: a.decoder.into(),
                cap: a.cap,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => output::csv(&results.iter().flat_map(|r| r.rows.iter()).collect::<Vec<_>>()),
        Format::Json => output::json(&results),
        Format::Gnuplot => Ok(output::gnuplot(
            &results
                .iter()
                .map(|r| Block {
                    label: format!("n={} theta={}", r.spec.n, r.spec.theta),
                    columns: ("m", "rate"),
                    points: r.rows.iter().map(|row| (row.m as f64, row.rate)).collect(),
                })
                .collect::<Vec<_>>(),
        )),
    }
}

fn min_tests_cmd(a: MinTestsArgs) -> Result<Vec<u8>, CliError> {
    #[derive(Serialize)]
    struct Row {
        n: usize,
        theta: f64,
        k: usize,
        target_rate: f64,
        trials: usize,
        m_required: usize,
        m_greedy: f64,
        ratio: f64,
        seed: u64,
    }
    let mut series = Vec::new();
    for &theta in &a.theta {
        let results = a
            .n
            .iter()
            .map(|&n| min_tests(n, theta, a.trials, a.target_rate, a.common.seed))
            .collect::<Result<Vec<_>, Error>>()?;
        series.push((theta, results));
    }
    match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => output::csv(
            &series
                .iter()
                .flat_map(|(_, rs)| rs.iter())
                .map(|r| Row {
                    n: r.n,
                    theta: r.theta,
                    k: r.k,
                    target_rate: r.target_rate,
                    trials: r.trials,
                    m_required: r.m_required,
                    m_greedy: r.m_greedy,
                    ratio: r.ratio,
                    seed: r.seed,
                })
                .collect::<Vec<_>>(),
        ),
        Format::Json => output::json(&series.iter().flat_map(|(_, rs)| rs.iter()).collect::<Vec<_>>()),
        Format::Gnuplot => Ok(output::gnuplot(
            &series
                .iter()
                .map(|(theta, rs)| Block {
                    label: format!("theta={theta}"),
                    columns: ("n", "m_required"),
                    points: rs.iter().map(|r| (r.n as f64, r.m_required as f64)).collect(),
                })
                .collect::<Vec<_>>(),
        )),
    }
}

fn verify(a: VerifyArgs) -> Result<Vec<u8>, CliError> {
    #[derive(Serialize)]
    struct Greedy {
        estimate: Configuration,
        success: bool,
        score_margin: Option<f64>,
        psi: Vec<u64>,
        ranking: Vec<usize>,
    }
    #[derive(Serialize)]
    struct Verification {
        instance: String,
        n: usize,
        k: usize,
        m: usize,
        truth: Configuration,
        results: TestResults,
        tests: Vec<Vec<u32>>,
        solutions: Vec<Configuration>,
        overlap_spectrum: Vec<u64>,
        greedy: Greedy,
    }
    #[derive(Serialize)]
    struct SolutionRow {
        solution: Configuration,
        overlap: usize,
        is_truth: bool,
    }

    let (label, graph, truth, y): (String, PoolingGraph, Configuration, TestResults) = match a.fixture {
        Some(Fixture::Fig1) => {
            let (g, t, y) = fixtures::fig1();
            if let Some(n) = a.n.filter(|&n| n != g.n()) {
                return Err(CliError::Usage(format!("the fig1 fixture has n = {}, not {n}", g.n())));
            }
            ("fig1".into(), g, t, y)
        }
        None => {
            let n = a.n.ok_or_else(|| CliError::Usage("verify needs --n or --fixture".into()))?;
            let params = ProblemParams::with_k(n, a.k, a.m)?;
            let candidates = candidate_count(n, a.k);
            if candidates > a.cap {
                return Err(Error::InstanceTooLarge { candidates, cap: a.cap }.into());
            }
            let truth = plant_truth(n, a.k, a.common.seed);
            let graph = generate(&params, design_seed(a.common.seed));
            let y = encode(&graph, &truth)?;
            (format!("seed={}", a.common.seed), graph, truth, y)
        }
    };
    let k = truth.weight();
    let solutions = exhaustive_solutions(&graph, &y, k, a.cap)?;
    let spectrum = overlap_spectrum(&graph, &y, &truth, a.cap)?;
    let scores = compute_scores(&graph, &y, Some(&truth))?;
    let decoded = mn_decode_scores(&scores, k, Some(&truth))?;

    match a.common.format.unwrap_or(Format::Json) {
        Format::Json => output::json(&Verification {
            instance: label,
            n: graph.n(),
            k,
            m: graph.m(),
            truth: truth.clone(),
            results: y,
            tests: (0..graph.m()).map(|j| graph.test(j).to_vec()).collect(),
            solutions,
            overlap_spectrum: spectrum,
            greedy: Greedy {
                estimate: decoded.estimate,
                success: decoded.success == Some(true),
                score_margin: decoded.score_margin,
                ranking: scores.ranking(),
                psi: scores.psi,
            },
        }),
        Format::Csv => output::csv(
            &solutions
                .iter()
                .map(|s| Ok(SolutionRow { solution: s.clone(), overlap: overlap(&truth, s)?, is_truth: *s == truth }))
                .collect::<Result<Vec<_>, Error>>()?,
        ),
        f => Err(unsupported(f, "verify")),
    }
}

fn thresholds(a: ThresholdsArgs) -> Result<Vec<u8>, CliError> {
    let report = compute_thresholds(a.n, a.theta)?;
    match a.common.format.unwrap_or(Format::Json) {
        Format::Json => output::json(&report),
        Format::Csv => output::csv(&[report]),
        f => Err(unsupported(f, "thresholds")),
    }
}

fn analyze(a: AnalyzeArgs) -> Result<Vec<u8>, CliError> {
    #[derive(Serialize)]
    struct RateRow {
        ell: f64,
        f: f64,
        f_prime: f64,
    }
    #[derive(Serialize)]
    struct WalkRow {
        j: u64,
        exact: f64,
        asymptotic: f64,
        ratio: f64,
    }
    #[derive(Serialize)]
    struct HalfRow {
        n: usize,
        p: f64,
        lhs: f64,
        rhs_main: f64,
    }
    #[derive(Serialize)]
    struct SeparationRow {
        alpha: f64,
        c: f64,
        theta: f64,
        healthy_tail: f64,
        infected_tail: f64,
        c_n_opt: f64,
        alpha_opt: f64,
    }

    let format = a.common.format.unwrap_or(Format::Csv);
    if a.rw_return {
        if a.j_max == 0 {
            return Err(CliError::Usage("--j-max must be at least 1".into()));
        }
        let rows: Vec<WalkRow> = (1..=a.j_max)
            .map(|j| {
                let (exact, asymptotic) = rw_return(j);
                WalkRow { j, exact, asymptotic, ratio: exact / asymptotic }
            })
            .collect();
        return match format {
            Format::Csv => output::csv(&rows),
            Format::Json => output::json(&rows),
            Format::Gnuplot => Ok(output::gnuplot(&[Block {
                label: "random-walk return ratio".into(),
                columns: ("j", "exact/asymptotic"),
                points: rows.iter().map(|r| (r.j as f64, r.ratio)).collect(),
            }])),
        };
    }
    if a.half_binomial {
        if !(a.p > 0.0 && a.p < 1.0) {
            return Err(CliError::Usage(format!("--p must lie in (0, 1), got {}", a.p)));
        }
        let (lhs, rhs_main) = half_binomial_sides(a.n as u64, a.p);
        let row = HalfRow { n: a.n, p: a.p, lhs, rhs_main };
        return match format {
            Format::Csv => output::csv(&[row]),
            Format::Json => output::json(&row),
            f => Err(unsupported(f, "--half-binomial")),
        };
    }
    if a.separation {
        if !(a.theta > 0.0 && a.theta < 1.0) || a.c.is_nan() || a.c <= 0.0 || a.points == 0 {
            return Err(CliError::Usage("--separation needs theta in (0, 1), c > 0 and points >= 1".into()));
        }
        let rows: Vec<SeparationRow> = (1..=a.points)
            .map(|i| {
                let alpha = i as f64 / (a.points + 1) as f64;
                let t = separation_tails(alpha, a.c, a.theta);
                SeparationRow {
                    alpha,
                    c: a.c,
                    theta: a.theta,
                    healthy_tail: t.healthy_tail,
                    infected_tail: t.infected_tail,
                    c_n_opt: t.c_n_opt,
                    alpha_opt: t.alpha_opt,
                }
            })
            .collect();
        return match format {
            Format::Csv => output::csv(&rows),
            Format::Json => output::json(&rows),
            Format::Gnuplot => Ok(output::gnuplot(&[
                Block {
                    label: "healthy tail".into(),
                    columns: ("alpha", "healthy_tail"),
                    points: rows.iter().map(|r| (r.alpha, r.healthy_tail)).collect(),
                },
                Block {
                    label: "infected tail".into(),
                    columns: ("alpha", "infected_tail"),
                    points: rows.iter().map(|r| (r.alpha, r.infected_tail)).collect(),
                },
            ])),
        };
    }

    let form = match a.form {
        FormArg::Finite => RateForm::Finite,
        FormArg::Asymptotic => RateForm::Asymptotic,
    };
    rate_f_form(a.n, a.k, a.c, 0.0, form)?;
    let top = rate_domain_max(a.k).floor() as usize;
    let rows = (0..=top)
        .map(|l| {
            let e = rate_f_form(a.n, a.k, a.c, l as f64, form)?;
            Ok(RateRow { ell: e.ell, f: e.value, f_prime: rate_derivative(a.n, a.k, a.c, e.ell, form) })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    match format {
        Format::Csv => output::csv(&rows),
        Format::Json => output::json(&rows),
        Format::Gnuplot => Ok(output::gnuplot(&[Block {
            label: format!("rate f n={} k={} c={}", a.n, a.k, a.c),
            columns: ("ell", "f"),
            points: rows.iter().map(|r| (r.ell, r.f)).collect(),
        }])),
    }
}

fn z_estimate_cmd(a: ZEstimateArgs) -> Result<Vec<u8>, CliError> {
    #[derive(Serialize)]
    struct Row {
        n: usize,
        k: usize,
        m: usize,
        ell: usize,
        trials: usize,
        z_mean: f64,
        z_stderr: f64,
        bound_mean: f64,
        seed: u64,
    }
    if let Some(ell) = a.ell.filter(|&l| l > a.k) {
        return Err(CliError::Usage(format!("--ell {ell} exceeds k = {}", a.k)));
    }
    let rows: Vec<_> = z_estimate(a.n, a.k, a.m, a.trials, a.common.seed, a.cap)?
        .into_iter()
        .filter(|r| a.ell.is_none_or(|l| l == r.ell))
        .collect();
    match a.common.format.unwrap_or(Format::Csv) {
        Format::Csv => output::csv(
            &rows
                .iter()
                .map(|r| Row {
                    n: r.n,
                    k: r.k,
                    m: r.m,
                    ell: r.ell,
                    trials: r.trials,
                    z_mean: r.z_mean,
                    z_stderr: r.z_stderr,
                    bound_mean: r.bound_mean,
                    seed: r.seed,
                })
                .collect::<Vec<_>>(),
        ),
        Format::Json => output::json(&rows),
        Format::Gnuplot => Ok(output::gnuplot(&[
            Block {
                label: format!("Z mean n={} k={} m={}", a.n, a.k, a.m),
                columns: ("ell", "z_mean"),
                points: rows.iter().map(|r| (r.ell as f64, r.z_mean)).collect(),
            },
            Block {
                label: "first moment".into(),
                columns: ("ell", "bound_mean"),
                points: rows.iter().map(|r| (r.ell as f64, r.bound_mean)).collect(),
            },
        ])),
    }
}
