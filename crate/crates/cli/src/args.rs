use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Seed used when none is given ("QGT" in ASCII).
pub const DEFAULT_SEED: u64 = 0x0051_4754;

#[derive(Parser, Debug)]
#[command(name = "qgt", version, about = "Quantitative group testing experiments", args_override_self = true)]
pub struct Cli {
    /// Flat key=value file whose entries act as flags of the subcommand;
    /// flags on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Draw a pooling design and a planted configuration.
    Gen(GenArgs),
    /// Run a single trial.
    Run(RunArgs),
    /// Success rate against the number of tests.
    Sweep(SweepArgs),
    /// Smallest number of tests reaching a target success rate.
    MinTests(MinTestsArgs),
    /// Exhaustive solution listing and greedy decoding of one instance.
    Verify(VerifyArgs),
    /// Closed-form test-count thresholds.
    Thresholds(ThresholdsArgs),
    /// Tables of the analytic functions.
    Analyze(AnalyzeArgs),
    /// Monte Carlo overlap spectrum against its first moment.
    ZEstimate(ZEstimateArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Gnuplot,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DecoderArg {
    Mn,
    Exhaustive,
}

impl From<DecoderArg> for qgt_core::experiments::Decoder {
    fn from(d: DecoderArg) -> Self {
        match d {
            DecoderArg::Mn => Self::Mn,
            DecoderArg::Exhaustive => Self::Exhaustive,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Finite,
    Asymptotic,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    Fig1,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output file, written atomically; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads; 0 uses one per available core.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.3)]
    pub theta: f64,
    #[arg(long, default_value_t = 200)]
    pub m: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.3)]
    pub theta: f64,
    #[arg(long, default_value_t = 400)]
    pub m: usize,
    #[arg(long, value_enum, default_value_t = DecoderArg::Mn)]
    pub decoder: DecoderArg,
    /// Largest number of candidates the exhaustive decoder may enumerate.
    #[arg(long, default_value_t = qgt_core::decoders::DEFAULT_CAP)]
    pub cap: u128,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// One or more sparsity exponents, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.3")]
    pub theta: Vec<f64>,
    /// Test counts as `start:stop:step` (inclusive) or a comma-separated list.
    #[arg(long, default_value = "0:500:25", value_parser = parse_m_values)]
    pub m: MValues,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = DecoderArg::Mn)]
    pub decoder: DecoderArg,
    #[arg(long, default_value_t = qgt_core::decoders::DEFAULT_CAP)]
    pub cap: u128,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct MinTestsArgs {
    /// One or more population sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.3")]
    pub theta: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.95)]
    pub target_rate: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Built-in instance; overrides the random draw.
    #[arg(long, value_enum)]
    pub fixture: Option<Fixture>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 10)]
    pub m: usize,
    #[arg(long, default_value_t = qgt_core::decoders::DEFAULT_CAP)]
    pub cap: u128,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ThresholdsArgs {
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("table").args(["rate_f", "rw_return", "half_binomial", "separation"]))]
pub struct AnalyzeArgs {
    /// `(l, f, f')` over the integer overlaps `0..=k - ln k`.
    #[arg(long)]
    pub rate_f: bool,
    /// Exact and asymptotic random-walk return probabilities for `j = 1..=j-max`.
    #[arg(long)]
    pub rw_return: bool,
    /// Both sides of the half-binomial identity for `n` and `p`.
    #[arg(long)]
    pub half_binomial: bool,
    /// Separation tails over a grid of `alpha` for `theta` and `c`.
    #[arg(long)]
    pub separation: bool,
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    #[arg(long, default_value_t = 2.5)]
    pub c: f64,
    #[arg(long, value_enum, default_value_t = FormArg::Finite)]
    pub form: FormArg,
    #[arg(long, default_value_t = 100)]
    pub j_max: u64,
    #[arg(long, default_value_t = 0.3)]
    pub p: f64,
    #[arg(long, default_value_t = 0.25)]
    pub theta: f64,
    #[arg(long, default_value_t = 19)]
    pub points: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ZEstimateArgs {
    #[arg(long, default_value_t = 30)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 10)]
    pub m: usize,
    /// Single overlap to report; every overlap when absent.
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = qgt_core::decoders::DEFAULT_CAP)]
    pub cap: u128,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MValues(pub Vec<usize>);

fn parse_m_values(s: &str) -> Result<MValues, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(format!("expected start:stop:step, got '{s}'"));
        };
        let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
        if step == 0 || start > stop {
            return Err(format!("empty or unbounded range '{s}'"));
        }
        Ok(MValues((start..=stop).step_by(step).collect()))
    } else {
        Ok(MValues(s.split(',').map(parse).collect::<Result<_, _>>()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_value_ranges() {
        assert_eq!(parse_m_values("0:100:25").unwrap().0, vec![0, 25, 50, 75, 100]);
        assert_eq!(parse_m_values("3,7,9").unwrap().0, vec![3, 7, 9]);
        assert!(parse_m_values("0:10").is_err());
        assert!(parse_m_values("0:10:0").is_err());
        assert!(parse_m_values("x").is_err());
    }

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
