use clap::{Args, Parser, Subcommand, ValueEnum};
use tqss_core::field::ProtocolParams;
use tqss_core::protocol::{DealerConfig, DigestMode, RunOptions, TamperSpec, Variant};

use crate::CliError;

/// Default cap on `d^t`: 2^22 amplitudes, about 64 MiB of complex doubles.
pub const DEFAULT_MAX_AMPLITUDES: u64 = 1 << 22;

#[derive(Debug, Parser)]
#[command(
    name = "tqss",
    version,
    about = "Threshold quantum secret sharing on a qudit simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run independent trials of one protocol variant.
    Run(CommonArgs),
    /// Show the baseline's random reconstruction next to the proposed protocol.
    FlawDemo(CommonArgs),
    /// Count operations per reconstruction round for both variants.
    Tally(CommonArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    Proposed,
    Song,
}

impl From<ProtocolArg> for Variant {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::Proposed => Variant::Proposed,
            ProtocolArg::Song => Variant::Song,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TamperArg {
    pub participant: usize,
    pub delta: u64,
}

fn parse_tamper(s: &str) -> Result<TamperArg, String> {
    let (v, delta) = s
        .split_once(':')
        .ok_or_else(|| format!("expected PARTICIPANT:DELTA, got {s:?}"))?;
    Ok(TamperArg {
        participant: v.trim().parse().map_err(|e| format!("participant: {e}"))?,
        delta: delta.trim().parse().map_err(|e| format!("delta: {e}"))?,
    })
}

#[derive(Clone, Debug, Args)]
pub struct CommonArgs {
    /// Prime qudit dimension and field order.
    #[arg(long, default_value_t = 3)]
    pub d: u64,
    /// Threshold.
    #[arg(long, default_value_t = 2)]
    pub t: usize,
    /// Participant count (defaults to t).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub secret: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of trials (defaults to 1 for run and tally, 3000 for flaw-demo).
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, value_enum, default_value_t = ProtocolArg::Proposed)]
    pub protocol: ProtocolArg,
    /// Comma-separated 1-based participant indices (defaults to 1..=t).
    #[arg(long, value_delimiter = ',')]
    pub active: Option<Vec<usize>>,
    /// Participant who prepares the register (defaults to the lowest active index).
    #[arg(long)]
    pub reconstructor: Option<usize>,
    /// PARTICIPANT:DELTA; the participant shifts its phase exponent by DELTA.
    #[arg(long, value_parser = parse_tamper)]
    pub tamper: Option<TamperArg>,
    /// Number of base-d digest digits shared and checked.
    #[arg(long, default_value_t = 1)]
    pub hash_digits: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Refuse configurations whose register needs more than this many amplitudes.
    #[arg(long, default_value_t = DEFAULT_MAX_AMPLITUDES)]
    pub max_amplitudes: u64,
}

impl Default for CommonArgs {
    fn default() -> Self {
        Self {
            d: 3,
            t: 2,
            n: None,
            secret: 2,
            seed: 0,
            trials: None,
            protocol: ProtocolArg::Proposed,
            active: None,
            reconstructor: None,
            tamper: None,
            hash_digits: 1,
            format: Format::Text,
            max_amplitudes: DEFAULT_MAX_AMPLITUDES,
        }
    }
}

/// Validated settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub dealer: DealerConfig,
    pub options: RunOptions,
    pub variant: Variant,
    pub trials: usize,
    pub format: Format,
    pub max_amplitudes: u64,
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs, default_trials: usize) -> Result<Self, CliError> {
        let t = args.t;
        let amplitudes = (args.d as u128).checked_pow(t as u32).unwrap_or(u128::MAX);
        if amplitudes > args.max_amplitudes as u128 {
            return Err(CliError::Config(format!(
                "register would need d^t = {}^{} = {} amplitudes, above the cap of {} (raise --max-amplitudes)",
                args.d,
                t,
                if amplitudes == u128::MAX {
                    "overflow".to_string()
                } else {
                    amplitudes.to_string()
                },
                args.max_amplitudes
            )));
        }
        let n = args.n.unwrap_or(t);
        let params =
            ProtocolParams::new(args.d, t, n).map_err(|e| CliError::Config(e.to_string()))?;
        let mode = DigestMode::from_digits(args.hash_digits)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let dealer = DealerConfig::new(params, args.secret, mode, args.seed)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let mut options = RunOptions::new(args.active.clone().unwrap_or_else(|| (1..=t).collect()));
        options.reconstructor = args.reconstructor;
        options.tamper = args.tamper.map(|a| TamperSpec {
            participant: a.participant,
            delta: a.delta,
        });
        let trials = args.trials.unwrap_or(default_trials);
        if trials == 0 {
            return Err(CliError::Config("--trials must be at least 1".into()));
        }
        Ok(Self {
            dealer,
            options,
            variant: args.protocol.into(),
            trials,
            format: args.format,
            max_amplitudes: args.max_amplitudes,
        })
    }

    pub fn d(&self) -> u64 {
        self.dealer.params.modulus()
    }

    pub fn t(&self) -> usize {
        self.dealer.params.threshold()
    }

    pub fn n(&self) -> usize {
        self.dealer.params.participants()
    }
}
