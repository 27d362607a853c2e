use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use orthofec::analysis::{self, ExperimentReport, ReportRow, SweepMode};
use orthofec::codec::{DecodeOutcome, OutcomeKind, Policy};
use orthofec::config::{RunConfig, Settings};
use orthofec::linksim;
use orthofec::{frame, Codebook, DataWord, Error, Result};

const EXIT_RETRANSMIT: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Default seeded trial count for sampled sweeps and censuses.
const DEFAULT_TRIALS: u64 = 100_000;

#[derive(Parser, Debug)]
#[command(
    name = "orthofec",
    version,
    about = "Biorthogonal forward error control toolkit"
)]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Code length in bits (power of two, at least 8).
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Per-bit flip probability of the i.i.d. channel.
    #[arg(long = "flip-prob", global = true)]
    flip_prob: Option<f64>,
    /// Explicit error pattern applied to every codeword, e.g. 00001000.
    #[arg(long, global = true)]
    pattern: Option<String>,
    /// conservative | accept-nearest
    #[arg(long, global = true)]
    policy: Option<Policy>,
    /// Output path; stdout when omitted or "-".
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key=value file supplying defaults for the flags above.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the codebook, one codeword per line.
    Codebook,
    /// Encode a file into a framed codeword stream.
    Encode {
        /// Input file, or "-" for stdin.
        input: PathBuf,
    },
    /// Decode a framed stream back to the payload.
    Decode { input: PathBuf },
    /// Simulate symbols through the serial link and report outcomes as CSV.
    Transmit {
        #[arg(long)]
        symbols: Option<u64>,
        /// Write the waveform trace of the first symbol to this path.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Reproduce the correction-radius and detection-rate tables.
    Tables {
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Outcome census over the received-word space.
    Census {
        /// Sample this many random words instead of enumerating.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Correction sweep up to a maximum error weight (default t).
    Sweep {
        #[arg(long = "max-weight")]
        max_weight: Option<usize>,
        /// Sample this many cases instead of enumerating.
        #[arg(long)]
        trials: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn settings(cli: &Cli, extra: Settings) -> Result<Settings> {
    let f = &cli.flags;
    let from_flags = Settings {
        n: f.n,
        seed: f.seed,
        flip_prob: f.flip_prob,
        pattern: f.pattern.clone(),
        policy: f.policy,
        out: f.out.clone(),
        ..extra
    };
    match &f.config {
        Some(path) => Ok(from_flags.or(Settings::load(path)?)),
        None => Ok(from_flags),
    }
}

fn run(cli: Cli) -> Result<u8> {
    let extra = match &cli.command {
        Command::Transmit { symbols, .. } => Settings {
            symbols: *symbols,
            ..Default::default()
        },
        Command::Tables { trials } | Command::Census { trials } => Settings {
            trials: *trials,
            ..Default::default()
        },
        Command::Sweep { max_weight, trials } => Settings {
            trials: *trials,
            max_weight: *max_weight,
            ..Default::default()
        },
        _ => Settings::default(),
    };
    let s = settings(&cli, extra)?;

    match &cli.command {
        Command::Codebook => {
            let cb = Codebook::build(s.code_params()?.n())?;
            write_output(s.out.as_deref(), cb.dump().as_bytes())?;
            Ok(0)
        }
        Command::Encode { input } => {
            let cb = Codebook::build(s.code_params()?.n())?;
            let payload = read_input(input)?;
            write_output(s.out.as_deref(), &frame::encode(&cb, &payload)?)?;
            Ok(0)
        }
        Command::Decode { input } => cmd_decode(&s, input),
        Command::Transmit { trace, .. } => cmd_transmit(&s, trace.as_deref()),
        Command::Tables { .. } => {
            let seed = s.seed.unwrap_or(0);
            let trials = s.trials.unwrap_or(DEFAULT_TRIALS);
            let mut report = ExperimentReport::new();
            for row in analysis::radius_table(&[8, 16, 32, 64], trials, seed)? {
                report.push(ReportRow::Sweep(row.certificate));
            }
            for n in [8, 16] {
                let cb = Codebook::build(n)?;
                report.push(ReportRow::Census(analysis::detection_census(&cb)?));
            }
            report.push(ReportRow::Census(analysis::sampled_census(
                &Codebook::build(32)?,
                trials,
                seed,
            )?));
            for n in [8, 16] {
                report.push(ReportRow::Parity(analysis::parity_baseline(n)?));
            }
            write_output(s.out.as_deref(), report.to_csv()?.as_bytes())?;
            Ok(0)
        }
        Command::Census { .. } => {
            let cb = Codebook::build(s.code_params()?.n())?;
            let census = match s.trials {
                Some(trials) => analysis::sampled_census(&cb, trials, s.seed.unwrap_or(0))?,
                None if cb.n() > analysis::EXHAUSTIVE_MAX_N => {
                    analysis::sampled_census(&cb, DEFAULT_TRIALS, s.seed.unwrap_or(0))?
                }
                None => analysis::detection_census(&cb)?,
            };
            let mut report = ExperimentReport::new();
            report.push(ReportRow::Census(census));
            write_output(s.out.as_deref(), report.to_csv()?.as_bytes())?;
            Ok(0)
        }
        Command::Sweep { .. } => {
            let cb = Codebook::build(s.code_params()?.n())?;
            let max_weight = s.max_weight.unwrap_or(cb.params().t());
            let mode = match s.trials {
                Some(trials) => SweepMode::Sampled {
                    seed: s.seed.unwrap_or(0),
                    trials,
                },
                None => SweepMode::exhaustive(),
            };
            let result = analysis::correction_sweep(&cb, max_weight, mode)?;
            let mut report = ExperimentReport::new();
            report.push(ReportRow::Sweep(result));
            write_output(s.out.as_deref(), report.to_csv()?.as_bytes())?;
            Ok(0)
        }
    }
}

fn cmd_decode(s: &Settings, input: &Path) -> Result<u8> {
    let policy = s.policy.unwrap_or_default();
    let decoded = frame::decode(&read_input(input)?, policy)?;
    if let Some(n) = s.n {
        if n != decoded.header.n as usize {
            return Err(Error::Config(format!(
                "--n {n} does not match the stream's n = {}",
                decoded.header.n
            )));
        }
    }
    let count = |kind: OutcomeKind| decoded.count(|o: &DecodeOutcome| o.kind() == kind);
    eprintln!(
        "symbols={} exact={} corrected={} retransmit={} beyond_radius={}",
        decoded.outcomes.len(),
        count(OutcomeKind::ExactMatch),
        count(OutcomeKind::Corrected),
        count(OutcomeKind::Retransmit),
        count(OutcomeKind::NearestBeyondRadius),
    );
    if !decoded.erasures.is_empty() {
        let list: Vec<String> = decoded.erasures.iter().map(u64::to_string).collect();
        eprintln!("erasures={}", list.join(","));
    }
    match &decoded.payload {
        Some(payload) => write_output(s.out.as_deref(), payload)?,
        None => eprintln!("decode aborted: retransmission required (policy {policy})"),
    }
    Ok(if decoded.erasures.is_empty() {
        0
    } else {
        EXIT_RETRANSMIT
    })
}

fn cmd_transmit(s: &Settings, trace: Option<&Path>) -> Result<u8> {
    let cfg = RunConfig::try_from(s)?;
    let cb = Codebook::build(cfg.params.n())?;
    let summary = analysis::simulate_transmission(&cb, &cfg.channel, cfg.policy, cfg.symbols)?;
    if let Some(path) = trace {
        let first = linksim::run_link(DataWord::new(0), &cfg.channel, 0, &cb, cfg.policy)?;
        write_output(Some(path), first.trace.to_text().as_bytes())?;
    }
    // Uncorrectable is judged under the conservative policy whatever the
    // delivery policy of the run.
    let uncorrectable = summary.counts.retransmit + summary.counts.beyond_radius;
    let mut report = ExperimentReport::new();
    report.push(ReportRow::Transmit(summary));
    write_output(cfg.out.as_deref(), report.to_csv()?.as_bytes())?;
    Ok(if uncorrectable > 0 {
        EXIT_RETRANSMIT
    } else {
        0
    })
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        Ok(fs::read(path)?)
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::write(p, bytes)?,
        _ => io::stdout().write_all(bytes)?,
    }
    Ok(())
}
