use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use dostbc::codebook::{self, min_length_search, rate_bound, BoundFamily, DEFAULT_SEARCH_BUDGET};
use dostbc::harness::{
    emit_rate_table, estimate_diversity, run_ber, BerCurve, ExperimentConfig, PowerPairing, SnrGrid,
};
use dostbc::verifier::{verify, Verdict, VerifyOptions};
use dostbc::{Constellation, DistributedCode, Error, Scheme};

#[derive(Parser)]
#[command(name = "dostbc", version, about = "Distributed orthogonal space-time block code toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Dostbc,
    Repetition,
}

#[derive(Subcommand)]
enum Command {
    /// Build the systematic code for (N, K).
    Construct {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Write the code file here; otherwise print it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a data-rate upper bound.
    RateBound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "dostbc")]
        family: BoundFamily,
    },
    /// Exhaustive minimal-length search on tiny instances.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        max_t: usize,
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: f64,
        /// Write the witness code file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every defining condition of a code file.
    Verify {
        code: PathBuf,
        #[arg(long, default_value_t = 8)]
        draws: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        report: ReportFormat,
    },
    /// Monte-Carlo BER sweep.
    Simulate {
        /// JSON experiment config; flags below override nothing when given.
        #[arg(long, conflicts_with_all = ["n", "k"])]
        config: Option<PathBuf>,
        #[arg(long, required_unless_present = "config")]
        n: Option<usize>,
        #[arg(long, required_unless_present = "config")]
        k: Option<usize>,
        #[arg(long, value_enum, default_value = "dostbc")]
        scheme: SchemeArg,
        #[arg(long)]
        code: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        bps: f64,
        #[arg(long)]
        constellation: Option<String>,
        #[arg(long, default_value = "0:2:24")]
        snr: SnrGrid,
        /// Frames per SNR point; accepts forms like 1e5.
        #[arg(long, default_value = "1e5")]
        trials: String,
        #[arg(long)]
        target_errors: Option<u64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Use E_r per use on every relay instead of matching the
        /// distributed code's per-slot power.
        #[arg(long)]
        uniform_power: bool,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate diversity order from a BER CSV.
    Diversity {
        #[arg(long = "in")]
        input: PathBuf,
        /// SNR window in dB, `lo:hi`.
        #[arg(long, default_value = "16:24")]
        window: String,
        #[arg(long, default_value_t = 200)]
        min_errors: u64,
    },
    /// Rate bounds for every (N, K) in range, plus bound-vs-K series.
    RateTable {
        #[arg(long, default_value_t = 9)]
        max_n: usize,
        #[arg(long, default_value_t = 9)]
        max_k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        series_out: Option<PathBuf>,
    },
    /// Export a constellation table as CSV.
    Constellation {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_count(s: &str) -> anyhow::Result<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().with_context(|| format!("bad count {s:?}"))?;
    if f < 0.0 || f.fract() != 0.0 || f > u64::MAX as f64 {
        bail!("bad count {s:?}");
    }
    Ok(f as u64)
}

fn parse_window(s: &str) -> anyhow::Result<(f64, f64)> {
    let (a, b) = s.split_once(':').with_context(|| format!("window {s:?} is not lo:hi"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn write_or_print(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Construct { n, k, out } => {
            let code = codebook::construct(n, k)?;
            eprintln!("N = {n}, K = {k}, T = {}, rate {}", code.length(), code.rate());
            match out {
                Some(p) => code.save(&p)?,
                None => print!("{}", code.render()),
            }
        }
        Command::RateBound { n, k, family } => {
            let b = rate_bound(n, k, family)?;
            println!("{family} {b} = {} ({:.6})", b.value(), b.as_f64());
        }
        Command::Search {
            n,
            k,
            max_t,
            budget,
            out,
        } => match min_length_search(n, k, max_t, budget)? {
            Some(r) => {
                println!("T = {} (visited {} column sets)", r.t, r.visited);
                print!("{}", r.witness.render());
                if let Some(p) = out {
                    r.witness.save(&p)?;
                }
            }
            None => println!("none with T <= {max_t}"),
        },
        Command::Verify {
            code,
            draws,
            tol,
            seed,
            report,
        } => {
            let c = DistributedCode::load(&code)?;
            let opts = VerifyOptions {
                draws,
                tol,
                seed,
                ..VerifyOptions::default()
            };
            let r = verify(&c, &opts)?;
            match report {
                ReportFormat::Json => println!("{}", serde_json::to_string_pretty(&r)?),
                ReportFormat::Text => print!("{}", r.to_text()),
            }
            if r.verdict == Verdict::NotDostbc {
                return Err(Error::NotVerified(r.summary()).into());
            }
        }
        Command::Simulate {
            config,
            n,
            k,
            scheme,
            code,
            bps,
            constellation,
            snr,
            trials,
            target_errors,
            seed,
            uniform_power,
            force,
            out,
        } => {
            let cfg = match config {
                Some(p) => ExperimentConfig::load(&p)?,
                None => {
                    let scheme = match scheme {
                        SchemeArg::Dostbc => Scheme::Dostbc,
                        SchemeArg::Repetition => Scheme::Repetition,
                    };
                    let mut cfg = ExperimentConfig::new(scheme, n.unwrap(), k.unwrap());
                    cfg.code_path = code;
                    cfg.bps = Some(bps);
                    cfg.constellation = constellation;
                    cfg.snr = snr;
                    cfg.trials = parse_count(&trials)?;
                    cfg.target_errors = target_errors;
                    cfg.seed = seed;
                    cfg.force = force;
                    if uniform_power {
                        cfg.power = PowerPairing::Uniform;
                    }
                    cfg
                }
            };
            let curve = run_ber(&cfg)?;
            for p in curve.unreliable() {
                eprintln!(
                    "warning: {} dB has {} bit errors, below {}",
                    p.snr_db, p.bit_errors, curve.meta.min_errors
                );
            }
            match out {
                Some(p) => curve.save(&p)?,
                None => print!("{}", curve.to_csv_string()?),
            }
        }
        Command::Diversity {
            input,
            window,
            min_errors,
        } => {
            let (points, _) = BerCurve::load_points(&input)?;
            let est = estimate_diversity(&points, parse_window(&window)?, min_errors)?;
            println!(
                "slope {:.4} over {}..{} dB, r2 {:.4}, {} points used, {} flagged",
                est.slope, est.window.0, est.window.1, est.r2, est.points_used, est.points_flagged
            );
        }
        Command::RateTable {
            max_n,
            max_k,
            out,
            series_out,
        } => {
            let t = emit_rate_table(max_n, max_k)?;
            eprint!("{}", t.symbolic_text());
            write_or_print(out.as_ref(), &t.to_csv())?;
            if let Some(p) = series_out {
                std::fs::write(&p, t.series_csv())?;
            }
        }
        Command::Constellation { name, out } => {
            let c = Constellation::by_name(&name)?;
            write_or_print(out.as_ref(), &c.to_csv())?;
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::InfeasiblePairing(_)) => 2,
        Some(Error::NotVerified(_) | Error::ConstructionFailed { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
