use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use ris_otfs::sim::{preset, run_sweep, CsvSink, Receiver, SimConfig, SweepOptions, PRESET_NAMES};

#[derive(Parser)]
#[command(name = "ris-otfs", version, about = "BER simulation of RIS-aided OTFS and OFDM links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a BER-vs-SNR sweep and write the records as CSV.
    Simulate(SimulateArgs),
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// Bundled scenario set.
    #[arg(long, value_parser = PRESET_NAMES, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// TOML file describing one scenario.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Frames per SNR point.
    #[arg(long)]
    frames: Option<u64>,
    /// Comma-separated SNR list in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    /// Restrict a preset to one receiver, or override it for a config file.
    #[arg(long)]
    receiver: Option<Receiver>,
    /// Output CSV; defaults to the config's output or `<preset>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for all cores.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Write the matrices of frame 0 of every scenario here.
    #[arg(long)]
    dump_matrices: Option<PathBuf>,
    /// Write 0 in the wall_s column so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

fn scenarios(args: &SimulateArgs) -> Result<(Vec<SimConfig>, PathBuf)> {
    let (mut list, default_out) = match (&args.preset, &args.config) {
        (Some(name), None) => (preset(name)?, PathBuf::from(format!("{name}.csv"))),
        (None, Some(path)) => {
            let cfg = SimConfig::from_path(path)?;
            let out = cfg.output.clone().unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.label)));
            (vec![cfg], out)
        }
        _ => bail!("exactly one of --preset and --config is required"),
    };
    if let Some(r) = args.receiver {
        if args.preset.is_some() {
            list.retain(|c| c.receiver == r);
            if list.is_empty() {
                bail!("preset has no {} scenarios", r.as_str());
            }
        } else {
            list.iter_mut().for_each(|c| c.receiver = r);
        }
    }
    for c in &mut list {
        if let Some(seed) = args.seed {
            c.seed = seed;
        }
        if let Some(frames) = args.frames {
            c.frames = frames;
            if let Some(es) = &mut c.early_stop {
                es.min_frames = es.min_frames.min(frames);
            }
        }
        if let Some(snr) = &args.snr {
            c.snr_db = snr.clone();
        }
        c.validate().with_context(|| format!("invalid scenario '{}'", c.label))?;
    }
    Ok((list, args.out.clone().unwrap_or(default_out)))
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let (list, out) = scenarios(&args)?;
    let mut sink = CsvSink::create(&out)?;
    let opts = SweepOptions {
        workers: args.workers,
        record_wall_time: !args.no_timing,
        dump_matrices: args.dump_matrices.clone(),
    };
    for (i, cfg) in list.iter().enumerate() {
        eprintln!(
            "[{}/{}] {} {} L={} ({} SNR points, {} frames)",
            i + 1,
            list.len(),
            cfg.label,
            cfg.receiver.as_str(),
            cfg.sub_surfaces(),
            cfg.snr_db.len(),
            cfg.frames
        );
        for rec in run_sweep(cfg, &opts, Some(&mut sink))? {
            eprintln!("    {:>6.2} dB  ber {:.3e}  ({} errors)", rec.snr_db, rec.ber, rec.bit_errors);
        }
    }
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate(args) => simulate(args),
    }
}
