//! Monte-Carlo BER sweep.
//!
//! Frames are the outer loop: a frame's channel, matrices, phase search and
//! Gram matrix are computed once and reused at every SNR point still
//! running. Frames go out in fixed-size chunks over a worker pool, and each
//! (SNR, frame) pair has its own pre-assigned random stream, so the records
//! do not depend on the worker count.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::config::SimConfig;
use super::frame::PreparedFrame;
use super::output::{write_matrix, BerRecord, CsvSink};
use super::rng::{stream_rng, Stream};

/// Frames per scheduling chunk; early stopping is checked between chunks.
pub const CHUNK_FRAMES: u64 = 64;

#[derive(Clone, Debug, Default)]
pub struct SweepOptions {
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    /// Store elapsed seconds in `wall_s`; when off the column is 0 and
    /// output is byte-for-byte reproducible.
    pub record_wall_time: bool,
    /// Directory receiving the matrices of frame 0.
    pub dump_matrices: Option<PathBuf>,
}

struct Point {
    frames: u64,
    errors: u64,
    done: bool,
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

fn dump_frame(cfg: &SimConfig, dir: &std::path::Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let prepared = PreparedFrame::new(cfg, 0)?;
    let stem = format!("{}_{}_L{}", cfg.label, cfg.receiver.as_str(), cfg.sub_surfaces());
    let l = cfg.sub_surfaces();
    for (r, h) in prepared.matrices.iter().enumerate() {
        write_matrix(&dir.join(format!("{stem}_r{}.bin", r + 1)), h, l, cfg.seed)?;
    }
    write_matrix(&dir.join(format!("{stem}_eff.bin")), &prepared.h_eff, l, cfg.seed)
}

/// Runs every SNR point of `cfg`, writing each record to `sink` as soon as
/// its point finishes. Returns the records in SNR-list order.
pub fn run_sweep(cfg: &SimConfig, opts: &SweepOptions, mut sink: Option<&mut CsvSink>) -> Result<Vec<BerRecord>> {
    cfg.validate()?;
    let start = Instant::now();
    if let Some(dir) = &opts.dump_matrices {
        dump_frame(cfg, dir)?;
    }
    let pool = build_pool(opts.workers)?;
    let bits_per_frame = cfg.bits_per_frame();
    let mut points: Vec<Point> = cfg.snr_db.iter().map(|_| Point { frames: 0, errors: 0, done: false }).collect();
    let mut records: Vec<Option<BerRecord>> = vec![None; points.len()];
    let mut next_frame = 0u64;
    while points.iter().any(|p| !p.done) {
        let active: Vec<usize> = (0..points.len()).filter(|&i| !points[i].done).collect();
        let end = (next_frame + CHUNK_FRAMES).min(cfg.frames);
        let frames: Vec<u64> = (next_frame..end).collect();
        let per_frame: Vec<Vec<u64>> = pool.install(|| {
            frames
                .par_iter()
                .map(|&f| {
                    let prepared = PreparedFrame::new(cfg, f)?;
                    active
                        .iter()
                        .map(|&s| {
                            let mut rng = stream_rng(cfg.seed, Stream::Data, s as u64, f);
                            prepared.transmit(cfg.snr_db[s], &mut rng)
                        })
                        .collect::<Result<Vec<u64>>>()
                })
                .collect::<Result<Vec<_>>>()
        })?;
        next_frame = end;
        for (slot, &s) in active.iter().enumerate() {
            let p = &mut points[s];
            p.frames += frames.len() as u64;
            p.errors += per_frame.iter().map(|e| e[slot]).sum::<u64>();
            let stop_early = cfg
                .early_stop
                .is_some_and(|es| p.frames >= es.min_frames && p.errors >= es.min_errors);
            if p.frames >= cfg.frames || stop_early {
                p.done = true;
                let rec = make_record(cfg, s, p, bits_per_frame, opts, start);
                if let Some(sink) = sink.as_deref_mut() {
                    sink.write(&rec)?;
                }
                records[s] = Some(rec);
            }
        }
    }
    Ok(records.into_iter().map(|r| r.expect("every point finishes")).collect())
}

fn make_record(cfg: &SimConfig, s: usize, p: &Point, bits_per_frame: u64, opts: &SweepOptions, start: Instant) -> BerRecord {
    let total_bits = p.frames * bits_per_frame;
    let (p1, p2) = if cfg.ris.enabled { (cfg.channel.p1, cfg.channel.p2) } else { (cfg.channel.direct_paths, 0) };
    BerRecord {
        preset: cfg.label.clone(),
        receiver: cfg.receiver.as_str().into(),
        m: cfg.grid.m,
        n: cfg.grid.n,
        l: cfg.sub_surfaces(),
        p1,
        p2,
        snr_db: cfg.snr_db[s],
        frames: p.frames,
        total_bits,
        bit_errors: p.errors,
        ber: p.errors as f64 / total_bits as f64,
        seed: cfg.seed,
        wall_s: if opts.record_wall_time { start.elapsed().as_secs_f64() } else { 0.0 },
    }
}
