//! One Monte-Carlo frame: channel draw, effective matrices, phase search,
//! then detection at any number of noise levels.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{complex_gaussian, sample_link, sample_sub_surface, LinkTap, RisConfig, SubSurfaceChannel};
use crate::detect::{detect_frame, MmseDetector};
use crate::effective::{build, EffChannelMatrix, ReceiverKind};
use crate::error::Result;
use crate::grid::GridParams;
use crate::modulation::Alphabet;
use crate::ofdm::{run_ofdm_frame, OfdmConfig};
use crate::phase::{random_phase_search, PhaseSearchConfig};

use super::config::{ChannelModel, Receiver, SimConfig};
use super::rng::{stream_rng, Stream};

/// `sigma^2 = 10^(-snr/10)` for unit-energy symbols.
pub fn noise_variance(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

fn fixed_doppler_link<R: Rng + ?Sized>(paths: usize, doppler: f64, rng: &mut R) -> Vec<LinkTap> {
    let var = 1.0 / paths as f64;
    (0..paths).map(|_| LinkTap::new(complex_gaussian(rng, var), 0.0, doppler)).collect()
}

/// Channels of frame `frame`: one per sub-surface, or the single direct
/// link when the RIS is disabled. Independent of SNR and receiver.
pub fn draw_channels(cfg: &SimConfig, frame: u64) -> Result<Vec<SubSurfaceChannel>> {
    let g = cfg.grid_params()?;
    let ch = &cfg.channel;
    if !cfg.ris.enabled {
        let mut rng = stream_rng(cfg.seed, Stream::Channel, frame, 0);
        let link = match ch.model {
            ChannelModel::Jakes => {
                sample_link(ch.direct_paths, ch.nu_max, g.symbol_time(), cfg.oversampling, &g, &mut rng)?
            }
            ChannelModel::FixedDoppler { multiple } => {
                fixed_doppler_link(ch.direct_paths, multiple as f64 * g.delta_f, &mut rng)
            }
        };
        return Ok(vec![SubSurfaceChannel::direct(link, &g)?]);
    }
    let stats = cfg.channel_stats()?;
    (1..=cfg.ris.sub_surfaces)
        .map(|r| {
            let mut rng = stream_rng(cfg.seed, Stream::Channel, frame, r as u64);
            match ch.model {
                ChannelModel::Jakes => sample_sub_surface(r, &stats, &g, &mut rng),
                ChannelModel::FixedDoppler { multiple } => {
                    let link1 = fixed_doppler_link(ch.p1, multiple as f64 * g.delta_f, &mut rng);
                    let link2 = fixed_doppler_link(ch.p2, 0.0, &mut rng);
                    SubSurfaceChannel::new(r, link1, link2, &g)
                }
            }
        })
        .collect()
}

enum Link {
    Otfs(MmseDetector),
    Ofdm { cfg: OfdmConfig, ris: RisConfig },
}

/// Everything about a frame that does not depend on the noise level.
pub struct PreparedFrame {
    pub frame: u64,
    pub channels: Vec<SubSurfaceChannel>,
    /// Per-channel matrices for the configured receiver (two-step for OFDM,
    /// where they only serve the phase search).
    pub matrices: Vec<EffChannelMatrix>,
    pub phases: Vec<f64>,
    pub h_eff: EffChannelMatrix,
    grid: GridParams,
    alphabet: Alphabet,
    link: Link,
}

impl PreparedFrame {
    pub fn new(cfg: &SimConfig, frame: u64) -> Result<Self> {
        let grid = cfg.grid_params()?;
        let channels = draw_channels(cfg, frame)?;
        let kind = cfg.receiver.matrix_kind().unwrap_or(ReceiverKind::TwoStep);
        let matrices = channels.iter().map(|c| build(kind, c, &grid)).collect::<Result<Vec<_>>>()?;
        let (phases, h_eff) = if cfg.ris.enabled {
            let seed = stream_rng(cfg.seed, Stream::Phase, frame, 0).random::<u64>();
            let search = PhaseSearchConfig { num_candidates: cfg.ris.phase_candidates, seed };
            let out = random_phase_search(&matrices, &search)?;
            (out.phases, out.h_eff)
        } else {
            (vec![0.0], matrices[0].clone())
        };
        let link = match cfg.receiver {
            Receiver::Ofdm => {
                let spread = channels.iter().map(|c| c.max_delay()).fold(0.0, f64::max);
                let max_spread = cfg.channel_stats()?.delay_max_per_link * 2.0;
                Link::Ofdm {
                    cfg: OfdmConfig::for_delay_spread(grid, spread.max(max_spread)),
                    ris: RisConfig::with_phases(phases.clone())?,
                }
            }
            _ => Link::Otfs(MmseDetector::new(&h_eff)),
        };
        Ok(PreparedFrame {
            frame,
            channels,
            matrices,
            phases,
            h_eff,
            grid,
            alphabet: Alphabet::new(cfg.modulation),
            link,
        })
    }

    /// Sends one random frame at `snr_db` and returns its bit errors.
    pub fn transmit<R: Rng + ?Sized>(&self, snr_db: f64, rng: &mut R) -> Result<u64> {
        let sigma2 = noise_variance(snr_db);
        let bps = self.alphabet.bits_per_symbol();
        match &self.link {
            Link::Otfs(detector) => {
                let symbols: Vec<usize> = (0..self.grid.len()).map(|_| rng.random_range(0..self.alphabet.len())).collect();
                let x: Vec<Complex64> = symbols.iter().map(|&i| self.alphabet.points()[i]).collect();
                let mut y = self.h_eff.apply(&x)?;
                for v in &mut y {
                    *v += complex_gaussian(rng, sigma2);
                }
                Ok(detect_frame(detector, &y, sigma2, &self.alphabet, &symbols)?.bit_errors)
            }
            Link::Ofdm { cfg, ris } => {
                let bits: Vec<u8> = (0..self.grid.len() * bps).map(|_| rng.random_range(0..2u8)).collect();
                run_ofdm_frame(&bits, &self.channels, ris, sigma2, cfg, &self.alphabet, rng)
            }
        }
    }
}

/// Bit errors of frame `frame` at SNR point `snr_index`, using the same
/// random streams as the sweep.
pub fn run_frame(cfg: &SimConfig, snr_index: usize, frame: u64) -> Result<u64> {
    let snr = *cfg.snr_db.get(snr_index).ok_or_else(|| {
        crate::Error::Parameter(format!("SNR index {snr_index} out of range ({} points)", cfg.snr_db.len()))
    })?;
    let prepared = PreparedFrame::new(cfg, frame)?;
    prepared.transmit(snr, &mut stream_rng(cfg.seed, Stream::Data, snr_index as u64, frame))
}
