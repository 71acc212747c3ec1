//! RIS-aided CP-OFDM reference link over the same cascaded channel.
//!
//! The transmit waveform is continuous: symbol `n` starts at `n (T + Tcp)`
//! and carries `(1/sqrt M) sum_m X[n,m] exp(j2pi m df (u - Tcp))`, so its
//! samples at rate `1/Ts` are exactly the unitary IDFT with a cyclic prefix,
//! while fractional path delays remain exact.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{apply_ris_channel_td, complex_gaussian, RisConfig, SubSurfaceChannel};
use crate::detect::{count_bit_errors, hard_decision};
use crate::error::{Error, Result};
use crate::grid::GridParams;
use crate::modulation::{indices_to_bits, Alphabet};
use crate::transforms::{snapped_floor, TimeSignal};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OfdmConfig {
    pub grid: GridParams,
    /// Cyclic prefix length in samples.
    pub cp_len: usize,
}

impl OfdmConfig {
    /// CP of `max(ceil(M/4), ceil(max_delay/Ts))` samples.
    pub fn for_delay_spread(grid: GridParams, max_delay: f64) -> Self {
        let quarter = grid.m.div_ceil(4);
        let spread = (max_delay / grid.sample_time() - 1e-9).ceil().max(0.0) as usize;
        OfdmConfig { grid, cp_len: quarter.max(spread) }
    }

    pub fn cp_time(&self) -> f64 {
        self.cp_len as f64 * self.grid.sample_time()
    }

    /// Duration of one symbol including its prefix.
    pub fn block_time(&self) -> f64 {
        self.grid.symbol_time() + self.cp_time()
    }

    /// Fails when some path delay exceeds the prefix.
    pub fn check_channel(&self, channels: &[SubSurfaceChannel]) -> Result<()> {
        let max_delay = channels.iter().map(|c| c.max_delay()).fold(0.0, f64::max);
        if max_delay > self.cp_time() * (1.0 + 1e-9) {
            return Err(Error::Config(format!(
                "cyclic prefix of {} samples ({:e} s) shorter than delay spread {:e} s",
                self.cp_len,
                self.cp_time(),
                max_delay
            )));
        }
        Ok(())
    }
}

/// Continuous-time OFDM frame, symbols stored `m + n*M`.
struct OfdmWaveform<'a> {
    cfg: &'a OfdmConfig,
    symbols: &'a [Complex64],
}

impl TimeSignal for OfdmWaveform<'_> {
    fn at(&self, t: f64) -> Complex64 {
        let g = &self.cfg.grid;
        let block = self.cfg.block_time();
        let n = snapped_floor(t / block);
        if n < 0.0 || n >= g.n as f64 {
            return Complex64::new(0.0, 0.0);
        }
        let u = t - n * block - self.cfg.cp_time();
        let row = &self.symbols[n as usize * g.m..(n as usize + 1) * g.m];
        let step = Complex64::cis(2.0 * PI * g.delta_f * u);
        let mut phasor = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for &s in row {
            acc += s * phasor;
            phasor *= step;
        }
        acc / (g.m as f64).sqrt()
    }
}

fn unitary_dft(samples: &[Complex64]) -> Vec<Complex64> {
    let m = samples.len();
    let scale = 1.0 / (m as f64).sqrt();
    (0..m)
        .map(|k| {
            let step = Complex64::cis(-2.0 * PI * k as f64 / m as f64);
            let mut phasor = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for &s in samples {
                acc += s * phasor;
                phasor *= step;
            }
            acc * scale
        })
        .collect()
}

/// Transmits `symbols` (`M*N`, subcarrier fastest) through the RIS channel,
/// adds `CN(0, sigma2)` per time sample and returns the one-tap MMSE
/// equalised subcarrier values. The equaliser uses the true channel
/// frequency response at the middle of each symbol.
pub fn ofdm_equalize<R: Rng + ?Sized>(
    symbols: &[Complex64],
    channels: &[SubSurfaceChannel],
    ris: &RisConfig,
    sigma2: f64,
    cfg: &OfdmConfig,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    let g = &cfg.grid;
    if symbols.len() != g.len() {
        return Err(Error::Size { expected: g.len(), actual: symbols.len() });
    }
    if channels.len() != ris.sub_surfaces() {
        return Err(Error::Shape(format!(
            "{} sub-surface channels for {} reflection coefficients",
            channels.len(),
            ris.sub_surfaces()
        )));
    }
    if !(sigma2 >= 0.0) {
        return Err(Error::Parameter(format!("noise variance must be non-negative, got {sigma2}")));
    }
    cfg.check_channel(channels)?;
    let phis = ris.coefficients();
    let wave = OfdmWaveform { cfg, symbols };
    let ts = g.sample_time();
    let block = cfg.block_time();
    let mut out = Vec::with_capacity(g.len());
    let mut rx = vec![Complex64::new(0.0, 0.0); g.m];
    for n in 0..g.n {
        let start = n as f64 * block + cfg.cp_time();
        for (i, v) in rx.iter_mut().enumerate() {
            *v = apply_ris_channel_td(&wave, channels, &phis, start + i as f64 * ts);
            if sigma2 > 0.0 {
                *v += complex_gaussian(rng, sigma2);
            }
        }
        let freq = unitary_dft(&rx);
        let t_mid = start + g.symbol_time() / 2.0;
        for (m, &y) in freq.iter().enumerate() {
            let mut h = Complex64::new(0.0, 0.0);
            for (ch, &phi) in channels.iter().zip(&phis) {
                for p in &ch.cascaded {
                    h += phi
                        * p.coefficient()
                        * Complex64::cis(2.0 * PI * (p.doppler * (t_mid - p.delay) - m as f64 * g.delta_f * p.delay));
                }
            }
            out.push(h.conj() * y / (h.norm_sqr() + sigma2));
        }
    }
    Ok(out)
}

/// One RIS-aided OFDM frame; returns the number of bit errors.
#[allow(clippy::too_many_arguments)]
pub fn run_ofdm_frame<R: Rng + ?Sized>(
    bits: &[u8],
    channels: &[SubSurfaceChannel],
    ris: &RisConfig,
    sigma2: f64,
    cfg: &OfdmConfig,
    alphabet: &Alphabet,
    rng: &mut R,
) -> Result<u64> {
    let bps = alphabet.bits_per_symbol();
    let expected = cfg.grid.len() * bps;
    if bits.len() != expected {
        return Err(Error::Size { expected, actual: bits.len() });
    }
    let symbols: Vec<Complex64> = bits.chunks_exact(bps).map(|c| alphabet.points()[alphabet.symbol_index(c)]).collect();
    let soft = ofdm_equalize(&symbols, channels, ris, sigma2, cfg, rng)?;
    let rx_bits = indices_to_bits(&hard_decision(&soft, alphabet), alphabet);
    count_bit_errors(bits, &rx_bits)
}
