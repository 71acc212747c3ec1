//! Two-link RIS channel: per-link path taps, their cascaded composition,
//! and exact point evaluation of the received waveform.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridParams, TfFrame};
use crate::transforms::{evaluate_td_at, TimeSignal};

/// One propagation path of a single link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkTap {
    pub gain: Complex64,
    /// Seconds.
    pub delay: f64,
    /// Hz.
    pub doppler: f64,
}

impl LinkTap {
    pub fn new(gain: Complex64, delay: f64, doppler: f64) -> Self {
        LinkTap { gain, delay, doppler }
    }

    /// Nearest integer delay bin; `delay = (index + frac) * Ts`.
    pub fn delay_index(&self, grid: &GridParams) -> i64 {
        (self.delay / grid.sample_time()).round() as i64
    }

    pub fn delay_frac(&self, grid: &GridParams) -> f64 {
        self.delay / grid.sample_time() - self.delay_index(grid) as f64
    }

    /// Nearest integer Doppler bin; `doppler = (index + frac) / (NT)`.
    pub fn doppler_index(&self, grid: &GridParams) -> i64 {
        (self.doppler * grid.frame_time()).round() as i64
    }

    pub fn doppler_frac(&self, grid: &GridParams) -> f64 {
        self.doppler * grid.frame_time() - self.doppler_index(grid) as f64
    }
}

/// A transmitter -> RIS -> receiver path pair folded into one path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CascadedPath {
    /// Product of the two link gains.
    pub gain: Complex64,
    /// Unit-modulus phase `exp(j2pi nu_2 tau_1)` left over from re-centring
    /// the second-link Doppler on the total delay.
    pub rho: Complex64,
    pub delay: f64,
    pub doppler: f64,
}

impl CascadedPath {
    /// `gain * rho`, the coefficient in front of the shifted waveform.
    #[inline]
    pub fn coefficient(&self) -> Complex64 {
        self.gain * self.rho
    }
}

/// Compose two links. Every delay sum must lie in `[0, T)`.
pub fn cascade(link1: &[LinkTap], link2: &[LinkTap], grid: &GridParams) -> Result<Vec<CascadedPath>> {
    let period = grid.symbol_time();
    let mut out = Vec::with_capacity(link1.len() * link2.len());
    for h in link1 {
        for g in link2 {
            let delay = h.delay + g.delay;
            if !(0.0..period).contains(&delay) {
                return Err(Error::Domain { delay, symbol_time: period });
            }
            out.push(CascadedPath {
                gain: g.gain * h.gain,
                rho: Complex64::cis(2.0 * PI * g.doppler * h.delay),
                delay,
                doppler: h.doppler + g.doppler,
            });
        }
    }
    Ok(out)
}

/// The channel seen through sub-surface `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubSurfaceChannel {
    pub r: usize,
    pub link1: Vec<LinkTap>,
    pub link2: Vec<LinkTap>,
    pub cascaded: Vec<CascadedPath>,
}

impl SubSurfaceChannel {
    pub fn new(r: usize, link1: Vec<LinkTap>, link2: Vec<LinkTap>, grid: &GridParams) -> Result<Self> {
        let cascaded = cascade(&link1, &link2, grid)?;
        Ok(SubSurfaceChannel { r, link1, link2, cascaded })
    }

    /// A direct link without a RIS: `link2` is a single unit tap.
    pub fn direct(link: Vec<LinkTap>, grid: &GridParams) -> Result<Self> {
        Self::new(1, link, vec![LinkTap::new(Complex64::new(1.0, 0.0), 0.0, 0.0)], grid)
    }

    /// Builds a channel straight from cascaded paths (used for constructed
    /// test channels where the per-link split is irrelevant).
    pub fn from_paths(r: usize, cascaded: Vec<CascadedPath>, grid: &GridParams) -> Result<Self> {
        let period = grid.symbol_time();
        if let Some(p) = cascaded.iter().find(|p| !(0.0..period).contains(&p.delay)) {
            return Err(Error::Domain { delay: p.delay, symbol_time: period });
        }
        Ok(SubSurfaceChannel { r, link1: Vec::new(), link2: Vec::new(), cascaded })
    }

    pub fn max_delay(&self) -> f64 {
        self.cascaded.iter().map(|p| p.delay).fold(0.0, f64::max)
    }
}

/// RIS made of `L` sub-surfaces with one reflection coefficient each.
#[derive(Clone, Debug, PartialEq)]
pub struct RisConfig {
    /// Total element count `K`.
    pub elements: usize,
    /// Phases in radians, one per sub-surface.
    pub phases: Vec<f64>,
    /// Amplitudes in `[0, 1]`, one per sub-surface.
    pub amplitudes: Vec<f64>,
}

impl RisConfig {
    pub fn new(elements: usize, phases: Vec<f64>, amplitudes: Vec<f64>) -> Result<Self> {
        let l = phases.len();
        if l == 0 || amplitudes.len() != l {
            return Err(Error::Parameter(format!(
                "need one phase and one amplitude per sub-surface, got {} and {}",
                l,
                amplitudes.len()
            )));
        }
        if elements % l != 0 {
            return Err(Error::Parameter(format!("{elements} elements cannot be split into {l} sub-surfaces")));
        }
        if amplitudes.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::Parameter("amplitudes must lie in [0, 1]".into()));
        }
        if phases.iter().any(|p| !(-PI..=PI).contains(p)) {
            return Err(Error::Parameter("phases must lie in [-pi, pi]".into()));
        }
        Ok(RisConfig { elements, phases, amplitudes })
    }

    /// Unit amplitudes, one element per sub-surface.
    pub fn with_phases(phases: Vec<f64>) -> Result<Self> {
        let l = phases.len();
        Self::new(l, phases, vec![1.0; l])
    }

    pub fn sub_surfaces(&self) -> usize {
        self.phases.len()
    }

    pub fn elements_per_sub_surface(&self) -> usize {
        self.elements / self.sub_surfaces()
    }

    /// `phi_r = gamma_r exp(j theta_r)` for 0-based `r`.
    pub fn coefficient(&self, r: usize) -> Complex64 {
        Complex64::from_polar(self.amplitudes[r], self.phases[r])
    }

    pub fn coefficients(&self) -> Vec<Complex64> {
        (0..self.sub_surfaces()).map(|r| self.coefficient(r)).collect()
    }
}

/// Statistics of the random path draws.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelStats {
    pub p1: usize,
    pub p2: usize,
    /// Maximum Doppler shift per link, Hz.
    pub nu_max: f64,
    /// Per-link delays are drawn from `[0, delay_max_per_link)`, seconds.
    pub delay_max_per_link: f64,
    /// Delays are multiples of `Ts / delay_oversampling`.
    pub delay_oversampling: usize,
}

impl ChannelStats {
    /// Per-link delay spread `M*Ts/2 = T/2`.
    pub fn for_grid(grid: &GridParams, p1: usize, p2: usize, nu_max: f64, delay_oversampling: usize) -> Self {
        ChannelStats {
            p1,
            p2,
            nu_max,
            delay_max_per_link: grid.symbol_time() / 2.0,
            delay_oversampling,
        }
    }

    pub fn validate(&self, grid: &GridParams) -> Result<()> {
        if self.p1 == 0 || self.p2 == 0 {
            return Err(Error::Parameter("path counts must be at least 1".into()));
        }
        if self.delay_oversampling == 0 {
            return Err(Error::Parameter("delay oversampling must be at least 1".into()));
        }
        if !(self.delay_max_per_link > 0.0 && self.delay_max_per_link <= grid.symbol_time() / 2.0 * (1.0 + 1e-12)) {
            return Err(Error::Parameter(format!(
                "per-link delay spread {:e} s must lie in (0, T/2]",
                self.delay_max_per_link
            )));
        }
        if !(self.nu_max >= 0.0 && self.nu_max < grid.delta_f) {
            return Err(Error::Parameter(format!("nu_max {} Hz must lie in [0, delta_f)", self.nu_max)));
        }
        Ok(())
    }
}

/// Jakes' Doppler for angle `psi`: `nu_max cos(psi)`.
#[inline]
pub fn jakes_doppler(nu_max: f64, psi: f64) -> f64 {
    nu_max * psi.cos()
}

/// Circularly-symmetric complex Gaussian with total variance `var`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let sd = (var / 2.0).sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    Complex64::new(normal.sample(rng) * sd, normal.sample(rng) * sd)
}

/// Draws `paths` taps: gains `CN(0, 1/P)`, Jakes Dopplers, delays uniform
/// over the grid `{i*Ts/Q : i*Ts/Q < delay_max}`.
pub fn sample_link<R: Rng + ?Sized>(
    paths: usize,
    nu_max: f64,
    delay_max: f64,
    delay_oversampling: usize,
    grid: &GridParams,
    rng: &mut R,
) -> Result<Vec<LinkTap>> {
    if paths == 0 {
        return Err(Error::Parameter("path count must be at least 1".into()));
    }
    if delay_oversampling == 0 {
        return Err(Error::Parameter("delay oversampling must be at least 1".into()));
    }
    let step = grid.sample_time() / delay_oversampling as f64;
    let slots = ((delay_max / step) - 1e-9).ceil().max(1.0) as u64;
    let var = 1.0 / paths as f64;
    let taps = (0..paths)
        .map(|_| {
            let gain = complex_gaussian(rng, var);
            let psi = rng.random_range(-PI..=PI);
            let slot = rng.random_range(0..slots);
            LinkTap::new(gain, slot as f64 * step, jakes_doppler(nu_max, psi))
        })
        .collect();
    Ok(taps)
}

/// Draws both links of one sub-surface under `stats`.
pub fn sample_sub_surface<R: Rng + ?Sized>(
    r: usize,
    stats: &ChannelStats,
    grid: &GridParams,
    rng: &mut R,
) -> Result<SubSurfaceChannel> {
    let link1 = sample_link(stats.p1, stats.nu_max, stats.delay_max_per_link, stats.delay_oversampling, grid, rng)?;
    let link2 = sample_link(stats.p2, stats.nu_max, stats.delay_max_per_link, stats.delay_oversampling, grid, rng)?;
    SubSurfaceChannel::new(r, link1, link2, grid)
}

impl TimeSignal for TfFrame {
    fn at(&self, t: f64) -> Complex64 {
        evaluate_td_at(self, t)
    }
}

/// `phi * sum_paths gain * rho * x(t - tau) * exp(j2pi nu (t - tau))`.
pub fn apply_channel_td<S: TimeSignal + ?Sized>(x: &S, ch: &SubSurfaceChannel, phi: Complex64, t: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for p in &ch.cascaded {
        let shifted = t - p.delay;
        acc += p.coefficient() * x.at(shifted) * Complex64::cis(2.0 * PI * p.doppler * shifted);
    }
    phi * acc
}

/// Sum of [`apply_channel_td`] over all sub-surfaces.
pub fn apply_ris_channel_td<S: TimeSignal + ?Sized>(
    x: &S,
    channels: &[SubSurfaceChannel],
    phis: &[Complex64],
    t: f64,
) -> Complex64 {
    channels.iter().zip(phis).map(|(ch, &phi)| apply_channel_td(x, ch, phi, t)).sum()
}

/// Adds `CN(0, sigma2)` noise to every entry.
pub fn add_dd_noise<R: Rng + ?Sized>(y: &[Complex64], sigma2: f64, rng: &mut R) -> Result<Vec<Complex64>> {
    if !(sigma2 >= 0.0) {
        return Err(Error::Parameter(format!("noise variance must be non-negative, got {sigma2}")));
    }
    if sigma2 == 0.0 {
        return Ok(y.to_vec());
    }
    Ok(y.iter().map(|&v| v + complex_gaussian(rng, sigma2)).collect())
}
