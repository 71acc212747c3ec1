//! Bundled scenarios for the four BER figures.

use super::config::{ChannelConfig, ChannelModel, EarlyStop, GridConfig, Receiver, RisSetup, SimConfig};
use crate::error::{Error, Result};
use crate::modulation::Modulation;

pub const PRESET_NAMES: [&str; 4] = ["fig2", "fig3", "fig4", "fig5"];

fn base(label: &str, grid: GridConfig, nu_max: f64, receiver: Receiver, sub_surfaces: usize) -> SimConfig {
    SimConfig {
        label: label.into(),
        grid,
        channel: ChannelConfig {
            p1: 4,
            p2: 4,
            nu_max,
            delay_max_per_link: None,
            direct_paths: 4,
            model: ChannelModel::Jakes,
        },
        ris: RisSetup { enabled: sub_surfaces > 0, sub_surfaces: sub_surfaces.max(1), phase_candidates: 100 },
        receiver,
        modulation: Modulation::Bpsk,
        snr_db: Vec::new(),
        frames: 20_000,
        early_stop: None,
        seed: 0,
        oversampling: 16,
        output: None,
    }
}

fn fig2_grid() -> GridConfig {
    GridConfig { m: 16, n: 16, delta_f: 3.75e3, fc: 4e9 }
}

fn lte_grid() -> GridConfig {
    GridConfig { m: 12, n: 7, delta_f: 15e3, fc: 4e9 }
}

fn db_range(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = ((to - from) / step).round() as usize;
    (0..=n).map(|i| from + i as f64 * step).collect()
}

/// M = N = 16, 3.75 kHz, 1.2 kHz Doppler: no RIS, L = 1 and L = 5, for
/// both OTFS receivers.
pub fn fig2() -> Vec<SimConfig> {
    let mut out = Vec::new();
    for receiver in [Receiver::TwoStep, Receiver::Zak] {
        for (l, snr) in [(0, db_range(10.0, 22.5, 2.5)), (1, db_range(10.0, 22.5, 2.5)), (5, db_range(-2.5, 10.0, 2.5))] {
            let mut c = base("fig2", fig2_grid(), 1.2e3, receiver, l);
            c.snr_db = snr;
            out.push(c);
        }
    }
    out
}

/// LTE resource block, 15 kHz, 1.85 kHz Doppler, L = 5: both OTFS
/// receivers and the OFDM baseline.
pub fn fig3() -> Vec<SimConfig> {
    [Receiver::TwoStep, Receiver::Zak, Receiver::Ofdm]
        .into_iter()
        .map(|receiver| {
            let mut c = base("fig3", lte_grid(), 1.85e3, receiver, 5);
            c.snr_db = db_range(-5.0, 20.0, 2.5);
            c.early_stop = Some(EarlyStop { min_frames: 5_000, min_errors: 1_000 });
            c
        })
        .collect()
}

/// Fig. 3 parameters at -15 and -10 dB with L from 5 to 25.
pub fn fig4() -> Vec<SimConfig> {
    let mut out = Vec::new();
    for receiver in [Receiver::TwoStep, Receiver::Zak] {
        for l in [5, 10, 15, 20, 25] {
            let mut c = base("fig4", lte_grid(), 1.85e3, receiver, l);
            c.snr_db = vec![-15.0, -10.0];
            c.early_stop = Some(EarlyStop { min_frames: 2_000, min_errors: 200 });
            out.push(c);
        }
    }
    out
}

/// Zero delay, Doppler `c * delta_f` with c in {0, 2, 8}, single paths.
pub fn fig5() -> Vec<SimConfig> {
    let mut out = Vec::new();
    for multiple in [0, 2, 8] {
        for receiver in [Receiver::TwoStep, Receiver::Zak] {
            let mut c = base(&format!("fig5-c{multiple}"), fig2_grid(), 0.0, receiver, 5);
            c.channel.p1 = 1;
            c.channel.p2 = 1;
            c.channel.model = ChannelModel::FixedDoppler { multiple };
            c.snr_db = db_range(-10.0, 15.0, 2.5);
            c.frames = 5_000;
            c.early_stop = Some(EarlyStop { min_frames: 2_000, min_errors: 1_000 });
            out.push(c);
        }
    }
    out
}

/// Scenarios of a named preset.
pub fn preset(name: &str) -> Result<Vec<SimConfig>> {
    match name {
        "fig2" => Ok(fig2()),
        "fig3" => Ok(fig3()),
        "fig4" => Ok(fig4()),
        "fig5" => Ok(fig5()),
        other => Err(Error::Config(format!("unknown preset '{other}' (expected one of {})", PRESET_NAMES.join(", ")))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for name in PRESET_NAMES {
            let scenarios = preset(name).unwrap();
            assert!(!scenarios.is_empty());
            for c in scenarios {
                c.validate().unwrap();
            }
        }
        assert!(preset("fig9").is_err());
    }

    #[test]
    fn fig2_covers_three_cases_per_receiver() {
        let ls: Vec<(Receiver, usize)> = fig2().iter().map(|c| (c.receiver, c.sub_surfaces())).collect();
        assert_eq!(ls.len(), 6);
        assert!(ls.contains(&(Receiver::Zak, 0)) && ls.contains(&(Receiver::TwoStep, 5)));
    }
}
