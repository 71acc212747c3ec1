//! Simulation configuration, parsed from TOML with unknown keys rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::ChannelStats;
use crate::effective::ReceiverKind;
use crate::error::{Error, Result};
use crate::grid::GridParams;
use crate::modulation::Modulation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Receiver {
    TwoStep,
    Zak,
    Ofdm,
}

impl Receiver {
    pub fn as_str(&self) -> &'static str {
        match self {
            Receiver::TwoStep => "two-step",
            Receiver::Zak => "zak",
            Receiver::Ofdm => "ofdm",
        }
    }

    /// The DD matrix kind, or `None` for OFDM.
    pub fn matrix_kind(&self) -> Option<ReceiverKind> {
        match self {
            Receiver::TwoStep => Some(ReceiverKind::TwoStep),
            Receiver::Zak => Some(ReceiverKind::Zak),
            Receiver::Ofdm => None,
        }
    }
}

impl std::str::FromStr for Receiver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-step" => Ok(Receiver::TwoStep),
            "zak" => Ok(Receiver::Zak),
            "ofdm" => Ok(Receiver::Ofdm),
            other => Err(Error::Config(format!("unknown receiver '{other}' (expected two-step, zak or ofdm)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub m: usize,
    pub n: usize,
    pub delta_f: f64,
    #[serde(default = "default_fc")]
    pub fc: f64,
}

fn default_fc() -> f64 {
    4e9
}

impl GridConfig {
    pub fn params(&self) -> Result<GridParams> {
        GridParams::new(self.m, self.n, self.delta_f, self.fc)
    }
}

/// How path delays and Dopplers are generated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum ChannelModel {
    /// Random gains, Jakes Dopplers and uniform grid delays.
    Jakes,
    /// Random gains, zero delay and Doppler `multiple * delta_f` on every
    /// cascaded path.
    FixedDoppler { multiple: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub p1: usize,
    pub p2: usize,
    /// Maximum Doppler per link, Hz.
    pub nu_max: f64,
    /// Per-link delay spread in seconds; defaults to `M*Ts/2`.
    #[serde(default)]
    pub delay_max_per_link: Option<f64>,
    /// Path count of the direct link used when the RIS is disabled.
    #[serde(default = "default_direct_paths")]
    pub direct_paths: usize,
    #[serde(default = "default_model")]
    pub model: ChannelModel,
}

fn default_direct_paths() -> usize {
    4
}

fn default_model() -> ChannelModel {
    ChannelModel::Jakes
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RisSetup {
    pub enabled: bool,
    /// Sub-surface count `L`.
    #[serde(default = "default_sub_surfaces")]
    pub sub_surfaces: usize,
    #[serde(default = "default_candidates")]
    pub phase_candidates: usize,
}

fn default_sub_surfaces() -> usize {
    1
}

fn default_candidates() -> usize {
    100
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EarlyStop {
    pub min_frames: u64,
    pub min_errors: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Scenario label written to the `preset` CSV column.
    #[serde(default = "default_label")]
    pub label: String,
    pub grid: GridConfig,
    pub channel: ChannelConfig,
    pub ris: RisSetup,
    pub receiver: Receiver,
    #[serde(default = "default_modulation")]
    pub modulation: Modulation,
    pub snr_db: Vec<f64>,
    /// Frames per SNR point (the maximum when early stopping is enabled).
    pub frames: u64,
    #[serde(default)]
    pub early_stop: Option<EarlyStop>,
    #[serde(default)]
    pub seed: u64,
    /// Delays are drawn on a grid of `Ts / oversampling`.
    #[serde(default = "default_oversampling")]
    pub oversampling: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_label() -> String {
    "custom".into()
}

fn default_modulation() -> Modulation {
    Modulation::Bpsk
}

fn default_oversampling() -> usize {
    16
}

impl SimConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn grid_params(&self) -> Result<GridParams> {
        self.grid.params()
    }

    /// Number of sub-surfaces, 0 when the RIS is disabled.
    pub fn sub_surfaces(&self) -> usize {
        if self.ris.enabled {
            self.ris.sub_surfaces
        } else {
            0
        }
    }

    pub fn channel_stats(&self) -> Result<ChannelStats> {
        let g = self.grid_params()?;
        let mut stats = ChannelStats::for_grid(&g, self.channel.p1, self.channel.p2, self.channel.nu_max, self.oversampling);
        if let Some(d) = self.channel.delay_max_per_link {
            stats.delay_max_per_link = d;
        }
        Ok(stats)
    }

    pub fn bits_per_frame(&self) -> u64 {
        (self.grid.m * self.grid.n * crate::modulation::Alphabet::new(self.modulation).bits_per_symbol()) as u64
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.grid_params()?;
        if self.frames == 0 {
            return Err(Error::Config("frames must be at least 1".into()));
        }
        if self.snr_db.is_empty() {
            return Err(Error::Config("SNR list must not be empty".into()));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::Config("SNR values must be finite".into()));
        }
        if self.oversampling == 0 {
            return Err(Error::Config("oversampling must be at least 1".into()));
        }
        if self.ris.enabled && self.ris.sub_surfaces == 0 {
            return Err(Error::Config("an enabled RIS needs at least one sub-surface".into()));
        }
        if !self.ris.enabled && self.channel.direct_paths == 0 {
            return Err(Error::Config("the direct link needs at least one path".into()));
        }
        if self.receiver == Receiver::Ofdm && !self.ris.enabled {
            return Err(Error::Config("the OFDM baseline is only defined with a RIS".into()));
        }
        if let Some(es) = self.early_stop {
            if es.min_frames == 0 || es.min_frames > self.frames {
                return Err(Error::Config("early_stop.min_frames must lie in [1, frames]".into()));
            }
        }
        match self.channel.model {
            ChannelModel::Jakes => self.channel_stats()?.validate(&g).map_err(|e| Error::Config(e.to_string()))?,
            ChannelModel::FixedDoppler { multiple } => {
                if multiple >= g.m {
                    return Err(Error::Config(format!("Doppler multiple {multiple} must be below M = {}", g.m)));
                }
                if self.channel.p1 == 0 || self.channel.p2 == 0 {
                    return Err(Error::Config("path counts must be at least 1".into()));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
        label = "demo"
        receiver = "zak"
        snr_db = [0.0, 5.0]
        frames = 10
        seed = 3

        [grid]
        m = 8
        n = 8
        delta_f = 3750.0

        [channel]
        p1 = 2
        p2 = 2
        nu_max = 1200.0

        [ris]
        enabled = true
        sub_surfaces = 2
    "#;

    #[test]
    fn parses_minimal_file() {
        let cfg = SimConfig::from_toml_str(EXAMPLE).unwrap();
        assert_eq!(cfg.receiver, Receiver::Zak);
        assert_eq!(cfg.ris.phase_candidates, 100);
        assert_eq!(cfg.modulation, Modulation::Bpsk);
        assert_eq!(cfg.oversampling, 16);
        assert_eq!(cfg.channel.model, ChannelModel::Jakes);
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = EXAMPLE.replace("seed = 3", "seed = 3\nbogus = 1");
        assert!(matches!(SimConfig::from_toml_str(&bad), Err(Error::Config(_))));
        let bad = EXAMPLE.replace("p2 = 2", "p2 = 2\nextra = true");
        assert!(SimConfig::from_toml_str(&bad).is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(SimConfig::from_toml_str(&EXAMPLE.replace("frames = 10", "frames = 0")).is_err());
        assert!(SimConfig::from_toml_str(&EXAMPLE.replace("snr_db = [0.0, 5.0]", "snr_db = []")).is_err());
        assert!(SimConfig::from_toml_str(&EXAMPLE.replace("nu_max = 1200.0", "nu_max = 5000.0")).is_err());
    }

    #[test]
    fn fixed_doppler_model() {
        let text = EXAMPLE.replace("nu_max = 1200.0", "nu_max = 0.0\nmodel = { kind = \"fixed-doppler\", multiple = 2 }");
        let cfg = SimConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg.channel.model, ChannelModel::FixedDoppler { multiple: 2 });
    }
}
