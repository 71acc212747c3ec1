//! Monte-Carlo BER simulation: configuration, presets, the per-frame
//! pipeline, sweeps and result files.

pub mod analysis;
pub mod config;
pub mod frame;
pub mod output;
pub mod presets;
pub mod rng;
pub mod sweep;

pub use analysis::snr_at_ber;
pub use config::{ChannelConfig, ChannelModel, EarlyStop, GridConfig, Receiver, RisSetup, SimConfig};
pub use frame::{draw_channels, noise_variance, run_frame, PreparedFrame};
pub use output::{read_csv, read_matrix, write_matrix, BerRecord, CsvSink, MatrixHeader, CSV_HEADER};
pub use presets::{preset, PRESET_NAMES};
pub use sweep::{run_sweep, SweepOptions};
