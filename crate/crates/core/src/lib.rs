pub mod channel;
pub mod detect;
pub mod effective;
pub mod error;
pub mod grid;
pub mod modulation;
pub mod ofdm;
pub mod phase;
pub mod sim;
pub mod transforms;

pub use error::{Error, Result};
