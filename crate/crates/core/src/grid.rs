//! Delay-Doppler and time-frequency grids.
//!
//! Both frame types store their samples row-major with `N` rows and `M`
//! columns. For a [`DdFrame`] the row is the Doppler index `k` and the
//! column the delay index `l`, so the flat storage order is exactly the
//! vectorisation `l + k*M` used by the effective channel matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimensions and numerology of one OTFS frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    /// Delay bins (number of subcarriers).
    pub m: usize,
    /// Doppler bins (number of symbols).
    pub n: usize,
    /// Subcarrier spacing in Hz.
    pub delta_f: f64,
    /// Carrier frequency in Hz; carried along for bookkeeping only.
    pub fc: f64,
}

impl GridParams {
    pub fn new(m: usize, n: usize, delta_f: f64, fc: f64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Parameter(format!("grid must be non-empty, got M={m}, N={n}")));
        }
        if !(delta_f.is_finite() && delta_f > 0.0) {
            return Err(Error::Parameter(format!("subcarrier spacing must be positive, got {delta_f}")));
        }
        Ok(GridParams { m, n, delta_f, fc })
    }

    /// Symbol duration `T = 1/Δf`.
    pub fn symbol_time(&self) -> f64 {
        1.0 / self.delta_f
    }

    /// Sample period `Ts = 1/(MΔf)`.
    pub fn sample_time(&self) -> f64 {
        1.0 / (self.m as f64 * self.delta_f)
    }

    /// Frame duration `NT`.
    pub fn frame_time(&self) -> f64 {
        self.n as f64 * self.symbol_time()
    }

    /// Number of grid points `MN`.
    pub fn len(&self) -> usize {
        self.m * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index of DD bin `(k, l)`.
    #[inline]
    pub fn dd_index(&self, k: usize, l: usize) -> usize {
        l + k * self.m
    }
}

macro_rules! frame_type {
    ($(#[$meta:meta])* $name:ident, $row:literal, $col:literal) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name {
            values: Vec<Complex64>,
            grid: GridParams,
        }

        impl $name {
            pub fn zeros(grid: GridParams) -> Self {
                $name { values: vec![Complex64::new(0.0, 0.0); grid.len()], grid }
            }

            /// Wraps row-major values (`N` rows of `M`).
            pub fn from_vec(grid: GridParams, values: Vec<Complex64>) -> Result<Self> {
                if values.len() != grid.len() {
                    return Err(Error::Size { expected: grid.len(), actual: values.len() });
                }
                Ok($name { values, grid })
            }

            pub fn from_fn(grid: GridParams, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
                let mut values = Vec::with_capacity(grid.len());
                for r in 0..grid.n {
                    for c in 0..grid.m {
                        values.push(f(r, c));
                    }
                }
                $name { values, grid }
            }

            pub fn grid(&self) -> &GridParams {
                &self.grid
            }

            #[doc = concat!("Value at `", $row, "`, `", $col, "`.")]
            #[inline]
            pub fn get(&self, row: usize, col: usize) -> Complex64 {
                self.values[col + row * self.grid.m]
            }

            #[inline]
            pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
                self.values[col + row * self.grid.m] = v;
            }

            pub fn as_slice(&self) -> &[Complex64] {
                &self.values
            }

            pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
                &mut self.values
            }

            pub fn into_vec(self) -> Vec<Complex64> {
                self.values
            }

            /// Squared Euclidean norm of all entries.
            pub fn energy(&self) -> f64 {
                self.values.iter().map(|v| v.norm_sqr()).sum()
            }
        }
    };
}

frame_type!(
    /// Samples on the `N x M` delay-Doppler grid, indexed `[k, l]`.
    DdFrame, "k", "l"
);
frame_type!(
    /// Samples on the `N x M` time-frequency grid, indexed `[n, m]`.
    TfFrame, "n", "m"
);

impl DdFrame {
    /// The vectorised frame: entry `l + k*M` holds `x[k, l]`.
    pub fn to_vector(&self) -> Vec<Complex64> {
        self.values.clone()
    }
}
