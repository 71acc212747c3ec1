//! Gray-mapped unit-energy constellations and the bit <-> DD frame mapping.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DdFrame, GridParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    Bpsk,
    Qpsk,
    Qam16,
}

/// A constellation. Point `i` carries the bits of `i`, most significant first.
#[derive(Clone, Debug, PartialEq)]
pub struct Alphabet {
    points: Vec<Complex64>,
    bits_per_symbol: usize,
}

impl Alphabet {
    pub fn new(kind: Modulation) -> Self {
        match kind {
            Modulation::Bpsk => Alphabet {
                points: vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
                bits_per_symbol: 1,
            },
            Modulation::Qpsk => {
                let points = (0..4)
                    .map(|i| {
                        let re = if i & 0b10 == 0 { 1.0 } else { -1.0 };
                        let im = if i & 0b01 == 0 { 1.0 } else { -1.0 };
                        Complex64::new(re, im) * FRAC_1_SQRT_2
                    })
                    .collect();
                Alphabet { points, bits_per_symbol: 2 }
            }
            Modulation::Qam16 => {
                // Gray code per rail: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
                let rail = |b: usize| match b {
                    0b00 => -3.0,
                    0b01 => -1.0,
                    0b11 => 1.0,
                    _ => 3.0,
                };
                let scale = 1.0 / 10f64.sqrt();
                let points = (0..16)
                    .map(|i| Complex64::new(rail(i >> 2), rail(i & 0b11)) * scale)
                    .collect();
                Alphabet { points, bits_per_symbol: 4 }
            }
        }
    }

    pub fn bpsk() -> Self {
        Alphabet::new(Modulation::Bpsk)
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Average symbol energy (1 for every built-in constellation).
    pub fn average_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    /// Index of the point closest to `z`; ties go to the lower index.
    pub fn nearest(&self, z: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    pub fn symbol_index(&self, bits: &[u8]) -> usize {
        bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1) as usize)
    }

    pub fn push_bits(&self, index: usize, out: &mut Vec<u8>) {
        for shift in (0..self.bits_per_symbol).rev() {
            out.push(((index >> shift) & 1) as u8);
        }
    }
}

/// Maps `M*N*bits_per_symbol` bits onto a DD frame, `k` outer and `l` inner.
pub fn map_bits(bits: &[u8], alphabet: &Alphabet, grid: GridParams) -> Result<DdFrame> {
    let bps = alphabet.bits_per_symbol();
    let expected = grid.len() * bps;
    if bits.len() != expected {
        return Err(Error::Size { expected, actual: bits.len() });
    }
    let values = bits
        .chunks_exact(bps)
        .map(|chunk| alphabet.points()[alphabet.symbol_index(chunk)])
        .collect();
    DdFrame::from_vec(grid, values)
}

/// Bits carried by a sequence of symbol indices.
pub fn indices_to_bits(indices: &[usize], alphabet: &Alphabet) -> Vec<u8> {
    let mut bits = Vec::with_capacity(indices.len() * alphabet.bits_per_symbol());
    for &i in indices {
        alphabet.push_bits(i, &mut bits);
    }
    bits
}

/// Inverse of [`map_bits`] for frames holding exact constellation points.
pub fn demap_symbols(frame: &DdFrame, alphabet: &Alphabet) -> Vec<u8> {
    let indices: Vec<usize> = frame.as_slice().iter().map(|&z| alphabet.nearest(z)).collect();
    indices_to_bits(&indices, alphabet)
}
