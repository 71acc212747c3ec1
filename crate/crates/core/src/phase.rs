//! RIS phase selection by random search over the Frobenius norm of the
//! aggregated effective channel.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::RisConfig;
use crate::effective::{aggregate, EffChannelMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseSearchConfig {
    /// Random candidates drawn in addition to the all-zeros vector.
    pub num_candidates: usize,
    pub seed: u64,
}

impl Default for PhaseSearchConfig {
    fn default() -> Self {
        PhaseSearchConfig { num_candidates: 100, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct PhaseSearchOutcome {
    pub phases: Vec<f64>,
    pub h_eff: EffChannelMatrix,
    /// `||H_eff||_F` of the selected candidate.
    pub norm: f64,
    /// Index of the winner; 0 is the all-zeros vector.
    pub candidate: usize,
}

/// Inner products `<H_r, H_s> = sum conj(H_r) * H_s`.
pub fn frobenius_gram(mats: &[EffChannelMatrix]) -> Vec<Vec<Complex64>> {
    let l = mats.len();
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); l]; l];
    for r in 0..l {
        for s in r..l {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..mats[r].dim() {
                let (a, b) = (mats[r].entries.col(j), mats[s].entries.col(j));
                for (x, y) in a.iter().zip(b.iter()) {
                    acc += x.conj() * y;
                }
            }
            gram[r][s] = acc;
            gram[s][r] = acc.conj();
        }
    }
    gram
}

/// `||sum_r exp(j theta_r) H_r||_F^2` from the Gram matrix.
pub fn combined_norm_sqr(gram: &[Vec<Complex64>], phases: &[f64]) -> f64 {
    let phis: Vec<Complex64> = phases.iter().map(|&p| Complex64::cis(p)).collect();
    let mut acc = 0.0;
    for (r, row) in gram.iter().enumerate() {
        acc += row[r].re;
        for s in r + 1..row.len() {
            acc += 2.0 * (phis[r].conj() * phis[s] * row[s]).re;
        }
    }
    acc
}

/// Picks the phase vector with the largest aggregated Frobenius norm among
/// the all-zeros vector and `num_candidates` uniform draws on `[-pi, pi]`.
/// The first maximum wins.
pub fn random_phase_search(mats: &[EffChannelMatrix], cfg: &PhaseSearchConfig) -> Result<PhaseSearchOutcome> {
    if mats.is_empty() {
        return Err(Error::Parameter("phase search needs at least one sub-surface matrix".into()));
    }
    let l = mats.len();
    let gram = frobenius_gram(mats);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best = vec![0.0; l];
    let mut best_score = combined_norm_sqr(&gram, &best);
    let mut best_idx = 0;
    let mut cand = vec![0.0; l];
    for i in 1..=cfg.num_candidates {
        cand.iter_mut().for_each(|p| *p = rng.random_range(-PI..=PI));
        let score = combined_norm_sqr(&gram, &cand);
        if score > best_score {
            best_score = score;
            best.copy_from_slice(&cand);
            best_idx = i;
        }
    }
    let ris = RisConfig::with_phases(best.clone())?;
    let h_eff = aggregate(mats, &ris)?;
    let norm = h_eff.frobenius_norm();
    Ok(PhaseSearchOutcome { phases: best, h_eff, norm, candidate: best_idx })
}
