//! Linear MMSE detection on the vectorised DD relation `y = H x + n`.

use faer::linalg::solvers::{Llt, Solve};
use faer::{Mat, Side};
use num_complex::Complex64;

use crate::effective::EffChannelMatrix;
use crate::error::{Error, Result};
use crate::modulation::{indices_to_bits, Alphabet};

/// Smallest regularisation used by the solver.
pub const SIGMA2_FLOOR: f64 = 1e-12;

/// MMSE detector with `H^H H` cached so several noise levels can reuse it.
///
/// Uses `x = (H^H H + s I)^-1 H^H y`, which equals `H^H (H H^H + s I)^-1 y`
/// and only needs a Cholesky factorisation of a Hermitian positive definite
/// matrix.
pub struct MmseDetector {
    h: Mat<Complex64>,
    gram: Mat<Complex64>,
}

impl MmseDetector {
    pub fn new(h: &EffChannelMatrix) -> Self {
        let gram = h.entries.adjoint() * &h.entries;
        MmseDetector { h: h.entries.clone(), gram }
    }

    pub fn dim(&self) -> usize {
        self.h.ncols()
    }

    pub fn detect(&self, y: &[Complex64], sigma2: f64) -> Result<Vec<Complex64>> {
        let n = self.dim();
        if y.len() != self.h.nrows() {
            return Err(Error::Size { expected: self.h.nrows(), actual: y.len() });
        }
        if !(sigma2 >= 0.0) {
            return Err(Error::Parameter(format!("noise variance must be non-negative, got {sigma2}")));
        }
        let reg = sigma2.max(SIGMA2_FLOOR);
        let mut a = self.gram.clone();
        for i in 0..n {
            a[(i, i)] += Complex64::new(reg, 0.0);
        }
        let llt: Llt<Complex64> = a
            .llt(Side::Lower)
            .map_err(|e| Error::Solver(format!("Cholesky factorisation failed: {e:?}")))?;
        let yv = Mat::from_fn(y.len(), 1, |i, _| y[i]);
        let rhs = self.h.adjoint() * &yv;
        let x = llt.solve(&rhs);
        let out: Vec<Complex64> = (0..n).map(|i| x[(i, 0)]).collect();
        if out.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Solver("non-finite MMSE estimate".into()));
        }
        Ok(out)
    }
}

/// `x = H^H (H H^H + sigma2 I)^-1 y`.
pub fn mmse_detect(y: &[Complex64], h: &EffChannelMatrix, sigma2: f64) -> Result<Vec<Complex64>> {
    MmseDetector::new(h).detect(y, sigma2)
}

/// Nearest constellation point per entry, ties to the lower index.
pub fn hard_decision(soft: &[Complex64], alphabet: &Alphabet) -> Vec<usize> {
    soft.iter().map(|&z| alphabet.nearest(z)).collect()
}

/// Hamming distance between two bit sequences.
pub fn count_bit_errors(tx: &[u8], rx: &[u8]) -> Result<u64> {
    if tx.len() != rx.len() {
        return Err(Error::Size { expected: tx.len(), actual: rx.len() });
    }
    Ok(tx.iter().zip(rx).filter(|(a, b)| (*a ^ *b) & 1 != 0).count() as u64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectionResult {
    pub soft: Vec<Complex64>,
    pub hard_symbols: Vec<usize>,
    pub bit_errors: u64,
    pub symbol_errors: u64,
}

/// Detects one frame and scores it against the transmitted symbol indices.
pub fn detect_frame(
    detector: &MmseDetector,
    y: &[Complex64],
    sigma2: f64,
    alphabet: &Alphabet,
    tx_symbols: &[usize],
) -> Result<DetectionResult> {
    let soft = detector.detect(y, sigma2)?;
    let hard_symbols = hard_decision(&soft, alphabet);
    if hard_symbols.len() != tx_symbols.len() {
        return Err(Error::Size { expected: tx_symbols.len(), actual: hard_symbols.len() });
    }
    let symbol_errors = hard_symbols.iter().zip(tx_symbols).filter(|(a, b)| a != b).count() as u64;
    let bit_errors = count_bit_errors(&indices_to_bits(tx_symbols, alphabet), &indices_to_bits(&hard_symbols, alphabet))?;
    Ok(DetectionResult { soft, hard_symbols, bit_errors, symbol_errors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective::ReceiverKind;
    use crate::grid::GridParams;
    use crate::modulation::Modulation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag(value: f64, m: usize, n: usize) -> EffChannelMatrix {
        let g = GridParams::new(m, n, 1.0, 0.0).unwrap();
        let mut h = EffChannelMatrix::zeros(ReceiverKind::Zak, g);
        for i in 0..g.len() {
            h.entries[(i, i)] = c(value, 0.0);
        }
        h
    }

    fn random_matrix(n: usize, seed: u64) -> EffChannelMatrix {
        let g = GridParams::new(n, 1, 1.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut h = EffChannelMatrix::zeros(ReceiverKind::TwoStep, g);
        for i in 0..n {
            for j in 0..n {
                h.entries[(i, j)] = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        h
    }

    #[test]
    fn identity_and_diagonal_cases() {
        let y = vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0), c(4.0, -1.0)];
        let x = mmse_detect(&y, &diag(1.0, 2, 2), 0.0).unwrap();
        assert!(x.iter().zip(&y).all(|(a, b)| (a - b).norm() < 1e-10));
        let x = mmse_detect(&y, &diag(1.0, 2, 2), 1.0).unwrap();
        assert!(x.iter().zip(&y).all(|(a, b)| (a - b / 2.0).norm() < 1e-12));
        let y2: Vec<_> = y.iter().map(|v| v * 2.0).collect();
        let x = mmse_detect(&y2, &diag(2.0, 2, 2), 0.0).unwrap();
        assert!(x.iter().zip(&y).all(|(a, b)| (a - b).norm() < 1e-10));
    }

    #[test]
    fn matches_textbook_form() {
        // x = H^H (H H^H + s I)^-1 y through an LU solve of the other form.
        let h = random_matrix(12, 40);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let y: Vec<_> = (0..12).map(|_| c(rng.random(), rng.random())).collect();
        let s = 0.37;
        let mut a = &h.entries * h.entries.adjoint();
        for i in 0..12 {
            a[(i, i)] += c(s, 0.0);
        }
        let yv = Mat::from_fn(12, 1, |i, _| y[i]);
        let z = a.partial_piv_lu().solve(&yv);
        let want = h.entries.adjoint() * &z;
        let got = mmse_detect(&y, &h, s).unwrap();
        for i in 0..12 {
            assert!((got[i] - want[(i, 0)]).norm() < 1e-10);
        }
    }

    #[test]
    fn converges_to_zero_forcing() {
        let h = random_matrix(10, 42);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let x: Vec<_> = (0..10).map(|_| c(rng.random(), rng.random())).collect();
        let y = h.apply(&x).unwrap();
        let mut last = f64::INFINITY;
        for s in [1e-2, 1e-4, 1e-6, 1e-8] {
            let est = mmse_detect(&y, &h, s).unwrap();
            let err: f64 = est.iter().zip(&x).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-5);
    }

    #[test]
    fn noiseless_recovery_of_symbols() {
        let h = random_matrix(16, 44);
        let a = Alphabet::new(Modulation::Qpsk);
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let tx: Vec<usize> = (0..16).map(|_| rng.random_range(0..4)).collect();
        let x: Vec<_> = tx.iter().map(|&i| a.points()[i]).collect();
        let y = h.apply(&x).unwrap();
        let det = MmseDetector::new(&h);
        let res = detect_frame(&det, &y, 1e-12, &a, &tx).unwrap();
        assert_eq!(res.hard_symbols, tx);
        assert_eq!((res.bit_errors, res.symbol_errors), (0, 0));
    }

    #[test]
    fn unitary_row_transform_equivariance() {
        let h = random_matrix(8, 46);
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let y: Vec<_> = (0..8).map(|_| c(rng.random(), rng.random())).collect();
        // U = unitary factor of a random matrix
        let q = random_matrix(8, 48).entries.qr().compute_Q();
        let mut hu = h.clone();
        hu.entries = &q * &h.entries;
        let yu_m = &q * Mat::from_fn(8, 1, |i, _| y[i]);
        let yu: Vec<_> = (0..8).map(|i| yu_m[(i, 0)]).collect();
        let a = mmse_detect(&y, &h, 0.2).unwrap();
        let b = mmse_detect(&yu, &hu, 0.2).unwrap();
        assert!(a.iter().zip(&b).all(|(u, v)| (u - v).norm() < 1e-10));
    }

    #[test]
    fn decisions() {
        let bpsk = Alphabet::bpsk();
        assert_eq!(hard_decision(&[c(0.3, -0.2), c(0.0, 0.0), c(-1e-9, 5.0)], &bpsk), vec![0, 0, 1]);
        let qpsk = Alphabet::new(Modulation::Qpsk);
        let idx = hard_decision(&[c(1.0, 0.1)], &qpsk)[0];
        assert!((qpsk.points()[idx] - c(1.0, 1.0) / 2f64.sqrt()).norm() < 1e-12);
    }

    #[test]
    fn bit_error_counting() {
        assert_eq!(count_bit_errors(&[0, 1, 1, 0], &[0, 1, 1, 0]).unwrap(), 0);
        assert_eq!(count_bit_errors(&[0, 1, 0, 1, 0, 1, 0, 1], &[1, 0, 1, 0, 1, 0, 1, 0]).unwrap(), 8);
        assert_eq!(count_bit_errors(&[0, 1, 1, 0], &[0, 0, 1, 1]).unwrap(), 2);
        assert!(count_bit_errors(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn negative_noise_rejected() {
        assert!(mmse_detect(&[c(1.0, 0.0)], &diag(1.0, 1, 1), -1.0).is_err());
    }
}
