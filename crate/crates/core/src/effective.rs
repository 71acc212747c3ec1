//! Closed-form effective DD channel matrices.
//!
//! Row `l' + k'M` and column `l + kM` of a matrix hold the gain from
//! transmitted DD symbol `x[k,l]` to received DD sample `y[k',l']`.
//!
//! Both receivers factor the same way: for a path with normalised delay
//! `t = tau/T` and Doppler `v = nu/delta_f`, the entry is a product of a
//! Doppler kernel that only depends on `k' - k` and a delay kernel over
//! `(l', l)`. The builders therefore accumulate one `M x M` block per
//! Doppler offset and expand it into the full matrix once per sub-surface.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{CascadedPath, RisConfig, SubSurfaceChannel};
use crate::error::{Error, Result};
use crate::grid::GridParams;
use crate::transforms::snapped_floor;

/// Which receiver a matrix describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReceiverKind {
    /// Wigner transform followed by the SFFT.
    TwoStep,
    /// Single-step Zak receiver.
    Zak,
}

impl ReceiverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReceiverKind::TwoStep => "two-step",
            ReceiverKind::Zak => "zak",
        }
    }
}

/// An `MN x MN` effective channel matrix.
#[derive(Clone, Debug)]
pub struct EffChannelMatrix {
    pub entries: Mat<Complex64>,
    pub kind: ReceiverKind,
    pub grid: GridParams,
}

impl EffChannelMatrix {
    pub fn zeros(kind: ReceiverKind, grid: GridParams) -> Self {
        let n = grid.len();
        EffChannelMatrix { entries: Mat::zeros(n, n), kind, grid }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Entry for `(k', l')` from `(k, l)`.
    pub fn gain(&self, k_rx: usize, l_rx: usize, k_tx: usize, l_tx: usize) -> Complex64 {
        self.entries[(self.grid.dd_index(k_rx, l_rx), self.grid.dd_index(k_tx, l_tx))]
    }

    /// `H x` for a vectorised DD frame.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::Size { expected: n, actual: x.len() });
        }
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            let xj = x[j];
            if xj == Complex64::new(0.0, 0.0) {
                continue;
            }
            let col = self.entries.col(j);
            for (yi, h) in y.iter_mut().zip(col.iter()) {
                *yi += h * xj;
            }
        }
        Ok(y)
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        let mut acc = 0.0;
        for j in 0..self.dim() {
            acc += self.entries.col(j).iter().map(|v| v.norm_sqr()).sum::<f64>();
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }
}

/// Normalised sinc, `sin(pi x)/(pi x)` with `sinc(0) = 1`.
#[inline]
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

fn check_delays(ch: &SubSurfaceChannel, grid: &GridParams) -> Result<()> {
    let period = grid.symbol_time();
    match ch.cascaded.iter().find(|p| !(0.0..period).contains(&p.delay)) {
        Some(p) => Err(Error::Domain { delay: p.delay, symbol_time: period }),
        None => Ok(()),
    }
}

/// `1/N sum_n exp(-j2pi n (d/N - v))` for `d = 0..N`.
fn doppler_kernel(v: f64, n_bins: usize) -> Vec<Complex64> {
    let nf = n_bins as f64;
    (0..n_bins)
        .map(|d| {
            let step = Complex64::cis(-2.0 * PI * (d as f64 / nf - v));
            let mut phasor = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for _ in 0..n_bins {
                acc += phasor;
                phasor *= step;
            }
            acc / nf
        })
        .collect()
}

/// `M x M` blocks (row-major over `(l', l)`) indexed by Doppler offset.
struct BlockSet {
    m: usize,
    blocks: Vec<Vec<Complex64>>,
}

impl BlockSet {
    fn new(m: usize, n: usize) -> Self {
        BlockSet { m, blocks: vec![vec![Complex64::new(0.0, 0.0); m * m]; n] }
    }

    fn accumulate(&mut self, doppler: &[Complex64], delay: &[Complex64]) {
        for (block, &d) in self.blocks.iter_mut().zip(doppler) {
            for (b, &s) in block.iter_mut().zip(delay) {
                *b += d * s;
            }
        }
    }
}

/// Fills `out[(k'M + l', kM + l)] = a[(k'-k) mod N](l', l) + w(k', k) * b[..](l', l)`.
fn expand(
    grid: &GridParams,
    a: &BlockSet,
    b: &BlockSet,
    twist: impl Fn(usize, usize) -> Complex64,
    out: &mut Mat<Complex64>,
) {
    let (m, n) = (grid.m, grid.n);
    for k in 0..n {
        for kr in 0..n {
            let d = (kr + n - k) % n;
            let w = twist(kr, k);
            let (ba, bb) = (&a.blocks[d], &b.blocks[d]);
            for l in 0..m {
                let col = k * m + l;
                for lr in 0..m {
                    out[(kr * m + lr, col)] = ba[lr * a.m + l] + w * bb[lr * b.m + l];
                }
            }
        }
    }
}

/// Delay kernels of the two-step receiver for one path, already scaled by
/// `(1 - t)/M` and `t/M`:
/// `S(l', l) = sum_m sum_m' W(m, m') exp(j2pi (m l'/M - m' l/M - m' t))`.
fn two_step_delay_kernels(path: &CascadedPath, grid: &GridParams) -> (Vec<Complex64>, Vec<Complex64>) {
    let m_bins = grid.m;
    let mf = m_bins as f64;
    let t = path.delay / grid.symbol_time();
    let v = path.doppler / grid.delta_f;
    // W1, W2 over (m, m')
    let mut w1 = vec![Complex64::new(0.0, 0.0); m_bins * m_bins];
    let mut w2 = vec![Complex64::new(0.0, 0.0); m_bins * m_bins];
    for m in 0..m_bins {
        for mp in 0..m_bins {
            let b = (mp as f64 - m as f64) + v;
            w1[m * m_bins + mp] = Complex64::cis(PI * (1.0 + t) * b) * (sinc(b * (1.0 - t)) * (1.0 - t) / mf);
            if t > 0.0 {
                w2[m * m_bins + mp] = Complex64::cis(PI * t * b) * (sinc(b * t) * t / mf);
            }
        }
    }
    let rows: Vec<Complex64> = (0..m_bins * m_bins)
        .map(|i| Complex64::cis(2.0 * PI * ((i / m_bins) * (i % m_bins)) as f64 / mf))
        .collect(); // rows[l' * M + m] = exp(j2pi m l'/M)
    let cols: Vec<Complex64> = (0..m_bins * m_bins)
        .map(|i| {
            let (mp, l) = (i / m_bins, i % m_bins);
            Complex64::cis(-2.0 * PI * mp as f64 * (l as f64 / mf + t))
        })
        .collect(); // cols[m' * M + l]
    let kernel = |w: &[Complex64]| {
        // A = rows * W, S = A * cols
        let mut a = vec![Complex64::new(0.0, 0.0); m_bins * m_bins];
        for lr in 0..m_bins {
            for m in 0..m_bins {
                let r = rows[lr * m_bins + m];
                for mp in 0..m_bins {
                    a[lr * m_bins + mp] += r * w[m * m_bins + mp];
                }
            }
        }
        let mut s = vec![Complex64::new(0.0, 0.0); m_bins * m_bins];
        for lr in 0..m_bins {
            for mp in 0..m_bins {
                let av = a[lr * m_bins + mp];
                for l in 0..m_bins {
                    s[lr * m_bins + l] += av * cols[mp * m_bins + l];
                }
            }
        }
        s
    };
    let s2 = if t > 0.0 { kernel(&w2) } else { w2 };
    (kernel(&w1), s2)
}

/// Effective matrix of the two-step receiver for one sub-surface:
/// the sum of the `h1` (current symbol) and `h2` (previous symbol) terms.
pub fn build_two_step(ch: &SubSurfaceChannel, grid: &GridParams) -> Result<EffChannelMatrix> {
    check_delays(ch, grid)?;
    let (m, n) = (grid.m, grid.n);
    let mut cur = BlockSet::new(m, n);
    let mut prev = BlockSet::new(m, n);
    for path in &ch.cascaded {
        let t = path.delay / grid.symbol_time();
        let v = path.doppler / grid.delta_f;
        let pref = path.coefficient() * Complex64::cis(-2.0 * PI * v * t);
        let dk: Vec<Complex64> = doppler_kernel(v, n).into_iter().map(|d| d * pref).collect();
        let (s1, s2) = two_step_delay_kernels(path, grid);
        cur.accumulate(&dk, &s1);
        prev.accumulate(&dk, &s2);
    }
    let mut out = EffChannelMatrix::zeros(ReceiverKind::TwoStep, *grid);
    let nf = n as f64;
    expand(grid, &cur, &prev, |_, k| Complex64::cis(-2.0 * PI * k as f64 / nf), &mut out.entries);
    Ok(out)
}

/// `floor(l'/M - tau/T)`, which is 0 or -1 for `0 <= tau < T`.
#[inline]
fn zak_wrap(l_rx: usize, t: f64, m: usize) -> f64 {
    snapped_floor(l_rx as f64 / m as f64 - t)
}

/// Effective matrix of the Zak receiver for one sub-surface.
pub fn build_zak(ch: &SubSurfaceChannel, grid: &GridParams) -> Result<EffChannelMatrix> {
    check_delays(ch, grid)?;
    let (m, n) = (grid.m, grid.n);
    let mf = m as f64;
    // Rows with floor(l'/M - t) = -1 pick up exp(-j2pi(k'/N - v)); the
    // k'-dependent part goes into the expansion twist.
    let mut inside = BlockSet::new(m, n);
    let mut wrapped = BlockSet::new(m, n);
    let mut delay_in = vec![Complex64::new(0.0, 0.0); m * m];
    let mut delay_wr = vec![Complex64::new(0.0, 0.0); m * m];
    for path in &ch.cascaded {
        let t = path.delay / grid.symbol_time();
        let v = path.doppler / grid.delta_f;
        let dk = doppler_kernel(v, n);
        // 1/M sum_m exp(j2pi m (d/M - t)) for d = l' - l mod M
        let ek: Vec<Complex64> = (0..m)
            .map(|d| {
                let step = Complex64::cis(2.0 * PI * (d as f64 / mf - t));
                let mut phasor = Complex64::new(1.0, 0.0);
                let mut acc = Complex64::new(0.0, 0.0);
                for _ in 0..m {
                    acc += phasor;
                    phasor *= step;
                }
                acc / mf
            })
            .collect();
        let coeff = path.coefficient();
        for lr in 0..m {
            let row = coeff * Complex64::cis(2.0 * PI * v * (lr as f64 / mf - t));
            let wrap = zak_wrap(lr, t, m);
            for l in 0..m {
                let e = row * ek[(lr + m - l) % m];
                if wrap < 0.0 {
                    delay_in[lr * m + l] = Complex64::new(0.0, 0.0);
                    // exp(j2pi(k'/N - v) * (-1)) without the k' part
                    delay_wr[lr * m + l] = e * Complex64::cis(2.0 * PI * v);
                } else {
                    delay_in[lr * m + l] = e;
                    delay_wr[lr * m + l] = Complex64::new(0.0, 0.0);
                }
            }
        }
        inside.accumulate(&dk, &delay_in);
        wrapped.accumulate(&dk, &delay_wr);
    }
    let mut out = EffChannelMatrix::zeros(ReceiverKind::Zak, *grid);
    let nf = n as f64;
    expand(grid, &inside, &wrapped, |kr, _| Complex64::cis(-2.0 * PI * kr as f64 / nf), &mut out.entries);
    Ok(out)
}

/// Builds the matrix for `kind`.
pub fn build(kind: ReceiverKind, ch: &SubSurfaceChannel, grid: &GridParams) -> Result<EffChannelMatrix> {
    match kind {
        ReceiverKind::TwoStep => build_two_step(ch, grid),
        ReceiverKind::Zak => build_zak(ch, grid),
    }
}

fn check_compatible(mats: &[EffChannelMatrix]) -> Result<()> {
    let first = mats.first().ok_or_else(|| Error::Shape("no matrices to combine".into()))?;
    for m in mats {
        if m.dim() != first.dim() || m.kind != first.kind {
            return Err(Error::Shape(format!(
                "cannot combine {} {}x{} with {} {}x{}",
                first.kind.as_str(),
                first.dim(),
                first.dim(),
                m.kind.as_str(),
                m.dim(),
                m.dim()
            )));
        }
    }
    Ok(())
}

/// `sum_r coeffs[r] * mats[r]`.
pub fn combine(mats: &[EffChannelMatrix], coeffs: &[Complex64]) -> Result<EffChannelMatrix> {
    check_compatible(mats)?;
    if coeffs.len() != mats.len() {
        return Err(Error::Shape(format!("{} matrices but {} coefficients", mats.len(), coeffs.len())));
    }
    let mut out = EffChannelMatrix::zeros(mats[0].kind, mats[0].grid);
    let dim = out.dim();
    for (mat, &c) in mats.iter().zip(coeffs) {
        for j in 0..dim {
            let src = mat.entries.col(j);
            let mut dst = out.entries.col_mut(j);
            for i in 0..dim {
                dst[i] += c * src[i];
            }
        }
    }
    Ok(out)
}

/// `H_eff = sum_r gamma_r exp(j theta_r) H^r`.
pub fn aggregate(mats: &[EffChannelMatrix], ris: &RisConfig) -> Result<EffChannelMatrix> {
    if mats.len() != ris.sub_surfaces() {
        return Err(Error::Shape(format!(
            "{} sub-surface matrices for a RIS with {} sub-surfaces",
            mats.len(),
            ris.sub_surfaces()
        )));
    }
    combine(mats, &ris.coefficients())
}

/// Two-step leakage magnitudes for zero delay and Doppler `c * delta_f`:
/// `|1/M sum_{m=0}^{M-1-c} exp(j2pi m d/M)|` for `d = l' - l = 0..M`.
pub fn leakage_profile(c: usize, grid: &GridParams) -> Result<Vec<f64>> {
    let m = grid.m;
    if c >= m {
        return Err(Error::Parameter(format!("Doppler multiple {c} must be below M = {m}")));
    }
    Ok((0..m)
        .map(|d| {
            let s: Complex64 = (0..m - c).map(|i| Complex64::cis(2.0 * PI * (i * d) as f64 / m as f64)).sum();
            s.norm() / m as f64
        })
        .collect())
}
