//! Transforms between the delay-Doppler, time-frequency and time domains
//! for rectangular transmit and receive pulses.
//!
//! Normalisations follow the modem exactly: the ISFFT carries the `1/(MN)`
//! factor and the SFFT carries none, so `sfft(isfft(x)) == x`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{DdFrame, GridParams, TfFrame};

/// Times closer than this fraction of `T` to a symbol boundary are treated
/// as lying on it. Delays live on a rational grid, so sample instants such
/// as `nT + l'T/M - tau` hit boundaries exactly up to rounding.
pub(crate) const BOUNDARY_EPS: f64 = 1e-9;

/// `floor(x)` with values within [`BOUNDARY_EPS`] below an integer snapped up.
#[inline]
pub(crate) fn snapped_floor(x: f64) -> f64 {
    (x + BOUNDARY_EPS).floor()
}

/// Anything that can be evaluated at an arbitrary instant.
pub trait TimeSignal {
    fn at(&self, t: f64) -> Complex64;
}

impl<F: Fn(f64) -> Complex64> TimeSignal for F {
    fn at(&self, t: f64) -> Complex64 {
        self(t)
    }
}

/// Oversampled samples of one frame, `x(t0 + i*Ts/Q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TdSignal {
    pub samples: Vec<Complex64>,
    pub oversampling: usize,
    pub t0: f64,
    pub grid: GridParams,
}

impl TdSignal {
    pub fn sample_spacing(&self) -> f64 {
        self.grid.sample_time() / self.oversampling as f64
    }

    pub fn time_of(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.sample_spacing()
    }

    /// Riemann-sum energy `sum |x_i|^2 * Ts/Q`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.sample_spacing()
    }
}

fn transform_rows(data: &mut [Complex64], rows: usize, cols: usize, dir: FftDirection) {
    let fft = FftPlanner::new().plan_fft(cols, dir);
    for row in data.chunks_exact_mut(cols).take(rows) {
        fft.process(row);
    }
}

fn transform_cols(data: &mut [Complex64], rows: usize, cols: usize, dir: FftDirection) {
    let fft = FftPlanner::new().plan_fft(rows, dir);
    let mut buf = vec![Complex64::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            buf[r] = data[c + r * cols];
        }
        fft.process(&mut buf);
        for r in 0..rows {
            data[c + r * cols] = buf[r];
        }
    }
}

/// `X[n,m] = 1/(MN) sum_k sum_l x[k,l] exp(j2pi(nk/N - ml/M))`.
pub fn isfft(x: &DdFrame) -> TfFrame {
    let g = *x.grid();
    let mut data = x.as_slice().to_vec();
    // k -> n carries exp(+j..), l -> m carries exp(-j..)
    transform_cols(&mut data, g.n, g.m, FftDirection::Inverse);
    transform_rows(&mut data, g.n, g.m, FftDirection::Forward);
    let scale = 1.0 / g.len() as f64;
    data.iter_mut().for_each(|v| *v *= scale);
    TfFrame::from_vec(g, data).expect("shape preserved")
}

/// `y[k,l] = sum_n sum_m Y[n,m] exp(j2pi(ml/M - nk/N))`, unnormalised.
pub fn sfft(y: &TfFrame) -> DdFrame {
    let g = *y.grid();
    let mut data = y.as_slice().to_vec();
    transform_cols(&mut data, g.n, g.m, FftDirection::Forward);
    transform_rows(&mut data, g.n, g.m, FftDirection::Inverse);
    DdFrame::from_vec(g, data).expect("shape preserved")
}

/// Samples `x(t)` of the Heisenberg transform at `t = i*Ts/Q`,
/// `i = 0..Q*M*N`, using the unit-energy rectangular pulse.
pub fn heisenberg(x: &TfFrame, oversampling: usize) -> Result<TdSignal> {
    if oversampling == 0 {
        return Err(Error::Parameter("oversampling must be at least 1".into()));
    }
    let g = *x.grid();
    let per_symbol = oversampling * g.m;
    let amp = 1.0 / g.symbol_time().sqrt();
    let ifft = FftPlanner::new().plan_fft_inverse(per_symbol);
    let mut samples = Vec::with_capacity(per_symbol * g.n);
    let mut buf = vec![Complex64::new(0.0, 0.0); per_symbol];
    for n in 0..g.n {
        buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for m in 0..g.m {
            buf[m] = x.get(n, m) * amp;
        }
        // sample j of symbol n sits at u = j*T/(QM): exp(j2pi m j/(QM))
        ifft.process(&mut buf);
        samples.extend_from_slice(&buf);
    }
    Ok(TdSignal { samples, oversampling, t0: 0.0, grid: g })
}

/// `sum_m X[n,m] exp(j2pi m u / T) / sqrt(T)` for symbol `n`, offset `u`.
#[inline]
fn symbol_value(x: &TfFrame, n: usize, u: f64) -> Complex64 {
    let g = x.grid();
    let step = Complex64::cis(2.0 * PI * u * g.delta_f);
    let mut phasor = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..g.m {
        acc += x.get(n, m) * phasor;
        phasor *= step;
    }
    acc / g.symbol_time().sqrt()
}

/// Exact value of the Heisenberg transform of `x` at time `t`.
/// Zero outside `[0, NT)`.
pub fn evaluate_td_at(x: &TfFrame, t: f64) -> Complex64 {
    let g = x.grid();
    let period = g.symbol_time();
    let n = snapped_floor(t / period);
    if n < 0.0 || n >= g.n as f64 {
        return Complex64::new(0.0, 0.0);
    }
    let u = (t - n * period).max(0.0);
    symbol_value(x, n as usize, u)
}

/// How the transmitted frame behaves outside `[0, NT)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameBoundary {
    /// A single frame surrounded by silence.
    Isolated,
    /// The frame repeats with period `NT` (a frame-level cyclic prefix long
    /// enough to cover every path delay).
    Cyclic,
}

/// Continuous-time OTFS waveform built from a TF frame.
#[derive(Clone, Debug)]
pub struct OtfsWaveform {
    tf: TfFrame,
    boundary: FrameBoundary,
}

impl OtfsWaveform {
    pub fn new(tf: TfFrame, boundary: FrameBoundary) -> Self {
        OtfsWaveform { tf, boundary }
    }

    pub fn tf(&self) -> &TfFrame {
        &self.tf
    }
}

impl TimeSignal for OtfsWaveform {
    fn at(&self, t: f64) -> Complex64 {
        match self.boundary {
            FrameBoundary::Isolated => evaluate_td_at(&self.tf, t),
            FrameBoundary::Cyclic => {
                let frame = self.tf.grid().frame_time();
                let wrapped = t - snapped_floor(t / frame) * frame;
                evaluate_td_at(&self.tf, wrapped)
            }
        }
    }
}

/// Wigner transform (matched filtering with the rectangular receive pulse)
/// by midpoint-rule quadrature with `Q*M` nodes per symbol interval.
pub fn wigner<S: TimeSignal + ?Sized>(y: &S, grid: GridParams, quadrature: usize) -> Result<TfFrame> {
    if quadrature < 4 {
        return Err(Error::Parameter(format!("quadrature resolution must be >= 4, got {quadrature}")));
    }
    let nodes = quadrature * grid.m;
    let period = grid.symbol_time();
    let h = period / nodes as f64;
    let fft = FftPlanner::new().plan_fft_forward(nodes);
    let mut buf = vec![Complex64::new(0.0, 0.0); nodes];
    let mut out = TfFrame::zeros(grid);
    let scale = h / period.sqrt();
    for n in 0..grid.n {
        let start = n as f64 * period;
        for (i, v) in buf.iter_mut().enumerate() {
            *v = y.at(start + (i as f64 + 0.5) * h);
        }
        fft.process(&mut buf);
        for m in 0..grid.m {
            // half-node offset of the midpoint rule
            let shift = Complex64::cis(-PI * m as f64 / nodes as f64);
            out.set(n, m, buf[m] * shift * scale);
        }
    }
    Ok(out)
}

/// Samples `y(nT + l'T/M)` on the DD sampling lattice, laid out `l' + n*M`.
///
/// With `fold_tail` the samples at `(n + N)T + l'T/M` are added onto row
/// `n`. For a signal supported on `[0, 2NT)` this turns the finite sum of
/// [`zak_sample`] into the full Zak transform at the lattice points, since
/// `exp(-j2pi(n+N)k'/N) = exp(-j2pi n k'/N)`.
pub fn zak_lattice_points<S: TimeSignal + ?Sized>(y: &S, grid: GridParams, fold_tail: bool) -> Vec<Complex64> {
    let period = grid.symbol_time();
    let ts = grid.sample_time();
    let frame = grid.frame_time();
    let mut pts = Vec::with_capacity(grid.len());
    for n in 0..grid.n {
        for l in 0..grid.m {
            let t = n as f64 * period + l as f64 * ts;
            let mut v = y.at(t);
            if fold_tail {
                v += y.at(t + frame);
            }
            pts.push(v);
        }
    }
    pts
}

/// Zak receiver sampling:
/// `y[k',l'] = sqrt(T) sum_n y(nT + l'T/M) exp(-j2pi n k'/N)`,
/// computed as one `N`-point DFT per delay bin.
pub fn zak_sample(points: &[Complex64], grid: GridParams) -> Result<DdFrame> {
    if points.len() != grid.len() {
        return Err(Error::Size { expected: grid.len(), actual: points.len() });
    }
    let mut data = points.to_vec();
    transform_cols(&mut data, grid.n, grid.m, FftDirection::Forward);
    let scale = grid.symbol_time().sqrt();
    data.iter_mut().for_each(|v| *v *= scale);
    DdFrame::from_vec(grid, data)
}

/// Zak transform of the rectangular pulse, `exp(j2pi nu floor(tau/T) T)`.
pub fn rect_zak(tau: f64, nu: f64, grid: &GridParams) -> Complex64 {
    let period = grid.symbol_time();
    Complex64::cis(2.0 * PI * nu * (tau / period).floor() * period)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid(m: usize, n: usize) -> GridParams {
        GridParams::new(m, n, 15e3, 4e9).unwrap()
    }

    fn random_dd(g: GridParams, rng: &mut ChaCha8Rng) -> DdFrame {
        DdFrame::from_fn(g, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_tf(g: GridParams, rng: &mut ChaCha8Rng) -> TfFrame {
        TfFrame::from_fn(g, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    // Direct double sums, independent of the FFT path.
    fn isfft_direct(x: &DdFrame) -> TfFrame {
        let g = *x.grid();
        let (mf, nf) = (g.m as f64, g.n as f64);
        TfFrame::from_fn(g, |n, m| {
            let mut acc = c(0.0, 0.0);
            for k in 0..g.n {
                for l in 0..g.m {
                    let ph = 2.0 * PI * ((n * k) as f64 / nf - (m * l) as f64 / mf);
                    acc += x.get(k, l) * Complex64::cis(ph);
                }
            }
            acc / (mf * nf)
        })
    }

    fn sfft_direct(y: &TfFrame) -> DdFrame {
        let g = *y.grid();
        let (mf, nf) = (g.m as f64, g.n as f64);
        DdFrame::from_fn(g, |k, l| {
            let mut acc = c(0.0, 0.0);
            for n in 0..g.n {
                for m in 0..g.m {
                    acc += y.get(n, m) * Complex64::cis(2.0 * PI * ((m * l) as f64 / mf - (n * k) as f64 / nf));
                }
            }
            acc
        })
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn isfft_of_impulse_is_flat() {
        let g = grid(4, 4);
        let mut x = DdFrame::zeros(g);
        x.set(0, 0, c(1.0, 0.0));
        let tf = isfft(&x);
        assert!(tf.as_slice().iter().all(|v| (v - c(1.0 / 16.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn isfft_of_ones_is_impulse() {
        let g = grid(4, 4);
        let tf = isfft(&DdFrame::from_fn(g, |_, _| c(1.0, 0.0)));
        for n in 0..4 {
            for m in 0..4 {
                let want = if n == 0 && m == 0 { 1.0 } else { 0.0 };
                assert!((tf.get(n, m) - c(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn sfft_of_flat_is_impulse() {
        let g = grid(4, 4);
        let y = sfft(&TfFrame::from_fn(g, |_, _| c(1.0 / 16.0, 0.0)));
        for k in 0..4 {
            for l in 0..4 {
                let want = if k == 0 && l == 0 { 1.0 } else { 0.0 };
                assert!((y.get(k, l) - c(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn sfft_of_impulse_is_ones() {
        let g = grid(2, 2);
        let mut y = TfFrame::zeros(g);
        y.set(0, 0, c(1.0, 0.0));
        let dd = sfft(&y);
        assert!(dd.as_slice().iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn fast_transforms_match_direct_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (m, n) in [(4, 2), (3, 5), (8, 8)] {
            let g = grid(m, n);
            let x = random_dd(g, &mut rng);
            assert!(max_diff(isfft(&x).as_slice(), isfft_direct(&x).as_slice()) < 1e-13);
            let y = random_tf(g, &mut rng);
            assert!(max_diff(sfft(&y).as_slice(), sfft_direct(&y).as_slice()) < 1e-12);
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for m in [2, 4, 8, 16] {
            for n in [2, 4, 8, 16] {
                let g = grid(m, n);
                let x = random_dd(g, &mut rng);
                let tf = isfft(&x);
                assert!(max_diff(sfft(&tf).as_slice(), x.as_slice()) < 1e-12);
                let ratio = x.energy() / (g.len() as f64 * tf.energy());
                assert!((ratio - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn heisenberg_single_pulse() {
        let g = grid(2, 2);
        let mut tf = TfFrame::zeros(g);
        tf.set(0, 0, c(1.0, 0.0));
        let td = heisenberg(&tf, 1).unwrap();
        let amp = 1.0 / g.symbol_time().sqrt();
        assert_eq!(td.samples.len(), 4);
        for (i, s) in td.samples.iter().enumerate() {
            let want = if i < 2 { amp } else { 0.0 };
            assert!((s - c(want, 0.0)).norm() < 1e-12 * amp);
        }
    }

    #[test]
    fn heisenberg_energy_matches_closed_form() {
        // Within each symbol the pulse is a sum of M orthogonal tones, so
        // the energy is sum |X|^2; the Q*M-point Riemann sum is exact.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = grid(8, 4);
        let tf = random_tf(g, &mut rng);
        for q in [1, 2, 4] {
            let td = heisenberg(&tf, q).unwrap();
            assert!((td.energy() / tf.energy() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn heisenberg_matches_point_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = grid(8, 4);
        let tf = random_tf(g, &mut rng);
        let td = heisenberg(&tf, 4).unwrap();
        let amp = 1.0 / g.symbol_time().sqrt();
        for (i, s) in td.samples.iter().enumerate() {
            assert!((s - evaluate_td_at(&tf, td.time_of(i))).norm() < 1e-12 * amp);
        }
    }

    #[test]
    fn point_evaluation_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = grid(4, 4);
        let tf = random_tf(g, &mut rng);
        let t_frame = g.frame_time();
        for t in [-1e-3, -g.symbol_time() / 2.0, t_frame, t_frame * 1.5] {
            assert_eq!(evaluate_td_at(&tf, t), c(0.0, 0.0));
        }
        let mut imp = TfFrame::zeros(g);
        imp.set(0, 0, c(1.0, 0.0));
        let v = evaluate_td_at(&imp, g.symbol_time() / 2.0);
        assert!((v - c(1.0 / g.symbol_time().sqrt(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn cyclic_waveform_wraps() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = grid(4, 3);
        let tf = random_tf(g, &mut rng);
        let w = OtfsWaveform::new(tf.clone(), FrameBoundary::Cyclic);
        let t = 0.3 * g.symbol_time();
        assert!((w.at(t - g.frame_time()) - evaluate_td_at(&tf, t)).norm() < 1e-9);
    }

    #[test]
    fn wigner_of_own_pulse_converges() {
        let g = grid(4, 2);
        let mut tf = TfFrame::zeros(g);
        tf.set(0, 0, c(1.0, 0.0));
        for q in [4, 16, 64] {
            let y = wigner(&|t: f64| evaluate_td_at(&tf, t), g, q).unwrap();
            assert!((y.get(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
        }
        assert!(wigner(&|_t: f64| c(0.0, 0.0), g, 3).is_err());
    }

    #[test]
    fn identity_round_trip_through_time_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = grid(8, 8);
        let x = random_dd(g, &mut rng);
        let tf = isfft(&x);
        for q in [256, 512] {
            let y = sfft(&wigner(&|t: f64| evaluate_td_at(&tf, t), g, q).unwrap());
            let err = max_diff(y.as_slice(), x.as_slice()) / x.energy().sqrt();
            // The midpoint rule is exact on the in-band tones of one symbol.
            assert!(err < 1e-10, "q={q} err={err}");
        }
    }

    #[test]
    fn wigner_convergence_on_fractional_tone() {
        // A tone at a fractional multiple of the subcarrier spacing is not
        // periodic over the symbol, so the midpoint rule is second order.
        let g = grid(8, 2);
        let nu = 0.37 * g.delta_f;
        let mut tf = TfFrame::zeros(g);
        tf.set(0, 3, c(1.0, 0.0));
        tf.set(1, 5, c(0.0, 1.0));
        let y = |t: f64| evaluate_td_at(&tf, t) * Complex64::cis(2.0 * PI * nu * t);
        // Closed form for one tone: integral of exp(j2pi b u/T)/T over [0,T).
        let exact = |n: usize, m: usize| {
            let mut acc = c(0.0, 0.0);
            for mp in 0..g.m {
                let b = (mp as f64 - m as f64) + nu / g.delta_f;
                let integral = if b == 0.0 { c(1.0, 0.0) } else { (Complex64::cis(2.0 * PI * b) - 1.0) / c(0.0, 2.0 * PI * b) };
                acc += tf.get(n, mp) * integral * Complex64::cis(2.0 * PI * nu * n as f64 * g.symbol_time());
            }
            acc
        };
        let err = |q: usize| {
            let w = wigner(&y, g, q).unwrap();
            let mut e = 0.0f64;
            for n in 0..g.n {
                for m in 0..g.m {
                    e = e.max((w.get(n, m) - exact(n, m)).norm());
                }
            }
            e
        };
        let (e1, e2) = (err(256), err(512));
        assert!(e1 < 1e-3 && e2 < e1 / 2.0, "e256={e1} e512={e2}");
    }

    #[test]
    fn zak_sample_of_impulse() {
        let g = grid(4, 4);
        let mut pts = vec![c(0.0, 0.0); g.len()];
        pts[0] = c(1.0 / g.symbol_time().sqrt(), 0.0);
        let y = zak_sample(&pts, g).unwrap();
        for k in 0..4 {
            assert!((y.get(k, 0) - c(1.0, 0.0)).norm() < 1e-12);
            for l in 1..4 {
                assert!(y.get(k, l).norm() < 1e-12);
            }
        }
        assert!(zak_sample(&pts[1..], g).is_err());
    }

    #[test]
    fn zak_receiver_inverts_identity_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (m, n) in [(8, 8), (4, 16), (12, 7)] {
            let g = grid(m, n);
            let x = random_dd(g, &mut rng);
            let w = OtfsWaveform::new(isfft(&x), FrameBoundary::Isolated);
            let y = zak_sample(&zak_lattice_points(&w, g, true), g).unwrap();
            assert!(max_diff(y.as_slice(), x.as_slice()) < 1e-10);
        }
    }

    #[test]
    fn zak_sample_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = grid(4, 8);
        let p1: Vec<_> = (0..g.len()).map(|_| c(rng.random(), rng.random())).collect();
        let p2: Vec<_> = (0..g.len()).map(|_| c(rng.random(), rng.random())).collect();
        let (a, b) = (c(0.3, -1.2), c(2.0, 0.5));
        let mix: Vec<_> = p1.iter().zip(&p2).map(|(u, v)| a * u + b * v).collect();
        let lhs = zak_sample(&mix, g).unwrap();
        let (y1, y2) = (zak_sample(&p1, g).unwrap(), zak_sample(&p2, g).unwrap());
        let rhs: Vec<_> = y1.as_slice().iter().zip(y2.as_slice()).map(|(u, v)| a * u + b * v).collect();
        assert!(max_diff(lhs.as_slice(), &rhs) < 1e-12);
    }

    #[test]
    fn rect_zak_values() {
        let g = grid(4, 4);
        let t = g.symbol_time();
        assert!((rect_zak(0.3 * t, 1234.0, &g) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((rect_zak(1.5 * t, 0.5 / t, &g) - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((rect_zak(-0.5 * t, 1.0 / t, &g) - c(1.0, 0.0)).norm() < 1e-12);
    }
}
