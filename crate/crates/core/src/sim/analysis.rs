//! Reading SNR gaps off BER curves.

/// SNR at which the curve crosses `target`, interpolating `log10(ber)`
/// linearly in dB between the first bracketing pair of points. Points with
/// zero errors are ignored. `None` if the curve never brackets `target`.
pub fn snr_at_ber(curve: &[(f64, f64)], target: f64) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = curve.iter().copied().filter(|&(_, b)| b > 0.0).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let lt = target.log10();
    pts.windows(2).find_map(|w| {
        let (s0, b0) = (w[0].0, w[0].1.log10());
        let (s1, b1) = (w[1].0, w[1].1.log10());
        if (b0 - lt) * (b1 - lt) > 0.0 || b0 == b1 {
            return None;
        }
        Some(s0 + (lt - b0) * (s1 - s0) / (b1 - b0))
    })
}
