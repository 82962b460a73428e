//! The relative-spectral bandpass filter over feature trajectories.
//!
//! Transfer function 0.1 z^4 (2 + z^-1 - z^-3 - 2 z^-4) / (1 - 0.98 z^-1),
//! realized causally. The pole's recursion is engaged only once the
//! numerator's delay line has filled (from sample 5), which keeps the
//! startup transient out of the recursion: the first five output samples
//! are the pure FIR response 0.1*(2, 1, 0, -1, -2) to an impulse, and a
//! constant input is rejected exactly from sample 4 on.

use crate::features::FeatureMatrix;

const FIR: [f64; 5] = [0.2, 0.1, 0.0, -0.1, -0.2];
const POLE: f64 = 0.98;

/// Filter a single trajectory.
pub fn rasta_filter_trajectory(x: &[f64]) -> Vec<f64> {
    let mut y = Vec::with_capacity(x.len());
    for n in 0..x.len() {
        let mut fir = 0.0;
        for (k, &c) in FIR.iter().enumerate() {
            if n >= k {
                fir += c * x[n - k];
            }
        }
        let recursive = if n >= FIR.len() { POLE * y[n - 1] } else { 0.0 };
        y.push(fir + recursive);
    }
    y
}

/// Filter every feature dimension independently along time.
pub fn rasta_filter(features: &FeatureMatrix) -> FeatureMatrix {
    let mut out = FeatureMatrix::zeros(features.frames, features.dims, features.labels.clone());
    let mut trajectory = vec![0.0; features.frames];
    for d in 0..features.dims {
        for t in 0..features.frames {
            trajectory[t] = features.at(t, d);
        }
        for (t, v) in rasta_filter_trajectory(&trajectory).into_iter().enumerate() {
            out.set(t, d, v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn impulse_response_starts_with_the_fir_taps() {
        let mut x = vec![0.0; 12];
        x[0] = 1.0;
        let y = rasta_filter_trajectory(&x);
        let want_head = [0.2, 0.1, 0.0, -0.1, -0.2];
        for (n, &w) in want_head.iter().enumerate() {
            assert!((y[n] - w).abs() < 1e-15, "sample {n}");
        }
        // then the pole's geometric tail
        assert!((y[5] - 0.98 * -0.2).abs() < 1e-15);
        assert!((y[6] - 0.98 * 0.98 * -0.2).abs() < 1e-15);
    }

    #[test]
    fn constant_input_is_rejected() {
        let y = rasta_filter_trajectory(&vec![3.7; 200]);
        for (n, &v) in y.iter().enumerate().skip(100) {
            assert!(v.abs() < 1e-6, "sample {n} = {v}");
        }
    }

    #[test]
    fn filter_is_linear() {
        let x: Vec<f64> = (0..50).map(|n| ((n * 17) % 23) as f64 - 11.0).collect();
        let z: Vec<f64> = (0..50).map(|n| ((n * 29) % 19) as f64 * 0.4).collect();
        let combo: Vec<f64> = x.iter().zip(&z).map(|(a, b)| 2.0 * a - 0.5 * b).collect();
        let fx = rasta_filter_trajectory(&x);
        let fz = rasta_filter_trajectory(&z);
        let fc = rasta_filter_trajectory(&combo);
        for n in 0..50 {
            assert!((fc[n] - (2.0 * fx[n] - 0.5 * fz[n])).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_filter_applies_per_dimension() {
        let mut f = FeatureMatrix::zeros(30, 2, Vec::new());
        for t in 0..30 {
            f.set(t, 0, 1.0); // constant dim: rejected
            f.set(t, 1, t as f64); // ramp dim: passes something
        }
        let out = rasta_filter(&f);
        assert!(out.at(29, 0).abs() < 1e-9);
        assert!(out.at(29, 1).abs() > 1e-3);
    }
}
