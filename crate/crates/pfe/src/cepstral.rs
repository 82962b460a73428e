//! Mel filterbank, cepstral coefficients, regression deltas, and CMVN.

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::stft::RealMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MelConfig {
    pub n_mels: usize,
    pub fmin: f64,
    pub fmax: f64,
    /// Static cepstral coefficients to keep (c0 included).
    pub n_ceps: usize,
    /// Regression half-window for velocity/acceleration.
    pub delta_window: usize,
    pub use_cmvn: bool,
    /// Clamp applied to mel energies before the log.
    pub log_floor: f64,
}

impl Default for MelConfig {
    fn default() -> Self {
        Self {
            n_mels: 23,
            fmin: 64.0,
            fmax: 4000.0,
            n_ceps: 13,
            delta_window: 2,
            use_cmvn: true,
            log_floor: 1e-10,
        }
    }
}

impl MelConfig {
    pub fn validate(&self, sample_rate: u32) -> Result<()> {
        let nyquist = sample_rate as f64 / 2.0;
        if !(self.fmin >= 0.0 && self.fmin < self.fmax && self.fmax <= nyquist) {
            return Err(Error::InvalidArgument(format!(
                "need 0 <= fmin ({}) < fmax ({}) <= fs/2 ({nyquist})",
                self.fmin, self.fmax
            )));
        }
        if self.n_mels == 0 || self.n_ceps == 0 || self.n_ceps > self.n_mels {
            return Err(Error::InvalidArgument(format!(
                "need 0 < n_ceps ({}) <= n_mels ({})",
                self.n_ceps, self.n_mels
            )));
        }
        if self.delta_window == 0 {
            return Err(Error::InvalidArgument("delta_window must be >= 1".into()));
        }
        if !(self.log_floor > 0.0) {
            return Err(Error::InvalidArgument("log_floor must be > 0".into()));
        }
        Ok(())
    }
}

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular mel filterbank, unit peak, mel-spaced centers. Rows are
/// filters, columns are the nfft/2 + 1 FFT bins.
pub fn mel_filterbank(nfft: usize, sample_rate: u32, config: &MelConfig) -> Result<RealMatrix> {
    config.validate(sample_rate)?;
    let bins = nfft / 2 + 1;
    let mel_lo = hz_to_mel(config.fmin);
    let mel_hi = hz_to_mel(config.fmax);
    let edges: Vec<f64> = (0..config.n_mels + 2)
        .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (config.n_mels + 1) as f64))
        .collect();

    let mut fb = RealMatrix::zeros(config.n_mels, bins);
    for m in 0..config.n_mels {
        let (lower, center, upper) = (edges[m], edges[m + 1], edges[m + 2]);
        for b in 0..bins {
            let freq = b as f64 * sample_rate as f64 / nfft as f64;
            let w = if freq >= lower && freq <= center {
                (freq - lower) / (center - lower)
            } else if freq > center && freq <= upper {
                (upper - freq) / (upper - center)
            } else {
                0.0
            };
            fb.set(m, b, w);
        }
    }
    Ok(fb)
}

fn dct_ii_orthonormal(n: usize) -> RealMatrix {
    use std::f64::consts::PI;
    let mut d = RealMatrix::zeros(n, n);
    let scale = (2.0 / n as f64).sqrt();
    for k in 0..n {
        let ck = if k == 0 { (0.5f64).sqrt() } else { 1.0 };
        for m in 0..n {
            d.set(
                k,
                m,
                scale * ck * (PI * (2.0 * m as f64 + 1.0) * k as f64 / (2.0 * n as f64)).cos(),
            );
        }
    }
    d
}

pub(crate) fn cepstra_from_mel(mel_energies: &RealMatrix, config: &MelConfig) -> FeatureMatrix {
    let (n_mels, frames) = (mel_energies.rows, mel_energies.cols);
    let dct = dct_ii_orthonormal(n_mels);
    let labels = (0..config.n_ceps).map(|i| format!("c{i}")).collect();
    let mut out = FeatureMatrix::zeros(frames, config.n_ceps, labels);
    let mut log_mel = vec![0.0; n_mels];
    for t in 0..frames {
        for m in 0..n_mels {
            log_mel[m] = mel_energies.at(m, t).max(config.log_floor).ln();
        }
        for k in 0..config.n_ceps {
            let mut acc = 0.0;
            for m in 0..n_mels {
                acc += dct.at(k, m) * log_mel[m];
            }
            out.set(t, k, acc);
        }
    }
    out
}

/// Static cepstra from a power spectrogram (rows = bins, cols = frames).
pub fn mfcc(power: &RealMatrix, sample_rate: u32, config: &MelConfig) -> Result<FeatureMatrix> {
    config.validate(sample_rate)?;
    if power.rows == 0 || power.cols == 0 {
        return Err(Error::EmptyInput("mfcc needs a non-empty power spectrogram"));
    }
    if power.data().iter().any(|&p| p < 0.0 || !p.is_finite()) {
        return Err(Error::InvalidArgument(
            "power spectrogram must be finite and non-negative".into(),
        ));
    }
    let nfft = (power.rows - 1) * 2;
    let fb = mel_filterbank(nfft, sample_rate, config)?;

    let mut mel = RealMatrix::zeros(config.n_mels, power.cols);
    for m in 0..config.n_mels {
        for t in 0..power.cols {
            let mut acc = 0.0;
            for b in 0..power.rows {
                acc += fb.at(m, b) * power.at(b, t);
            }
            mel.set(m, t, acc);
        }
    }
    Ok(cepstra_from_mel(&mel, config))
}

fn regression_deltas(features: &FeatureMatrix, window: usize) -> FeatureMatrix {
    let denom: f64 = 2.0 * (1..=window).map(|th| (th * th) as f64).sum::<f64>();
    let mut out = FeatureMatrix::zeros(features.frames, features.dims, features.labels.clone());
    let clamp = |t: i64| -> usize { t.clamp(0, features.frames as i64 - 1) as usize };
    for t in 0..features.frames {
        for d in 0..features.dims {
            let mut acc = 0.0;
            for th in 1..=window {
                let ahead = features.at(clamp(t as i64 + th as i64), d);
                let behind = features.at(clamp(t as i64 - th as i64), d);
                acc += th as f64 * (ahead - behind);
            }
            out.set(t, d, acc / denom);
        }
    }
    out
}

/// Append velocity and acceleration tracks: 13 static dims become 39.
/// Edge frames replicate the boundary values inside the regression window.
pub fn add_deltas(features: &FeatureMatrix, delta_window: usize) -> Result<FeatureMatrix> {
    if features.frames == 0 {
        return Err(Error::EmptyInput("delta computation needs at least one frame"));
    }
    if delta_window == 0 {
        return Err(Error::InvalidArgument("delta_window must be >= 1".into()));
    }
    let velocity = regression_deltas(features, delta_window);
    let accel = regression_deltas(&velocity, delta_window);

    let mut labels = features.labels.clone();
    labels.extend(features.labels.iter().map(|l| format!("d{l}")));
    labels.extend(features.labels.iter().map(|l| format!("dd{l}")));

    let dims = features.dims;
    let mut out = FeatureMatrix::zeros(features.frames, dims * 3, labels);
    for t in 0..features.frames {
        for d in 0..dims {
            out.set(t, d, features.at(t, d));
            out.set(t, dims + d, velocity.at(t, d));
            out.set(t, 2 * dims + d, accel.at(t, d));
        }
    }
    Ok(out)
}

/// Per-dimension zero-mean unit-variance normalization over the utterance.
pub fn cmvn(features: &FeatureMatrix) -> Result<FeatureMatrix> {
    if features.frames < 2 {
        return Err(Error::InvalidArgument(
            "cmvn needs at least 2 frames (variance undefined)".into(),
        ));
    }
    let n = features.frames as f64;
    let mut out = FeatureMatrix::zeros(features.frames, features.dims, features.labels.clone());
    for d in 0..features.dims {
        let mean = (0..features.frames).map(|t| features.at(t, d)).sum::<f64>() / n;
        let var = (0..features.frames)
            .map(|t| {
                let c = features.at(t, d) - mean;
                c * c
            })
            .sum::<f64>()
            / n;
        let sd = var.sqrt();
        for t in 0..features.frames {
            let v = if sd > 0.0 {
                (features.at(t, d) - mean) / sd
            } else {
                0.0
            };
            out.set(t, d, v);
        }
    }
    Ok(out)
}
