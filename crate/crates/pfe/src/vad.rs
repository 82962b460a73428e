//! Noise-floor tracking and energy-ratio voice activity detection.
//!
//! The tracker keeps a recursive moving average of per-cell power and a
//! sliding minimum of that average as the noise floor. A frame counts as
//! speech when the mean over bins of smoothed power over floor exceeds the
//! ratio threshold.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::stft::RealMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseTrackerConfig {
    /// Recursive smoothing constant in (0, 1); larger means slower tracking.
    pub smooth_alpha: f64,
    /// Sliding-minimum window length in frames.
    pub min_window: usize,
    /// Energy-ratio speech threshold (nu), > 1.
    pub ratio_threshold: f64,
    /// Power floor clamp applied to the denominator of the ratio test.
    pub power_floor: f64,
}

impl Default for NoiseTrackerConfig {
    fn default() -> Self {
        Self {
            smooth_alpha: 0.9,
            min_window: 50,
            ratio_threshold: 3.0,
            power_floor: 1e-10,
        }
    }
}

impl NoiseTrackerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.smooth_alpha > 0.0 && self.smooth_alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "smooth_alpha must be in (0, 1), got {}",
                self.smooth_alpha
            )));
        }
        if self.min_window == 0 {
            return Err(Error::InvalidArgument("min_window must be >= 1".into()));
        }
        if !(self.ratio_threshold > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "ratio_threshold must be > 1, got {}",
                self.ratio_threshold
            )));
        }
        if !(self.power_floor > 0.0) {
            return Err(Error::InvalidArgument("power_floor must be > 0".into()));
        }
        Ok(())
    }
}

/// Per-frame speech decisions plus the tracked state behind them.
#[derive(Debug, Clone)]
pub struct VadTrack {
    pub speech: Vec<bool>,
    /// Recursively smoothed power per (bin, frame).
    pub smoothed_power: RealMatrix,
    /// Sliding minimum of the smoothed power per (bin, frame).
    pub noise_floor: RealMatrix,
}

impl VadTrack {
    pub fn frames(&self) -> usize {
        self.speech.len()
    }

    /// A track with injected speech flags and empty state matrices; used to
    /// drive kernel selection with externally chosen decisions.
    pub fn from_speech_flags(speech: Vec<bool>) -> Self {
        Self {
            speech,
            smoothed_power: RealMatrix::zeros(0, 0),
            noise_floor: RealMatrix::zeros(0, 0),
        }
    }
}

/// Run the tracker over a power spectrogram (rows = bins, cols = frames).
/// The smoothing recursion starts from the first observed frame:
/// smoothed(f, 0) = P(f, 0).
pub fn track_noise(power: &RealMatrix, config: &NoiseTrackerConfig) -> Result<VadTrack> {
    config.validate()?;
    if power.rows == 0 || power.cols == 0 {
        return Err(Error::EmptyInput("noise tracking needs a non-empty spectrogram"));
    }
    if power.data().iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::InvalidArgument(
            "power spectrogram must be finite and non-negative".into(),
        ));
    }

    let (bins, frames) = (power.rows, power.cols);
    let mut smoothed = RealMatrix::zeros(bins, frames);
    let mut floor = RealMatrix::zeros(bins, frames);

    for f in 0..bins {
        // monotonic queue of (frame, value) candidates for the window minimum
        let mut queue: VecDeque<(usize, f64)> = VecDeque::new();
        let mut prev = 0.0;
        for t in 0..frames {
            let p = power.at(f, t);
            let s = if t == 0 {
                p
            } else {
                config.smooth_alpha * prev + (1.0 - config.smooth_alpha) * p
            };
            smoothed.set(f, t, s);
            prev = s;

            while queue.back().is_some_and(|&(_, v)| v >= s) {
                queue.pop_back();
            }
            queue.push_back((t, s));
            while queue.front().is_some_and(|&(t0, _)| t0 + config.min_window <= t) {
                queue.pop_front();
            }
            floor.set(f, t, queue.front().expect("queue holds current frame").1);
        }
    }

    let mut track = VadTrack {
        speech: Vec::new(),
        smoothed_power: smoothed,
        noise_floor: floor,
    };
    track.speech = vad(&track, config);
    Ok(track)
}

/// Per-frame speech flags from a computed track: frame t is speech iff the
/// mean over bins of smoothed(f,t)/max(floor(f,t), power_floor) exceeds the
/// ratio threshold.
pub fn vad(track: &VadTrack, config: &NoiseTrackerConfig) -> Vec<bool> {
    frame_ratios(track, config)
        .into_iter()
        .map(|r| r > config.ratio_threshold)
        .collect()
}

/// The per-frame mean energy ratios behind the speech decision.
pub fn frame_ratios(track: &VadTrack, config: &NoiseTrackerConfig) -> Vec<f64> {
    let (bins, frames) = (track.smoothed_power.rows, track.smoothed_power.cols);
    (0..frames)
        .map(|t| {
            let mut sum = 0.0;
            for f in 0..bins {
                let denom = track.noise_floor.at(f, t).max(config.power_floor);
                sum += track.smoothed_power.at(f, t) / denom;
            }
            sum / bins as f64
        })
        .collect()
}
