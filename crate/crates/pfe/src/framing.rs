//! Framing and windowing of time-domain signals.

use crate::error::{Error, Result};
use crate::signal::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Hamming,
    Hann,
    Rect,
}

impl WindowKind {
    /// Window coefficients of the given length (symmetric definition).
    pub fn coefficients(self, len: usize) -> Vec<f64> {
        use std::f64::consts::PI;
        if len == 0 {
            return Vec::new();
        }
        if len == 1 {
            return vec![1.0];
        }
        let denom = (len - 1) as f64;
        (0..len)
            .map(|n| {
                let phase = 2.0 * PI * n as f64 / denom;
                match self {
                    WindowKind::Hamming => 0.54 - 0.46 * phase.cos(),
                    WindowKind::Hann => 0.5 - 0.5 * phase.cos(),
                    WindowKind::Rect => 1.0,
                }
            })
            .collect()
    }
}

impl std::str::FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hamming" => Ok(WindowKind::Hamming),
            "hann" => Ok(WindowKind::Hann),
            "rect" => Ok(WindowKind::Rect),
            other => Err(Error::InvalidArgument(format!(
                "unknown window kind '{other}' (expected hamming, hann, or rect)"
            ))),
        }
    }
}

/// Analysis framing parameters. Defaults match common 8 kHz front-end
/// practice: 25 ms frames, 10 ms hop, Hamming window, 256-point FFT.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConfig {
    pub frame_len: usize,
    pub hop: usize,
    pub window: WindowKind,
    /// FFT length; must be a power of two and >= frame_len.
    pub nfft: usize,
    /// Optional pre-emphasis coefficient (e.g. 0.97); disabled by default.
    pub preemphasis: Option<f64>,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            frame_len: 200,
            hop: 80,
            window: WindowKind::Hamming,
            nfft: 256,
            preemphasis: None,
        }
    }
}

impl FrameConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hop == 0 || self.hop > self.frame_len || self.frame_len > self.nfft {
            return Err(Error::InvalidArgument(format!(
                "need 0 < hop ({}) <= frame_len ({}) <= nfft ({})",
                self.hop, self.frame_len, self.nfft
            )));
        }
        if !self.nfft.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "nfft ({}) must be a power of two",
                self.nfft
            )));
        }
        Ok(())
    }
}

/// Windowed frames plus the metadata the spectral stages need.
#[derive(Debug, Clone)]
pub struct Frames {
    pub data: Vec<Vec<f64>>,
    pub frame_len: usize,
    pub sample_rate: u32,
    pub hop: usize,
}

impl Frames {
    pub fn count(&self) -> usize {
        self.data.len()
    }
}

/// Split a signal into windowed frames. Tail samples shorter than one frame
/// are dropped.
pub fn frame_signal(signal: &Signal, config: &FrameConfig) -> Result<Frames> {
    config.validate()?;
    if signal.len() < config.frame_len {
        return Err(Error::InvalidArgument(format!(
            "signal of {} samples is shorter than one frame ({})",
            signal.len(),
            config.frame_len
        )));
    }

    let samples: Vec<f64> = match config.preemphasis {
        Some(a) => {
            let mut out = Vec::with_capacity(signal.len());
            let mut prev = 0.0;
            for &s in &signal.samples {
                out.push(s - a * prev);
                prev = s;
            }
            out
        }
        None => signal.samples.clone(),
    };

    let window = config.window.coefficients(config.frame_len);
    let n_frames = (samples.len() - config.frame_len) / config.hop + 1;
    let mut data = Vec::with_capacity(n_frames);
    for i in 0..n_frames {
        let start = i * config.hop;
        let frame: Vec<f64> = samples[start..start + config.frame_len]
            .iter()
            .zip(&window)
            .map(|(s, w)| s * w)
            .collect();
        data.push(frame);
    }

    Ok(Frames {
        data,
        frame_len: config.frame_len,
        sample_rate: signal.sample_rate,
        hop: config.hop,
    })
}
