//! End-to-end feature extraction: audio in, feature matrix out.

use crate::cepstral::{add_deltas, cmvn, mfcc, MelConfig};
use crate::error::Result;
use crate::features::FeatureMatrix;
use crate::framing::{frame_signal, FrameConfig};
use crate::masking::{process, EngineConfig};
use crate::signal::Signal;
use crate::stft::{stft, ComplexSpectrogram};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub frame: FrameConfig,
    pub engine: EngineConfig,
    pub mel: MelConfig,
    /// Master switch for the masking engine; disabled it yields the plain
    /// cepstral front end.
    pub masking_enabled: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            frame: FrameConfig::default(),
            engine: EngineConfig::default(),
            mel: MelConfig::default(),
            masking_enabled: true,
        }
    }
}

impl PipelineConfig {
    /// The full proposed front end: emission pre-filter, adaptive masking,
    /// MFCC(39), CMVN.
    pub fn proposed() -> Self {
        Self::default()
    }

    /// Plain MFCC(39) reference front end: no spectral filtering, no CMVN.
    pub fn baseline_mfcc39() -> Self {
        let mut cfg = Self::default();
        cfg.masking_enabled = false;
        cfg.engine.oae_enabled = false;
        cfg.mel.use_cmvn = false;
        cfg
    }
}

/// Frame + transform.
pub fn extract_spectrogram(signal: &Signal, frame: &FrameConfig) -> Result<ComplexSpectrogram> {
    let frames = frame_signal(signal, frame)?;
    stft(&frames, frame.nfft)
}

/// Run the configured front end over one utterance.
pub fn extract_features(signal: &Signal, config: &PipelineConfig) -> Result<FeatureMatrix> {
    let spec = extract_spectrogram(signal, &config.frame)?;
    let filtered = if config.masking_enabled {
        process(&spec, &config.engine)?
    } else {
        spec
    };
    let static13 = mfcc(&filtered.power(), signal.sample_rate, &config.mel)?;
    let full = add_deltas(&static13, config.mel.delta_window)?;
    if config.mel.use_cmvn {
        cmvn(&full)
    } else {
        Ok(full)
    }
}
