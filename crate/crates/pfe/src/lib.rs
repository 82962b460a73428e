//! Noise-robust speech feature extraction built around adaptive 2D
//! auditory-masking filters applied in the complex time-frequency domain.
//!
//! The pipeline: PCM audio is framed, windowed, and transformed to a complex
//! spectrogram; an emission ("OAE") pre-filter and an adaptive band-split
//! masking filter reshape the spectrum; mel-cepstral features with velocity
//! and acceleration tracks (and optional CMVN) come out the other end. Side
//! modules provide 2D spectrum analysis of spectrograms and kernels, an
//! energy-ratio VAD with minimum-statistics noise tracking, and a synthetic
//! evaluation harness with SNR mixing, DTW template classification, and
//! reporting metrics.

pub mod cepstral;
pub mod double_transform;
pub mod error;
pub mod eval;
pub mod features;
pub mod framing;
pub mod kernels;
pub mod masking;
pub mod pipeline;
pub mod signal;
pub mod stft;
pub mod vad;

pub use error::{Error, Result};
