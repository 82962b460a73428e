//! Audio ingestion: the time-domain signal type and a PCM16 mono WAV reader.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// A mono audio signal, samples normalized to [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidArgument("sample_rate must be > 0".into()));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument(
                "signal contains non-finite samples".into(),
            ));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean squared sample value.
    pub fn power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s * s).sum::<f64>() / self.samples.len() as f64
    }
}

const RIFF_HEADER_LEN: usize = 12;

/// Load a RIFF/WAVE file. Only PCM 16-bit mono is accepted; samples are
/// scaled by 1/32768.
pub fn load_wav<P: AsRef<Path>>(path: P) -> Result<Signal> {
    let bytes = fs::read(path.as_ref())?;
    parse_wav(&bytes)
}

/// Parse WAV bytes already in memory. See [`load_wav`].
pub fn parse_wav(bytes: &[u8]) -> Result<Signal> {
    if bytes.len() < RIFF_HEADER_LEN || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::Wav("not a RIFF/WAVE file".into()));
    }

    let mut fmt: Option<(u16, u16, u32, u16)> = None; // (format, channels, rate, bits)
    let mut data: Option<&[u8]> = None;

    let mut offset = RIFF_HEADER_LEN;
    while offset + 8 <= bytes.len() {
        let id = &bytes[offset..offset + 4];
        let size = u32::from_le_bytes(bytes[offset + 4..offset + 8].try_into().unwrap()) as usize;
        let body_start = offset + 8;
        if body_start + size > bytes.len() {
            return Err(Error::Wav(format!(
                "truncated file: chunk {:?} claims {} bytes past end of file",
                String::from_utf8_lossy(id),
                body_start + size - bytes.len()
            )));
        }
        let body = &bytes[body_start..body_start + size];
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(Error::Wav("truncated fmt chunk".into()));
                }
                let format = u16::from_le_bytes(body[0..2].try_into().unwrap());
                let channels = u16::from_le_bytes(body[2..4].try_into().unwrap());
                let rate = u32::from_le_bytes(body[4..8].try_into().unwrap());
                let bits = u16::from_le_bytes(body[14..16].try_into().unwrap());
                fmt = Some((format, channels, rate, bits));
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // chunks are word-aligned
        offset = body_start + size + (size & 1);
    }

    let (format, channels, rate, bits) = fmt.ok_or_else(|| Error::Wav("missing fmt chunk".into()))?;
    if format != 1 {
        return Err(Error::Wav(format!(
            "unsupported encoding: format tag {format} (PCM only)"
        )));
    }
    if channels != 1 {
        return Err(Error::Wav(format!(
            "unsupported channel count: {channels} (mono only)"
        )));
    }
    if bits != 16 {
        return Err(Error::Wav(format!(
            "unsupported bit depth: {bits} (16-bit only)"
        )));
    }
    if rate == 0 {
        return Err(Error::Wav("sample rate is zero".into()));
    }

    let data = data.ok_or_else(|| Error::Wav("missing data chunk".into()))?;
    if data.len() % 2 != 0 {
        return Err(Error::Wav("truncated file: odd PCM16 payload length".into()));
    }

    let samples = data
        .chunks_exact(2)
        .map(|b| i16::from_le_bytes([b[0], b[1]]) as f64 / 32768.0)
        .collect();
    Signal::new(samples, rate)
}

#[cfg(test)]
pub(crate) fn wav_bytes_mono16(samples: &[i16], sample_rate: u32) -> Vec<u8> {
    let data_len = samples.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for s in samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}
