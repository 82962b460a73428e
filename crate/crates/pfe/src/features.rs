//! Feature matrices and their on-disk formats.

use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Little-endian binary feature file magic.
pub const FEATURE_MAGIC: [u8; 4] = *b"PFE1";

/// Frames-by-dimensions real feature matrix, frame-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub frames: usize,
    pub dims: usize,
    pub labels: Vec<String>,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn zeros(frames: usize, dims: usize, labels: Vec<String>) -> Self {
        debug_assert!(labels.is_empty() || labels.len() == dims);
        Self {
            frames,
            dims,
            labels,
            data: vec![0.0; frames * dims],
        }
    }

    pub fn from_vec(frames: usize, dims: usize, labels: Vec<String>, data: Vec<f64>) -> Result<Self> {
        if data.len() != frames * dims {
            return Err(Error::DimensionMismatch(format!(
                "feature data length {} != {frames}x{dims}",
                data.len()
            )));
        }
        Ok(Self {
            frames,
            dims,
            labels,
            data,
        })
    }

    #[inline]
    pub fn at(&self, frame: usize, dim: usize) -> f64 {
        self.data[frame * self.dims + dim]
    }

    #[inline]
    pub fn set(&mut self, frame: usize, dim: usize, v: f64) {
        self.data[frame * self.dims + dim] = v;
    }

    pub fn row(&self, frame: usize) -> &[f64] {
        &self.data[frame * self.dims..(frame + 1) * self.dims]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// CSV, one frame per row, fixed scientific formatting so identical
    /// matrices serialize identically.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        for t in 0..self.frames {
            let row: Vec<String> = self.row(t).iter().map(|v| format!("{v:.9e}")).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Binary format: magic "PFE1", u32 frames, u32 dims, u32 sample rate,
    /// u32 hop in samples, then f32 little-endian values row-major.
    pub fn write_binary<W: Write>(&self, w: &mut W, sample_rate: u32, hop_samples: u32) -> Result<()> {
        w.write_all(&FEATURE_MAGIC)?;
        w.write_all(&(self.frames as u32).to_le_bytes())?;
        w.write_all(&(self.dims as u32).to_le_bytes())?;
        w.write_all(&sample_rate.to_le_bytes())?;
        w.write_all(&hop_samples.to_le_bytes())?;
        for &v in &self.data {
            w.write_all(&(v as f32).to_le_bytes())?;
        }
        Ok(())
    }

    /// Read the binary format back; returns (features, sample_rate, hop).
    pub fn read_binary<R: Read>(r: &mut R) -> Result<(Self, u32, u32)> {
        let mut head = [0u8; 20];
        r.read_exact(&mut head)
            .map_err(|_| Error::Wav("feature file header truncated".into()))?;
        if head[0..4] != FEATURE_MAGIC {
            return Err(Error::InvalidArgument(
                "not a feature file (bad magic)".into(),
            ));
        }
        let u32_at = |o: usize| u32::from_le_bytes(head[o..o + 4].try_into().unwrap());
        let frames = u32_at(4) as usize;
        let dims = u32_at(8) as usize;
        let sample_rate = u32_at(12);
        let hop = u32_at(16);

        let mut payload = vec![0u8; frames * dims * 4];
        r.read_exact(&mut payload)
            .map_err(|_| Error::InvalidArgument("feature file payload truncated".into()))?;
        let data = payload
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()) as f64)
            .collect();
        Ok((
            Self {
                frames,
                dims,
                labels: Vec::new(),
                data,
            },
            sample_rate,
            hop,
        ))
    }
}
