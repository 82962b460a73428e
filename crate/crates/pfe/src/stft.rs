//! Forward spectral transform and the complex spectrogram type.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::framing::Frames;

/// Dense row-major real matrix. Rows are frequency bins (or feature dims),
/// columns are frames, unless a caller says otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix data length {} != {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealMatrix {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// One-sided complex spectrogram: `bins` = nfft/2 + 1 rows, one column per
/// frame. Bin `b` corresponds to frequency `b * sample_rate / nfft`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrogram {
    pub bins: usize,
    pub frames: usize,
    pub sample_rate: u32,
    pub hop: usize,
    data: Vec<Complex64>,
}

impl ComplexSpectrogram {
    pub fn zeros(bins: usize, frames: usize, sample_rate: u32, hop: usize) -> Self {
        Self {
            bins,
            frames,
            sample_rate,
            hop,
            data: vec![Complex64::new(0.0, 0.0); bins * frames],
        }
    }

    #[inline]
    pub fn at(&self, bin: usize, frame: usize) -> Complex64 {
        self.data[bin * self.frames + frame]
    }

    #[inline]
    pub fn set(&mut self, bin: usize, frame: usize, v: Complex64) {
        self.data[bin * self.frames + frame] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// |Y|^2 per cell.
    pub fn power(&self) -> RealMatrix {
        RealMatrix {
            rows: self.bins,
            cols: self.frames,
            data: self.data.iter().map(|c| c.norm_sqr()).collect(),
        }
    }

    /// |Y| per cell.
    pub fn magnitude(&self) -> RealMatrix {
        RealMatrix {
            rows: self.bins,
            cols: self.frames,
            data: self.data.iter().map(|c| c.norm()).collect(),
        }
    }
}

/// In-place iterative radix-2 DIT forward FFT. Scalar on purpose: the
/// feature pipeline must produce byte-identical output across platforms,
/// which rules out backends with architecture-dependent SIMD rounding.
pub(crate) fn fft_in_place(buf: &mut [Complex64]) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    if n < 2 {
        return;
    }

    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }

    let mut len = 2;
    while len <= n {
        let ang = -2.0 * std::f64::consts::PI / len as f64;
        let half = len / 2;
        let mut start = 0;
        while start < n {
            for k in 0..half {
                let w = Complex64::from_polar(1.0, ang * k as f64);
                let u = buf[start + k];
                let v = buf[start + k + half] * w;
                buf[start + k] = u + v;
                buf[start + k + half] = u - v;
            }
            start += len;
        }
        len <<= 1;
    }
}

/// Transform windowed frames into a one-sided complex spectrogram.
pub fn stft(frames: &Frames, nfft: usize) -> Result<ComplexSpectrogram> {
    if frames.data.is_empty() {
        return Err(Error::EmptyInput("stft needs at least one frame"));
    }
    if !nfft.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "nfft ({nfft}) must be a power of two"
        )));
    }
    if nfft < frames.frame_len {
        return Err(Error::InvalidArgument(format!(
            "nfft ({nfft}) must be >= frame_len ({})",
            frames.frame_len
        )));
    }

    let bins = nfft / 2 + 1;
    let mut spec = ComplexSpectrogram::zeros(bins, frames.count(), frames.sample_rate, frames.hop);
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
    for (t, frame) in frames.data.iter().enumerate() {
        for slot in buf.iter_mut() {
            *slot = Complex64::new(0.0, 0.0);
        }
        for (slot, &s) in buf.iter_mut().zip(frame.iter()) {
            *slot = Complex64::new(s, 0.0);
        }
        fft_in_place(&mut buf);
        for (b, &v) in buf.iter().take(bins).enumerate() {
            spec.set(b, t, v);
        }
    }
    Ok(spec)
}
