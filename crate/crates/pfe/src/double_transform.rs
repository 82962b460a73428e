//! 2D spectrum analysis of time-frequency matrices.
//!
//! Filtering here happens by convolution over the time-frequency plane, so
//! the meaningful frequency response of a kernel (and the character of a
//! noise type) lives in the 2D Fourier transform of that plane. `u` indexes
//! spatial frequency along the input's frequency axis, `v` along its time
//! axis; the transform is shifted so zero frequency sits at the grid center.

use std::io::Write;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::kernels::MaskingGrid;
use crate::stft::RealMatrix;

/// dB floor applied when rendering magnitudes.
pub const DB_FLOOR: f64 = -120.0;

/// Centered 2D magnitude spectrum of a real matrix.
#[derive(Debug, Clone)]
pub struct DtSpectrum {
    /// Grid extent along u (input frequency axis).
    pub rows: usize,
    /// Grid extent along v (input time axis).
    pub cols: usize,
    /// Zero-frequency cell after centering: (floor(rows/2), floor(cols/2)).
    pub center: (usize, usize),
    linear: Vec<f64>,
}

impl DtSpectrum {
    #[inline]
    pub fn magnitude(&self, u: usize, v: usize) -> f64 {
        self.linear[u * self.cols + v]
    }

    /// Magnitude in dB, clamped at [`DB_FLOOR`].
    pub fn magnitude_db(&self, u: usize, v: usize) -> f64 {
        let m = self.magnitude(u, v);
        if m <= 0.0 {
            DB_FLOOR
        } else {
            (20.0 * m.log10()).max(DB_FLOOR)
        }
    }

    /// Total linear-power mass (sum of squared magnitudes).
    pub fn total_power(&self) -> f64 {
        self.linear.iter().map(|m| m * m).sum()
    }

    /// CSV of dB values, one u-row per line.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        for u in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|v| format!("{:.4}", self.magnitude_db(u, v)))
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// 8-bit binary PGM of the dB surface, min mapped to 0 and max to 255.
    pub fn write_pgm<W: Write>(&self, w: &mut W) -> Result<()> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for u in 0..self.rows {
            for v in 0..self.cols {
                let db = self.magnitude_db(u, v);
                lo = lo.min(db);
                hi = hi.max(db);
            }
        }
        let span = hi - lo;
        writeln!(w, "P5")?;
        writeln!(w, "{} {}", self.cols, self.rows)?;
        writeln!(w, "255")?;
        let mut bytes = Vec::with_capacity(self.rows * self.cols);
        for u in 0..self.rows {
            for v in 0..self.cols {
                let px = if span > 0.0 {
                    ((self.magnitude_db(u, v) - lo) / span * 255.0).round() as u8
                } else {
                    0
                };
                bytes.push(px);
            }
        }
        w.write_all(&bytes)?;
        Ok(())
    }
}

fn fft_shift_index(i: usize, n: usize) -> usize {
    (i + n / 2) % n
}

/// Full 2D DFT of a real matrix, shifted so DC is central, as linear
/// magnitudes.
pub fn double_transform(matrix: &RealMatrix) -> Result<DtSpectrum> {
    if matrix.rows == 0 || matrix.cols == 0 {
        return Err(Error::EmptyInput("double transform needs a non-empty matrix"));
    }
    let (rows, cols) = (matrix.rows, matrix.cols);
    let mut planner = FftPlanner::<f64>::new();

    // transform along the time axis (rows of the storage)
    let row_fft = planner.plan_fft_forward(cols);
    let mut grid: Vec<Complex64> = matrix
        .data()
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    for r in 0..rows {
        row_fft.process(&mut grid[r * cols..(r + 1) * cols]);
    }

    // transform along the frequency axis (columns of the storage)
    let col_fft = planner.plan_fft_forward(rows);
    let mut column = vec![Complex64::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            column[r] = grid[r * cols + c];
        }
        col_fft.process(&mut column);
        for r in 0..rows {
            grid[r * cols + c] = column[r];
        }
    }

    let mut linear = vec![0.0; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let u = fft_shift_index(r, rows);
            let v = fft_shift_index(c, cols);
            linear[u * cols + v] = grid[r * cols + c].norm();
        }
    }

    Ok(DtSpectrum {
        rows,
        cols,
        center: (rows / 2, cols / 2),
        linear,
    })
}

/// Frequency response of a kernel: zero-embed its grid into rows x cols and
/// take the double transform.
pub fn kernel_response<G: MaskingGrid>(kernel: &G, rows: usize, cols: usize) -> Result<DtSpectrum> {
    let g = kernel.geometry();
    let extent_f = (g.df_max - g.df_min + 1) as usize;
    let extent_t = g.dt_max + g.dt_back + 1;
    if rows < extent_f || cols < extent_t {
        return Err(Error::InvalidArgument(format!(
            "grid {rows}x{cols} smaller than kernel extent {extent_f}x{extent_t}"
        )));
    }
    let mut embedded = RealMatrix::zeros(rows, cols);
    for df in g.df_min..=g.df_max {
        for dt in 0..=g.dt_max {
            embedded.set((df - g.df_min) as usize, dt, kernel.coeff(df, dt));
        }
    }
    double_transform(&embedded)
}

/// Fraction of linear-power mass in the center column u = u0 (all v).
pub fn center_column_concentration(dt: &DtSpectrum) -> f64 {
    let total = dt.total_power();
    if total <= 0.0 {
        return 0.0;
    }
    let u0 = dt.center.0;
    let column: f64 = (0..dt.cols).map(|v| dt.magnitude(u0, v).powi(2)).sum();
    column / total
}
