//! The spectral masking engine: emission pre-filter followed by the adaptive
//! band-split masking filter, applied to complex spectrograms.
//!
//! Both stages are correlation sums of a kernel against the spectrogram with
//! out-of-range neighbors read as zero. Real and imaginary planes see the
//! same real kernel, so complex filtering and plane-wise filtering coincide
//! exactly. In adaptive mode the spectrum is split into low/high halves that
//! are filtered independently, and the masking kernel per output frame is
//! chosen by that frame's speech flag.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{oae_kernel, psycho_kernel, Band, MaskKernel, MaskingGrid, OaeKernel};
use crate::stft::ComplexSpectrogram;
use crate::vad::{track_noise, NoiseTrackerConfig, VadTrack};

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    /// Band-split plus VAD kernel switching. When off, the whole spectrum is
    /// processed with the high-band kernels and no speech-state switching.
    pub adaptive: bool,
    /// Divide masking kernels by 1 + alpha_ti so the center tap is 1.
    pub normalize_kernels: bool,
    pub oae_enabled: bool,
    /// Emission strength; 0 makes the emission stage an identity.
    pub oae_mu: f64,
    pub vad: NoiseTrackerConfig,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            adaptive: true,
            normalize_kernels: true,
            oae_enabled: true,
            oae_mu: 0.1,
            vad: NoiseTrackerConfig::default(),
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.oae_mu >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "oae_mu must be >= 0, got {}",
                self.oae_mu
            )));
        }
        self.vad.validate()
    }
}

/// Row ranges of the two halves of the usable spectrum: low band first,
/// split at floor(bins / 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandSplit {
    pub low_rows: std::ops::Range<usize>,
    pub high_rows: std::ops::Range<usize>,
}

pub fn band_split(bins: usize) -> Result<BandSplit> {
    if bins < 2 {
        return Err(Error::InvalidArgument(format!(
            "band split needs at least 2 bins, got {bins}"
        )));
    }
    let mid = bins / 2;
    Ok(BandSplit {
        low_rows: 0..mid,
        high_rows: mid..bins,
    })
}

/// Copy out the two band submatrices.
pub fn split_bands(
    spec: &ComplexSpectrogram,
) -> Result<(ComplexSpectrogram, ComplexSpectrogram)> {
    let split = band_split(spec.bins)?;
    Ok((
        extract_rows(spec, split.low_rows),
        extract_rows(spec, split.high_rows),
    ))
}

/// Stack a low band on top of a high band again.
pub fn concat_bands(
    low: &ComplexSpectrogram,
    high: &ComplexSpectrogram,
) -> Result<ComplexSpectrogram> {
    if low.frames != high.frames {
        return Err(Error::DimensionMismatch(format!(
            "band frame counts differ: {} vs {}",
            low.frames, high.frames
        )));
    }
    let mut out = ComplexSpectrogram::zeros(
        low.bins + high.bins,
        low.frames,
        low.sample_rate,
        low.hop,
    );
    for f in 0..low.bins {
        for t in 0..low.frames {
            out.set(f, t, low.at(f, t));
        }
    }
    for f in 0..high.bins {
        for t in 0..high.frames {
            out.set(low.bins + f, t, high.at(f, t));
        }
    }
    Ok(out)
}

fn extract_rows(spec: &ComplexSpectrogram, rows: std::ops::Range<usize>) -> ComplexSpectrogram {
    let mut out =
        ComplexSpectrogram::zeros(rows.len(), spec.frames, spec.sample_rate, spec.hop);
    for (i, f) in rows.enumerate() {
        for t in 0..spec.frames {
            out.set(i, t, spec.at(f, t));
        }
    }
    out
}

/// The filtered value of one output cell: sum of kernel coefficient times
/// the spectrogram at (f + df, t - dt), with out-of-range neighbors as zero.
/// The kernel already carries the center boost and the negative masking
/// signs, so this single sum is the complete filter output.
pub fn masking_sum<G: MaskingGrid>(
    spec: &ComplexSpectrogram,
    kernel: &G,
    f: usize,
    t: usize,
) -> Result<Complex64> {
    if f >= spec.bins || t >= spec.frames {
        return Err(Error::OutOfBounds(format!(
            "cell ({f}, {t}) outside spectrogram of {} bins x {} frames",
            spec.bins, spec.frames
        )));
    }
    Ok(cell_sum(spec, kernel, f, t))
}

#[inline]
fn cell_sum<G: MaskingGrid>(spec: &ComplexSpectrogram, kernel: &G, f: usize, t: usize) -> Complex64 {
    let g = kernel.geometry();
    let mut acc = Complex64::new(0.0, 0.0);
    for df in g.df_min..=g.df_max {
        let fb = f as i64 + df as i64;
        if fb < 0 || fb >= spec.bins as i64 {
            continue;
        }
        let fb = fb as usize;
        let dt_reach = g.dt_max.min(t);
        for dt in 0..=dt_reach {
            let c = kernel.coeff(df, dt);
            let y = spec.at(fb, t - dt);
            acc += y * c;
        }
    }
    acc
}

/// Filter a whole matrix, selecting a kernel per output frame.
fn filter_matrix<G: MaskingGrid>(
    spec: &ComplexSpectrogram,
    kernel_for_frame: impl Fn(usize) -> G,
) -> ComplexSpectrogram
where
    G: Clone,
{
    let mut out = ComplexSpectrogram::zeros(spec.bins, spec.frames, spec.sample_rate, spec.hop);
    for t in 0..spec.frames {
        let kernel = kernel_for_frame(t);
        for f in 0..spec.bins {
            out.set(f, t, cell_sum(spec, &kernel, f, t));
        }
    }
    out
}

/// Adaptive masking stage. Bands are filtered as independent submatrices
/// (neighbors across the boundary read as zero) and the kernel's
/// temporal-integration variant follows the output frame's speech flag.
/// With `adaptive` off the whole spectrogram gets the high-band speech
/// kernel and the track is ignored.
pub fn apply_adaptive(
    spec: &ComplexSpectrogram,
    vad_track: &VadTrack,
    config: &EngineConfig,
) -> Result<ComplexSpectrogram> {
    config.validate()?;

    if !config.adaptive {
        let kernel = psycho_kernel(Band::High, true, config.normalize_kernels);
        return Ok(filter_matrix(spec, |_| kernel.clone()));
    }

    if vad_track.frames() != spec.frames {
        return Err(Error::DimensionMismatch(format!(
            "vad track has {} frames, spectrogram has {}",
            vad_track.frames(),
            spec.frames
        )));
    }

    let (low, high) = split_bands(spec)?;
    let low_out = filter_band(&low, Band::Low, vad_track, config);
    let high_out = filter_band(&high, Band::High, vad_track, config);
    concat_bands(&low_out, &high_out)
}

fn filter_band(
    band_spec: &ComplexSpectrogram,
    band: Band,
    vad_track: &VadTrack,
    config: &EngineConfig,
) -> ComplexSpectrogram {
    let speech = psycho_kernel(band, true, config.normalize_kernels);
    let nonspeech = psycho_kernel(band, false, config.normalize_kernels);
    filter_matrix(band_spec, |t| {
        if vad_track.speech[t] {
            speech.clone()
        } else {
            nonspeech.clone()
        }
    })
}

/// Emission pre-filter stage. Speech state never matters here; the band
/// split follows the adaptive flag like the masking stage.
pub fn apply_oae(spec: &ComplexSpectrogram, config: &EngineConfig) -> Result<ComplexSpectrogram> {
    config.validate()?;

    if !config.adaptive {
        let kernel = oae_kernel(Band::High, config.oae_mu)?;
        return Ok(filter_matrix(spec, |_| kernel.clone()));
    }

    let (low, high) = split_bands(spec)?;
    let low_kernel = oae_kernel(Band::Low, config.oae_mu)?;
    let high_kernel = oae_kernel(Band::High, config.oae_mu)?;
    let low_out = filter_matrix(&low, |_| low_kernel.clone());
    let high_out = filter_matrix(&high, |_| high_kernel.clone());
    concat_bands(&low_out, &high_out)
}

/// Full engine: VAD on the raw input power, then the emission stage (when
/// enabled), then adaptive masking.
pub fn process(spec: &ComplexSpectrogram, config: &EngineConfig) -> Result<ComplexSpectrogram> {
    config.validate()?;

    let vad_track = if config.adaptive {
        track_noise(&spec.power(), &config.vad)?
    } else {
        VadTrack::from_speech_flags(vec![true; spec.frames])
    };

    let staged;
    let masked_input = if config.oae_enabled {
        staged = apply_oae(spec, config)?;
        &staged
    } else {
        spec
    };

    apply_adaptive(masked_input, &vad_track, config)
}

/// Convenience used by tests and the CLI: the four masking kernels keyed by
/// (band, speech).
pub fn kernel_bank(normalize: bool) -> [(Band, bool, MaskKernel); 4] {
    [
        (Band::Low, true, psycho_kernel(Band::Low, true, normalize)),
        (Band::Low, false, psycho_kernel(Band::Low, false, normalize)),
        (Band::High, true, psycho_kernel(Band::High, true, normalize)),
        (Band::High, false, psycho_kernel(Band::High, false, normalize)),
    ]
}

/// The emission kernels for both bands at the configured strength.
pub fn oae_bank(mu: f64) -> Result<(OaeKernel, OaeKernel)> {
    Ok((oae_kernel(Band::Low, mu)?, oae_kernel(Band::High, mu)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{DF_MAX, DF_MIN, DT_MAX};
    use proptest::prelude::*;

    fn rng_complex(seed: u64, i: usize) -> Complex64 {
        let h = |salt: u64| {
            let v = seed
                .wrapping_add(salt)
                .wrapping_mul(0x9E3779B97F4A7C15)
                .wrapping_add(i as u64 * 0xBF58476D1CE4E5B9)
                >> 11;
            (v % 20_000) as f64 / 10_000.0 - 1.0
        };
        Complex64::new(h(1), h(2))
    }

    fn random_spec(bins: usize, frames: usize, seed: u64) -> ComplexSpectrogram {
        let mut spec = ComplexSpectrogram::zeros(bins, frames, 8000, 80);
        for f in 0..bins {
            for t in 0..frames {
                spec.set(f, t, rng_complex(seed, f * frames + t));
            }
        }
        spec
    }

    fn engine(adaptive: bool) -> EngineConfig {
        EngineConfig {
            adaptive,
            ..EngineConfig::default()
        }
    }

    /// Independent brute-force evaluation of the correlation sum.
    fn brute_force_cell<G: MaskingGrid>(
        spec: &ComplexSpectrogram,
        kernel: &G,
        f: usize,
        t: usize,
    ) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for df in DF_MIN..=DF_MAX {
            for dt in 0..=DT_MAX {
                let fb = f as i64 + df as i64;
                let tb = t as i64 - dt as i64;
                if fb < 0 || fb >= spec.bins as i64 || tb < 0 {
                    continue;
                }
                acc += spec.at(fb as usize, tb as usize) * kernel.coeff(df, dt);
            }
        }
        acc
    }

    #[test]
    fn zero_input_stays_zero() {
        let spec = ComplexSpectrogram::zeros(16, 20, 8000, 80);
        let track = VadTrack::from_speech_flags(vec![false; 20]);
        let out = apply_adaptive(&spec, &track, &engine(true)).unwrap();
        assert!(out.data().iter().all(|c| c.norm() == 0.0));
        let out = process(&spec, &engine(true)).unwrap();
        assert!(out.data().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn impulse_center_tap_low_nonspeech() {
        let mut spec = ComplexSpectrogram::zeros(12, 10, 8000, 80);
        spec.set(4, 5, Complex64::new(1.0, 0.0));
        let kernel = psycho_kernel(Band::Low, false, false);
        let out = masking_sum(&spec, &kernel, 4, 5).unwrap();
        assert!((out.re - 4.0).abs() < 1e-15); // 1 + 3
        assert!(out.im.abs() < 1e-15);
    }

    #[test]
    fn masking_sum_bounds_are_checked() {
        let spec = ComplexSpectrogram::zeros(4, 4, 8000, 80);
        let kernel = psycho_kernel(Band::Low, true, true);
        assert!(masking_sum(&spec, &kernel, 4, 0).is_err());
        assert!(masking_sum(&spec, &kernel, 0, 4).is_err());
    }

    #[test]
    fn matches_brute_force_on_random_input() {
        let spec = random_spec(10, 20, 7);
        let kernel = psycho_kernel(Band::High, false, true);
        for f in 0..spec.bins {
            for t in 0..spec.frames {
                let got = masking_sum(&spec, &kernel, f, t).unwrap();
                let want = brute_force_cell(&spec, &kernel, f, t);
                assert!(
                    (got - want).norm() <= 1e-12 * want.norm().max(1e-30),
                    "cell ({f},{t})"
                );
            }
        }
    }

    #[test]
    fn split_is_floor_half_and_recombines_exactly() {
        for bins in [128usize, 129] {
            let spec = random_spec(bins, 6, 11);
            let (low, high) = split_bands(&spec).unwrap();
            assert_eq!(low.bins, bins / 2);
            assert_eq!(high.bins, bins - bins / 2);
            let back = concat_bands(&low, &high).unwrap();
            assert_eq!(back, spec);
        }
        assert_eq!(band_split(128).unwrap().low_rows, 0..64);
        assert_eq!(band_split(129).unwrap().high_rows, 64..129);
        assert!(band_split(1).is_err());
    }

    #[test]
    fn non_adaptive_uses_high_band_speech_kernel_globally() {
        let spec = random_spec(9, 12, 3);
        let track = VadTrack::from_speech_flags(vec![false; 12]);
        let out = apply_adaptive(&spec, &track, &engine(false)).unwrap();
        let kernel = psycho_kernel(Band::High, true, true);
        for f in 0..spec.bins {
            for t in 0..spec.frames {
                let want = masking_sum(&spec, &kernel, f, t).unwrap();
                assert_eq!(out.at(f, t), want);
            }
        }
    }

    #[test]
    fn zero_high_band_stays_zero() {
        let mut spec = random_spec(16, 10, 5);
        for f in 8..16 {
            for t in 0..10 {
                spec.set(f, t, Complex64::new(0.0, 0.0));
            }
        }
        let track = VadTrack::from_speech_flags(vec![true; 10]);
        let out = apply_adaptive(&spec, &track, &engine(true)).unwrap();
        for f in 8..16 {
            for t in 0..10 {
                assert_eq!(out.at(f, t).norm(), 0.0);
            }
        }
    }

    #[test]
    fn all_speech_track_equals_cellwise_sums_per_band() {
        let spec = random_spec(14, 16, 9);
        let track = VadTrack::from_speech_flags(vec![true; 16]);
        let cfg = engine(true);
        let out = apply_adaptive(&spec, &track, &cfg).unwrap();
        let (low, high) = split_bands(&spec).unwrap();
        let lk = psycho_kernel(Band::Low, true, true);
        let hk = psycho_kernel(Band::High, true, true);
        for f in 0..7 {
            for t in 0..16 {
                assert_eq!(out.at(f, t), masking_sum(&low, &lk, f, t).unwrap());
                assert_eq!(out.at(7 + f, t), masking_sum(&high, &hk, f, t).unwrap());
            }
        }
    }

    #[test]
    fn oae_mu_zero_is_identity() {
        let spec = random_spec(12, 9, 21);
        let cfg = EngineConfig {
            oae_mu: 0.0,
            ..engine(true)
        };
        let out = apply_oae(&spec, &cfg).unwrap();
        assert_eq!(out, spec);
    }

    #[test]
    fn oae_impulse_footprint_orientation() {
        let mut spec = ComplexSpectrogram::zeros(8, 8, 8000, 80);
        spec.set(2, 3, Complex64::new(1.0, 0.0));
        let cfg = EngineConfig {
            oae_mu: 1.0,
            ..engine(true)
        };
        let out = apply_oae(&spec, &cfg).unwrap();
        // the impulse itself passes through the unit center
        assert!((out.at(2, 3).re - 1.0).abs() < 1e-15);
        // one frame later the impulse acts as a past masker: +|Table value|
        assert!((out.at(2, 4).re - 0.4736).abs() < 1e-15);
        // one bin below the impulse (df = +1 looks upward from bin 1)
        assert!((out.at(1, 3).re - 0.0914).abs() < 1e-15);
    }

    #[test]
    fn process_composes_the_stages() {
        let spec = random_spec(16, 24, 33);
        let cfg = engine(true);
        let track = track_noise(&spec.power(), &cfg.vad).unwrap();
        let manual = apply_adaptive(&apply_oae(&spec, &cfg).unwrap(), &track, &cfg).unwrap();
        let auto = process(&spec, &cfg).unwrap();
        assert_eq!(manual, auto);

        let no_oae = EngineConfig {
            oae_enabled: false,
            ..cfg
        };
        let manual = apply_adaptive(&spec, &track, &no_oae).unwrap();
        assert_eq!(process(&spec, &no_oae).unwrap(), manual);
    }

    #[test]
    fn complex_split_equivalence_is_exact() {
        let spec = random_spec(12, 18, 17);
        let mut re_plane = ComplexSpectrogram::zeros(12, 18, 8000, 80);
        let mut im_plane = ComplexSpectrogram::zeros(12, 18, 8000, 80);
        for f in 0..12 {
            for t in 0..18 {
                re_plane.set(f, t, Complex64::new(spec.at(f, t).re, 0.0));
                im_plane.set(f, t, Complex64::new(spec.at(f, t).im, 0.0));
            }
        }
        let track = VadTrack::from_speech_flags((0..18).map(|t| t % 3 == 0).collect());
        let cfg = engine(true);
        let full = apply_adaptive(&spec, &track, &cfg).unwrap();
        let re_out = apply_adaptive(&re_plane, &track, &cfg).unwrap();
        let im_out = apply_adaptive(&im_plane, &track, &cfg).unwrap();
        for f in 0..12 {
            for t in 0..18 {
                assert_eq!(full.at(f, t).re.to_bits(), re_out.at(f, t).re.to_bits());
                assert_eq!(full.at(f, t).im.to_bits(), im_out.at(f, t).re.to_bits());
            }
        }
    }

    proptest! {
        #[test]
        fn frozen_vad_linearity(seed in 0u64..30, a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let x = random_spec(10, 14, seed);
            let y = random_spec(10, 14, seed ^ 0xFFFF);
            let mut combo = ComplexSpectrogram::zeros(10, 14, 8000, 80);
            for f in 0..10 {
                for t in 0..14 {
                    combo.set(f, t, x.at(f, t) * a + y.at(f, t) * b);
                }
            }
            let track = VadTrack::from_speech_flags((0..14).map(|t| t % 2 == 0).collect());
            let cfg = engine(true);
            let fx = apply_adaptive(&x, &track, &cfg).unwrap();
            let fy = apply_adaptive(&y, &track, &cfg).unwrap();
            let fc = apply_adaptive(&combo, &track, &cfg).unwrap();
            let mut err = 0.0f64;
            let mut norm = 0.0f64;
            for f in 0..10 {
                for t in 0..14 {
                    let want = fx.at(f, t) * a + fy.at(f, t) * b;
                    err += (fc.at(f, t) - want).norm_sqr();
                    norm += want.norm_sqr();
                }
            }
            prop_assert!(err.sqrt() <= 1e-9 * norm.sqrt().max(1e-30));
        }

        #[test]
        fn output_is_causal(seed in 0u64..30, t_perturb in 1usize..13) {
            let base = random_spec(8, 14, seed);
            let mut changed = base.clone();
            changed.set(3, t_perturb, changed.at(3, t_perturb) + Complex64::new(1.0, -2.0));
            let track = VadTrack::from_speech_flags(vec![true; 14]);
            let cfg = engine(true);
            let a = apply_adaptive(&base, &track, &cfg).unwrap();
            let b = apply_adaptive(&changed, &track, &cfg).unwrap();
            for f in 0..8 {
                for t in 0..t_perturb {
                    prop_assert_eq!(a.at(f, t), b.at(f, t));
                }
            }
        }
    }
}
