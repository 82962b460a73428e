//! Noise generation and SNR-controlled mixing.

use rand::Rng;

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Samples quieter than this are treated as silence when measuring the
/// clean signal's power.
const ACTIVE_AMPLITUDE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    White,
    Pink,
    /// Sum of modulated speech-shaped noise sources.
    BabbleSynth,
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "white" => Ok(NoiseKind::White),
            "pink" => Ok(NoiseKind::Pink),
            "babble" | "babble_synth" => Ok(NoiseKind::BabbleSynth),
            other => Err(Error::InvalidArgument(format!(
                "unknown noise kind '{other}' (expected white, pink, or babble)"
            ))),
        }
    }
}

/// Mixing request: target SNR plus the noise source to draw from.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrSpec {
    /// Target SNR in dB; +inf means "leave the signal clean".
    pub snr_db: f64,
    pub noise_kind: NoiseKind,
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller on explicit uniforms keeps the draw sequence portable.
    loop {
        let u1: f64 = rng.gen();
        if u1 > 1e-300 {
            let u2: f64 = rng.gen();
            return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
    }
}

/// Generate unit-scale noise of the requested kind; the mixer rescales it.
pub fn generate_noise(kind: NoiseKind, len: usize, sample_rate: u32, rng: &mut impl Rng) -> Signal {
    let samples = match kind {
        NoiseKind::White => (0..len).map(|_| gaussian(rng)).collect(),
        NoiseKind::Pink => {
            // Paul Kellet's economy pink filter over white Gaussian input.
            let mut b0 = 0.0;
            let mut b1 = 0.0;
            let mut b2 = 0.0;
            (0..len)
                .map(|_| {
                    let w = gaussian(rng);
                    b0 = 0.99765 * b0 + w * 0.0990460;
                    b1 = 0.96300 * b1 + w * 0.2965164;
                    b2 = 0.57000 * b2 + w * 1.0526913;
                    (b0 + b1 + b2 + w * 0.1848) * 0.25
                })
                .collect()
        }
        NoiseKind::BabbleSynth => {
            let mut sum = vec![0.0f64; len];
            for _ in 0..8 {
                // speech-shaped: one-pole lowpass around 500 Hz
                let pole = (-2.0 * std::f64::consts::PI * 500.0 / sample_rate as f64).exp();
                let rate = rng.gen_range(2.0..6.0); // syllabic modulation, Hz
                let phase = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
                let mut state = 0.0;
                for (i, slot) in sum.iter_mut().enumerate() {
                    let w = gaussian(rng);
                    state = pole * state + (1.0 - pole) * w;
                    let t = i as f64 / sample_rate as f64;
                    let env =
                        0.55 + 0.45 * (2.0 * std::f64::consts::PI * rate * t + phase).sin();
                    *slot += state * env;
                }
            }
            for s in &mut sum {
                *s /= 8.0f64.sqrt();
            }
            sum
        }
    };
    Signal {
        samples,
        sample_rate,
    }
}

/// Scale the noise so the clean signal's active-region power over the noise
/// power hits the requested SNR, then sum. Noise shorter than the clean
/// signal is tiled. `snr_db = +inf` returns the clean signal unchanged.
pub fn mix_at_snr(clean: &Signal, noise: &Signal, snr_db: f64) -> Result<Signal> {
    if snr_db == f64::INFINITY {
        return Ok(clean.clone());
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidArgument(format!("snr {snr_db} dB is not finite")));
    }
    if clean.is_empty() {
        return Err(Error::EmptyInput("clean signal is empty"));
    }
    if noise.is_empty() {
        return Err(Error::EmptyInput("noise signal is empty"));
    }
    if clean.sample_rate != noise.sample_rate {
        return Err(Error::InvalidArgument(format!(
            "sample rate mismatch: clean {} Hz vs noise {} Hz",
            clean.sample_rate, noise.sample_rate
        )));
    }

    let active: Vec<f64> = clean
        .samples
        .iter()
        .copied()
        .filter(|s| s.abs() > ACTIVE_AMPLITUDE_FLOOR)
        .collect();
    if active.is_empty() {
        return Err(Error::InvalidArgument("clean signal has zero power".into()));
    }
    let p_clean = active.iter().map(|s| s * s).sum::<f64>() / active.len() as f64;

    let tiled: Vec<f64> = noise
        .samples
        .iter()
        .cycle()
        .take(clean.len())
        .copied()
        .collect();
    let p_noise = tiled.iter().map(|s| s * s).sum::<f64>() / tiled.len() as f64;
    if p_noise <= 0.0 {
        return Err(Error::InvalidArgument("noise signal has zero power".into()));
    }

    let scale = (p_clean / (p_noise * 10f64.powf(snr_db / 10.0))).sqrt();
    let samples = clean
        .samples
        .iter()
        .zip(&tiled)
        .map(|(c, n)| c + scale * n)
        .collect();
    Ok(Signal {
        samples,
        sample_rate: clean.sample_rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tone(len: usize) -> Signal {
        let samples = (0..len)
            .map(|i| 0.4 * (2.0 * std::f64::consts::PI * 440.0 * i as f64 / 8000.0).sin())
            .collect();
        Signal {
            samples,
            sample_rate: 8000,
        }
    }

    fn measured_snr_db(mix: &Signal, clean: &Signal) -> f64 {
        let noise: Vec<f64> = mix
            .samples
            .iter()
            .zip(&clean.samples)
            .map(|(m, c)| m - c)
            .collect();
        let pn = noise.iter().map(|s| s * s).sum::<f64>() / noise.len() as f64;
        10.0 * (clean.power() / pn).log10()
    }

    #[test]
    fn zero_db_matches_powers_exactly() {
        let clean = tone(8000);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let noise = generate_noise(NoiseKind::White, 8000, 8000, &mut rng);
        let mix = mix_at_snr(&clean, &noise, 0.0).unwrap();
        let scaled: Vec<f64> = mix
            .samples
            .iter()
            .zip(&clean.samples)
            .map(|(m, c)| m - c)
            .collect();
        let pn = scaled.iter().map(|s| s * s).sum::<f64>() / scaled.len() as f64;
        assert!((pn - clean.power()).abs() < 1e-9 * clean.power());
    }

    #[test]
    fn infinite_snr_returns_clean() {
        let clean = tone(1000);
        let noise = tone(1000);
        let mix = mix_at_snr(&clean, &noise, f64::INFINITY).unwrap();
        assert_eq!(mix, clean);
    }

    #[test]
    fn twenty_db_means_hundredth_power() {
        let clean = tone(8000);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let noise = generate_noise(NoiseKind::Pink, 8000, 8000, &mut rng);
        let mix = mix_at_snr(&clean, &noise, 20.0).unwrap();
        assert!((measured_snr_db(&mix, &clean) - 20.0).abs() < 0.01);
    }

    #[test]
    fn requested_snr_is_recovered_within_a_centibel() {
        let clean = tone(16000);
        for kind in [NoiseKind::White, NoiseKind::Pink, NoiseKind::BabbleSynth] {
            for snr in [-5.0, 0.0, 10.0] {
                let mut rng = ChaCha8Rng::seed_from_u64(99);
                let noise = generate_noise(kind, 4000, 8000, &mut rng); // forces tiling
                let mix = mix_at_snr(&clean, &noise, snr).unwrap();
                assert!(
                    (measured_snr_db(&mix, &clean) - snr).abs() < 0.01,
                    "{kind:?} at {snr} dB"
                );
            }
        }
    }

    #[test]
    fn zero_power_clean_is_rejected() {
        let clean = Signal {
            samples: vec![0.0; 100],
            sample_rate: 8000,
        };
        let noise = tone(100);
        assert!(mix_at_snr(&clean, &noise, 0.0).is_err());
    }

    #[test]
    fn noise_draws_are_seed_deterministic() {
        let a = generate_noise(NoiseKind::BabbleSynth, 500, 8000, &mut ChaCha8Rng::seed_from_u64(5));
        let b = generate_noise(NoiseKind::BabbleSynth, 500, 8000, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
    }
}
