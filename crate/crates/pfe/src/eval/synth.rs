//! Synthetic multi-tone "word" task: a small closed-vocabulary corpus with
//! controllable speaker-style jitter, standing in for licensed digit data.

use rand::Rng;

use crate::error::{Error, Result};
use crate::signal::Signal;

/// Syllable target frequencies (Hz) per class. Several classes share
/// syllables in different orders so the task is not trivially separable.
const WORD_PATTERNS: [[f64; 3]; 10] = [
    [500.0, 1000.0, 1500.0],
    [1500.0, 1000.0, 500.0],
    [500.0, 1500.0, 1000.0],
    [1000.0, 500.0, 1500.0],
    [1000.0, 1500.0, 500.0],
    [1500.0, 500.0, 1000.0],
    [700.0, 700.0, 2000.0],
    [2000.0, 700.0, 700.0],
    [700.0, 2000.0, 2000.0],
    [2000.0, 2000.0, 700.0],
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthTaskConfig {
    /// Number of word classes (at most 10).
    pub n_classes: usize,
    /// Jittered test utterances generated per class per evaluation round.
    pub tests_per_class: usize,
    pub sample_rate: u32,
    /// Nominal syllable duration in milliseconds.
    pub syllable_ms: f64,
    /// Silent gap between syllables in milliseconds.
    pub gap_ms: f64,
    pub amplitude: f64,
}

impl Default for SynthTaskConfig {
    fn default() -> Self {
        Self {
            n_classes: 10,
            tests_per_class: 2,
            sample_rate: 8000,
            syllable_ms: 120.0,
            gap_ms: 20.0,
            amplitude: 0.3,
        }
    }
}

impl SynthTaskConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_classes == 0 || self.n_classes > WORD_PATTERNS.len() {
            return Err(Error::InvalidArgument(format!(
                "n_classes must be in 1..={}, got {}",
                WORD_PATTERNS.len(),
                self.n_classes
            )));
        }
        if self.tests_per_class == 0 {
            return Err(Error::InvalidArgument("tests_per_class must be >= 1".into()));
        }
        Ok(())
    }
}

pub fn class_label(class: usize) -> String {
    format!("word{class:02}")
}

/// Per-utterance speaker-style variation.
#[derive(Debug, Clone, Copy)]
pub struct WordJitter {
    pub pitch: f64,
    pub durations: [f64; 3],
    pub amplitude: f64,
}

impl WordJitter {
    /// The canonical rendition used for templates.
    pub fn canonical() -> Self {
        Self {
            pitch: 1.0,
            durations: [1.0; 3],
            amplitude: 1.0,
        }
    }

    pub fn random(rng: &mut impl Rng) -> Self {
        Self {
            pitch: rng.gen_range(0.92..1.08),
            durations: [
                rng.gen_range(0.85..1.15),
                rng.gen_range(0.85..1.15),
                rng.gen_range(0.85..1.15),
            ],
            amplitude: rng.gen_range(0.6..1.0),
        }
    }
}

/// Render one word: three tone syllables with a slight upward glide, 10 ms
/// raised-cosine edges, and silent gaps in between.
pub fn synth_word(class: usize, config: &SynthTaskConfig, jitter: &WordJitter) -> Result<Signal> {
    config.validate()?;
    if class >= config.n_classes {
        return Err(Error::InvalidArgument(format!(
            "class {class} out of range (n_classes = {})",
            config.n_classes
        )));
    }

    let fs = config.sample_rate as f64;
    let gap_len = (config.gap_ms / 1000.0 * fs).round() as usize;
    let ramp_len = (0.010 * fs).round() as usize;
    let mut samples = Vec::new();

    for (syl, &base_freq) in WORD_PATTERNS[class].iter().enumerate() {
        let freq = base_freq * jitter.pitch;
        let len = (config.syllable_ms * jitter.durations[syl] / 1000.0 * fs).round() as usize;
        let mut phase = 0.0f64;
        for i in 0..len {
            // glide from 3% below to 3% above the target
            let sweep = freq * (0.97 + 0.06 * i as f64 / len.max(1) as f64);
            phase += 2.0 * std::f64::consts::PI * sweep / fs;
            let mut env = 1.0;
            if i < ramp_len {
                env = 0.5 - 0.5 * (std::f64::consts::PI * i as f64 / ramp_len as f64).cos();
            }
            if len - 1 - i < ramp_len {
                let j = len - 1 - i;
                env = env.min(0.5 - 0.5 * (std::f64::consts::PI * j as f64 / ramp_len as f64).cos());
            }
            samples.push(config.amplitude * jitter.amplitude * env * phase.sin());
        }
        if syl + 1 < WORD_PATTERNS[class].len() {
            samples.extend(std::iter::repeat(0.0).take(gap_len));
        }
    }

    Signal::new(samples, config.sample_rate)
}

/// Canonical template renditions, one per class.
pub fn make_templates(config: &SynthTaskConfig) -> Result<Vec<(String, Signal)>> {
    (0..config.n_classes)
        .map(|c| Ok((class_label(c), synth_word(c, config, &WordJitter::canonical())?)))
        .collect()
}

/// A round of jittered test utterances, `tests_per_class` per class.
pub fn make_test_items(
    config: &SynthTaskConfig,
    rng: &mut impl Rng,
) -> Result<Vec<(String, Signal)>> {
    let mut items = Vec::with_capacity(config.n_classes * config.tests_per_class);
    for class in 0..config.n_classes {
        for _ in 0..config.tests_per_class {
            let jitter = WordJitter::random(rng);
            items.push((class_label(class), synth_word(class, config, &jitter)?));
        }
    }
    Ok(items)
}
