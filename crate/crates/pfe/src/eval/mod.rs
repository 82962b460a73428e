//! Desk-scale evaluation harness: runs the reference and proposed front
//! ends over a template-matching task across SNR conditions and reports
//! accuracies, relative improvements, and effect sizes.

pub mod dtw;
pub mod noise;
pub mod rasta;
pub mod stats;
pub mod synth;

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::pipeline::{extract_features, PipelineConfig};
use crate::signal::Signal;
use dtw::dtw_classify;
use noise::{generate_noise, mix_at_snr, NoiseKind};
use stats::{cohens_d, relative_improvement};
use synth::{make_templates, make_test_items, SynthTaskConfig};

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub master_seed: u64,
    /// Independent evaluation rounds; accuracies are averaged across them.
    pub n_seeds: usize,
    /// SNR grid in dB; +inf is the clean condition.
    pub snrs_db: Vec<f64>,
    pub noise: NoiseKind,
    pub task: SynthTaskConfig,
    pub baseline: PipelineConfig,
    pub proposed: PipelineConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            n_seeds: 20,
            snrs_db: default_snr_grid(),
            noise: NoiseKind::White,
            task: SynthTaskConfig::default(),
            baseline: PipelineConfig::baseline_mfcc39(),
            proposed: PipelineConfig::proposed(),
        }
    }
}

/// The published condition grid: clean plus 20 down to -5 dB.
pub fn default_snr_grid() -> Vec<f64> {
    vec![f64::INFINITY, 20.0, 15.0, 10.0, 5.0, 0.0, -5.0]
}

pub fn condition_label(snr_db: f64) -> String {
    if snr_db == f64::INFINITY {
        "clean".to_string()
    } else if snr_db.fract() == 0.0 {
        format!("{}", snr_db as i64)
    } else {
        format!("{snr_db:.1}")
    }
}

#[derive(Debug, Clone)]
pub struct ConditionResult {
    pub label: String,
    pub snr_db: f64,
    /// Mean accuracy over seeds, percent.
    pub baseline_acc: f64,
    pub proposed_acc: f64,
    pub relative_improvement_pct: Option<f64>,
    pub cohens_d: Option<f64>,
    pub baseline_by_seed: Vec<f64>,
    pub proposed_by_seed: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub conditions: Vec<ConditionResult>,
    /// Mean accuracy over the 0..=20 dB conditions (baseline, proposed),
    /// when any are present.
    pub avg_0_20: Option<(f64, f64)>,
}

impl EvalReport {
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(
            w,
            "condition,baseline_acc,proposed_acc,rel_improvement_pct,cohens_d"
        )?;
        for c in &self.conditions {
            writeln!(
                w,
                "{},{:.4},{:.4},{},{}",
                c.label,
                c.baseline_acc,
                c.proposed_acc,
                c.relative_improvement_pct
                    .map_or("na".to_string(), |v| format!("{v:.4}")),
                c.cohens_d.map_or("na".to_string(), format_effect),
            )?;
        }
        if let Some((b, p)) = self.avg_0_20 {
            let rel = relative_improvement(p, b)
                .map_or("na".to_string(), |v| format!("{v:.4}"));
            writeln!(w, "avg_0_20,{b:.4},{p:.4},{rel},na")?;
        }
        Ok(())
    }

    pub fn write_table<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(
            w,
            "{:>10} {:>14} {:>14} {:>12} {:>10}",
            "condition", "baseline %", "proposed %", "rel imp %", "cohen d"
        )?;
        for c in &self.conditions {
            writeln!(
                w,
                "{:>10} {:>14.2} {:>14.2} {:>12} {:>10}",
                c.label,
                c.baseline_acc,
                c.proposed_acc,
                c.relative_improvement_pct
                    .map_or("na".to_string(), |v| format!("{v:.2}")),
                c.cohens_d.map_or("na".to_string(), format_effect),
            )?;
        }
        if let Some((b, p)) = self.avg_0_20 {
            let rel = relative_improvement(p, b)
                .map_or("na".to_string(), |v| format!("{v:.2}"));
            writeln!(w, "{:>10} {b:>14.2} {p:>14.2} {rel:>12} {:>10}", "avg 0-20", "")?;
        }
        Ok(())
    }
}

fn format_effect(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:.4}")
    }
}

fn mix_seed(parts: &[u64]) -> u64 {
    let mut h = 0x9E3779B97F4A7C15u64;
    for &p in parts {
        h ^= p.wrapping_add(0x9E3779B97F4A7C15)
            .wrapping_add(h << 6)
            .wrapping_add(h >> 2);
        h = h.wrapping_mul(0xBF58476D1CE4E5B9);
        h ^= h >> 31;
    }
    h
}

struct PreparedTemplates {
    baseline: Vec<(String, FeatureMatrix)>,
    proposed: Vec<(String, FeatureMatrix)>,
}

fn prepare_templates(
    templates: &[(String, Signal)],
    config: &EvalConfig,
) -> Result<PreparedTemplates> {
    let run = |pipe: &PipelineConfig| -> Result<Vec<(String, FeatureMatrix)>> {
        templates
            .iter()
            .map(|(label, sig)| Ok((label.clone(), extract_features(sig, pipe)?)))
            .collect()
    };
    Ok(PreparedTemplates {
        baseline: run(&config.baseline)?,
        proposed: run(&config.proposed)?,
    })
}

/// Run the evaluation over explicit template and per-round test items.
/// `items_for_round` supplies the labeled test signals for each seed round.
fn run_eval(
    templates: &[(String, Signal)],
    config: &EvalConfig,
    mut items_for_round: impl FnMut(usize) -> Result<Vec<(String, Signal)>>,
) -> Result<EvalReport> {
    if templates.is_empty() {
        return Err(Error::EmptyInput("evaluation needs at least one template"));
    }
    if config.n_seeds == 0 {
        return Err(Error::InvalidArgument("n_seeds must be >= 1".into()));
    }
    if config.snrs_db.is_empty() {
        return Err(Error::InvalidArgument("need at least one SNR condition".into()));
    }

    let prepared = prepare_templates(templates, config)?;
    let n_cond = config.snrs_db.len();
    let mut baseline_by_seed = vec![Vec::with_capacity(config.n_seeds); n_cond];
    let mut proposed_by_seed = vec![Vec::with_capacity(config.n_seeds); n_cond];

    for round in 0..config.n_seeds {
        let items = items_for_round(round)?;
        if items.is_empty() {
            return Err(Error::EmptyInput("evaluation round produced no test items"));
        }
        for (ci, &snr) in config.snrs_db.iter().enumerate() {
            let mut correct_base = 0usize;
            let mut correct_prop = 0usize;
            for (ii, (label, signal)) in items.iter().enumerate() {
                let noisy = if snr == f64::INFINITY {
                    signal.clone()
                } else {
                    let seed = mix_seed(&[
                        config.master_seed,
                        round as u64,
                        ci as u64,
                        ii as u64,
                    ]);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let noise =
                        generate_noise(config.noise, signal.len(), signal.sample_rate, &mut rng);
                    mix_at_snr(signal, &noise, snr)?
                };

                let base_feats = extract_features(&noisy, &config.baseline)?;
                if dtw_classify(&base_feats, &prepared.baseline)? == label {
                    correct_base += 1;
                }
                let prop_feats = extract_features(&noisy, &config.proposed)?;
                if dtw_classify(&prop_feats, &prepared.proposed)? == label {
                    correct_prop += 1;
                }
            }
            let n = items.len() as f64;
            baseline_by_seed[ci].push(correct_base as f64 / n * 100.0);
            proposed_by_seed[ci].push(correct_prop as f64 / n * 100.0);
        }
    }

    let mut conditions = Vec::with_capacity(n_cond);
    for (ci, &snr) in config.snrs_db.iter().enumerate() {
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let b = mean(&baseline_by_seed[ci]);
        let p = mean(&proposed_by_seed[ci]);
        conditions.push(ConditionResult {
            label: condition_label(snr),
            snr_db: snr,
            baseline_acc: b,
            proposed_acc: p,
            relative_improvement_pct: relative_improvement(p, b).ok(),
            cohens_d: cohens_d(&proposed_by_seed[ci], &baseline_by_seed[ci]).ok(),
            baseline_by_seed: baseline_by_seed[ci].clone(),
            proposed_by_seed: proposed_by_seed[ci].clone(),
        });
    }

    let in_band: Vec<&ConditionResult> = conditions
        .iter()
        .filter(|c| c.snr_db.is_finite() && (0.0..=20.0).contains(&c.snr_db))
        .collect();
    let avg_0_20 = if in_band.is_empty() {
        None
    } else {
        let n = in_band.len() as f64;
        Some((
            in_band.iter().map(|c| c.baseline_acc).sum::<f64>() / n,
            in_band.iter().map(|c| c.proposed_acc).sum::<f64>() / n,
        ))
    };

    Ok(EvalReport {
        conditions,
        avg_0_20,
    })
}

/// Synthetic-task evaluation: canonical templates, re-jittered test items
/// per round, noise drawn per (round, condition, item).
pub fn run_synthetic_eval(config: &EvalConfig) -> Result<EvalReport> {
    config.task.validate()?;
    let templates = make_templates(&config.task)?;
    run_eval(&templates, config, |round| {
        let seed = mix_seed(&[config.master_seed, 0xC0FFEE, round as u64]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        make_test_items(&config.task, &mut rng)
    })
}

/// Manifest-driven evaluation over recorded signals: the same test items
/// every round, only the noise draws differ.
pub fn run_signal_eval(
    templates: &[(String, Signal)],
    tests: &[(String, Signal)],
    config: &EvalConfig,
) -> Result<EvalReport> {
    if tests.is_empty() {
        return Err(Error::EmptyInput("evaluation needs at least one test item"));
    }
    run_eval(templates, config, |_| Ok(tests.to_vec()))
}

/// A parsed evaluation manifest: labeled template and test entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub templates: Vec<(String, String)>,
    pub tests: Vec<(String, String)>,
}

/// Parse the sectioned manifest format:
///
/// ```text
/// [templates]
/// label path/to/file.wav
/// [tests]
/// label path/to/other.wav
/// ```
pub fn parse_manifest(text: &str) -> Result<Manifest> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Templates,
        Tests,
    }
    let mut section = Section::None;
    let mut manifest = Manifest::default();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line {
            "[templates]" => section = Section::Templates,
            "[tests]" => section = Section::Tests,
            _ => {
                let (label, path) = line.split_once(char::is_whitespace).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "manifest line {}: expected 'label path', got '{line}'",
                        lineno + 1
                    ))
                })?;
                let entry = (label.to_string(), path.trim().to_string());
                match section {
                    Section::Templates => manifest.templates.push(entry),
                    Section::Tests => manifest.tests.push(entry),
                    Section::None => {
                        return Err(Error::InvalidArgument(format!(
                            "manifest line {}: entry before any [templates]/[tests] section",
                            lineno + 1
                        )))
                    }
                }
            }
        }
    }

    if manifest.templates.is_empty() {
        return Err(Error::InvalidArgument(
            "manifest has no [templates] entries".into(),
        ));
    }
    if manifest.tests.is_empty() {
        return Err(Error::InvalidArgument("manifest has no [tests] entries".into()));
    }
    Ok(manifest)
}
