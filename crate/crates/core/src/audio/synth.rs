//! Deterministic synthetic clip generation.
//!
//! Stands in for a real song dataset at desk scale: four recipes with
//! clearly separable timbre, tempo, and harmonic signatures. A clip is a
//! pure function of (spec, seed, duration, sample rate).

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{write_wav, AudioBuffer, AudioError};

/// Peak amplitude of every synthesized clip (about -26 dBFS).
///
/// Kept low on purpose: none of the grid's makeup-0 compressor settings
/// reaches below -20 dBFS, so those settings are exact no-ops on synthetic
/// data and give the sweep a built-in identity check.
pub const SYNTH_PEAK: f64 = 0.05;

/// Fade-in/fade-out applied to the sustained recipes to avoid edge clicks.
const FADE_SECS: f64 = 0.05;

/// How a synthetic "genre" sounds. Each range is sampled per clip seed.
#[derive(Debug, Clone, PartialEq)]
pub enum Recipe {
    /// White-ish noise run through a one-pole lowpass whose coefficient is
    /// drawn from `smooth` (0 = white).
    Noise { smooth: (f64, f64) },
    /// Sustained major chord (root, major third, fifth) with a slow tremolo:
    /// stable tonal centroid and a clean low tempo from the tremolo rate.
    ChordPad {
        root_hz: (f64, f64),
        tremolo_hz: (f64, f64),
    },
    /// Short decaying noise bursts on a strict metronome grid.
    ClickTrain { bpm: (f64, f64) },
    /// Exponential frequency sweep across `octaves`, restarting each clip.
    Chirp {
        start_hz: (f64, f64),
        octaves: (f64, f64),
    },
}

/// A named synthetic genre.
#[derive(Debug, Clone, PartialEq)]
pub struct GenreSpec {
    pub name: String,
    pub recipe: Recipe,
}

impl GenreSpec {
    /// Builds a spec from a recipe kind name with that recipe's default
    /// parameter ranges. Unknown kinds are rejected.
    pub fn from_kind(name: &str, kind: &str) -> Result<Self, AudioError> {
        let recipe = match kind {
            "noise" => Recipe::Noise { smooth: (0.0, 0.6) },
            "pad" => Recipe::ChordPad {
                root_hz: (196.0, 392.0),
                tremolo_hz: (0.9, 1.1),
            },
            "clicks" => Recipe::ClickTrain { bpm: (90.0, 150.0) },
            "chirp" => Recipe::Chirp {
                start_hz: (200.0, 600.0),
                octaves: (2.0, 3.0),
            },
            other => return Err(AudioError::UnknownRecipe(other.to_string())),
        };
        Ok(Self {
            name: name.to_string(),
            recipe,
        })
    }
}

/// The four-genre desk-scale dataset definition.
pub fn default_genres() -> Vec<GenreSpec> {
    ["noise", "pad", "clicks", "chirp"]
        .iter()
        .map(|kind| GenreSpec::from_kind(kind, kind).expect("built-in kinds are known"))
        .collect()
}

fn draw(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    rng.random_range(range.0..=range.1)
}

fn apply_fade(samples: &mut [f64], sample_rate: u32) {
    let fade = ((FADE_SECS * sample_rate as f64) as usize).min(samples.len() / 2);
    for i in 0..fade {
        let g = 0.5 * (1.0 - (TAU / 2.0 * i as f64 / fade as f64).cos());
        samples[i] *= g;
        let j = samples.len() - 1 - i;
        samples[j] *= g;
    }
}

fn normalize_peak(samples: &mut [f64]) {
    let peak = samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if peak > 0.0 {
        let scale = SYNTH_PEAK / peak;
        for s in samples.iter_mut() {
            *s *= scale;
        }
    }
}

/// Synthesizes one clip; bit-identical for identical arguments.
pub fn synth_clip(
    spec: &GenreSpec,
    seed: u64,
    duration_secs: f64,
    sample_rate: u32,
) -> AudioBuffer {
    assert!(duration_secs > 0.0, "duration must be positive");
    assert!(sample_rate > 0, "sample rate must be positive");
    let n = (duration_secs * sample_rate as f64).round() as usize;
    let dt = 1.0 / sample_rate as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = vec![0.0f64; n];

    match &spec.recipe {
        Recipe::Noise { smooth } => {
            let a = draw(&mut rng, *smooth).clamp(0.0, 0.999);
            let mut state = 0.0;
            for s in samples.iter_mut() {
                let white: f64 = rng.random_range(-1.0..=1.0);
                state = a * state + (1.0 - a) * white;
                *s = state;
            }
            apply_fade(&mut samples, sample_rate);
        }
        Recipe::ChordPad {
            root_hz,
            tremolo_hz,
        } => {
            let root = draw(&mut rng, *root_hz);
            let trem = draw(&mut rng, *tremolo_hz);
            // Root, major third (+4 semitones), perfect fifth (+7).
            let freqs = [root, root * 2f64.powf(4.0 / 12.0), root * 2f64.powf(7.0 / 12.0)];
            let phases: Vec<f64> = freqs.iter().map(|_| rng.random_range(0.0..TAU)).collect();
            const TREM_DEPTH: f64 = 0.8;
            for (i, s) in samples.iter_mut().enumerate() {
                let t = i as f64 * dt;
                let tone: f64 = freqs
                    .iter()
                    .zip(&phases)
                    .map(|(f, p)| (TAU * f * t + p).sin())
                    .sum();
                let env = 1.0 - 0.5 * TREM_DEPTH * (1.0 - (TAU * trem * t).cos());
                *s = tone * env / freqs.len() as f64;
            }
            apply_fade(&mut samples, sample_rate);
        }
        Recipe::ClickTrain { bpm } => {
            let tempo = draw(&mut rng, *bpm);
            let period = 60.0 / tempo;
            let burst_len = ((0.008 * sample_rate as f64) as usize).max(1);
            let decay_tau = 0.002;
            let mut k = 0usize;
            loop {
                let start = (k as f64 * period * sample_rate as f64).round() as usize;
                if start >= n {
                    break;
                }
                for j in 0..burst_len.min(n - start) {
                    let t = j as f64 * dt;
                    samples[start + j] = rng.random_range(-1.0..=1.0) * (-t / decay_tau).exp();
                }
                k += 1;
            }
        }
        Recipe::Chirp { start_hz, octaves } => {
            let f0 = draw(&mut rng, *start_hz);
            let oct = draw(&mut rng, *octaves);
            let span = duration_secs;
            // Phase of an exponential sweep f(t) = f0 * 2^(oct * t / span).
            let k = oct / span * std::f64::consts::LN_2;
            for (i, s) in samples.iter_mut().enumerate() {
                let t = i as f64 * dt;
                let phase = TAU * f0 * ((k * t).exp() - 1.0) / k;
                *s = phase.sin();
            }
            apply_fade(&mut samples, sample_rate);
        }
    }

    normalize_peak(&mut samples);
    AudioBuffer::new_unchecked(samples, sample_rate)
}

/// Per-clip seed derivation: independent of how many genres or clips exist.
fn clip_seed(dataset_seed: u64, genre_idx: usize, clip_idx: usize) -> u64 {
    let mut x = dataset_seed
        ^ (genre_idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (clip_idx as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    // splitmix64 finalizer
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Writes a `<root>/<genre>/<genre>.<index>.wav` dataset and returns the
/// number of clips written.
pub fn generate_dataset(
    root: &Path,
    specs: &[GenreSpec],
    clips_per_genre: usize,
    duration_secs: f64,
    sample_rate: u32,
    seed: u64,
) -> Result<usize, AudioError> {
    let mut names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    assert_eq!(names.len(), specs.len(), "genre names must be unique");
    let mut written = 0usize;
    for (g, spec) in specs.iter().enumerate() {
        let dir = root.join(&spec.name);
        fs::create_dir_all(&dir).map_err(|e| AudioError::Io {
            path: dir.clone(),
            source: e,
        })?;
        for c in 0..clips_per_genre {
            let clip = synth_clip(spec, clip_seed(seed, g, c), duration_secs, sample_rate);
            let path = dir.join(format!("{}.{:05}.wav", spec.name, c));
            write_wav(&clip, &path)?;
            written += 1;
        }
    }
    Ok(written)
}
