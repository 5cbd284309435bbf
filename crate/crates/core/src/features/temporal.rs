//! Zero-crossing rate and autocorrelation tempo estimation.

use super::spectrum::{stft_power, FrameSpec};
use super::FeatureError;
use crate::audio::AudioBuffer;

/// Minimum clip length for tempo estimation, seconds.
pub const MIN_TEMPO_SECS: f64 = 2.0;

/// Fraction of adjacent sample pairs whose product is negative.
///
/// A product of exactly zero does not count as a crossing.
pub fn zero_crossing_rate(buffer: &AudioBuffer) -> Result<f64, FeatureError> {
    let s = buffer.samples();
    if s.len() < 2 {
        return Err(FeatureError::ClipTooShort {
            needed: 2,
            got: s.len(),
        });
    }
    let crossings = s.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    Ok(crossings as f64 / (s.len() - 1) as f64)
}

/// Tempo estimate; `fallback` is set when the input carried no onset energy
/// and the band midpoint was substituted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TempoEstimate {
    pub bpm: f64,
    pub fallback: bool,
}

/// Half-wave-rectified spectral flux per frame (magnitude differences).
/// The first frame has no predecessor and gets flux 0.
pub(crate) fn onset_envelope(spectra: &[Vec<f64>]) -> Vec<f64> {
    let mut env = Vec::with_capacity(spectra.len());
    env.push(0.0);
    for pair in spectra.windows(2) {
        let flux: f64 = pair[0]
            .iter()
            .zip(&pair[1])
            .map(|(&prev, &cur)| (cur.sqrt() - prev.sqrt()).max(0.0))
            .sum();
        env.push(flux);
    }
    env
}

/// Onset analysis runs at half the feature hop: each onset then spreads
/// over enough envelope frames that a beat period falling between two
/// integer lags keeps its autocorrelation mass together, which is what lets
/// the true period win over its half-tempo subharmonic.
fn onset_frame_spec(spec: &FrameSpec) -> FrameSpec {
    FrameSpec {
        frame_len: spec.frame_len,
        hop_len: (spec.hop_len / 2).max(1),
        window: spec.window,
    }
}

/// Estimates tempo from the onset-strength envelope's autocorrelation.
///
/// The envelope is mean-subtracted, autocorrelated over the lag range of the
/// BPM band, and the winning lag is refined by parabolic interpolation.
/// Silent input falls back to the band midpoint with `fallback` set.
pub fn estimate_tempo(
    buffer: &AudioBuffer,
    spec: &FrameSpec,
    band_bpm: (f64, f64),
) -> Result<TempoEstimate, FeatureError> {
    let needed = (MIN_TEMPO_SECS * buffer.sample_rate() as f64) as usize;
    if buffer.len() < needed {
        return Err(FeatureError::ClipTooShort {
            needed,
            got: buffer.len(),
        });
    }
    let onset_spec = onset_frame_spec(spec);
    let spectra = stft_power(buffer, &onset_spec)?;
    let env = onset_envelope(&spectra);
    Ok(tempo_from_envelope(
        &env,
        onset_spec.frame_rate(buffer.sample_rate()),
        band_bpm,
    ))
}

pub(crate) fn tempo_from_envelope(env: &[f64], frame_rate: f64, band_bpm: (f64, f64)) -> TempoEstimate {
    let (lo_bpm, hi_bpm) = band_bpm;
    assert!(lo_bpm > 0.0 && hi_bpm > lo_bpm, "invalid BPM band");
    let fallback = TempoEstimate {
        bpm: (lo_bpm + hi_bpm) / 2.0,
        fallback: true,
    };

    let n = env.len();
    let min_lag = ((60.0 * frame_rate / hi_bpm).floor() as usize).max(1);
    let max_lag = ((60.0 * frame_rate / lo_bpm).ceil() as usize).min(n.saturating_sub(2));
    if min_lag >= max_lag {
        return fallback;
    }

    // A period that straddles two integer lags splits its autocorrelation
    // mass; a 3-tap triangle merges it back so the true peak wins over
    // subharmonics and interpolates cleanly.
    let blurred: Vec<f64> = (0..n)
        .map(|i| {
            let prev = if i > 0 { env[i - 1] } else { 0.0 };
            let next = if i + 1 < n { env[i + 1] } else { 0.0 };
            0.25 * prev + 0.5 * env[i] + 0.25 * next
        })
        .collect();
    let mean = blurred.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = blurred.iter().map(|&x| x - mean).collect();
    let energy: f64 = centered.iter().map(|x| x * x).sum();
    if energy <= 1e-24 {
        return fallback;
    }

    let corr = |lag: usize| -> f64 {
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / energy
    };

    let mut best_lag = min_lag;
    let mut best = f64::NEG_INFINITY;
    for lag in min_lag..=max_lag {
        let r = corr(lag);
        if r > best {
            best = r;
            best_lag = lag;
        }
    }

    // Parabolic refinement around the integer peak.
    let mut lag = best_lag as f64;
    if best_lag >= 2 && best_lag + 1 < n {
        let prev = corr(best_lag - 1);
        let next = corr(best_lag + 1);
        let denom = prev - 2.0 * best + next;
        if denom.abs() > 1e-12 {
            let delta = 0.5 * (prev - next) / denom;
            if delta.abs() <= 1.0 {
                lag += delta;
            }
        }
    }

    TempoEstimate {
        bpm: (60.0 * frame_rate / lag).clamp(lo_bpm, hi_bpm),
        fallback: false,
    }
}
