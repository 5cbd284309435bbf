//! The 21-dimensional per-clip feature vector.
//!
//! 13 MFCC means + tempo (BPM) + zero-crossing rate + 6 tonal-centroid
//! means, in that order. The harmonic change curve is computed alongside and
//! exposed through [`FeatureDiagnostics`] but is not part of the vector.

mod mel;
mod spectrum;
mod temporal;
mod tonal;

pub use mel::{hz_to_mel, mel_to_hz, mfcc, MelFilterbank, LOG_FLOOR};
pub use spectrum::{dct_ii, power_spectrum, FrameSpec, Window};
pub use temporal::{estimate_tempo, zero_crossing_rate, TempoEstimate, MIN_TEMPO_SECS};
pub use tonal::{chroma, hcdf, tonal_centroid, TonalCentroid, CENTROID_DIMS, N_PITCH_CLASSES};

use thiserror::Error;

use crate::audio::AudioBuffer;

/// Total dimensions of the flattened feature vector.
pub const FEATURE_DIM: usize = 21;

/// Number of MFCC coefficients kept.
pub const N_MFCC: usize = 13;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("clip too short: need at least {needed} samples, got {got}")]
    ClipTooShort { needed: usize, got: usize },
    #[error("invalid frame spec: frame {frame_len}, hop {hop_len} (need 0 < hop <= frame)")]
    InvalidFrameSpec { frame_len: usize, hop_len: usize },
    #[error("frequency must be nonnegative, got {0}")]
    NegativeFrequency(f64),
    #[error("need at least {needed} frames, got {got}")]
    TooFewFrames { needed: usize, got: usize },
    #[error("mel filter {index} covers no spectrum bin")]
    DegenerateFilter { index: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("feature row has {got} columns, expected {expected}")]
    BadRowLength { expected: usize, got: usize },
}

/// Knobs for feature extraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureConfig {
    pub frame: FrameSpec,
    pub n_mel_filters: usize,
    pub tempo_band_bpm: (f64, f64),
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            frame: FrameSpec::default_mir(),
            n_mel_filters: 26,
            tempo_band_bpm: (40.0, 200.0),
        }
    }
}

/// The classifier input for one clip.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub mfcc: [f64; N_MFCC],
    pub tempo_bpm: f64,
    pub zcr: f64,
    pub tonal_centroid: [f64; CENTROID_DIMS],
}

impl FeatureVector {
    /// Flattens to the canonical 21-value layout:
    /// mfcc_0..mfcc_12, tempo_bpm, zcr, tc_0..tc_5.
    pub fn flatten(&self) -> [f64; FEATURE_DIM] {
        let mut out = [0.0; FEATURE_DIM];
        out[..N_MFCC].copy_from_slice(&self.mfcc);
        out[N_MFCC] = self.tempo_bpm;
        out[N_MFCC + 1] = self.zcr;
        out[N_MFCC + 2..].copy_from_slice(&self.tonal_centroid);
        out
    }

    pub fn from_flat(values: &[f64]) -> Result<Self, FeatureError> {
        if values.len() != FEATURE_DIM {
            return Err(FeatureError::BadRowLength {
                expected: FEATURE_DIM,
                got: values.len(),
            });
        }
        let mut mfcc = [0.0; N_MFCC];
        mfcc.copy_from_slice(&values[..N_MFCC]);
        let mut tonal_centroid = [0.0; CENTROID_DIMS];
        tonal_centroid.copy_from_slice(&values[N_MFCC + 2..]);
        Ok(Self {
            mfcc,
            tempo_bpm: values[N_MFCC],
            zcr: values[N_MFCC + 1],
            tonal_centroid,
        })
    }

    /// Header for the one-row-per-clip CSV emitted by the `features` command.
    pub fn csv_header() -> String {
        let mut cols: Vec<String> = (0..N_MFCC).map(|i| format!("mfcc_{i}")).collect();
        cols.push("tempo_bpm".into());
        cols.push("zcr".into());
        cols.extend((0..CENTROID_DIMS).map(|i| format!("tc_{i}")));
        cols.join(",")
    }

    pub fn to_csv_row(&self) -> String {
        self.flatten()
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Extraction byproducts that are not classifier inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDiagnostics {
    pub tempo_fallback: bool,
    /// Mean of the harmonic change detection function over interior frames.
    pub mean_hcdf: f64,
    pub n_frames: usize,
    /// Frames whose chroma was all-zero (centroid defaulted to zero).
    pub silent_chroma_frames: usize,
}

/// Extracts the 21-dimensional feature vector from a clip of >= 2 seconds.
pub fn extract_feature_vector(
    buffer: &AudioBuffer,
    config: &FeatureConfig,
) -> Result<FeatureVector, FeatureError> {
    extract_with_diagnostics(buffer, config).map(|(v, _)| v)
}

/// Like [`extract_feature_vector`] but also returns diagnostics.
pub fn extract_with_diagnostics(
    buffer: &AudioBuffer,
    config: &FeatureConfig,
) -> Result<(FeatureVector, FeatureDiagnostics), FeatureError> {
    let needed = (MIN_TEMPO_SECS * buffer.sample_rate() as f64) as usize;
    if buffer.len() < needed {
        return Err(FeatureError::ClipTooShort {
            needed,
            got: buffer.len(),
        });
    }

    // One STFT feeds the MFCC and chroma paths.
    let spectra = spectrum::stft_power(buffer, &config.frame)?;
    let n_frames = spectra.len();

    let bank = MelFilterbank::new(
        config.n_mel_filters,
        config.frame.frame_len,
        buffer.sample_rate(),
    )?;
    let mfcc_frames = mel::mfcc_from_spectra(&spectra, &bank, N_MFCC);
    let mut mfcc_mean = [0.0f64; N_MFCC];
    for frame in &mfcc_frames {
        for (acc, &c) in mfcc_mean.iter_mut().zip(frame) {
            *acc += c;
        }
    }
    for acc in mfcc_mean.iter_mut() {
        *acc /= n_frames as f64;
    }

    let mut centroid_mean = [0.0f64; CENTROID_DIMS];
    let mut centroids = Vec::with_capacity(n_frames);
    let mut silent_chroma_frames = 0usize;
    for power in &spectra {
        let tc = tonal_centroid(&chroma(power, buffer.sample_rate()));
        if tc.silent {
            silent_chroma_frames += 1;
        }
        for (acc, &c) in centroid_mean.iter_mut().zip(&tc.coords) {
            *acc += c;
        }
        centroids.push(tc.coords);
    }
    for acc in centroid_mean.iter_mut() {
        *acc /= n_frames as f64;
    }

    let mean_hcdf = if centroids.len() >= 3 {
        let h = hcdf(&centroids)?;
        h.iter().sum::<f64>() / h.len() as f64
    } else {
        0.0
    };

    let zcr = zero_crossing_rate(buffer)?;
    // Tempo runs its own finer-hop STFT; see `estimate_tempo`.
    let tempo = estimate_tempo(buffer, &config.frame, config.tempo_band_bpm)?;

    let vector = FeatureVector {
        mfcc: mfcc_mean,
        tempo_bpm: tempo.bpm,
        zcr,
        tonal_centroid: centroid_mean,
    };
    if vector.flatten().iter().any(|v| !v.is_finite()) {
        return Err(FeatureError::NonFinite("feature vector"));
    }
    Ok((
        vector,
        FeatureDiagnostics {
            tempo_fallback: tempo.fallback,
            mean_hcdf,
            n_frames,
            silent_chroma_frames,
        },
    ))
}
