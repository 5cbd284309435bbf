//! Audio buffers, WAV file I/O, and synthetic clip generation.

mod synth;
mod wav;

pub use synth::{default_genres, generate_dataset, synth_clip, GenreSpec, Recipe, SYNTH_PEAK};
pub use wav::{read_wav, write_wav, WriteOutcome};

use std::path::PathBuf;

use thiserror::Error;

/// Errors from audio I/O and synthesis.
#[derive(Debug, Error)]
pub enum AudioError {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed WAV in {path}: {reason}")]
    MalformedHeader { path: PathBuf, reason: String },
    #[error("unsupported WAV encoding in {path}: {reason}")]
    UnsupportedEncoding { path: PathBuf, reason: String },
    #[error("invalid audio buffer: {0}")]
    InvalidBuffer(String),
    #[error("unknown synthesis recipe kind: {0:?} (expected noise, pad, clicks, or chirp)")]
    UnknownRecipe(String),
}

/// A mono audio signal: finite samples in nominal range [-1, 1] plus a rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl AudioBuffer {
    /// Builds a buffer, rejecting a zero sample rate or non-finite samples.
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self, AudioError> {
        if sample_rate == 0 {
            return Err(AudioError::InvalidBuffer(
                "sample rate must be positive".into(),
            ));
        }
        if let Some(idx) = samples.iter().position(|s| !s.is_finite()) {
            return Err(AudioError::InvalidBuffer(format!(
                "non-finite sample at index {idx}"
            )));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    /// For internal DSP outputs whose finiteness follows from the inputs.
    pub(crate) fn new_unchecked(samples: Vec<f64>, sample_rate: u32) -> Self {
        debug_assert!(sample_rate > 0);
        debug_assert!(samples.iter().all(|s| s.is_finite()));
        Self {
            samples,
            sample_rate,
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    /// Largest absolute sample value (0 for an empty buffer).
    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn buffer_rejects_zero_rate() {
        assert!(matches!(
            AudioBuffer::new(vec![0.0], 0),
            Err(AudioError::InvalidBuffer(_))
        ));
    }

    #[test]
    fn buffer_rejects_non_finite() {
        assert!(AudioBuffer::new(vec![0.0, f64::NAN], 16_000).is_err());
        assert!(AudioBuffer::new(vec![f64::INFINITY], 16_000).is_err());
    }

    #[test]
    fn buffer_basics() {
        let b = AudioBuffer::new(vec![0.5, -0.25, 0.0], 16_000).unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b.sample_rate(), 16_000);
        assert!((b.duration_secs() - 3.0 / 16_000.0).abs() < 1e-15);
        assert_eq!(b.peak(), 0.5);
    }
}
