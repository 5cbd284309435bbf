//! Mel scale, triangular filterbank, and MFCC extraction.

use super::spectrum::{dct_ii, stft_power, FrameSpec};
use super::FeatureError;
use crate::audio::AudioBuffer;

/// Filterbank energies below this are clamped before the log.
pub const LOG_FLOOR: f64 = 1e-10;

/// Hertz to mel: m = 2595 log10(1 + f/700).
pub fn hz_to_mel(f: f64) -> Result<f64, FeatureError> {
    if f < 0.0 {
        return Err(FeatureError::NegativeFrequency(f));
    }
    Ok(2595.0 * (1.0 + f / 700.0).log10())
}

/// Mel to Hertz, the inverse of [`hz_to_mel`].
pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular filters with unit peaks, centers equally spaced on the mel
/// axis from 0 Hz to Nyquist.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    weights: Vec<Vec<f64>>, // n_filters rows of (frame_len/2 + 1) bins
    sample_rate: u32,
    frame_len: usize,
}

impl MelFilterbank {
    pub fn new(n_filters: usize, frame_len: usize, sample_rate: u32) -> Result<Self, FeatureError> {
        assert!(n_filters > 0 && frame_len >= 2 && sample_rate > 0);
        let nyquist = sample_rate as f64 / 2.0;
        let mel_max = hz_to_mel(nyquist).expect("nyquist is nonnegative");
        // n_filters + 2 edge points; filter i rises over [p_i, p_{i+1}] and
        // falls over [p_{i+1}, p_{i+2}].
        let edges_hz: Vec<f64> = (0..n_filters + 2)
            .map(|i| mel_to_hz(mel_max * i as f64 / (n_filters + 1) as f64))
            .collect();
        let n_bins = frame_len / 2 + 1;
        let bin_hz = sample_rate as f64 / frame_len as f64;
        let mut weights = Vec::with_capacity(n_filters);
        for i in 0..n_filters {
            let (lo, center, hi) = (edges_hz[i], edges_hz[i + 1], edges_hz[i + 2]);
            let mut row = vec![0.0f64; n_bins];
            let mut any_positive = false;
            for (k, w) in row.iter_mut().enumerate() {
                let f = k as f64 * bin_hz;
                let rising = (f - lo) / (center - lo);
                let falling = (hi - f) / (hi - center);
                *w = rising.min(falling).max(0.0);
                any_positive |= *w > 0.0;
            }
            if !any_positive {
                return Err(FeatureError::DegenerateFilter { index: i });
            }
            weights.push(row);
        }
        Ok(Self {
            weights,
            sample_rate,
            frame_len,
        })
    }

    pub fn n_filters(&self) -> usize {
        self.weights.len()
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    /// Per-filter energies of one power spectrum frame.
    pub fn energies(&self, power: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .map(|row| row.iter().zip(power).map(|(w, p)| w * p).sum())
            .collect()
    }
}

/// Per-frame MFCCs: power spectrum -> mel energies -> floored log -> DCT-II,
/// keeping the first `n_coeffs` coefficients.
pub fn mfcc(
    buffer: &AudioBuffer,
    spec: &FrameSpec,
    bank: &MelFilterbank,
    n_coeffs: usize,
) -> Result<Vec<Vec<f64>>, FeatureError> {
    let spectra = stft_power(buffer, spec)?;
    Ok(mfcc_from_spectra(&spectra, bank, n_coeffs))
}

pub(crate) fn mfcc_from_spectra(
    spectra: &[Vec<f64>],
    bank: &MelFilterbank,
    n_coeffs: usize,
) -> Vec<Vec<f64>> {
    spectra
        .iter()
        .map(|power| {
            let log_energies: Vec<f64> = bank
                .energies(power)
                .into_iter()
                .map(|e| e.max(LOG_FLOOR).ln())
                .collect();
            let mut coeffs = dct_ii(&log_energies);
            coeffs.truncate(n_coeffs);
            coeffs
        })
        .collect()
}
