//! Framing, windowing, power spectra, and the DCT used by the MFCC path.

use std::f64::consts::{PI, TAU};

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::FeatureError;
use crate::audio::AudioBuffer;

/// Analysis window taper. Hann for real use; Rectangular exists so tests can
/// look at bare DFT bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    Hann,
    Rectangular,
}

impl Window {
    fn weight(self, i: usize, len: usize) -> f64 {
        match self {
            // Periodic Hann, the usual STFT convention.
            Window::Hann => 0.5 - 0.5 * (TAU * i as f64 / len as f64).cos(),
            Window::Rectangular => 1.0,
        }
    }
}

/// Frame length, hop, and taper for short-time analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameSpec {
    pub frame_len: usize,
    pub hop_len: usize,
    pub window: Window,
}

impl FrameSpec {
    pub fn new(frame_len: usize, hop_len: usize, window: Window) -> Result<Self, FeatureError> {
        if frame_len < 2 || hop_len == 0 || hop_len > frame_len {
            return Err(FeatureError::InvalidFrameSpec { frame_len, hop_len });
        }
        Ok(Self {
            frame_len,
            hop_len,
            window,
        })
    }

    /// 2048-sample frames, 512-sample hop, Hann taper.
    pub fn default_mir() -> Self {
        Self {
            frame_len: 2048,
            hop_len: 512,
            window: Window::Hann,
        }
    }

    pub fn num_frames(&self, samples: usize) -> usize {
        if samples < self.frame_len {
            0
        } else {
            (samples - self.frame_len) / self.hop_len + 1
        }
    }

    /// Analysis frames per second.
    pub fn frame_rate(&self, sample_rate: u32) -> f64 {
        sample_rate as f64 / self.hop_len as f64
    }
}

/// |DFT|^2 of a windowed frame, bins 0..=N/2.
pub fn power_spectrum(frame: &[f64], window: Window) -> Vec<f64> {
    assert!(frame.len() >= 2, "frame must have at least 2 samples");
    let n = frame.len();
    let mut buf: Vec<Complex<f64>> = frame
        .iter()
        .enumerate()
        .map(|(i, &s)| Complex::new(s * window.weight(i, n), 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf[..n / 2 + 1].iter().map(|c| c.norm_sqr()).collect()
}

/// Power spectra for every frame of a buffer.
pub(crate) fn stft_power(
    buffer: &AudioBuffer,
    spec: &FrameSpec,
) -> Result<Vec<Vec<f64>>, FeatureError> {
    let samples = buffer.samples();
    let n_frames = spec.num_frames(samples.len());
    if n_frames == 0 {
        return Err(FeatureError::ClipTooShort {
            needed: spec.frame_len,
            got: samples.len(),
        });
    }
    let n = spec.frame_len;
    let fft = FftPlanner::new().plan_fft_forward(n);
    let weights: Vec<f64> = (0..n).map(|i| spec.window.weight(i, n)).collect();
    let mut out = Vec::with_capacity(n_frames);
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    for f in 0..n_frames {
        let start = f * spec.hop_len;
        for (i, slot) in buf.iter_mut().enumerate() {
            *slot = Complex::new(samples[start + i] * weights[i], 0.0);
        }
        fft.process(&mut buf);
        out.push(buf[..n / 2 + 1].iter().map(|c| c.norm_sqr()).collect());
    }
    Ok(out)
}

/// Unnormalized DCT-II: X[k] = sum_n x[n] cos(pi k (2n+1) / (2N)).
///
/// Computed through a length-N FFT of the even/odd reordered input rather
/// than by the cosine sum directly, so tests can check it against an
/// independent direct-summation route.
pub fn dct_ii(input: &[f64]) -> Vec<f64> {
    let n = input.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![input[0]];
    }
    let mut reordered = vec![Complex::new(0.0, 0.0); n];
    for j in 0..n.div_ceil(2) {
        reordered[j] = Complex::new(input[2 * j], 0.0);
    }
    for j in 0..n / 2 {
        reordered[n - 1 - j] = Complex::new(input[2 * j + 1], 0.0);
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut reordered);
    reordered
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let angle = -PI * k as f64 / (2.0 * n as f64);
            (v * Complex::from_polar(1.0, angle)).re
        })
        .collect()
}
