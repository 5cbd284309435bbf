//! Feed-forward dynamic range compression.
//!
//! The static curve works entirely in dB: identity below the threshold, slope
//! 1/R above it, with an optional quadratic soft-knee transition of width W
//! centered on the threshold. Gain reduction (never the signal level) is
//! smoothed by a one-pole filter with separate attack and release time
//! constants, then makeup gain is added as a constant dB offset.

use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;

/// Below this magnitude a sample's level is pinned to [`DB_FLOOR`].
pub const SILENCE_EPSILON: f64 = 1e-6;

/// Level assigned to silent samples; 20*log10(1e-6).
pub const DB_FLOOR: f64 = -120.0;

/// The six compressor knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressorSettings {
    /// Level where gain reduction starts, dBFS.
    pub threshold_db: f64,
    /// Input/output dB slope above the threshold; >= 1.
    pub ratio: f64,
    /// Width of the soft-knee transition, dB; 0 = hard knee.
    pub knee_width_db: f64,
    /// Time constant for engaging gain reduction, seconds.
    pub attack_s: f64,
    /// Time constant for releasing gain reduction, seconds.
    pub release_s: f64,
    /// Constant post-compression gain, dB (may be negative).
    pub makeup_db: f64,
}

impl CompressorSettings {
    pub fn new(
        threshold_db: f64,
        ratio: f64,
        knee_width_db: f64,
        attack_s: f64,
        release_s: f64,
        makeup_db: f64,
    ) -> Result<Self, SettingsError> {
        let s = Self {
            threshold_db,
            ratio,
            knee_width_db,
            attack_s,
            release_s,
            makeup_db,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), SettingsError> {
        if !self.ratio.is_finite() || self.ratio < 1.0 {
            return Err(SettingsError::Ratio(self.ratio));
        }
        if !self.knee_width_db.is_finite() || self.knee_width_db < 0.0 {
            return Err(SettingsError::KneeWidth(self.knee_width_db));
        }
        if !self.attack_s.is_finite() || self.attack_s < 0.0 {
            return Err(SettingsError::Attack(self.attack_s));
        }
        if !self.release_s.is_finite() || self.release_s < 0.0 {
            return Err(SettingsError::Release(self.release_s));
        }
        if !self.threshold_db.is_finite() || !self.makeup_db.is_finite() {
            return Err(SettingsError::NonFinite);
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SettingsError {
    #[error("ratio must be >= 1, got {0}")]
    Ratio(f64),
    #[error("knee width must be >= 0 dB, got {0}")]
    KneeWidth(f64),
    #[error("attack must be >= 0 s, got {0}")]
    Attack(f64),
    #[error("release must be >= 0 s, got {0}")]
    Release(f64),
    #[error("threshold and makeup must be finite")]
    NonFinite,
}

/// Amplitude to dB, with silent inputs pinned to [`DB_FLOOR`].
pub fn db_from_linear(amplitude: f64) -> f64 {
    if amplitude <= SILENCE_EPSILON {
        DB_FLOOR
    } else {
        20.0 * amplitude.log10()
    }
}

/// dB to amplitude.
pub fn linear_from_db(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// Hard-knee static curve: identity below the threshold, slope 1/R above.
pub fn static_gain_hard_knee(x_db: f64, threshold_db: f64, ratio: f64) -> f64 {
    if x_db <= threshold_db {
        x_db
    } else {
        threshold_db + (x_db - threshold_db) / ratio
    }
}

/// Soft-knee static curve: like the hard knee but blended quadratically over
/// `knee_width_db` centered on the threshold. W = 0 reduces to the hard knee.
pub fn static_gain_soft_knee(x_db: f64, threshold_db: f64, ratio: f64, knee_width_db: f64) -> f64 {
    // At W = 0 the knee branch condition 2|x-T| <= W collapses to x = T and
    // would divide by zero; the hard knee is the exact limit.
    if knee_width_db <= 0.0 {
        return static_gain_hard_knee(x_db, threshold_db, ratio);
    }
    let over = x_db - threshold_db;
    if 2.0 * over < -knee_width_db {
        x_db
    } else if 2.0 * over.abs() <= knee_width_db {
        let edge = over + knee_width_db / 2.0;
        x_db + (1.0 / ratio - 1.0) * edge * edge / (2.0 * knee_width_db)
    } else {
        threshold_db + over / ratio
    }
}

fn smoothing_coefficient(time_s: f64, sample_rate: u32) -> f64 {
    if time_s <= 0.0 {
        0.0
    } else {
        (-1.0 / (time_s * sample_rate as f64)).exp()
    }
}

/// One-pole smoothing of a per-sample gain-reduction sequence (dB, <= 0).
///
/// The attack coefficient applies while reduction is deepening, the release
/// coefficient while it is letting go. Zero attack and release return the
/// input unchanged. The smoother starts from 0 dB (no reduction).
pub fn smooth_gain(
    raw_gain_db: &[f64],
    attack_s: f64,
    release_s: f64,
    sample_rate: u32,
) -> Vec<f64> {
    let alpha_attack = smoothing_coefficient(attack_s, sample_rate);
    let alpha_release = smoothing_coefficient(release_s, sample_rate);
    let mut state = 0.0f64;
    raw_gain_db
        .iter()
        .map(|&g| {
            let alpha = if g < state { alpha_attack } else { alpha_release };
            state = alpha * state + (1.0 - alpha) * g;
            state
        })
        .collect()
}

/// Runs the full compressor over a buffer.
///
/// Per sample: level = dB of |sample| (floored), desired gain = static curve
/// minus level (<= 0), smoothed by attack/release, then makeup is added and
/// the sample is scaled. Output length and rate match the input.
pub fn compress(buffer: &AudioBuffer, settings: &CompressorSettings) -> AudioBuffer {
    debug_assert!(settings.validate().is_ok());
    let raw_gain: Vec<f64> = buffer
        .samples()
        .iter()
        .map(|&s| {
            let x_db = db_from_linear(s.abs());
            static_gain_soft_knee(x_db, settings.threshold_db, settings.ratio, settings.knee_width_db)
                - x_db
        })
        .collect();
    let smoothed = smooth_gain(
        &raw_gain,
        settings.attack_s,
        settings.release_s,
        buffer.sample_rate(),
    );
    let out: Vec<f64> = buffer
        .samples()
        .iter()
        .zip(&smoothed)
        .map(|(&s, &g)| s * linear_from_db(g + settings.makeup_db))
        .collect();
    AudioBuffer::new_unchecked(out, buffer.sample_rate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn paper_bases() -> [CompressorSettings; 3] {
        [
            CompressorSettings::new(-20.0, 8.0, 0.0, 0.001, 0.010, 7.0).unwrap(),
            CompressorSettings::new(-10.0, 5.0, 5.0, 0.005, 0.050, 5.0).unwrap(),
            CompressorSettings::new(-5.0, 2.0, 20.0, 0.010, 0.100, 3.0).unwrap(),
        ]
    }

    #[test]
    fn db_conversions() {
        assert_eq!(db_from_linear(1.0), 0.0);
        assert_relative_eq!(db_from_linear(0.5), -6.020599913279624, max_relative = 1e-12);
        assert_eq!(linear_from_db(20.0), 10.0);
        for a in [1e-5, 0.01, 0.37, 1.0, 2.5] {
            assert_relative_eq!(linear_from_db(db_from_linear(a)), a, max_relative = 1e-12);
        }
        // Silence floors instead of -inf.
        assert_eq!(db_from_linear(0.0), DB_FLOOR);
        assert_eq!(db_from_linear(1e-7), DB_FLOOR);
    }

    #[test]
    fn hard_knee_worked_example() {
        // 3 dB over a 5 dB threshold at ratio 3 comes out 1 dB over: 6 dB.
        assert_eq!(static_gain_hard_knee(8.0, 5.0, 3.0), 6.0);
        assert_eq!(static_gain_hard_knee(5.0, 5.0, 3.0), 5.0);
        assert_eq!(static_gain_hard_knee(-30.0, -20.0, 8.0), -30.0);
    }

    #[test]
    fn soft_knee_branch_values() {
        // Middle branch at x = T.
        assert_relative_eq!(
            static_gain_soft_knee(-10.0, -10.0, 5.0, 5.0),
            -10.5,
            max_relative = 1e-12
        );
        // Upper branch.
        assert_relative_eq!(
            static_gain_soft_knee(0.0, -10.0, 5.0, 5.0),
            -8.0,
            max_relative = 1e-12
        );
        // Lower branch is the identity.
        assert_eq!(static_gain_soft_knee(-40.0, -10.0, 5.0, 5.0), -40.0);
    }

    #[test]
    fn zero_width_knee_equals_hard_knee_on_grid() {
        for base in paper_bases() {
            let mut x = -80.0;
            while x <= 0.0 + 1e-9 {
                let soft = static_gain_soft_knee(x, base.threshold_db, base.ratio, 0.0);
                let hard = static_gain_hard_knee(x, base.threshold_db, base.ratio);
                assert!((soft - hard).abs() < 1e-12, "x={x}");
                x += 0.1;
            }
        }
    }

    #[test]
    fn knee_boundaries_are_continuous() {
        for base in paper_bases() {
            if base.knee_width_db == 0.0 {
                continue;
            }
            for boundary in [
                base.threshold_db - base.knee_width_db / 2.0,
                base.threshold_db + base.knee_width_db / 2.0,
            ] {
                let inside = static_gain_soft_knee(
                    boundary - 1e-9,
                    base.threshold_db,
                    base.ratio,
                    base.knee_width_db,
                );
                let outside = static_gain_soft_knee(
                    boundary + 1e-9,
                    base.threshold_db,
                    base.ratio,
                    base.knee_width_db,
                );
                assert!((inside - outside).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn ratio_identity_on_upper_branch() {
        for base in paper_bases() {
            let x = base.threshold_db + base.knee_width_db / 2.0 + 10.0;
            let y = static_gain_soft_knee(x, base.threshold_db, base.ratio, base.knee_width_db);
            let implied = (x - base.threshold_db) / (y - base.threshold_db);
            assert_relative_eq!(implied, base.ratio, max_relative = 1e-9);
        }
    }

    #[test]
    fn zero_attack_release_is_identity_smoothing() {
        let seq = [0.0, -3.0, -10.0, -1.0, 0.0];
        assert_eq!(smooth_gain(&seq, 0.0, 0.0, 16_000), seq);
    }

    #[test]
    fn constant_sequence_is_a_fixed_point() {
        let seq = [-4.0; 100];
        let smoothed = smooth_gain(&seq, 0.0, 0.05, 16_000);
        // Release path from state 0 decays toward the constant; feed the
        // constant as the initial condition instead by prepending it.
        // A truly constant *state* stays put:
        let mut with_state = vec![-4.0];
        with_state.extend_from_slice(&seq);
        let s2 = smooth_gain(&with_state, 0.0, 0.0, 16_000);
        assert!(s2.iter().all(|&g| g == -4.0));
        assert!(smoothed.windows(2).all(|w| w[1] <= w[0]), "monotone approach");
    }

    #[test]
    fn step_response_reaches_one_tau_after_attack_time() {
        // Step from 0 to -10 dB of reduction with a 10 ms attack at 16 kHz:
        // after attack_s * fs = 160 samples the smoother sits at
        // -10 * (1 - e^-1).
        let fs = 16_000u32;
        let seq = vec![-10.0f64; 200];
        let smoothed = smooth_gain(&seq, 0.010, 0.050, fs);
        let expected = -10.0 * (1.0 - (-1.0f64).exp());
        assert_relative_eq!(smoothed[159], expected, max_relative = 1e-9);
        assert_relative_eq!(smoothed[159], -6.321, max_relative = 1e-3);
    }

    #[test]
    fn compress_zeros_stays_zero() {
        let buf = AudioBuffer::new(vec![0.0; 512], 16_000).unwrap();
        let settings = CompressorSettings::new(-20.0, 8.0, 0.0, 0.001, 0.010, 7.0).unwrap();
        let out = compress(&buf, &settings);
        assert_eq!(out.len(), 512);
        assert!(out.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn compress_steady_full_scale_matches_static_arithmetic() {
        // 0 dBFS constant input, high setting with instant envelope:
        // out level = T + (0 - T)/R + makeup = -20 + 2.5 + 7 = -10.5 dB.
        let buf = AudioBuffer::new(vec![1.0; 256], 16_000).unwrap();
        let settings = CompressorSettings::new(-20.0, 8.0, 0.0, 0.0, 0.0, 7.0).unwrap();
        let out = compress(&buf, &settings);
        let expected = linear_from_db(-10.5);
        for &s in out.samples() {
            assert_relative_eq!(s, expected, max_relative = 1e-12);
        }
        assert_relative_eq!(expected, 0.2985, max_relative = 1e-3);
    }

    #[test]
    fn below_threshold_with_no_makeup_is_identity() {
        let rate = 16_000u32;
        let samples: Vec<f64> = (0..rate)
            .map(|n| 0.01 * (std::f64::consts::TAU * 220.0 * n as f64 / rate as f64).sin())
            .collect();
        let buf = AudioBuffer::new(samples.clone(), rate).unwrap();
        let settings = CompressorSettings::new(-5.0, 4.0, 0.0, 0.005, 0.050, 0.0).unwrap();
        let out = compress(&buf, &settings);
        for (a, b) in samples.iter().zip(out.samples()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn settings_validation() {
        assert!(CompressorSettings::new(-10.0, 0.5, 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(CompressorSettings::new(-10.0, 2.0, -1.0, 0.0, 0.0, 0.0).is_err());
        assert!(CompressorSettings::new(-10.0, 2.0, 0.0, -0.1, 0.0, 0.0).is_err());
        assert!(CompressorSettings::new(-10.0, 2.0, 0.0, 0.0, -0.1, 0.0).is_err());
        assert!(CompressorSettings::new(f64::NAN, 2.0, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn static_curve_is_nondecreasing_and_reduces_gain(
            threshold in -60.0f64..0.0,
            ratio in 1.0f64..20.0,
            knee in 0.0f64..40.0,
            x in -80.0f64..10.0,
        ) {
            let y = static_gain_soft_knee(x, threshold, ratio, knee);
            let y2 = static_gain_soft_knee(x + 0.01, threshold, ratio, knee);
            prop_assert!(y2 >= y - 1e-12, "nondecreasing");
            if x > threshold - knee / 2.0 {
                prop_assert!(y <= x + 1e-12, "gain reduction only");
            } else {
                prop_assert_eq!(y, x, "identity below the knee");
            }
        }

        #[test]
        fn compress_output_is_finite(
            threshold in -60.0f64..0.0,
            ratio in 1.0f64..20.0,
            knee in 0.0f64..40.0,
            attack in 0.0f64..0.1,
            release in 0.0f64..0.5,
            makeup in -12.0f64..12.0,
            samples in prop::collection::vec(-1.0f64..=1.0, 16..128),
        ) {
            let buf = AudioBuffer::new(samples, 16_000).unwrap();
            let settings = CompressorSettings::new(threshold, ratio, knee, attack, release, makeup).unwrap();
            let out = compress(&buf, &settings);
            prop_assert_eq!(out.len(), buf.len());
            prop_assert!(out.samples().iter().all(|s| s.is_finite()));
        }
    }
}
