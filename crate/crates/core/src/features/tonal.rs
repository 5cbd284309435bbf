//! Chroma vectors, the 6-D tonal centroid, and the harmonic change curve.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::FeatureError;

/// Pitch classes per octave; index 0 = C, 9 = A.
pub const N_PITCH_CLASSES: usize = 12;

/// Dimensions of the tonal centroid.
pub const CENTROID_DIMS: usize = 6;

/// Lowest frequency mapped to a pitch class (A0).
const MIN_PITCH_HZ: f64 = 27.5;

/// A440 reference and its MIDI note number.
const A4_HZ: f64 = 440.0;
const A4_MIDI: i64 = 69;

/// 12-bin pitch-class energy histogram of one power spectrum frame.
///
/// Each bin's center frequency maps to the nearest equal-tempered pitch
/// class (A440 reference); bins below A0 or above Nyquist are dropped.
pub fn chroma(frame_power: &[f64], sample_rate: u32) -> [f64; N_PITCH_CLASSES] {
    let mut acc = [0.0f64; N_PITCH_CLASSES];
    if frame_power.len() < 2 {
        return acc;
    }
    let n_fft = 2 * (frame_power.len() - 1);
    let bin_hz = sample_rate as f64 / n_fft as f64;
    let nyquist = sample_rate as f64 / 2.0;
    for (k, &p) in frame_power.iter().enumerate() {
        let f = k as f64 * bin_hz;
        if f < MIN_PITCH_HZ || f > nyquist {
            continue;
        }
        let midi = (12.0 * (f / A4_HZ).log2()).round() as i64 + A4_MIDI;
        let class = midi.rem_euclid(N_PITCH_CLASSES as i64) as usize;
        acc[class] += p;
    }
    acc
}

/// Projection matrix onto the fifths / minor-third / major-third circles,
/// column l = pitch class, rows = the six centroid coordinates.
fn psi() -> &'static [[f64; CENTROID_DIMS]; N_PITCH_CLASSES] {
    static PSI: OnceLock<[[f64; CENTROID_DIMS]; N_PITCH_CLASSES]> = OnceLock::new();
    PSI.get_or_init(|| {
        const R_FIFTHS: f64 = 1.0;
        const R_MINOR_THIRDS: f64 = 1.0;
        const R_MAJOR_THIRDS: f64 = 0.5;
        let mut m = [[0.0; CENTROID_DIMS]; N_PITCH_CLASSES];
        for (l, col) in m.iter_mut().enumerate() {
            let l = l as f64;
            col[0] = R_FIFTHS * (l * 7.0 * PI / 6.0).sin();
            col[1] = R_FIFTHS * (l * 7.0 * PI / 6.0).cos();
            col[2] = R_MINOR_THIRDS * (l * 3.0 * PI / 2.0).sin();
            col[3] = R_MINOR_THIRDS * (l * 3.0 * PI / 2.0).cos();
            col[4] = R_MAJOR_THIRDS * (l * 2.0 * PI / 3.0).sin();
            col[5] = R_MAJOR_THIRDS * (l * 2.0 * PI / 3.0).cos();
        }
        m
    })
}

/// Tonal centroid of a chroma frame plus a silence flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TonalCentroid {
    pub coords: [f64; CENTROID_DIMS],
    /// Set when the chroma was all-zero and the centroid defaulted to zero.
    pub silent: bool,
}

/// L1-normalized projection of a chroma vector onto the tonal space.
///
/// All-zero chroma returns the zero vector with `silent` set rather than
/// dividing by zero.
pub fn tonal_centroid(chroma: &[f64; N_PITCH_CLASSES]) -> TonalCentroid {
    let l1: f64 = chroma.iter().map(|c| c.abs()).sum();
    if l1 == 0.0 {
        return TonalCentroid {
            coords: [0.0; CENTROID_DIMS],
            silent: true,
        };
    }
    let m = psi();
    let mut coords = [0.0f64; CENTROID_DIMS];
    for (l, &c) in chroma.iter().enumerate() {
        for (d, coord) in coords.iter_mut().enumerate() {
            *coord += m[l][d] * c;
        }
    }
    for coord in coords.iter_mut() {
        *coord /= l1;
    }
    TonalCentroid {
        coords,
        silent: false,
    }
}

/// Harmonic change detection function: for each interior frame, the
/// Euclidean distance between its neighbors' centroids.
pub fn hcdf(centroids: &[[f64; CENTROID_DIMS]]) -> Result<Vec<f64>, FeatureError> {
    if centroids.len() < 3 {
        return Err(FeatureError::TooFewFrames {
            needed: 3,
            got: centroids.len(),
        });
    }
    Ok(centroids
        .windows(3)
        .map(|w| {
            w[0].iter()
                .zip(&w[2])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Builds a power spectrum with all energy at one frequency, for a
    /// 2048-point frame at 16 kHz.
    fn one_tone_spectrum(freq: f64, power: f64) -> Vec<f64> {
        let n_fft = 2048;
        let bin_hz = 16_000.0 / n_fft as f64;
        let mut spec = vec![0.0; n_fft / 2 + 1];
        spec[(freq / bin_hz).round() as usize] = power;
        spec
    }

    #[test]
    fn a440_maps_to_pitch_class_a() {
        let c = chroma(&one_tone_spectrum(440.0, 1.0), 16_000);
        assert!(c[9] > 0.0);
        assert_eq!(c.iter().filter(|&&x| x > 0.0).count(), 1);
    }

    #[test]
    fn octave_equivalence() {
        let c = chroma(&one_tone_spectrum(880.0, 1.0), 16_000);
        assert!(c[9] > 0.0);
        assert_eq!(c.iter().filter(|&&x| x > 0.0).count(), 1);
    }

    #[test]
    fn split_energy_preserves_power_ratio() {
        let mut spec = one_tone_spectrum(440.0, 2.0);
        for (k, v) in one_tone_spectrum(660.0, 1.0).iter().enumerate() {
            spec[k] += v;
        }
        let c = chroma(&spec, 16_000);
        assert_eq!(c[9], 2.0, "A");
        assert_eq!(c[4], 1.0, "660 Hz rounds to E");
        assert_eq!(c.iter().filter(|&&x| x > 0.0).count(), 2);
    }

    #[test]
    fn dc_and_subsonic_bins_are_excluded() {
        let mut spec = vec![0.0; 1025];
        spec[0] = 100.0; // DC
        spec[1] = 100.0; // 7.8 Hz
        let c = chroma(&spec, 16_000);
        assert!(c.iter().all(|&x| x == 0.0));
    }

    /// Direct matrix-product oracle for the centroid, independent of the
    /// cached-psi implementation path.
    fn centroid_direct(chroma: &[f64; 12]) -> [f64; 6] {
        let r = [1.0, 1.0, 1.0, 1.0, 0.5, 0.5];
        let step = [7.0 * PI / 6.0, 7.0 * PI / 6.0, 3.0 * PI / 2.0, 3.0 * PI / 2.0, 2.0 * PI / 3.0, 2.0 * PI / 3.0];
        let l1: f64 = chroma.iter().sum();
        let mut out = [0.0; 6];
        for d in 0..6 {
            for (l, &c) in chroma.iter().enumerate() {
                let angle = l as f64 * step[d];
                let basis = if d % 2 == 0 { angle.sin() } else { angle.cos() };
                out[d] += r[d] * basis * c;
            }
            out[d] /= l1;
        }
        out
    }

    #[test]
    fn one_hot_class_zero_centroid() {
        let mut c = [0.0; 12];
        c[0] = 1.0;
        let tc = tonal_centroid(&c);
        assert!(!tc.silent);
        let expected = [0.0, 1.0, 0.0, 1.0, 0.0, 0.5];
        for (got, want) in tc.coords.iter().zip(&expected) {
            assert!((got - want).abs() < 1e-12);
        }
        for (got, want) in tc.coords.iter().zip(&centroid_direct(&c)) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_chroma_centers_at_origin() {
        let tc = tonal_centroid(&[1.0; 12]);
        for &x in &tc.coords {
            assert!(x.abs() < 1e-12);
        }
    }

    #[test]
    fn all_zero_chroma_is_flagged() {
        let tc = tonal_centroid(&[0.0; 12]);
        assert!(tc.silent);
        assert_eq!(tc.coords, [0.0; 6]);
    }

    #[test]
    fn hcdf_cases() {
        let a = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let b = [0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        // Constant series: all zeros.
        assert_eq!(hcdf(&[a; 5]).unwrap(), vec![0.0, 0.0, 0.0]);
        // Two-periodic series: every interior frame sees equal neighbors.
        assert_eq!(hcdf(&[a, b, a, b, a]).unwrap(), vec![0.0, 0.0, 0.0]);
        // Linear ramp with step s in one coordinate: constant 2s.
        let ramp: Vec<[f64; 6]> = (0..6)
            .map(|i| [0.25 * i as f64, 0.0, 0.0, 0.0, 0.0, 0.0])
            .collect();
        for v in hcdf(&ramp).unwrap() {
            assert!((v - 0.5).abs() < 1e-12);
        }
        assert!(matches!(
            hcdf(&[a, b]),
            Err(FeatureError::TooFewFrames { .. })
        ));
    }

    proptest! {
        #[test]
        fn centroid_matches_direct_oracle_and_is_scale_invariant(
            chroma_vals in prop::collection::vec(0.0f64..10.0, 12),
            scale in 0.001f64..1000.0,
        ) {
            let mut c = [0.0; 12];
            c.copy_from_slice(&chroma_vals);
            prop_assume!(c.iter().sum::<f64>() > 1e-9);
            let tc = tonal_centroid(&c);
            for (got, want) in tc.coords.iter().zip(&centroid_direct(&c)) {
                prop_assert!((got - want).abs() < 1e-12);
            }
            let scaled: [f64; 12] = std::array::from_fn(|i| c[i] * scale);
            let tc2 = tonal_centroid(&scaled);
            for (a, b) in tc.coords.iter().zip(&tc2.coords) {
                prop_assert!((a - b).abs() < 1e-9);
            }
            // Norm bound from the circle radii (1, 1, 0.5).
            let norm: f64 = tc.coords.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!(norm <= 1.5 + 1e-12);
        }
    }
}
