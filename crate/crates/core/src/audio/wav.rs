//! RIFF/WAV reading and writing.
//!
//! Reads 16-bit PCM and 32-bit float WAV files with 1 or 2 channels; stereo
//! is downmixed by the per-sample channel mean. Writes 16-bit PCM mono.

use std::fs;
use std::path::Path;

use super::{AudioBuffer, AudioError};

/// Scale factor between int16 code values and [-1, 1] amplitudes.
const I16_SCALE: f64 = 32768.0;

/// Result of [`write_wav`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WriteOutcome {
    /// Number of samples outside [-1, 1] that were clipped to full scale.
    pub clipped: usize,
}

struct FmtChunk {
    audio_format: u16,
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
}

fn malformed(path: &Path, reason: impl Into<String>) -> AudioError {
    AudioError::MalformedHeader {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn unsupported(path: &Path, reason: impl Into<String>) -> AudioError {
    AudioError::UnsupportedEncoding {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn u16_le(bytes: &[u8], at: usize) -> Option<u16> {
    Some(u16::from_le_bytes(bytes.get(at..at + 2)?.try_into().ok()?))
}

fn u32_le(bytes: &[u8], at: usize) -> Option<u32> {
    Some(u32::from_le_bytes(bytes.get(at..at + 4)?.try_into().ok()?))
}

/// Reads a WAV file into a mono buffer with samples scaled to [-1, 1].
///
/// Int16 samples are scaled by 1/32768; float samples are taken as-is.
/// Stereo files are downmixed by the arithmetic mean of the two channels.
pub fn read_wav(path: &Path) -> Result<AudioBuffer, AudioError> {
    let bytes = fs::read(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            AudioError::FileNotFound(path.to_path_buf())
        } else {
            AudioError::Io {
                path: path.to_path_buf(),
                source: e,
            }
        }
    })?;

    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(malformed(path, "missing RIFF/WAVE magic"));
    }

    let mut fmt: Option<FmtChunk> = None;
    let mut data: Option<&[u8]> = None;
    let mut at = 12usize;
    while at + 8 <= bytes.len() {
        let id = &bytes[at..at + 4];
        let size = u32_le(&bytes, at + 4).expect("bounds checked") as usize;
        let body_start = at + 8;
        let body_end = body_start
            .checked_add(size)
            .ok_or_else(|| malformed(path, "chunk size overflow"))?;
        if body_end > bytes.len() {
            return Err(malformed(
                path,
                format!("chunk {:?} exceeds file size", String::from_utf8_lossy(id)),
            ));
        }
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(malformed(path, "fmt chunk shorter than 16 bytes"));
                }
                fmt = Some(FmtChunk {
                    audio_format: u16_le(&bytes, body_start).expect("bounds checked"),
                    channels: u16_le(&bytes, body_start + 2).expect("bounds checked"),
                    sample_rate: u32_le(&bytes, body_start + 4).expect("bounds checked"),
                    bits_per_sample: u16_le(&bytes, body_start + 14).expect("bounds checked"),
                });
            }
            b"data" => data = Some(&bytes[body_start..body_end]),
            _ => {}
        }
        // Chunks are word-aligned; odd sizes carry a pad byte.
        at = body_end + (size & 1);
    }

    let fmt = fmt.ok_or_else(|| malformed(path, "no fmt chunk"))?;
    let data = data.ok_or_else(|| malformed(path, "no data chunk"))?;

    if fmt.sample_rate == 0 {
        return Err(malformed(path, "sample rate is zero"));
    }
    if !(fmt.channels == 1 || fmt.channels == 2) {
        return Err(unsupported(
            path,
            format!("{} channels (only mono and stereo)", fmt.channels),
        ));
    }

    let interleaved: Vec<f64> = match (fmt.audio_format, fmt.bits_per_sample) {
        (1, 16) => {
            if !data.len().is_multiple_of(2) {
                return Err(malformed(path, "odd PCM16 data length"));
            }
            data.chunks_exact(2)
                .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 / I16_SCALE)
                .collect()
        }
        (3, 32) => {
            if !data.len().is_multiple_of(4) {
                return Err(malformed(path, "float32 data length not a multiple of 4"));
            }
            data.chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
                .collect()
        }
        (format, bits) => {
            return Err(unsupported(
                path,
                format!("format tag {format} at {bits} bits (PCM16 or float32 only)"),
            ));
        }
    };

    let mono = if fmt.channels == 2 {
        if !interleaved.len().is_multiple_of(2) {
            return Err(malformed(path, "stereo data with an odd sample count"));
        }
        interleaved
            .chunks_exact(2)
            .map(|f| (f[0] + f[1]) / 2.0)
            .collect()
    } else {
        interleaved
    };

    AudioBuffer::new(mono, fmt.sample_rate)
}

/// Writes a buffer as 16-bit PCM mono WAV.
///
/// Samples outside [-1, 1] are clipped to full scale; the number of clipped
/// samples is returned. Reading the file back reproduces each sample within
/// 1/32768.
pub fn write_wav(buffer: &AudioBuffer, path: &Path) -> Result<WriteOutcome, AudioError> {
    let mut clipped = 0usize;
    let mut pcm = Vec::with_capacity(buffer.len() * 2);
    for &s in buffer.samples() {
        if s.abs() > 1.0 {
            clipped += 1;
        }
        let q = (s.clamp(-1.0, 1.0) * I16_SCALE).round();
        let code = q.clamp(i16::MIN as f64, i16::MAX as f64) as i16;
        pcm.extend_from_slice(&code.to_le_bytes());
    }

    let data_len = pcm.len() as u32;
    let mut out = Vec::with_capacity(44 + pcm.len());
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&buffer.sample_rate().to_le_bytes());
    out.extend_from_slice(&(buffer.sample_rate() * 2).to_le_bytes()); // byte rate
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes()); // bits per sample
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    out.extend_from_slice(&pcm);

    fs::write(path, &out).map_err(|e| AudioError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(WriteOutcome { clipped })
}
