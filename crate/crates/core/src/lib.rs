//! Dynamic range compression sweeps for music genre classification.
//!
//! This crate chains four pieces into one experiment harness:
//!
//! - [`compressor`] — a feed-forward dynamic range compressor: dB-domain
//!   static gain curve with hard or soft knee, one-pole attack/release
//!   smoothing of the gain reduction, and makeup gain.
//! - [`features`] — a 21-dimensional per-clip feature vector: 13 MFCC means,
//!   tempo in BPM, zero-crossing rate, and the 6-dimensional tonal centroid
//!   mean, plus a harmonic-change curve for diagnostics.
//! - [`svm`] — a soft-margin RBF-kernel SVM trained in the dual by an
//!   SMO-style solver, wrapped one-vs-one for multiclass voting.
//! - [`experiment`] — the 90-setting compression grid (3 bases x 6 parameters
//!   x 5 values), stratified train/test splits, and the sweep that trains on
//!   uncompressed audio and ranks which compression of the *test* clips
//!   improves accuracy the most.
//!
//! [`audio`] supplies WAV I/O and a deterministic synthetic clip generator so
//! the whole pipeline runs at desk scale without a real dataset. Datasets use
//! the `<root>/<genre>/<clip>.wav` directory convention.
//!
//! Everything is deterministic: a sweep is a pure function of the dataset
//! bytes, the seed, and the configuration.

pub mod audio;
pub mod compressor;
pub mod experiment;
pub mod features;
pub mod svm;
