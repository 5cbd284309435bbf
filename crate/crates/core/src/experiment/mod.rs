//! The 90-setting compression grid and the accuracy sweep around it.

mod report;
mod split;
mod sweep;

pub use report::{rank_report, EntryRecord, RankedTable, SweepMetadata, SweepReport, REPORT_CSV_HEADER};
pub use split::{split_indices, Split};
pub use sweep::{load_dataset, run_sweep, LabeledClip, SweepConfig};

use std::path::PathBuf;

use thiserror::Error;

use crate::audio::AudioError;
use crate::compressor::CompressorSettings;
use crate::features::FeatureError;
use crate::svm::SvmError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Audio(#[from] AudioError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Svm(#[from] SvmError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("no <genre>/<clip>.wav entries under {0}")]
    EmptyDataset(PathBuf),
    #[error("every clip failed feature extraction")]
    NoUsableClips,
    #[error("class {label:?} has {count} clips; need at least 2 to stratify")]
    ClassTooSmall { label: String, count: usize },
    #[error("test fraction must be inside (0, 1), got {0}")]
    InvalidTestFraction(f64),
    #[error("iterations must be at least 1")]
    NoIterations,
}

/// The three compression intensities everything is varied from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseName {
    High,
    Medium,
    Low,
}

impl BaseName {
    pub fn letter(self) -> &'static str {
        match self {
            BaseName::High => "H",
            BaseName::Medium => "M",
            BaseName::Low => "L",
        }
    }
}

impl std::fmt::Display for BaseName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BaseName::High => "high",
            BaseName::Medium => "medium",
            BaseName::Low => "low",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseSetting {
    pub name: BaseName,
    pub settings: CompressorSettings,
}

/// The high / medium / low presets.
pub fn base_settings() -> [BaseSetting; 3] {
    let s = |t, r, k, a, rel, m| {
        CompressorSettings::new(t, r, k, a, rel, m).expect("presets are valid")
    };
    [
        BaseSetting {
            name: BaseName::High,
            settings: s(-20.0, 8.0, 0.0, 0.001, 0.010, 7.0),
        },
        BaseSetting {
            name: BaseName::Medium,
            settings: s(-10.0, 5.0, 5.0, 0.005, 0.050, 5.0),
        },
        BaseSetting {
            name: BaseName::Low,
            settings: s(-5.0, 2.0, 20.0, 0.010, 0.100, 3.0),
        },
    ]
}

/// A parameter axis of the grid: its name letter and 5 candidate values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Param {
    Threshold,
    Ratio,
    Knee,
    Attack,
    Release,
    Makeup,
}

impl Param {
    const ALL: [Param; 6] = [
        Param::Threshold,
        Param::Ratio,
        Param::Knee,
        Param::Attack,
        Param::Release,
        Param::Makeup,
    ];

    fn letter(self) -> &'static str {
        match self {
            Param::Threshold => "T",
            Param::Ratio => "R",
            Param::Knee => "K",
            Param::Attack => "A",
            Param::Release => "Re",
            Param::Makeup => "M",
        }
    }

    fn values(self) -> [f64; 5] {
        match self {
            Param::Threshold => [-40.0, -20.0, -10.0, -5.0, -3.0],
            Param::Ratio => [1.5, 2.0, 5.0, 8.0, 12.0],
            Param::Knee => [0.0, 5.0, 10.0, 20.0, 40.0],
            Param::Attack => [0.0, 0.001, 0.005, 0.010, 0.050],
            Param::Release => [0.010, 0.050, 0.100, 0.250, 0.500],
            Param::Makeup => [-1.0, 0.0, 3.0, 5.0, 7.0],
        }
    }

    fn substitute(self, base: CompressorSettings, value: f64) -> CompressorSettings {
        let mut s = base;
        match self {
            Param::Threshold => s.threshold_db = value,
            Param::Ratio => s.ratio = value,
            Param::Knee => s.knee_width_db = value,
            Param::Attack => s.attack_s = value,
            Param::Release => s.release_s = value,
            Param::Makeup => s.makeup_db = value,
        }
        s
    }
}

/// One named grid entry.
#[derive(Debug, Clone, PartialEq)]
pub struct GridEntry {
    /// `<base letter><parameter letter><1..5>`, e.g. `LM2`, `HRe1`.
    pub name: String,
    pub settings: CompressorSettings,
}

/// All 90 transformations: 3 bases x 6 parameters x 5 values.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformationGrid {
    entries: Vec<GridEntry>,
}

impl TransformationGrid {
    pub fn entries(&self) -> &[GridEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&GridEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Parameter axis values, for self-describing report metadata.
    pub fn parameter_values() -> Vec<(&'static str, [f64; 5])> {
        vec![
            ("threshold_db", Param::Threshold.values()),
            ("ratio", Param::Ratio.values()),
            ("knee_db", Param::Knee.values()),
            ("attack_s", Param::Attack.values()),
            ("release_s", Param::Release.values()),
            ("makeup_db", Param::Makeup.values()),
        ]
    }
}

/// Builds the 90-entry grid by substituting each candidate value of each
/// parameter into each base. An entry whose substituted value equals the
/// base's own value reproduces the base exactly; names stay unique.
pub fn build_grid() -> TransformationGrid {
    let mut entries = Vec::with_capacity(90);
    for base in base_settings() {
        for param in Param::ALL {
            for (idx, value) in param.values().into_iter().enumerate() {
                entries.push(GridEntry {
                    name: format!("{}{}{}", base.name.letter(), param.letter(), idx + 1),
                    settings: param.substitute(base.settings, value),
                });
            }
        }
    }
    TransformationGrid { entries }
}
