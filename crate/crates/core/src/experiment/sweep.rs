//! The sweep itself: train once per split on uncompressed audio, then score
//! every grid entry on compressed copies of the test clips.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::report::{EntryRecord, SweepMetadata, SweepReport};
use super::split::{split_indices, Split};
use super::{ExperimentError, TransformationGrid};
use crate::audio::{read_wav, AudioBuffer};
use crate::compressor::{compress, CompressorSettings};
use crate::features::{extract_feature_vector, FeatureConfig, FeatureVector};
use crate::svm::{predict_ovo, train_ovo, Gamma, SvmConfig, TrainedOvoModel};

/// One dataset clip: its file and its genre directory name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledClip {
    pub path: PathBuf,
    pub label: String,
}

/// Lists `<root>/<genre>/*.wav` clips, sorted by genre then file name.
pub fn load_dataset(root: &Path) -> Result<Vec<LabeledClip>, ExperimentError> {
    let io = |path: &Path, source: std::io::Error| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut genres: Vec<PathBuf> = fs::read_dir(root)
        .map_err(|e| io(root, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    genres.sort();
    let mut clips = Vec::new();
    for genre_dir in genres {
        let label = genre_dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut files: Vec<PathBuf> = fs::read_dir(&genre_dir)
            .map_err(|e| io(&genre_dir, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| {
                p.is_file()
                    && p.extension()
                        .map(|ext| ext.eq_ignore_ascii_case("wav"))
                        .unwrap_or(false)
            })
            .collect();
        files.sort();
        clips.extend(files.into_iter().map(|path| LabeledClip {
            path,
            label: label.clone(),
        }));
    }
    if clips.is_empty() {
        return Err(ExperimentError::EmptyDataset(root.to_path_buf()));
    }
    Ok(clips)
}

/// Sweep parameters; the SVM is always trained on uncompressed features.
#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub iterations: usize,
    pub seed: u64,
    pub test_fraction: f64,
    pub svm: SvmConfig,
    pub features: FeatureConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            iterations: 10,
            seed: 42,
            test_fraction: 0.2,
            svm: SvmConfig::default(),
            features: FeatureConfig::default(),
        }
    }
}

struct PreparedClip {
    label: String,
    audio: AudioBuffer,
    baseline: Vec<f64>,
}

/// Bit pattern of a settings value, the feature-cache key. Entries that
/// reproduce their base collapse onto one cache slot.
fn settings_key(s: &CompressorSettings) -> [u64; 6] {
    [
        s.threshold_db.to_bits(),
        s.ratio.to_bits(),
        s.knee_width_db.to_bits(),
        s.attack_s.to_bits(),
        s.release_s.to_bits(),
        s.makeup_db.to_bits(),
    ]
}

/// Runs the full protocol:
///
/// 1. load every clip and extract baseline features (failures drop the clip),
/// 2. derive one stratified split per iteration from `seed + iteration`,
/// 3. extract features of compressed test clips, cached per unique settings,
/// 4. per iteration: train one-vs-one on the uncompressed train features,
///    score the uncompressed baseline and every grid entry on the test set,
/// 5. aggregate means and deltas into a [`SweepReport`].
///
/// The result is a pure function of (clip bytes, grid, config); parallelism
/// only changes wall time.
pub fn run_sweep(
    clips: &[LabeledClip],
    grid: &TransformationGrid,
    config: &SweepConfig,
) -> Result<SweepReport, ExperimentError> {
    if config.iterations == 0 {
        return Err(ExperimentError::NoIterations);
    }

    // Load audio and baseline features in parallel, preserving clip order.
    let loaded: Vec<Option<PreparedClip>> = clips
        .par_iter()
        .map(|clip| {
            let audio = read_wav(&clip.path).ok()?;
            let baseline = extract_feature_vector(&audio, &config.features).ok()?;
            Some(PreparedClip {
                label: clip.label.clone(),
                audio,
                baseline: baseline.flatten().to_vec(),
            })
        })
        .collect();
    let dropped_clips = loaded.iter().filter(|c| c.is_none()).count();
    let prepared: Vec<PreparedClip> = loaded.into_iter().flatten().collect();
    if prepared.is_empty() {
        return Err(ExperimentError::NoUsableClips);
    }
    let labels: Vec<String> = prepared.iter().map(|c| c.label.clone()).collect();

    let splits: Vec<Split> = (0..config.iterations)
        .map(|k| split_indices(&labels, config.test_fraction, config.seed + k as u64))
        .collect::<Result<_, _>>()?;

    // Unique settings across the grid, and each entry's slot.
    let mut unique: Vec<CompressorSettings> = Vec::new();
    let mut slot_of: HashMap<[u64; 6], usize> = HashMap::new();
    let entry_slot: Vec<usize> = grid
        .entries()
        .iter()
        .map(|e| {
            *slot_of.entry(settings_key(&e.settings)).or_insert_with(|| {
                unique.push(e.settings);
                unique.len() - 1
            })
        })
        .collect();

    // Compress + re-extract features for every (test clip, unique setting),
    // shared across iterations.
    let test_union: BTreeSet<usize> = splits.iter().flat_map(|s| s.test.iter().copied()).collect();
    let jobs: Vec<(usize, usize)> = test_union
        .iter()
        .flat_map(|&ci| (0..unique.len()).map(move |si| (ci, si)))
        .collect();
    let computed: Vec<((usize, usize), Option<FeatureVector>)> = jobs
        .par_iter()
        .map(|&(ci, si)| {
            let squeezed = compress(&prepared[ci].audio, &unique[si]);
            ((ci, si), extract_feature_vector(&squeezed, &config.features).ok())
        })
        .collect();
    let mut skipped_extractions = 0usize;
    let mut cache: HashMap<(usize, usize), Vec<f64>> = HashMap::with_capacity(computed.len());
    for ((ci, si), features) in computed {
        match features {
            Some(f) => {
                cache.insert((ci, si), f.flatten().to_vec());
            }
            None => skipped_extractions += 1,
        }
    }

    let mut baseline_accuracies = Vec::with_capacity(config.iterations);
    let mut entry_accuracies: Vec<Vec<f64>> = vec![Vec::with_capacity(config.iterations); grid.len()];
    for split in &splits {
        let train_x: Vec<Vec<f64>> = split.train.iter().map(|&i| prepared[i].baseline.clone()).collect();
        let train_y: Vec<String> = split.train.iter().map(|&i| prepared[i].label.clone()).collect();
        let model: TrainedOvoModel = train_ovo(&train_x, &train_y, &config.svm)?;

        let mut correct = 0usize;
        for &i in &split.test {
            if predict_ovo(&model, &prepared[i].baseline)? == prepared[i].label {
                correct += 1;
            }
        }
        baseline_accuracies.push(correct as f64 / split.test.len() as f64);

        let per_entry: Vec<f64> = grid
            .entries()
            .par_iter()
            .enumerate()
            .map(|(e, _)| {
                let slot = entry_slot[e];
                let mut correct = 0usize;
                let mut total = 0usize;
                for &i in &split.test {
                    if let Some(features) = cache.get(&(i, slot)) {
                        total += 1;
                        if predict_ovo(&model, features).expect("cached dims match") == prepared[i].label {
                            correct += 1;
                        }
                    }
                }
                if total == 0 {
                    0.0
                } else {
                    correct as f64 / total as f64
                }
            })
            .collect();
        for (e, acc) in per_entry.into_iter().enumerate() {
            entry_accuracies[e].push(acc);
        }
    }

    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let baseline_mean = mean(&baseline_accuracies);
    let baseline = EntryRecord {
        name: "baseline".into(),
        settings: None,
        accuracies: baseline_accuracies,
        mean_accuracy: baseline_mean,
        delta_vs_baseline: 0.0,
    };
    let entries: Vec<EntryRecord> = grid
        .entries()
        .iter()
        .zip(entry_accuracies)
        .map(|(entry, accuracies)| {
            let mean_accuracy = mean(&accuracies);
            EntryRecord {
                name: entry.name.clone(),
                settings: Some(entry.settings),
                accuracies,
                mean_accuracy,
                delta_vs_baseline: mean_accuracy - baseline_mean,
            }
        })
        .collect();

    let mut classes: Vec<String> = labels.clone();
    classes.sort();
    classes.dedup();
    Ok(SweepReport {
        baseline,
        entries,
        metadata: SweepMetadata {
            seed: config.seed,
            test_fraction: config.test_fraction,
            iterations: config.iterations,
            gamma: match config.svm.gamma {
                Gamma::Auto => "auto".into(),
                Gamma::Fixed(g) => g.to_string(),
            },
            c: config.svm.c,
            classes,
            clips: prepared.len(),
            dropped_clips,
            skipped_extractions,
            parameter_grids: TransformationGrid::parameter_values()
                .into_iter()
                .map(|(name, values)| (name.to_string(), values.to_vec()))
                .collect(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::{default_genres, generate_dataset};
    use crate::experiment::{build_grid, GridEntry};

    fn tiny_dataset(dir: &Path) -> Vec<LabeledClip> {
        generate_dataset(dir, &default_genres(), 4, 2.5, 16_000, 7).unwrap();
        load_dataset(dir).unwrap()
    }

    #[test]
    fn load_dataset_walks_genre_directories() {
        let dir = tempfile::tempdir().unwrap();
        let clips = tiny_dataset(dir.path());
        assert_eq!(clips.len(), 16);
        let mut labels: Vec<&str> = clips.iter().map(|c| c.label.as_str()).collect();
        labels.dedup();
        assert_eq!(labels, vec!["chirp", "clicks", "noise", "pad"]);
        assert!(clips.iter().all(|c| c.path.extension().unwrap() == "wav"));
    }

    #[test]
    fn load_dataset_rejects_empty_root() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_dataset(dir.path()),
            Err(ExperimentError::EmptyDataset(_))
        ));
    }

    #[test]
    fn sweep_on_a_small_grid_is_deterministic_and_complete() {
        let dir = tempfile::tempdir().unwrap();
        let clips = tiny_dataset(dir.path());
        let grid = build_grid();
        // Two entries suffice for the unit test; the full grid runs in the
        // acceptance suite.
        let small = TransformationGrid {
            entries: vec![
                grid.get("HM2").unwrap().clone(),
                grid.get("LT1").unwrap().clone(),
            ],
        };
        let config = SweepConfig {
            iterations: 2,
            seed: 5,
            test_fraction: 0.25,
            ..SweepConfig::default()
        };
        let report = run_sweep(&clips, &small, &config).unwrap();
        assert_eq!(report.row_count(), 3);
        assert_eq!(report.baseline.accuracies.len(), 2);
        for entry in &report.entries {
            assert_eq!(entry.accuracies.len(), 2);
            for &a in &entry.accuracies {
                assert!((0.0..=1.0).contains(&a));
            }
            let min = entry.accuracies.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = entry.accuracies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(entry.mean_accuracy >= min && entry.mean_accuracy <= max);
        }
        // HM2 never reaches the quiet synthetic clips: exact no-op.
        let hm2 = report.entries.iter().find(|e| e.name == "HM2").unwrap();
        assert_eq!(hm2.accuracies, report.baseline.accuracies);
        assert_eq!(hm2.delta_vs_baseline, 0.0);

        let again = run_sweep(&clips, &small, &config).unwrap();
        assert_eq!(report, again);
        assert_eq!(report.to_csv(), again.to_csv());
    }

    #[test]
    fn settings_cache_key_collapses_duplicate_entries() {
        let grid = build_grid();
        let base = crate::experiment::base_settings()[0].settings;
        let duplicates: Vec<&GridEntry> = grid
            .entries()
            .iter()
            .filter(|e| e.settings == base)
            .collect();
        assert_eq!(duplicates.len(), 6, "one per varied parameter");
        let keys: BTreeSet<[u64; 6]> = duplicates
            .iter()
            .map(|e| settings_key(&e.settings))
            .collect();
        assert_eq!(keys.len(), 1);
    }
}
