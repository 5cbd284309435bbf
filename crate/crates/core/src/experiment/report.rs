//! Sweep results: CSV/JSON serialization and the ranked table.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::compressor::CompressorSettings;

/// Fixed header of the CSV report.
pub const REPORT_CSV_HEADER: &str =
    "name,threshold_db,ratio,knee_db,attack_s,release_s,makeup_db,mean_accuracy,delta_vs_baseline,iterations";

/// Accuracy record for one grid entry (or the uncompressed baseline, whose
/// `settings` is `None`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryRecord {
    pub name: String,
    pub settings: Option<CompressorSettings>,
    /// Test accuracy per split iteration, in iteration order.
    pub accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    /// Mean accuracy minus the baseline's mean accuracy (0 for the baseline).
    pub delta_vs_baseline: f64,
}

impl EntryRecord {
    fn csv_row(&self, iterations: usize) -> String {
        let settings = match &self.settings {
            Some(s) => format!(
                "{},{},{},{},{},{}",
                s.threshold_db, s.ratio, s.knee_width_db, s.attack_s, s.release_s, s.makeup_db
            ),
            None => ",,,,,".to_string(),
        };
        format!(
            "{},{},{},{},{}",
            self.name, settings, self.mean_accuracy, self.delta_vs_baseline, iterations
        )
    }
}

/// Everything needed to reproduce a sweep, embedded in the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub seed: u64,
    pub test_fraction: f64,
    pub iterations: usize,
    /// "auto" or the fixed value, as configured.
    pub gamma: String,
    pub c: f64,
    pub classes: Vec<String>,
    pub clips: usize,
    /// Clips dropped entirely (unreadable or baseline extraction failed).
    pub dropped_clips: usize,
    /// (clip, setting) feature extractions that failed and were skipped.
    pub skipped_extractions: usize,
    /// The five candidate values of each varied parameter.
    pub parameter_grids: Vec<(String, Vec<f64>)>,
}

/// Per-entry accuracies plus the baseline, in grid order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub baseline: EntryRecord,
    pub entries: Vec<EntryRecord>,
    pub metadata: SweepMetadata,
}

impl SweepReport {
    /// Grid entries plus the baseline footer row.
    pub fn row_count(&self) -> usize {
        self.entries.len() + 1
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_CSV_HEADER);
        out.push('\n');
        for entry in &self.entries {
            out.push_str(&entry.csv_row(self.metadata.iterations));
            out.push('\n');
        }
        out.push_str(&self.baseline.csv_row(self.metadata.iterations));
        out.push('\n');
        out
    }

    /// JSON variant with per-iteration detail and metadata.
    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Entries sorted by mean accuracy (descending, ties by name) with the
/// baseline kept aside as a footer.
#[derive(Debug, Clone)]
pub struct RankedTable<'r> {
    pub rows: Vec<&'r EntryRecord>,
    pub baseline: &'r EntryRecord,
}

impl RankedTable<'_> {
    /// Column layout of the rendered table.
    pub fn columns() -> &'static [&'static str] {
        &[
            "Name",
            "Threshold",
            "Ratio",
            "Knee Width",
            "Attack",
            "Release",
            "Makeup Gain",
            "Accuracy",
            "Delta",
        ]
    }
}

/// Ranks a finished report. `top_k` limits the number of rows (the baseline
/// footer is always present and never ranked).
pub fn rank_report(report: &SweepReport, top_k: usize) -> RankedTable<'_> {
    let mut rows: Vec<&EntryRecord> = report.entries.iter().collect();
    rows.sort_by(|a, b| {
        b.mean_accuracy
            .partial_cmp(&a.mean_accuracy)
            .expect("accuracies are finite")
            .then_with(|| a.name.cmp(&b.name))
    });
    rows.truncate(top_k);
    RankedTable {
        rows,
        baseline: &report.baseline,
    }
}

impl fmt::Display for RankedTable<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols = Self::columns();
        writeln!(
            f,
            "{:<6} {:>9} {:>6} {:>10} {:>7} {:>7} {:>11} {:>9} {:>8}",
            cols[0], cols[1], cols[2], cols[3], cols[4], cols[5], cols[6], cols[7], cols[8]
        )?;
        for row in &self.rows {
            let s = row.settings.as_ref().expect("ranked rows carry settings");
            writeln!(
                f,
                "{:<6} {:>9} {:>6} {:>10} {:>7} {:>7} {:>11} {:>9.4} {:>+8.4}",
                row.name,
                s.threshold_db,
                s.ratio,
                s.knee_width_db,
                s.attack_s,
                s.release_s,
                s.makeup_db,
                row.mean_accuracy,
                row.delta_vs_baseline
            )?;
        }
        writeln!(
            f,
            "{:<6} {:>9} {:>6} {:>10} {:>7} {:>7} {:>11} {:>9.4} {:>8}",
            "(none)", "-", "-", "-", "-", "-", "-", self.baseline.mean_accuracy, "baseline"
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(name: &str, mean: f64, delta: f64) -> EntryRecord {
        EntryRecord {
            name: name.into(),
            settings: Some(CompressorSettings::new(-10.0, 2.0, 0.0, 0.0, 0.1, 0.0).unwrap()),
            accuracies: vec![mean],
            mean_accuracy: mean,
            delta_vs_baseline: delta,
        }
    }

    fn toy_report() -> SweepReport {
        SweepReport {
            baseline: EntryRecord {
                name: "baseline".into(),
                settings: None,
                accuracies: vec![0.8],
                mean_accuracy: 0.8,
                delta_vs_baseline: 0.0,
            },
            entries: vec![
                record("AA1", 0.7, -0.1),
                record("BB1", 0.9, 0.1),
                record("AB1", 0.9, 0.1),
            ],
            metadata: SweepMetadata {
                seed: 1,
                test_fraction: 0.2,
                iterations: 1,
                gamma: "auto".into(),
                c: 1.0,
                classes: vec!["x".into(), "y".into()],
                clips: 4,
                dropped_clips: 0,
                skipped_extractions: 0,
                parameter_grids: vec![("ratio".into(), vec![1.5, 2.0, 5.0, 8.0, 12.0])],
            },
        }
    }

    #[test]
    fn csv_has_fixed_header_and_baseline_footer() {
        let report = toy_report();
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines[0], REPORT_CSV_HEADER);
        assert_eq!(lines.len() - 1, report.row_count());
        assert!(lines.last().unwrap().starts_with("baseline,,,,,,"));
        assert!(lines[1].starts_with("AA1,-10,2,0,0,0.1,0,"));
    }

    #[test]
    fn ranking_sorts_by_accuracy_then_name() {
        let report = toy_report();
        let table = rank_report(&report, 5);
        let names: Vec<&str> = table.rows.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, vec!["AB1", "BB1", "AA1"]);
        let top2 = rank_report(&report, 2);
        assert_eq!(top2.rows.len(), 2);
        assert_eq!(top2.baseline.name, "baseline");
    }

    #[test]
    fn json_round_trips() {
        let report = toy_report();
        let json = report.to_json().unwrap();
        assert_eq!(SweepReport::from_json(&json).unwrap(), report);
        assert!(json.contains("\"parameter_grids\""));
    }

    #[test]
    fn display_table_carries_published_column_names() {
        let report = toy_report();
        let shown = rank_report(&report, 3).to_string();
        for col in RankedTable::columns() {
            assert!(shown.contains(col), "missing column {col}");
        }
        assert!(shown.contains("baseline"));
    }
}
