//! Exhaustive labeled datasets.
//!
//! Every input `0..2^m` is measured against a fixed weight and labeled 1 when
//! the ancilla probability is at least 0.5.
//!
//! On disk a dataset is two files: a CSV with header `value,label,probability`
//! holding one row per input in ascending order, and a JSON sidecar at
//! `<csv path>.json` holding `n`, the weight and the measurement provenance.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::perceptron::{self, MeasureMode, Perceptron, PerceptronConfig};
use crate::rng::derive_seed;
use crate::{format_probability, io, round_significant, Error, Result};

pub const CSV_HEADER: &str = "value,label,probability";

/// Largest `n` for which exhaustive enumeration (`2^(2^n)` inputs) is done.
pub const MAX_EXHAUSTIVE_N: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub value: u64,
    pub label: u8,
    pub probability: f64,
}

impl LabeledExample {
    /// Label 1 iff `probability >= 0.5`.
    pub fn from_probability(value: u64, probability: f64) -> Self {
        Self {
            value,
            label: u8::from(probability >= 0.5),
            probability,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub n: usize,
    pub optimal_weight: u64,
    pub mode: MeasureMode,
    pub shots: u64,
    pub seed: u64,
    pub examples: Vec<LabeledExample>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Metadata {
    n: usize,
    optimal_weight: u64,
    mode: MeasureMode,
    shots: u64,
    seed: u64,
    rows: u64,
}

/// Number of distinct inputs, `2^(2^n)`, for exhaustive workflows.
pub fn value_count(n: usize) -> Result<u64> {
    perceptron::check_n(n)?;
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::Unsupported {
            message: format!("exhaustive enumeration needs n <= {MAX_EXHAUSTIVE_N}, got n = {n}"),
        });
    }
    Ok(1 << perceptron::bit_width(n))
}

/// Labels every input against `optimal_weight`.
///
/// Probabilities are stored at 12 significant digits and labels are derived
/// from the stored value, so a saved dataset reloads identically. In sampled
/// mode input `v` is measured with seed `derive_seed(config.seed, v)`.
pub fn generate_dataset(optimal_weight: u64, config: &PerceptronConfig) -> Result<Dataset> {
    let count = value_count(config.n)?;
    perceptron::check_value("optimal weight", optimal_weight, config.n)?;
    let perceptron = Perceptron::new(optimal_weight, *config)?;
    let examples = (0..count)
        .into_par_iter()
        .map(|value| {
            let p = perceptron.measure_with_seed(value, derive_seed(config.seed, value))?;
            Ok(LabeledExample::from_probability(
                value,
                round_significant(p),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        n: config.n,
        optimal_weight,
        mode: config.mode,
        shots: config.shots,
        seed: config.seed,
        examples,
    })
}

/// Path of the JSON sidecar for a dataset CSV.
pub fn metadata_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.examples.len() * 24);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for ex in &self.examples {
            let _ = writeln!(
                out,
                "{},{},{}",
                ex.value,
                ex.label,
                format_probability(ex.probability)
            );
        }
        out
    }

    fn metadata_json(&self) -> String {
        let meta = Metadata {
            n: self.n,
            optimal_weight: self.optimal_weight,
            mode: self.mode,
            shots: self.shots,
            seed: self.seed,
            rows: self.examples.len() as u64,
        };
        let mut s = serde_json::to_string_pretty(&meta).expect("metadata serializes");
        s.push('\n');
        s
    }

    /// Writes the CSV and its sidecar, each atomically.
    pub fn save(&self, path: &Path) -> Result<()> {
        io::write_atomic(path, self.to_csv().as_bytes())?;
        io::write_atomic(&metadata_path(path), self.metadata_json().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let meta_path = metadata_path(path);
        let meta: Metadata =
            serde_json::from_str(&io::read_to_string(&meta_path)?).map_err(|source| {
                Error::Metadata {
                    path: meta_path.clone(),
                    source,
                }
            })?;
        let csv = io::read_to_string(path)?;
        Self::parse(meta, &csv)
    }

    fn parse(meta: Metadata, csv: &str) -> Result<Self> {
        let expected = value_count(meta.n)?;
        perceptron::check_value("optimal weight", meta.optimal_weight, meta.n)?;
        if meta.rows != expected {
            return Err(Error::parse(
                0,
                "rows",
                format!(
                    "metadata declares {} rows, n = {} requires {expected}",
                    meta.rows, meta.n
                ),
            ));
        }
        let mut lines = csv.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, header)) if header.trim_end() == CSV_HEADER => {}
            Some((_, other)) => {
                return Err(Error::parse(
                    1,
                    "header",
                    format!("expected `{CSV_HEADER}`, found `{other}`"),
                ))
            }
            None => return Err(Error::parse(1, "header", "file is empty")),
        }

        let mut examples = Vec::with_capacity(expected as usize);
        for (line, text) in lines {
            if text.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = text.trim_end().split(',').collect();
            if fields.len() != 3 {
                return Err(Error::parse(
                    line,
                    "row",
                    format!("expected 3 fields, found {}", fields.len()),
                ));
            }
            let value: u64 = fields[0]
                .parse()
                .map_err(|e| Error::parse(line, "value", format!("{e}")))?;
            let next = examples.len() as u64;
            if value != next {
                return Err(Error::parse(
                    line,
                    "value",
                    format!("expected {next} (values must be consecutive from 0)"),
                ));
            }
            let label = match fields[1] {
                "0" => 0,
                "1" => 1,
                other => {
                    return Err(Error::parse(
                        line,
                        "label",
                        format!("must be 0 or 1, found `{other}`"),
                    ))
                }
            };
            let probability: f64 = fields[2]
                .parse()
                .map_err(|e| Error::parse(line, "probability", format!("{e}")))?;
            if !(0.0..=1.0).contains(&probability) {
                return Err(Error::parse(
                    line,
                    "probability",
                    format!("{probability} is outside [0, 1]"),
                ));
            }
            if (probability >= 0.5) != (label == 1) {
                return Err(Error::parse(
                    line,
                    "label",
                    format!("label {label} disagrees with probability {probability}"),
                ));
            }
            examples.push(LabeledExample {
                value,
                label,
                probability,
            });
        }
        if examples.len() as u64 != expected {
            return Err(Error::parse(
                0,
                "rows",
                format!("found {} rows, expected {expected}", examples.len()),
            ));
        }
        Ok(Dataset {
            n: meta.n,
            optimal_weight: meta.optimal_weight,
            mode: meta.mode,
            shots: meta.shots,
            seed: meta.seed,
            examples,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perceptron::complement;

    #[test]
    fn sixteen_examples_at_n2() {
        for w in [0, 5, 12, 15] {
            let ds = generate_dataset(w, &PerceptronConfig::exact(2)).unwrap();
            assert_eq!(ds.len(), 16);
            assert!(ds
                .examples
                .iter()
                .enumerate()
                .all(|(i, e)| e.value == i as u64));
        }
    }

    #[test]
    fn weight_zero_labels() {
        let ds = generate_dataset(0, &PerceptronConfig::exact(2)).unwrap();
        assert_eq!(ds.examples[0].probability, 1.0);
        assert_eq!(ds.examples[0].label, 1);
        assert_eq!(ds.examples[3].probability, 0.0);
        assert_eq!(ds.examples[3].label, 0);
    }

    #[test]
    fn weight_and_complement_labeled_one() {
        let ds = generate_dataset(9, &PerceptronConfig::exact(2)).unwrap();
        for v in [9, complement(9, 2)] {
            assert_eq!(ds.examples[v as usize].probability, 1.0);
            assert_eq!(ds.examples[v as usize].label, 1);
        }
    }

    #[test]
    fn threshold_tie_goes_to_one() {
        assert_eq!(LabeledExample::from_probability(0, 0.5).label, 1);
        assert_eq!(LabeledExample::from_probability(0, 0.4999999).label, 0);
    }

    #[test]
    fn out_of_range_weight() {
        assert!(matches!(
            generate_dataset(16, &PerceptronConfig::exact(2)),
            Err(Error::ValueOutOfRange { value: 16, .. })
        ));
        assert!(generate_dataset(0, &PerceptronConfig::exact(5)).is_err());
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.csv");
        for cfg in [
            PerceptronConfig::exact(2),
            PerceptronConfig::sampled(2, 333, 5),
        ] {
            let ds = generate_dataset(12, &cfg).unwrap();
            ds.save(&path).unwrap();
            assert_eq!(Dataset::load(&path).unwrap(), ds);
        }
    }

    fn write_pair(dir: &Path, csv: &str) -> PathBuf {
        let path = dir.join("bad.csv");
        let ds = generate_dataset(12, &PerceptronConfig::exact(2)).unwrap();
        std::fs::write(metadata_path(&path), ds.metadata_json()).unwrap();
        std::fs::write(&path, csv).unwrap();
        path
    }

    #[test]
    fn rejects_bad_label() {
        let dir = tempfile::tempdir().unwrap();
        let good = generate_dataset(12, &PerceptronConfig::exact(2))
            .unwrap()
            .to_csv();
        let bad = good.replacen("\n1,0,", "\n1,2,", 1);
        let err = Dataset::load(&write_pair(dir.path(), &bad)).unwrap_err();
        match err {
            Error::Parse { line, field, .. } => {
                assert_eq!(line, 3);
                assert_eq!(field, "label");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn rejects_missing_header() {
        let dir = tempfile::tempdir().unwrap();
        let good = generate_dataset(12, &PerceptronConfig::exact(2))
            .unwrap()
            .to_csv();
        let headless: String = good.lines().skip(1).map(|l| format!("{l}\n")).collect();
        let err = Dataset::load(&write_pair(dir.path(), &headless)).unwrap_err();
        assert!(
            matches!(err, Error::Parse { line: 1, ref field, .. } if field == "header"),
            "{err}"
        );
    }

    #[test]
    fn rejects_truncated_and_unordered() {
        let dir = tempfile::tempdir().unwrap();
        let good = generate_dataset(12, &PerceptronConfig::exact(2))
            .unwrap()
            .to_csv();
        let truncated: String = good.lines().take(10).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            Dataset::load(&write_pair(dir.path(), &truncated)),
            Err(Error::Parse { ref field, .. }) if field == "rows"
        ));
        let swapped = good.replacen("\n1,", "\n7,", 1);
        assert!(matches!(
            Dataset::load(&write_pair(dir.path(), &swapped)),
            Err(Error::Parse { line: 3, ref field, .. }) if field == "value"
        ));
    }

    #[test]
    fn missing_sidecar_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nothing.csv");
        std::fs::write(&path, "value,label,probability\n").unwrap();
        assert!(matches!(Dataset::load(&path), Err(Error::Io { .. })));
    }
}
