//! All-pairs probability matrices.
//!
//! Rows are input values and columns are weight values. In exact mode the
//! matrix has ones on the diagonal (`i == w`) and on the anti-diagonal
//! (`w == complement(i)`), since a weight and its complement differ by a
//! global phase.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::value_count;
use crate::perceptron::{self, closed_form_probability, MeasureMode, Perceptron, PerceptronConfig};
use crate::rng::{derive_seed, seeded_rng, STREAM_INIT};
use crate::{format_probability, round_significant, Error, Result};

/// Largest `n` swept exhaustively; `n = 4` would be `2^32` cells.
pub const MAX_SWEEP_N: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMatrix {
    pub n: usize,
    pub mode: MeasureMode,
    pub shots: u64,
    pub seed: u64,
    /// `probs[input][weight]`, rounded to 12 significant digits.
    pub probs: Vec<Vec<f64>>,
}

/// Probability for every `(input, weight)` pair. Sampled cells use seed
/// `derive_seed(config.seed, input · 2^m + weight)`.
pub fn sweep(config: &PerceptronConfig) -> Result<SweepMatrix> {
    config.validate()?;
    if config.n > MAX_SWEEP_N {
        return Err(Error::Unsupported {
            message: format!(
                "exhaustive sweep supports n <= {MAX_SWEEP_N} (n = {} would need {} cells); \
                 use a random subsample instead",
                config.n,
                if config.n == 4 {
                    "2^32".to_string()
                } else {
                    "more than 2^32".to_string()
                }
            ),
        });
    }
    let size = value_count(config.n)?;
    let columns = (0..size)
        .into_par_iter()
        .map(|w| {
            let p = Perceptron::new(w, *config)?;
            (0..size)
                .map(|i| {
                    let seed = derive_seed(config.seed, i * size + w);
                    p.measure_with_seed(i, seed).map(round_significant)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let probs = (0..size as usize)
        .map(|i| columns.iter().map(|col| col[i]).collect())
        .collect();
    Ok(SweepMatrix {
        n: config.n,
        mode: config.mode,
        shots: config.shots,
        seed: config.seed,
        probs,
    })
}

impl SweepMatrix {
    pub fn size(&self) -> usize {
        self.probs.len()
    }

    /// Largest |cell − closed form| over the matrix.
    pub fn max_oracle_deviation(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for (i, row) in self.probs.iter().enumerate() {
            for (w, &p) in row.iter().enumerate() {
                let expected = closed_form_probability(i as u64, w as u64, self.n)?;
                worst = worst.max((p - expected).abs());
            }
        }
        Ok(worst)
    }

    /// Largest |probs[i][w] − probs[w][i]|.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, row) in self.probs.iter().enumerate() {
            for (w, &p) in row.iter().enumerate().skip(i + 1) {
                worst = worst.max((p - self.probs[w][i]).abs());
            }
        }
        worst
    }

    fn provenance_tag(&self) -> String {
        format!(
            "n={};mode={};shots={};seed={}",
            self.n, self.mode, self.shots, self.seed
        )
    }

    /// CSV with weight values across the first row and input values down the
    /// first column. The corner cell carries the provenance.
    pub fn to_csv(&self) -> String {
        let mut out = self.provenance_tag();
        for w in 0..self.size() {
            let _ = write!(out, ",{w}");
        }
        out.push('\n');
        for (i, row) in self.probs.iter().enumerate() {
            let _ = write!(out, "{i}");
            for &p in row {
                let _ = write!(out, ",{}", format_probability(p));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("sweep serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: SweepMatrix = serde_json::from_str(text)
            .map_err(|e| Error::parse(e.line(), "json", e.to_string()))?;
        m.check_shape(0)?;
        Ok(m)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "header", "file is empty"))?;
        let mut cells = header.split(',');
        let tag = cells.next().unwrap_or_default();
        let mut matrix = parse_provenance(tag)?;
        for (expected, cell) in cells.enumerate() {
            if cell.parse::<usize>().ok() != Some(expected) {
                return Err(Error::parse(
                    1,
                    "header",
                    format!("expected weight {expected}, found `{cell}`"),
                ));
            }
        }
        for (line, text) in lines.filter(|(_, l)| !l.trim().is_empty()) {
            let mut cells = text.split(',');
            let row = matrix.probs.len();
            if cells.next().and_then(|c| c.parse::<usize>().ok()) != Some(row) {
                return Err(Error::parse(line, "input", format!("expected input {row}")));
            }
            let probs = cells
                .map(|c| {
                    c.parse::<f64>()
                        .map_err(|e| Error::parse(line, "probability", e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            matrix.probs.push(probs);
        }
        matrix.check_shape(0)?;
        Ok(matrix)
    }

    fn check_shape(&self, line: usize) -> Result<()> {
        let size = value_count(self.n)? as usize;
        if self.probs.len() != size || self.probs.iter().any(|r| r.len() != size) {
            return Err(Error::parse(
                line,
                "probs",
                format!("matrix must be {size}x{size}"),
            ));
        }
        Ok(())
    }
}

fn parse_provenance(tag: &str) -> Result<SweepMatrix> {
    let bad = |msg: String| Error::parse(1, "provenance", msg);
    let mut matrix = SweepMatrix {
        n: 0,
        mode: MeasureMode::Exact,
        shots: 0,
        seed: 0,
        probs: Vec::new(),
    };
    for part in tag.split(';') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, found `{part}`")))?;
        let num = || value.parse::<u64>().map_err(|e| bad(format!("{key}: {e}")));
        match key {
            "n" => matrix.n = num()? as usize,
            "shots" => matrix.shots = num()?,
            "seed" => matrix.seed = num()?,
            "mode" => {
                matrix.mode = match value {
                    "exact" => MeasureMode::Exact,
                    "sampled" => MeasureMode::Sampled,
                    other => return Err(bad(format!("unknown mode `{other}`"))),
                }
            }
            other => return Err(bad(format!("unknown key `{other}`"))),
        }
    }
    Ok(matrix)
}

/// One cell of a random subsample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub input: u64,
    pub weight: u64,
    pub probability: f64,
}

/// `count` uniformly random `(input, weight)` cells, drawn from `config.seed`.
/// Works for any supported `n`, including those too large to sweep.
pub fn sample_cells(count: usize, config: &PerceptronConfig) -> Result<Vec<SweepCell>> {
    config.validate()?;
    let max = perceptron::max_value(config.n);
    let mut rng = seeded_rng(config.seed, STREAM_INIT);
    let pairs: Vec<(u64, u64)> = (0..count)
        .map(|_| (rng.random_range(0..=max), rng.random_range(0..=max)))
        .collect();
    pairs
        .into_par_iter()
        .enumerate()
        .map(|(k, (input, weight))| {
            let p = Perceptron::new(weight, *config)?;
            let probability =
                round_significant(p.measure_with_seed(input, derive_seed(config.seed, k as u64))?);
            Ok(SweepCell {
                input,
                weight,
                probability,
            })
        })
        .collect()
}

pub fn cells_to_csv(cells: &[SweepCell]) -> String {
    let mut out = String::from("input,weight,probability\n");
    for c in cells {
        let _ = writeln!(
            out,
            "{},{},{}",
            c.input,
            c.weight,
            format_probability(c.probability)
        );
    }
    out
}

pub fn cells_to_json(cells: &[SweepCell]) -> String {
    let mut s = serde_json::to_string(cells).expect("cells serialize");
    s.push('\n');
    s
}
