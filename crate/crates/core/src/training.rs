//! Bit-flip training of the perceptron weight.
//!
//! The weight starts as a uniformly random `m`-bit integer. Each example of a
//! dataset is classified with the current weight; on a miss the weight is
//! nudged by flipping `max(1, floor(lr · |candidates|))` randomly chosen bits:
//!
//! - predicted 0, actual 1: candidates are the bits where weight and input
//!   differ, so the weight moves toward the input;
//! - predicted 1, actual 0: candidates are the bits where they agree, so the
//!   weight moves away from it.
//!
//! Correct predictions leave the weight alone. Training stops once the weight
//! passes the convergence test or after `max_epochs` full passes.
//!
//! Bit positions throughout are MSB-first indices `0..m`, the same indexing
//! as [`SignVector`](crate::perceptron::SignVector) entries.

use std::io::Write;

use rand::seq::index;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::perceptron::{self, bit_width, complement, Perceptron, PerceptronConfig};
use crate::rng::{derive_seed, seeded_rng, STREAM_FLIP, STREAM_INIT, STREAM_MEASURE};
use crate::{Error, Result};

pub const DEFAULT_LEARNING_RATE: f64 = 0.5;
pub const DEFAULT_MAX_EPOCHS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvergenceMode {
    /// Only the target weight itself.
    Strict,
    /// The target weight or its bitwise complement; both classify every
    /// input identically.
    Functional,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub n: usize,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub seed: u64,
    pub measurement: PerceptronConfig,
    pub convergence: ConvergenceMode,
}

impl TrainConfig {
    /// Defaults: learning rate 0.5, 1000 epochs, exact measurement,
    /// functional convergence.
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            learning_rate: DEFAULT_LEARNING_RATE,
            max_epochs: DEFAULT_MAX_EPOCHS,
            seed,
            measurement: PerceptronConfig::exact(n),
            convergence: ConvergenceMode::Functional,
        }
    }

    pub fn validate(&self) -> Result<()> {
        perceptron::check_n(self.n)?;
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::InvalidLearningRate(self.learning_rate));
        }
        if self.max_epochs == 0 {
            return Err(Error::InvalidMaxEpochs);
        }
        if self.measurement.n != self.n {
            return Err(Error::DatasetMismatch {
                dataset: self.measurement.n,
                config: self.n,
            });
        }
        self.measurement.validate()
    }

    fn is_converged(&self, weight: u64, target: u64) -> bool {
        match self.convergence {
            ConvergenceMode::Strict => weight == target,
            ConvergenceMode::Functional => weight == target || weight == complement(target, self.n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlipAction {
    None,
    FlipNonMatching,
    FlipMatching,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainStep {
    pub epoch: usize,
    pub example_value: u64,
    pub p1: f64,
    pub predicted: u8,
    pub actual: u8,
    pub action: FlipAction,
    pub flipped_positions: Vec<usize>,
    pub weight_before: u64,
    pub weight_after: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainResult {
    pub converged: bool,
    pub initial_weight: u64,
    pub final_weight: u64,
    pub epochs_run: usize,
    pub trace: Vec<TrainStep>,
}

impl TrainResult {
    /// Number of steps that changed the weight.
    pub fn update_count(&self) -> usize {
        self.trace
            .iter()
            .filter(|s| s.action != FlipAction::None)
            .count()
    }

    /// Writes the trace as JSON lines, one step per line.
    pub fn write_trace<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for step in &self.trace {
            serde_json::to_writer(&mut out, step)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn trace_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_trace(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }
}

/// Uniform weight in `[0, 2^m - 1]` drawn from `seed`.
pub fn init_weight(n: usize, seed: u64) -> Result<u64> {
    perceptron::check_n(n)?;
    let mut rng = seeded_rng(seed, STREAM_INIT);
    Ok(uniform_weight(n, &mut rng))
}

fn uniform_weight<R: RngCore>(n: usize, rng: &mut R) -> u64 {
    let max = perceptron::max_value(n);
    if max == u64::MAX {
        rng.next_u64()
    } else {
        rng.random_range(0..=max)
    }
}

/// Hamming distance between the low `m` bits of `a` and `b`.
pub fn count_non_matching_bits(a: u64, b: u64, m: usize) -> u32 {
    let mask = if m >= 64 { u64::MAX } else { (1u64 << m) - 1 };
    ((a ^ b) & mask).count_ones()
}

/// MSB-first positions where `a` and `b` differ (`matching = false`) or
/// agree (`matching = true`).
pub fn bit_positions(a: u64, b: u64, m: usize, matching: bool) -> Vec<usize> {
    (0..m)
        .filter(|&j| {
            let bit = 1u64 << (m - 1 - j);
            ((a ^ b) & bit == 0) == matching
        })
        .collect()
}

/// Number of bits flipped for a candidate set of the given size.
pub fn flip_count(learning_rate: f64, candidates: usize) -> usize {
    ((learning_rate * candidates as f64).floor() as usize).clamp(1, candidates.max(1))
}

/// Inverts `max(1, floor(lr · |candidates|))` distinct positions of `weight`
/// chosen uniformly from `candidates`. Returns the new weight and the flipped
/// positions in ascending order.
///
/// # Panics
///
/// If `candidates` is empty.
pub fn flip_bits<R: Rng + ?Sized>(
    weight: u64,
    candidates: &[usize],
    m: usize,
    learning_rate: f64,
    rng: &mut R,
) -> (u64, Vec<usize>) {
    assert!(
        !candidates.is_empty(),
        "flip_bits needs at least one candidate"
    );
    let k = flip_count(learning_rate, candidates.len());
    let mut flipped: Vec<usize> = index::sample(rng, candidates.len(), k)
        .into_iter()
        .map(|i| candidates[i])
        .collect();
    flipped.sort_unstable();
    let new_weight = flipped
        .iter()
        .fold(weight, |w, &j| w ^ (1u64 << (m - 1 - j)));
    (new_weight, flipped)
}

/// Trains a weight against `dataset`, aiming for `target`.
///
/// Randomness comes from three independent sources derived from
/// `config.seed`: the initial weight, the choice of bits to flip, and (in
/// sampled mode) one measurement seed per step.
pub fn train(dataset: &Dataset, target: u64, config: &TrainConfig) -> Result<TrainResult> {
    config.validate()?;
    if dataset.n != config.n {
        return Err(Error::DatasetMismatch {
            dataset: dataset.n,
            config: config.n,
        });
    }
    perceptron::check_value("optimal weight", target, config.n)?;

    let m = bit_width(config.n);
    let initial_weight = init_weight(config.n, config.seed)?;
    let mut flip_rng = seeded_rng(config.seed, STREAM_FLIP);
    let mut measure_rng = seeded_rng(config.seed, STREAM_MEASURE);
    let mut weight = initial_weight;
    let mut trace = Vec::new();

    let done = |weight, epochs_run, trace| TrainResult {
        converged: true,
        initial_weight,
        final_weight: weight,
        epochs_run,
        trace,
    };
    if config.is_converged(weight, target) {
        return Ok(done(weight, 0, trace));
    }

    let mut perceptron = Perceptron::new(weight, config.measurement)?;
    for epoch in 1..=config.max_epochs {
        for ex in &dataset.examples {
            if perceptron.weight() != weight {
                perceptron = Perceptron::new(weight, config.measurement)?;
            }
            let seed = derive_seed(measure_rng.next_u64(), ex.value);
            let p1 = perceptron.measure_with_seed(ex.value, seed)?;
            let predicted = u8::from(p1 >= 0.5);

            let (action, candidates) = match (predicted, ex.label) {
                (0, 1) => (
                    FlipAction::FlipNonMatching,
                    bit_positions(weight, ex.value, m, false),
                ),
                (1, 0) => (
                    FlipAction::FlipMatching,
                    bit_positions(weight, ex.value, m, true),
                ),
                _ => (FlipAction::None, Vec::new()),
            };

            let weight_before = weight;
            let (action, flipped_positions) = if candidates.is_empty() {
                // Either a correct prediction or a miss with nothing to flip.
                (FlipAction::None, Vec::new())
            } else {
                let (w, flipped) =
                    flip_bits(weight, &candidates, m, config.learning_rate, &mut flip_rng);
                weight = w;
                (action, flipped)
            };

            trace.push(TrainStep {
                epoch,
                example_value: ex.value,
                p1,
                predicted,
                actual: ex.label,
                action,
                flipped_positions,
                weight_before,
                weight_after: weight,
            });

            if action != FlipAction::None && config.is_converged(weight, target) {
                return Ok(done(weight, epoch, trace));
            }
        }
    }

    Ok(TrainResult {
        converged: false,
        initial_weight,
        final_weight: weight,
        epochs_run: config.max_epochs,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate_dataset;

    #[test]
    fn init_weight_is_deterministic_and_in_range() {
        assert_eq!(init_weight(2, 17).unwrap(), init_weight(2, 17).unwrap());
        for seed in 0..200 {
            assert!(init_weight(2, seed).unwrap() <= 15);
        }
        assert!(init_weight(6, 3).is_ok());
        assert!(init_weight(0, 3).is_err());
    }

    #[test]
    fn init_weight_frequencies() {
        // Each count ~ Binomial(10⁴, 1/16): mean 625, σ ≈ 24.2, 4σ ≈ 96.8.
        let mut counts = [0usize; 16];
        for seed in 0..10_000 {
            counts[init_weight(2, seed).unwrap() as usize] += 1;
        }
        let sigma = (10_000.0f64 * (1.0 / 16.0) * (15.0 / 16.0)).sqrt();
        for (v, &c) in counts.iter().enumerate() {
            assert!((c as f64 - 625.0).abs() < 4.0 * sigma, "value {v}: {c}");
        }
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(count_non_matching_bits(12, 12, 4), 0);
        assert_eq!(count_non_matching_bits(12, 3, 4), 4);
        assert_eq!(count_non_matching_bits(626, 626 ^ 5, 16), 2);
        assert_eq!(count_non_matching_bits(0, u64::MAX, 64), 64);
        assert_eq!(count_non_matching_bits(0, 0xFF, 4), 4);
    }

    #[test]
    fn positions_are_msb_first() {
        // 12 = 1100, 10 = 1010: bits 1 and 2 (MSB-first) differ.
        assert_eq!(bit_positions(12, 10, 4, false), vec![1, 2]);
        assert_eq!(bit_positions(12, 10, 4, true), vec![0, 3]);
    }

    #[test]
    fn full_rate_flip_reaches_input() {
        let mut rng = seeded_rng(1, STREAM_FLIP);
        for (w, i) in [(0u64, 15u64), (626, 12345), (7, 8)] {
            let cand = bit_positions(w, i, 16, false);
            let (new_w, flipped) = flip_bits(w, &cand, 16, 1.0, &mut rng);
            assert_eq!(new_w, i);
            assert_eq!(flipped, cand);
        }
    }

    #[test]
    fn flip_count_rounds_down_with_floor_guard() {
        let mut rng = seeded_rng(2, STREAM_FLIP);
        let (_, flipped) = flip_bits(0, &[0, 3, 5, 7, 9], 16, 0.5, &mut rng);
        assert_eq!(flipped.len(), 2);
        let (w, flipped) = flip_bits(0, &[4], 8, 0.1, &mut rng);
        assert_eq!(flipped, vec![4]);
        assert_eq!(w, 0b0000_1000);
        assert_eq!(flip_count(0.5, 4), 2);
        assert_eq!(flip_count(0.3, 3), 1);
    }

    #[test]
    #[should_panic]
    fn flip_bits_rejects_empty_candidates() {
        let mut rng = seeded_rng(0, STREAM_FLIP);
        flip_bits(0, &[], 4, 0.5, &mut rng);
    }

    #[test]
    fn config_validation() {
        let mut cfg = TrainConfig::new(2, 0);
        assert!(cfg.validate().is_ok());
        cfg.learning_rate = 0.0;
        assert!(matches!(cfg.validate(), Err(Error::InvalidLearningRate(_))));
        cfg.learning_rate = 1.5;
        assert!(cfg.validate().is_err());
        cfg.learning_rate = f64::NAN;
        assert!(cfg.validate().is_err());
        cfg.learning_rate = 1.0;
        cfg.max_epochs = 0;
        assert!(matches!(cfg.validate(), Err(Error::InvalidMaxEpochs)));
    }

    #[test]
    fn dataset_mismatch() {
        let ds = generate_dataset(3, &PerceptronConfig::exact(2)).unwrap();
        let cfg = TrainConfig::new(3, 0);
        assert!(matches!(
            train(&ds, 3, &cfg),
            Err(Error::DatasetMismatch { .. })
        ));
    }

    #[test]
    fn converged_before_any_update() {
        let ds = generate_dataset(12, &PerceptronConfig::exact(2)).unwrap();
        let seed = (0..).find(|&s| init_weight(2, s).unwrap() == 12).unwrap();
        let result = train(&ds, 12, &TrainConfig::new(2, seed)).unwrap();
        assert!(result.converged);
        assert_eq!(result.final_weight, 12);
        assert_eq!(result.epochs_run, 0);
        assert!(result.trace.is_empty());
    }

    #[test]
    fn updates_always_change_the_weight() {
        let ds = generate_dataset(12, &PerceptronConfig::exact(2)).unwrap();
        for seed in 0..20 {
            let result = train(&ds, 12, &TrainConfig::new(2, seed)).unwrap();
            for step in &result.trace {
                assert_eq!(
                    step.action == FlipAction::None,
                    step.weight_after == step.weight_before
                );
            }
        }
    }

    #[test]
    fn strict_mode_rejects_complement() {
        let ds = generate_dataset(12, &PerceptronConfig::exact(2)).unwrap();
        let seed = (0..).find(|&s| init_weight(2, s).unwrap() == 3).unwrap();
        let functional = train(&ds, 12, &TrainConfig::new(2, seed)).unwrap();
        assert!(functional.converged);
        assert_eq!(functional.final_weight, 3);

        let strict = TrainConfig {
            convergence: ConvergenceMode::Strict,
            max_epochs: 3,
            ..TrainConfig::new(2, seed)
        };
        let result = train(&ds, 12, &strict).unwrap();
        // The complement classifies everything correctly, so it never moves.
        assert!(!result.converged);
        assert_eq!(result.final_weight, 3);
        assert_eq!(result.epochs_run, 3);
        assert_eq!(result.update_count(), 0);
    }

    #[test]
    fn trace_serializes_as_json_lines() {
        let ds = generate_dataset(12, &PerceptronConfig::exact(2)).unwrap();
        let seed = (0..)
            .find(|&s| ![3, 12].contains(&init_weight(2, s).unwrap()))
            .unwrap();
        let result = train(&ds, 12, &TrainConfig::new(2, seed)).unwrap();
        let jsonl = result.trace_jsonl();
        assert_eq!(jsonl.lines().count(), result.trace.len());
        let first: TrainStep = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
        assert_eq!(first, result.trace[0]);
        assert!(jsonl.contains("\"action\":\"none\""));
    }
}
