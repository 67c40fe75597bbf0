//! The quantum perceptron.
//!
//! An input `i` and a weight `w` are integers with `m = 2^n` bits. Each is
//! encoded MSB-first as a sign vector (bit 1 → −1, bit 0 → +1) and loaded as
//! phases on `n` data qubits:
//!
//! ```text
//! |ψ_i⟩ = D(i) H^⊗n |0…0⟩ = (1/√m) Σ_j i_j |j⟩
//! ```
//!
//! where `D(v)` is the diagonal sign oracle. The weight side applies
//! `D(w)`, `H^⊗n`, `X^⊗n`, which maps `|ψ_w⟩` onto `|1…1⟩`; a multi-controlled
//! X then copies the `|1…1⟩` component onto an ancilla (qubit `n`). The
//! ancilla reads 1 with probability `|⟨ψ_w|ψ_i⟩|² = ((Σ_j i_j w_j) / m)²`.

use serde::{Deserialize, Serialize};

use crate::statevector::{Circuit, GateOp, StateVector};
use crate::{Error, Result};

/// Largest data-qubit count: `2^6 = 64` bits is the widest value a `u64`
/// holds.
pub const MAX_DATA_QUBITS: usize = 6;

pub const DEFAULT_SHOTS: u64 = 8192;

/// Bits per encoded value, `m = 2^n`.
pub fn bit_width(n: usize) -> usize {
    1 << n
}

/// Largest encodable value, `2^m - 1`.
pub fn max_value(n: usize) -> u64 {
    let m = bit_width(n);
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

/// Bitwise complement over the `m`-bit width.
pub fn complement(value: u64, n: usize) -> u64 {
    !value & max_value(n)
}

pub fn check_n(n: usize) -> Result<()> {
    if (1..=MAX_DATA_QUBITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::QubitCount {
            requested: n,
            min: 1,
            max: MAX_DATA_QUBITS,
        })
    }
}

pub(crate) fn check_value(role: &'static str, value: u64, n: usize) -> Result<()> {
    check_n(n)?;
    let max = max_value(n);
    if value > max {
        Err(Error::ValueOutOfRange {
            role,
            value,
            n,
            max,
        })
    } else {
        Ok(())
    }
}

/// The ±1 encoding of an `m`-bit value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignVector {
    n: usize,
    signs: Vec<i8>,
    value: u64,
}

impl SignVector {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Σ_j a_j b_j, an integer in `[-m, m]`.
    pub fn dot(&self, other: &SignVector) -> i64 {
        self.signs
            .iter()
            .zip(&other.signs)
            .map(|(&a, &b)| i64::from(a) * i64::from(b))
            .sum()
    }
}

/// MSB-first expansion of `value` into `m` bits, mapped 1 → −1, 0 → +1.
pub fn encode_value(value: u64, n: usize) -> Result<SignVector> {
    check_value("value", value, n)?;
    let m = bit_width(n);
    let signs = (0..m)
        .map(|j| {
            if (value >> (m - 1 - j)) & 1 == 1 {
                -1
            } else {
                1
            }
        })
        .collect();
    Ok(SignVector { n, signs, value })
}

/// Diagonal circuit on `n` qubits with entry `signs[j]` on `|j⟩`.
///
/// Each negative entry becomes one MCZ over all `n` qubits, conjugated by X on
/// the qubits whose bit in `j` is 0 so that it fires on `|j⟩` alone.
pub fn build_sign_oracle(sv: &SignVector) -> Result<Circuit> {
    let n = sv.n;
    let mut circuit = Circuit::new(n)?;
    let all: Vec<usize> = (0..n).collect();
    for (j, _) in sv.signs.iter().enumerate().filter(|(_, &s)| s < 0) {
        let zeros: Vec<usize> = (0..n).filter(|q| (j >> (n - 1 - q)) & 1 == 0).collect();
        for &q in &zeros {
            circuit.push(GateOp::X(q))?;
        }
        circuit.push(GateOp::Mcz(all.clone()))?;
        for &q in &zeros {
            circuit.push(GateOp::X(q))?;
        }
    }
    Ok(circuit)
}

/// `H^⊗n` followed by the sign oracle of `value`; prepares `|ψ_i⟩` from
/// `|0…0⟩`.
pub fn build_input_prep(value: u64, n: usize) -> Result<Circuit> {
    check_value("input", value, n)?;
    let mut circuit = Circuit::new(n)?;
    for q in 0..n {
        circuit.push(GateOp::H(q))?;
    }
    circuit.append(&build_sign_oracle(&encode_value(value, n)?)?)?;
    Ok(circuit)
}

/// Sign oracle of `weight`, then `H^⊗n`, then `X^⊗n`; maps `|ψ_w⟩` to
/// `|1…1⟩`.
pub fn build_weight_unprep(weight: u64, n: usize) -> Result<Circuit> {
    check_value("weight", weight, n)?;
    let mut circuit = build_sign_oracle(&encode_value(weight, n)?)?;
    for q in 0..n {
        circuit.push(GateOp::H(q))?;
    }
    for q in 0..n {
        circuit.push(GateOp::X(q))?;
    }
    Ok(circuit)
}

fn ancilla_readout(n: usize) -> GateOp {
    GateOp::Mcx {
        controls: (0..n).collect(),
        target: n,
    }
}

/// Full perceptron circuit on `n + 1` qubits; the ancilla is qubit `n`.
pub fn assemble_perceptron_circuit(input: u64, weight: u64, n: usize) -> Result<Circuit> {
    let mut circuit = Circuit::new(n + 1)?;
    circuit.append(&build_input_prep(input, n)?)?;
    circuit.append(&build_weight_unprep(weight, n)?)?;
    circuit.push(ancilla_readout(n))?;
    Ok(circuit)
}

/// `((Σ_j i_j w_j) / m)²`, with the dot product in integers and a single
/// division at the end.
pub fn closed_form_probability(input: u64, weight: u64, n: usize) -> Result<f64> {
    check_value("input", input, n)?;
    check_value("weight", weight, n)?;
    let m = bit_width(n) as i64;
    // Each mismatched bit contributes −1, each matched bit +1.
    let mismatched = i64::from((input ^ weight).count_ones());
    let dot = m - 2 * mismatched;
    Ok((dot * dot) as f64 / (m * m) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureMode {
    /// Read the ancilla probability straight off the state vector.
    Exact,
    /// Estimate it from `shots` simulated measurements.
    Sampled,
}

impl std::fmt::Display for MeasureMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MeasureMode::Exact => "exact",
            MeasureMode::Sampled => "sampled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerceptronConfig {
    pub n: usize,
    pub shots: u64,
    pub mode: MeasureMode,
    pub seed: u64,
}

impl PerceptronConfig {
    pub fn exact(n: usize) -> Self {
        Self {
            n,
            shots: DEFAULT_SHOTS,
            mode: MeasureMode::Exact,
            seed: 0,
        }
    }

    pub fn sampled(n: usize, shots: u64, seed: u64) -> Self {
        Self {
            n,
            shots,
            mode: MeasureMode::Sampled,
            seed,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        check_n(self.n)?;
        if self.mode == MeasureMode::Sampled && self.shots == 0 {
            return Err(Error::ZeroShots);
        }
        Ok(())
    }
}

/// A perceptron with a fixed weight. The weight half of the circuit is built
/// once and reused for every input, which is what exhaustive workflows want.
#[derive(Debug, Clone)]
pub struct Perceptron {
    config: PerceptronConfig,
    weight: u64,
    weight_unprep: Circuit,
}

impl Perceptron {
    pub fn new(weight: u64, config: PerceptronConfig) -> Result<Self> {
        config.validate()?;
        let weight_unprep = build_weight_unprep(weight, config.n)?;
        Ok(Self {
            config,
            weight,
            weight_unprep,
        })
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub fn config(&self) -> &PerceptronConfig {
        &self.config
    }

    /// Final state of the assembled circuit for `input`.
    pub fn final_state(&self, input: u64) -> Result<StateVector> {
        let n = self.config.n;
        let mut circuit = Circuit::new(n + 1)?;
        circuit.append(&build_input_prep(input, n)?)?;
        circuit.append(&self.weight_unprep)?;
        circuit.push(ancilla_readout(n))?;
        let mut state = StateVector::zero(n + 1)?;
        state.run(&circuit)?;
        Ok(state)
    }

    /// Probability of the ancilla reading 1, exact or sampled with the
    /// configured seed.
    pub fn measure(&self, input: u64) -> Result<f64> {
        self.measure_with_seed(input, self.config.seed)
    }

    pub fn measure_with_seed(&self, input: u64, seed: u64) -> Result<f64> {
        let state = self.final_state(input)?;
        let ancilla = self.config.n;
        match self.config.mode {
            MeasureMode::Exact => state.prob_one(ancilla),
            MeasureMode::Sampled => state.sample_one(ancilla, self.config.shots, seed),
        }
    }
}

/// Probability of the ancilla reading 1 for `(input, weight)`.
pub fn measure(input: u64, weight: u64, config: &PerceptronConfig) -> Result<f64> {
    check_value("input", input, config.n)?;
    Perceptron::new(weight, *config)?.measure(input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::GateKind;

    /// Independent oracle: dot product straight from the bit strings.
    fn brute_probability(i: u64, w: u64, n: usize) -> f64 {
        let m = bit_width(n);
        let sign = |v: u64, j: usize| {
            if (v >> (m - 1 - j)) & 1 == 1 {
                -1i64
            } else {
                1
            }
        };
        let dot: i64 = (0..m).map(|j| sign(i, j) * sign(w, j)).sum();
        let amp = dot as f64 / m as f64;
        amp * amp
    }

    fn amps_re(circuit: &Circuit) -> Vec<f64> {
        let mut s = StateVector::zero(circuit.num_qubits()).unwrap();
        s.run(circuit).unwrap();
        s.amplitudes()
            .iter()
            .map(|a| {
                assert!(a.im.abs() < 1e-12);
                a.re
            })
            .collect()
    }

    #[test]
    fn encoding_examples() {
        assert_eq!(encode_value(12, 2).unwrap().signs(), &[-1, -1, 1, 1]);
        assert_eq!(encode_value(0, 2).unwrap().signs(), &[1, 1, 1, 1]);
        assert_eq!(encode_value(15, 2).unwrap().signs(), &[-1, -1, -1, -1]);
        assert!(matches!(
            encode_value(16, 2),
            Err(Error::ValueOutOfRange { value: 16, .. })
        ));
        assert!(encode_value(0, 0).is_err());
    }

    #[test]
    fn widest_encoding() {
        assert_eq!(max_value(6), u64::MAX);
        let sv = encode_value(u64::MAX, 6).unwrap();
        assert_eq!(sv.signs().len(), 64);
        assert!(sv.signs().iter().all(|&s| s == -1));
        assert_eq!(complement(0, 6), u64::MAX);
        assert_eq!(complement(12, 2), 3);
    }

    #[test]
    fn sign_oracle_of_zero_is_empty() {
        assert!(build_sign_oracle(&encode_value(0, 3).unwrap())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn sign_oracle_amplitudes_exhaustive_n2() {
        for v in 0..16 {
            let sv = encode_value(v, 2).unwrap();
            let mut circuit = Circuit::new(2).unwrap();
            circuit.push(GateOp::H(0)).unwrap();
            circuit.push(GateOp::H(1)).unwrap();
            circuit.append(&build_sign_oracle(&sv).unwrap()).unwrap();
            let amps = amps_re(&circuit);
            for (a, &s) in amps.iter().zip(sv.signs()) {
                assert!((a - f64::from(s) / 2.0).abs() < 1e-12, "value {v}");
            }
        }
        let all_neg = amps_re(&build_input_prep(15, 2).unwrap());
        assert!(all_neg.iter().all(|a| (a + 0.5).abs() < 1e-12));
    }

    #[test]
    fn input_prep_examples() {
        let uniform = amps_re(&build_input_prep(0, 2).unwrap());
        assert!(uniform.iter().all(|a| (a - 0.5).abs() < 1e-12));
        let twelve = amps_re(&build_input_prep(12, 2).unwrap());
        for (a, e) in twelve.iter().zip([-0.5, -0.5, 0.5, 0.5]) {
            assert!((a - e).abs() < 1e-12);
        }
        let eight = amps_re(&build_input_prep(0, 3).unwrap());
        assert!(eight
            .iter()
            .all(|a| (a - 8f64.sqrt().recip()).abs() < 1e-12));
        assert!(build_input_prep(16, 2).is_err());
    }

    #[test]
    fn weight_unprep_of_zero_is_h_then_x() {
        let circuit = build_weight_unprep(0, 2).unwrap();
        assert_eq!(
            circuit.ops(),
            &[GateOp::H(0), GateOp::H(1), GateOp::X(0), GateOp::X(1)]
        );
    }

    #[test]
    fn unprep_undoes_prep_for_every_weight() {
        for w in 0..16 {
            let mut circuit = build_input_prep(w, 2).unwrap();
            circuit.append(&build_weight_unprep(w, 2).unwrap()).unwrap();
            let amps = amps_re(&circuit);
            assert!((amps[3].abs() - 1.0).abs() < 1e-12, "weight {w}");
        }
    }

    #[test]
    fn all_ones_amplitude_is_normalized_dot() {
        for i in 0..16 {
            for w in 0..16 {
                let mut circuit = build_input_prep(i, 2).unwrap();
                circuit.append(&build_weight_unprep(w, 2).unwrap()).unwrap();
                let amp = amps_re(&circuit)[3];
                let sign = |v: u64, j: usize| if (v >> (3 - j)) & 1 == 1 { -1.0 } else { 1.0 };
                let dot: f64 = (0..4).map(|j| sign(i, j) * sign(w, j)).sum();
                // Equal up to a sign that depends only on the weight.
                assert!((amp.abs() - (dot / 4.0).abs()).abs() < 1e-12, "({i}, {w})");
            }
        }
    }

    #[test]
    fn assembled_circuit_examples() {
        let exact = PerceptronConfig::exact(2);
        assert!((measure(5, 5, &exact).unwrap() - 1.0).abs() < 1e-12);
        assert!((measure(0, 1, &exact).unwrap() - 0.25).abs() < 1e-12);
        assert!(measure(0, 3, &exact).unwrap().abs() < 1e-12);
        let circuit = assemble_perceptron_circuit(0, 1, 2).unwrap();
        assert_eq!(circuit.num_qubits(), 3);
        assert_eq!(circuit.ops().last().unwrap().kind(), GateKind::Mcx);
    }

    #[test]
    fn assembled_circuit_matches_perceptron_state() {
        let circuit = assemble_perceptron_circuit(9, 4, 2).unwrap();
        let mut direct = StateVector::zero(3).unwrap();
        direct.run(&circuit).unwrap();
        let p = Perceptron::new(4, PerceptronConfig::exact(2)).unwrap();
        assert_eq!(direct, p.final_state(9).unwrap());
    }

    #[test]
    fn closed_form_examples() {
        for i in 0..16 {
            assert_eq!(closed_form_probability(i, i, 2).unwrap(), 1.0);
        }
        assert_eq!(closed_form_probability(0, 15, 2).unwrap(), 1.0);
        assert_eq!(closed_form_probability(0, 1, 2).unwrap(), 0.25);
        assert!(closed_form_probability(0, 99, 2).is_err());
    }

    #[test]
    fn closed_form_matches_brute_force() {
        for n in 1..=3 {
            for i in 0..=max_value(n).min(255) {
                for w in (0..=max_value(n)).step_by(7) {
                    assert_eq!(
                        closed_form_probability(i, w, n).unwrap(),
                        brute_probability(i, w, n)
                    );
                }
            }
        }
    }

    #[test]
    fn sampled_measurement() {
        let cfg = PerceptronConfig::sampled(2, 500, 11);
        for seed in 0..10 {
            assert_eq!(measure(0, 3, &cfg.with_seed(seed)).unwrap(), 0.0);
        }
        let zero_shots = PerceptronConfig::sampled(2, 0, 1);
        assert!(matches!(measure(0, 1, &zero_shots), Err(Error::ZeroShots)));
        // Exact mode ignores the shot count.
        assert!(measure(
            0,
            1,
            &PerceptronConfig {
                shots: 0,
                ..PerceptronConfig::exact(2)
            }
        )
        .is_ok());
    }

    #[test]
    fn sampled_estimate_near_quarter() {
        // σ = sqrt(0.25 · 0.75 / 1e5) ≈ 0.00137; 0.01 is over 7σ.
        let cfg = PerceptronConfig::sampled(2, 100_000, 0);
        let p = Perceptron::new(1, cfg).unwrap();
        let within = (0..100)
            .filter(|&s| (p.measure_with_seed(0, s).unwrap() - 0.25).abs() < 0.01)
            .count();
        assert!(within >= 99, "{within}/100");
    }

    #[test]
    fn oracle_gate_count_bound() {
        for n in 1..=4 {
            let m = bit_width(n);
            for v in [0, 1, max_value(n), max_value(n) / 3, 626 & max_value(n)] {
                let c = build_sign_oracle(&encode_value(v, n).unwrap()).unwrap();
                assert!(c.count(GateKind::Mcz) <= m);
                assert!(c.count(GateKind::X) <= 2 * m * n);
                assert_eq!(c.count(GateKind::Mcz), v.count_ones() as usize);
            }
        }
    }
}
