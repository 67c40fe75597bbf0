//! Dense state-vector simulator.
//!
//! Basis index convention: qubit 0 is the most significant bit of the
//! amplitude index, so on `q` qubits qubit `k` owns bit `q - 1 - k`. This
//! lines basis states up with MSB-first bit strings (`|0011⟩` is index 3).

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::distr::{Bernoulli, Distribution};

use crate::rng::{seeded_rng, STREAM_INIT};
use crate::{Error, Result};

pub const MIN_QUBITS: usize = 1;
pub const MAX_QUBITS: usize = 24;

/// Tolerance used when accepting externally supplied amplitudes.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    Mcz,
    Mcx,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateOp {
    /// Hadamard on one qubit.
    H(usize),
    /// Bit flip on one qubit.
    X(usize),
    /// Phase flip of every basis state in which all listed qubits are 1.
    /// The listed qubits play symmetric roles.
    Mcz(Vec<usize>),
    /// Bit flip of `target` on basis states where every control is 1.
    Mcx { controls: Vec<usize>, target: usize },
}

impl GateOp {
    pub fn kind(&self) -> GateKind {
        match self {
            GateOp::H(_) => GateKind::H,
            GateOp::X(_) => GateKind::X,
            GateOp::Mcz(_) => GateKind::Mcz,
            GateOp::Mcx { .. } => GateKind::Mcx,
        }
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let check = |index: usize| {
            if index < num_qubits {
                Ok(())
            } else {
                Err(Error::QubitIndex { index, num_qubits })
            }
        };
        match self {
            GateOp::H(q) | GateOp::X(q) => check(*q),
            GateOp::Mcz(qubits) => {
                if qubits.is_empty() {
                    return Err(Error::InvalidGate("MCZ needs at least one qubit".into()));
                }
                qubits.iter().try_for_each(|&q| check(q))?;
                ensure_distinct(qubits)
            }
            GateOp::Mcx { controls, target } => {
                check(*target)?;
                controls.iter().try_for_each(|&q| check(q))?;
                ensure_distinct(controls)?;
                if controls.contains(target) {
                    return Err(Error::InvalidGate(format!(
                        "MCX target {target} is also a control"
                    )));
                }
                Ok(())
            }
        }
    }
}

fn ensure_distinct(qubits: &[usize]) -> Result<()> {
    for (i, q) in qubits.iter().enumerate() {
        if qubits[..i].contains(q) {
            return Err(Error::InvalidGate(format!("qubit {q} listed twice")));
        }
    }
    Ok(())
}

/// An ordered gate list on a fixed number of qubits. Gates are validated on
/// insertion, so every `Circuit` is valid for its width.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    num_qubits: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        Ok(Self {
            num_qubits,
            ops: Vec::new(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.num_qubits)?;
        self.ops.push(op);
        Ok(())
    }

    /// Appends every gate of `other`, which may be narrower than `self`.
    /// Qubit indices are kept as-is.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits > self.num_qubits {
            return Err(Error::QubitMismatch {
                circuit: other.num_qubits,
                state: self.num_qubits,
            });
        }
        self.ops.extend_from_slice(&other.ops);
        Ok(())
    }

    /// Number of gates of the given kind.
    pub fn count(&self, kind: GateKind) -> usize {
        self.ops.iter().filter(|op| op.kind() == kind).count()
    }
}

fn check_qubit_count(num_qubits: usize) -> Result<()> {
    if (MIN_QUBITS..=MAX_QUBITS).contains(&num_qubits) {
        Ok(())
    } else {
        Err(Error::QubitCount {
            requested: num_qubits,
            min: MIN_QUBITS,
            max: MAX_QUBITS,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps caller-supplied amplitudes. The length must be a power of two
    /// within the supported range and the norm must be 1 within
    /// [`NORM_TOLERANCE`].
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::InvalidGate(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_qubit_count(num_qubits)?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidGate(format!("state norm {norm} is not 1")));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Σ |a_k|².
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn mask_of(&self, qubits: &[usize]) -> usize {
        qubits.iter().fold(0, |m, &q| m | self.mask(q))
    }

    pub fn apply(&mut self, op: &GateOp) -> Result<()> {
        op.validate(self.num_qubits)?;
        match op {
            GateOp::H(q) => {
                let bit = self.mask(*q);
                for k in (0..self.amplitudes.len()).filter(|k| k & bit == 0) {
                    let a = self.amplitudes[k];
                    let b = self.amplitudes[k | bit];
                    self.amplitudes[k] = (a + b) * FRAC_1_SQRT_2;
                    self.amplitudes[k | bit] = (a - b) * FRAC_1_SQRT_2;
                }
            }
            GateOp::X(q) => {
                let bit = self.mask(*q);
                for k in (0..self.amplitudes.len()).filter(|k| k & bit == 0) {
                    self.amplitudes.swap(k, k | bit);
                }
            }
            GateOp::Mcz(qubits) => {
                let mask = self.mask_of(qubits);
                for (k, a) in self.amplitudes.iter_mut().enumerate() {
                    if k & mask == mask {
                        *a = -*a;
                    }
                }
            }
            GateOp::Mcx { controls, target } => {
                let mask = self.mask_of(controls);
                let bit = self.mask(*target);
                for k in 0..self.amplitudes.len() {
                    if k & mask == mask && k & bit == 0 {
                        self.amplitudes.swap(k, k | bit);
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies every gate of `circuit` in order.
    pub fn run(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits != self.num_qubits {
            return Err(Error::QubitMismatch {
                circuit: circuit.num_qubits,
                state: self.num_qubits,
            });
        }
        // Gates were validated when pushed into the circuit.
        circuit.ops.iter().try_for_each(|op| self.apply(op))
    }

    /// Probability that measuring `qubit` yields 1.
    pub fn prob_one(&self, qubit: usize) -> Result<f64> {
        GateOp::X(qubit).validate(self.num_qubits)?;
        let bit = self.mask(qubit);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(k, _)| k & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Fraction of 1 outcomes in `shots` independent measurements of `qubit`.
    ///
    /// Each shot is a Bernoulli draw with success probability
    /// [`prob_one`](Self::prob_one) from a fresh `ChaCha8Rng` seeded with
    /// `seed`, so the result is reproducible bit for bit.
    pub fn sample_one(&self, qubit: usize, shots: u64, seed: u64) -> Result<f64> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let p = self.prob_one(qubit)?.clamp(0.0, 1.0);
        let coin = Bernoulli::new(p).expect("probability clamped to [0, 1]");
        let mut rng = seeded_rng(seed, STREAM_INIT);
        let ones = (0..shots).filter(|_| coin.sample(&mut rng)).count() as u64;
        Ok(ones as f64 / shots as f64)
    }
}

/// Runs `circuit` on `state` and returns the result.
pub fn run_circuit(circuit: &Circuit, mut state: StateVector) -> Result<StateVector> {
    state.run(circuit)?;
    Ok(state)
}
